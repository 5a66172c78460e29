// find instances whose end-to-end solve is slow
use mms_core::driver::solve_end_to_end;
use mms_core::verify::{gen_instance, GenParams, ItemsSpec, OracleCaps};
use std::time::Instant;

fn main() {
    let caps = OracleCaps::unlimited();
    for (types, agents, per_agent, max_value, seed0) in [
        (2usize, (2usize, 6usize), (2usize, 4usize), 20u64, 100u64),
        (3, (3, 7), (2, 4), 20, 300),
    ] {
        for i in 0..400u64 {
            let params = GenParams {
                types,
                agents,
                items: ItemsSpec::PerAgent(per_agent.0, per_agent.1),
                max_value,
                seed: seed0 + i,
            };
            let inst = gen_instance(&params).unwrap();
            let t = Instant::now();
            let out = solve_end_to_end(&inst, &caps);
            let dt = t.elapsed();
            if dt.as_millis() > 300 {
                println!(
                    "SLOW k={types} seed={} n={} m={} took {:?} ok={}",
                    seed0 + i,
                    inst.n(),
                    inst.m,
                    dt,
                    out.is_ok()
                );
            }
            if dt.as_secs() > 5 {
                println!("instance: {}", inst.to_json());
                return;
            }
        }
        println!("arm k={types} done");
    }
}
