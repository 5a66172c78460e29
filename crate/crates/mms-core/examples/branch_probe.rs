// which generator shapes reach the deep solver branches?
use mms_core::campaign::{run_campaign, CampaignConfig};
use mms_core::rational::rat;
use mms_core::verify::{GenParams, ItemsSpec, OracleCaps};
use std::time::Instant;

fn main() {
    for (types, agents, per_agent, max_value, seed) in [
        (2usize, (2usize, 6usize), (2usize, 4usize), 20u64, 100u64),
        (2, (2, 6), (3, 4), 20, 200),
        (3, (3, 7), (2, 4), 20, 300),
        (3, (3, 7), (3, 4), 20, 400),
        (3, (3, 6), (3, 4), 6, 500),
        (3, (3, 6), (4, 4), 4, 600),
    ] {
        let config = CampaignConfig {
            gen: GenParams {
                types,
                agents,
                items: ItemsSpec::PerAgent(per_agent.0, per_agent.1),
                max_value,
                seed,
            },
            count: 400,
            alpha: if types == 3 { rat(16, 21) } else { rat(4, 5) },
            caps: OracleCaps::unlimited(),
            check_reductions_max_n: None,
            sabotage_run: None,
        };
        let t = Instant::now();
        let data = run_campaign(&config);
        println!(
            "k={types} n={agents:?} m/n={per_agent:?} v<={max_value}: {:?} passes {}/400 {:?}",
            t.elapsed(),
            data.passes(),
            data.branch_counts(),
        );
        if !data.all_passed() {
            println!("FAILURES: {}", data.summary_json()["failures"]);
        }
    }
}
