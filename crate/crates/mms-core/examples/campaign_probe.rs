// timing + branch coverage probe at acceptance scale
use mms_core::campaign::{run_campaign, CampaignConfig};
use mms_core::rational::rat;
use mms_core::verify::{GenParams, ItemsSpec, OracleCaps};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let count: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(100);

    for (types, agents, alpha, seed) in [
        (2usize, (2usize, 6usize), rat(4, 5), 1000u64),
        (3, (3, 7), rat(16, 21), 2000),
    ] {
        let config = CampaignConfig {
            gen: GenParams {
                types,
                agents,
                items: ItemsSpec::PerAgent(1, 3),
                max_value: 20,
                seed,
            },
            count,
            alpha,
            caps: OracleCaps::unlimited(),
            check_reductions_max_n: Some(5),
            sabotage_run: None,
        };
        let t = Instant::now();
        let data = run_campaign(&config);
        println!(
            "{types}-type x{count}: {:?}, passes {}/{}, branches {:?}, red-steps {}",
            t.elapsed(),
            data.passes(),
            data.runs.len(),
            data.branch_counts(),
            data.summary_json()["reduction_steps_checked"],
        );
        if !data.all_passed() {
            println!("FAILURES: {}", data.summary_json()["failures"]);
        }
    }
}
