//! Campaign runner: generate → solve end-to-end → verify, over a seeded
//! batch of instances, collecting per-run artifacts (transcripts, traces,
//! findings) so failures can be replayed from the summary alone.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::driver::{solve_end_to_end, SolveOutcome};
use crate::error::InputError;
use crate::model::{Allocation, Bundle, TypedInstance};
use crate::rational::{format_rational, parse_rational, rat, Rational};
use crate::verify::{
    check_oni_properties, check_transcript_reductions, gen_instance, verify_allocation,
    GenParams, ItemsSpec, OracleCaps, ReductionCheck,
};

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub gen: GenParams,
    pub count: usize,
    /// Verification threshold for every run.
    pub alpha: Rational,
    pub caps: OracleCaps,
    /// Oracle-check each reduction step when the drawn n is at most this.
    pub check_reductions_max_n: Option<usize>,
    /// Test hook: replace this run's allocation with empty bundles so the
    /// verifier must flag it.
    pub sabotage_run: Option<usize>,
}

impl CampaignConfig {
    pub fn from_json(v: &Value) -> Result<Self, InputError> {
        let obj = v
            .as_object()
            .ok_or_else(|| InputError::BadJson("campaign config must be an object".into()))?;
        let get_usize = |key: &str| -> Option<usize> {
            obj.get(key).and_then(Value::as_u64).map(|x| x as usize)
        };
        let range = |key: &str| -> Result<Option<(usize, usize)>, InputError> {
            match obj.get(key) {
                None => Ok(None),
                Some(Value::Array(a)) if a.len() == 2 => {
                    let lo = a[0].as_u64().ok_or_else(|| {
                        InputError::BadJson(format!("{key} bounds must be integers"))
                    })?;
                    let hi = a[1].as_u64().ok_or_else(|| {
                        InputError::BadJson(format!("{key} bounds must be integers"))
                    })?;
                    Ok(Some((lo as usize, hi as usize)))
                }
                Some(_) => Err(InputError::BadJson(format!(
                    "{key} must be a [lo, hi] array"
                ))),
            }
        };

        let types = get_usize("types")
            .ok_or_else(|| InputError::BadJson("config needs \"types\"".into()))?;
        let agents = range("agents")?
            .ok_or_else(|| InputError::BadJson("config needs \"agents\": [lo, hi]".into()))?;
        let items = match (range("items")?, range("items_per_agent")?) {
            (Some(r), None) => ItemsSpec::Absolute(r.0, r.1),
            (None, Some(r)) => ItemsSpec::PerAgent(r.0, r.1),
            (None, None) => ItemsSpec::PerAgent(1, 3),
            (Some(_), Some(_)) => {
                return Err(InputError::BadJson(
                    "give either \"items\" or \"items_per_agent\", not both".into(),
                ))
            }
        };
        let max_value = obj.get("max_value").and_then(Value::as_u64).unwrap_or(20);
        let seed = obj
            .get("seed")
            .and_then(Value::as_u64)
            .ok_or_else(|| InputError::BadJson("config needs an integer \"seed\"".into()))?;
        let count = get_usize("count")
            .ok_or_else(|| InputError::BadJson("config needs \"count\"".into()))?;
        let alpha = match obj.get("alpha") {
            Some(Value::String(s)) => parse_rational(s)?,
            Some(other) => {
                return Err(InputError::BadJson(format!(
                    "alpha must be a rational string, got {other}"
                )))
            }
            None => rat(4, 5),
        };
        let mut caps = OracleCaps::from_env();
        if let Some(cap) = get_usize("oracle_cap") {
            caps.verify = cap;
        }
        Ok(CampaignConfig {
            gen: GenParams {
                types,
                agents,
                items,
                max_value,
                seed,
            },
            count,
            alpha,
            caps,
            check_reductions_max_n: get_usize("check_reductions_max_n"),
            sabotage_run: get_usize("sabotage_run"),
        })
    }
}

/// Everything one campaign item produced.
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub instance: TypedInstance,
    pub outcome: Result<SolveOutcome, String>,
    pub verified_pass: bool,
    pub min_ratio: Option<Rational>,
    pub oni_findings: Vec<String>,
    pub reduction_checks: Vec<ReductionCheck>,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        !self.verified_pass
            || !self.oni_findings.is_empty()
            || self
                .reduction_checks
                .iter()
                .any(|c| !c.findings.is_empty())
    }
}

pub struct CampaignData {
    pub config: CampaignConfig,
    pub runs: Vec<RunRecord>,
}

pub fn run_campaign(config: &CampaignConfig) -> CampaignData {
    let mut runs = Vec::with_capacity(config.count);
    for index in 0..config.count {
        let seed = config.gen.seed.wrapping_add(index as u64);
        let params = GenParams {
            seed,
            ..config.gen
        };
        let instance = gen_instance(&params).expect("validated campaign parameters");
        let record = run_one(config, index, seed, instance);
        runs.push(record);
    }
    CampaignData {
        config: config.clone(),
        runs,
    }
}

fn run_one(
    config: &CampaignConfig,
    index: usize,
    seed: u64,
    instance: TypedInstance,
) -> RunRecord {
    let outcome = solve_end_to_end(&instance, &config.caps).map_err(|e| e.to_string());
    let mut verified_pass = false;
    let mut min_ratio = None;
    let mut oni_findings = Vec::new();
    let mut reduction_checks = Vec::new();

    if let Ok(out) = &outcome {
        let allocation = if config.sabotage_run == Some(index) {
            Allocation {
                bundles: vec![Bundle::new(); out.allocation.slots()],
                agent_types: out.allocation.agent_types.clone(),
                leftover: (1..=instance.m).collect(),
            }
        } else {
            out.allocation.clone()
        };
        match verify_allocation(&instance, &allocation, &config.alpha, &config.caps) {
            Ok(report) => {
                verified_pass = report.pass;
                min_ratio = report.min_ratio.clone();
            }
            Err(_) => verified_pass = false,
        }
        oni_findings = check_oni_properties(&out.oni_instance, &out.guarantee);
        if config
            .check_reductions_max_n
            .is_some_and(|max_n| instance.n() <= max_n)
        {
            // replay from the canonical form the pipeline actually consumed
            let canon = crate::model::canonicalize_types(&instance);
            reduction_checks = check_transcript_reductions(
                &canon,
                &out.transcript,
                &out.guarantee,
                &config.caps,
            );
        }
    }

    RunRecord {
        index,
        seed,
        instance,
        outcome,
        verified_pass,
        min_ratio,
        oni_findings,
        reduction_checks,
    }
}

impl CampaignData {
    pub fn passes(&self) -> usize {
        self.runs.iter().filter(|r| !r.failed()).count()
    }

    pub fn min_ratio(&self) -> Option<Rational> {
        self.runs
            .iter()
            .filter_map(|r| r.min_ratio.as_ref())
            .min()
            .cloned()
    }

    pub fn branch_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for run in &self.runs {
            if let Ok(out) = &run.outcome {
                *counts.entry(out.branch.name()).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn all_passed(&self) -> bool {
        self.passes() == self.runs.len()
    }

    /// Machine-readable summary; failures carry the instance and transcript
    /// inline so they can be replayed without regenerating.
    pub fn summary_json(&self) -> Value {
        let failures: Vec<Value> = self
            .runs
            .iter()
            .filter(|r| r.failed())
            .map(|r| {
                let mut entry = json!({
                    "index": r.index,
                    "seed": r.seed,
                    "instance": r.instance.to_json(),
                    "oni_findings": r.oni_findings,
                    "reduction_findings": r.reduction_checks.iter()
                        .flat_map(|c| c.findings.iter().cloned())
                        .collect::<Vec<_>>(),
                });
                match &r.outcome {
                    Ok(out) => {
                        entry["transcript"] = out.transcript.to_json();
                        if let Some(trace) = &out.case4_trace {
                            entry["case4_trace"] = trace.to_json();
                        }
                        entry["verified"] = Value::Bool(r.verified_pass);
                    }
                    Err(e) => {
                        entry["error"] = Value::String(e.clone());
                    }
                }
                entry
            })
            .collect();
        json!({
            "count": self.runs.len(),
            "passes": self.passes(),
            "alpha": format_rational(&self.config.alpha),
            "min_ratio": self.min_ratio().map(|r| format_rational(&r)).unwrap_or_else(|| "inf".into()),
            "branch_counts": self.branch_counts(),
            "reduction_steps_checked": self.runs.iter()
                .map(|r| r.reduction_checks.iter().filter(|c| !c.skipped).count())
                .sum::<usize>(),
            "failures": failures,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(types: usize, count: usize, seed: u64) -> CampaignConfig {
        CampaignConfig {
            gen: GenParams {
                types,
                agents: (types.max(2), 4),
                items: ItemsSpec::PerAgent(1, 3),
                max_value: 20,
                seed,
            },
            count,
            alpha: if types == 3 { rat(16, 21) } else { rat(4, 5) },
            caps: OracleCaps::unlimited(),
            check_reductions_max_n: Some(5),
            sabotage_run: None,
        }
    }

    #[test]
    fn small_two_type_campaign_passes() {
        let data = run_campaign(&small_config(2, 25, 42));
        assert!(data.all_passed(), "{}", data.summary_json());
        assert_eq!(data.runs.len(), 25);
    }

    #[test]
    fn small_three_type_campaign_passes() {
        let data = run_campaign(&small_config(3, 25, 43));
        assert!(data.all_passed(), "{}", data.summary_json());
    }

    #[test]
    fn sabotaged_run_is_reported() {
        let mut config = small_config(2, 5, 44);
        config.sabotage_run = Some(3);
        let data = run_campaign(&config);
        assert!(!data.all_passed());
        assert_eq!(data.passes(), 4);
        let summary = data.summary_json();
        assert_eq!(summary["failures"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn zero_count_campaign_is_empty() {
        let data = run_campaign(&small_config(2, 0, 45));
        assert_eq!(data.runs.len(), 0);
        assert!(data.all_passed());
        assert_eq!(data.summary_json()["min_ratio"], "inf");
    }

    #[test]
    fn summaries_are_reproducible() {
        let a = run_campaign(&small_config(2, 10, 46)).summary_json();
        let b = run_campaign(&small_config(2, 10, 46)).summary_json();
        assert_eq!(a, b);
    }

    #[test]
    fn config_parses_from_json() {
        let v: Value = serde_json::from_str(
            r#"{"types": 3, "agents": [3, 7], "items_per_agent": [1, 3],
                "max_value": 20, "seed": 9, "count": 4, "alpha": "16/21",
                "check_reductions_max_n": 5}"#,
        )
        .unwrap();
        let config = CampaignConfig::from_json(&v).unwrap();
        assert_eq!(config.count, 4);
        assert_eq!(config.alpha, rat(16, 21));
        assert_eq!(config.gen.agents, (3, 7));
        let data = run_campaign(&config);
        assert!(data.all_passed(), "{}", data.summary_json());
    }
}
