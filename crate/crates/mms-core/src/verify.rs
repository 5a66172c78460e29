//! Independent verification: recomputes every agent's MMS with the exact
//! oracle and checks the guarantee, plus structural checks for pipeline
//! outputs (ONI properties, reduction validity) and a seeded instance
//! generator for campaigns.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{InputError, OracleError};
use crate::model::{bundle_value, Allocation, Bundle, TypedInstance};
use crate::oracle::{mms_feasible, mms_value, DEFAULT_BRUTEFORCE_CAP};
use crate::pipeline::{order_instance, LiftStep, ReductionRule, Transcript};
use crate::rational::{format_rational, Rational};

/// Size limits for oracle-backed verification. Campaigns stay fast with the
/// defaults; `MMS_ORACLE_CAP` (or an explicit config) raises them.
#[derive(Debug, Clone, Copy)]
pub struct OracleCaps {
    /// Largest m for which verification recomputes MMS values.
    pub verify: usize,
    /// Largest m for the naive cross-check oracle.
    pub bruteforce: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            verify: 14,
            bruteforce: DEFAULT_BRUTEFORCE_CAP,
        }
    }
}

impl OracleCaps {
    /// Default caps with `MMS_ORACLE_CAP` applied to the verification cap.
    pub fn from_env() -> Self {
        let mut caps = OracleCaps::default();
        if let Ok(s) = std::env::var("MMS_ORACLE_CAP") {
            if let Ok(v) = s.trim().parse::<usize>() {
                caps.verify = v;
            }
        }
        caps
    }

    pub fn unlimited() -> Self {
        OracleCaps {
            verify: usize::MAX,
            bruteforce: DEFAULT_BRUTEFORCE_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AgentReport {
    pub agent_type: usize,
    pub bundle_value: Rational,
    pub mms: Rational,
    /// `None` when the agent's MMS is 0 (the guarantee is vacuous).
    pub ratio: Option<Rational>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub agents: Vec<AgentReport>,
    pub threshold: Rational,
    pub min_ratio: Option<Rational>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn ratio_strings(&self) -> Vec<String> {
        self.agents
            .iter()
            .map(|a| match &a.ratio {
                Some(r) => format_rational(r),
                None => "inf".to_string(),
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "threshold": format_rational(&self.threshold),
            "pass": self.pass,
            "min_ratio": self.min_ratio.as_ref().map(|r| format_rational(r)).unwrap_or_else(|| "inf".into()),
            "agents": self.agents.iter().map(|a| json!({
                "type": a.agent_type,
                "bundle_value": format_rational(&a.bundle_value),
                "mms": format_rational(&a.mms),
                "ratio": a.ratio.as_ref().map(|r| format_rational(r)).unwrap_or_else(|| "inf".into()),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Recomputes each agent's MMS on the original instance and compares each
/// bundle against `alpha · MMS` exactly. Solver-independent: shares only the
/// data model and the oracle.
pub fn verify_allocation(
    instance: &TypedInstance,
    allocation: &Allocation,
    alpha: &Rational,
    caps: &OracleCaps,
) -> Result<VerificationReport, InputError> {
    allocation.validate_against(instance)?;
    if instance.m > caps.verify {
        return Err(InputError::BadInstance(format!(
            "instance has {} items, above the verification oracle cap of {} \
             (raise MMS_ORACLE_CAP to verify anyway)",
            instance.m, caps.verify
        )));
    }
    let n = instance.n();
    let mms_per_type: Vec<Rational> = instance
        .valuations
        .iter()
        .map(|v| mms_value(v, n).expect("validated instance"))
        .collect();

    let mut agents = Vec::with_capacity(allocation.slots());
    let mut pass = true;
    let mut min_ratio: Option<Rational> = None;
    for (slot, bundle) in allocation.bundles.iter().enumerate() {
        let t = allocation.agent_types[slot];
        let value = bundle_value(&instance.valuations[t], bundle)?;
        let mms = mms_per_type[t].clone();
        let ratio = if mms.is_zero() {
            None
        } else {
            let r = &value / &mms;
            if value < alpha * &mms {
                pass = false;
            }
            if min_ratio.as_ref().is_none_or(|m| &r < m) {
                min_ratio = Some(r.clone());
            }
            Some(r)
        };
        agents.push(AgentReport {
            agent_type: t,
            bundle_value: value,
            mms,
            ratio,
        });
    }
    Ok(VerificationReport {
        agents,
        threshold: alpha.clone(),
        min_ratio,
        pass,
    })
}

/// Structural and oracle checks for a finished ONI instance. Returns one
/// finding string per violation; empty means pass.
pub fn check_oni_properties(instance: &TypedInstance, alpha: &Rational) -> Vec<String> {
    let mut findings = Vec::new();
    if instance.k() == 0 {
        return findings;
    }
    let n = instance.n();
    let one = Rational::one();
    if !instance.is_ordered() {
        findings.push("instance is not ordered".into());
    }
    if instance.m < 2 * n {
        findings.push(format!("m = {} < 2n = {}", instance.m, 2 * n));
    }
    for (t, values) in instance.valuations.iter().enumerate() {
        // MMS = 1 exactly: the total pins MMS ≤ total/n, and a partition
        // with minimum ≥ 1 pins MMS ≥ 1. Splitting the check this way
        // avoids the expensive infeasibility proof at 1 + ε.
        let total: Rational = values.iter().fold(Rational::zero(), |acc, v| acc + v);
        let mms = if total == Rational::from_integer(n.into())
            && mms_feasible(values, n, &Rational::one()).expect("non-negative values")
        {
            Rational::one()
        } else {
            mms_value(values, n).expect("non-negative values")
        };
        if !mms.is_one() {
            findings.push(format!(
                "type {t} has MMS {} instead of 1",
                format_rational(&mms)
            ));
        }
        // reduction rules must not fire
        let s1 = (instance.m >= 1).then(|| Bundle::from_ids([1]));
        let s2 = (instance.m >= n + 1).then(|| Bundle::from_ids([n, n + 1]));
        let s3 = (instance.m >= 2 * n + 1)
            .then(|| Bundle::from_ids([2 * n - 1, 2 * n, 2 * n + 1]));
        for (rule, bundle) in [("R1", s1), ("R2", s2), ("R3", s3)] {
            if let Some(b) = bundle {
                if b.value(values) >= alpha * &mms {
                    findings.push(format!("{rule} fires for type {t}"));
                }
            }
        }
        // item class bounds: v < α·MMS/k for items past (k−1)·n
        for (id, v) in values.iter().enumerate().map(|(i, v)| (i + 1, v)) {
            let class_k = if id <= n {
                1
            } else if id <= 2 * n {
                2
            } else {
                3
            };
            let bound = alpha * &mms / Rational::from_integer(class_k.into());
            if v >= &bound {
                findings.push(format!(
                    "type {t} item {id} worth {} breaches the class bound {}",
                    format_rational(v),
                    format_rational(&bound)
                ));
            }
        }
        // paired bound: v(k) + v(2n−k+1) > 1 forces v(2n−k+1) ≤ 1/3, v(k) > 2/3
        for k in 1..=n {
            let mate = 2 * n - k + 1;
            if mate > instance.m {
                continue;
            }
            let sum = &values[k - 1] + &values[mate - 1];
            if sum > one {
                if values[mate - 1] > Rational::new(1.into(), 3.into()) {
                    findings.push(format!(
                        "type {t}: v({k})+v({mate}) > 1 but v({mate}) > 1/3"
                    ));
                }
                if values[k - 1] <= Rational::new(2.into(), 3.into()) {
                    findings.push(format!(
                        "type {t}: v({k})+v({mate}) > 1 but v({k}) <= 2/3"
                    ));
                }
            }
        }
    }
    findings
}

/// Oracle check of both validity conditions for one reduction step.
pub fn check_reduction_validity(
    pre: &TypedInstance,
    step: &LiftStep,
    post: &TypedInstance,
    alpha: &Rational,
    caps: &OracleCaps,
) -> Result<Vec<String>, OracleError> {
    let LiftStep::Reduce {
        rule,
        receiver_type,
        items,
        type_removed,
        ..
    } = step
    else {
        return Ok(vec!["not a reduction step".into()]);
    };
    if pre.m > caps.verify {
        return Err(OracleError::CapExceeded {
            m: pre.m,
            cap: caps.verify,
        });
    }
    let mut findings = Vec::new();
    let n_pre = pre.n();
    let receiver_mms = mms_value(&pre.valuations[*receiver_type], n_pre)?;
    let received = items.value(&pre.valuations[*receiver_type]);
    if received < alpha * &receiver_mms {
        findings.push(format!(
            "{} gave type {receiver_type} a bundle worth {} < alpha * MMS = {}",
            rule.name(),
            format_rational(&received),
            format_rational(&(alpha * &receiver_mms)),
        ));
    }
    let n_post = post.n();
    for u in 0..post.k() {
        let pre_u = if *type_removed && u >= *receiver_type {
            u + 1
        } else {
            u
        };
        let before = mms_value(&pre.valuations[pre_u], n_pre)?;
        let after = mms_value(&post.valuations[u], n_post)?;
        if after < before {
            findings.push(format!(
                "survivor type {pre_u}: MMS dropped from {} to {}",
                format_rational(&before),
                format_rational(&after)
            ));
        }
    }
    Ok(findings)
}

/// Outcome of checking one transcript reduction: findings, or a skip notice
/// when the instance exceeds the oracle cap.
#[derive(Debug, Clone)]
pub struct ReductionCheck {
    pub step_index: usize,
    pub rule: ReductionRule,
    pub findings: Vec<String>,
    pub skipped: bool,
}

/// Replays a transcript from the original instance and oracle-checks every
/// reduction step against the instance it actually fired on.
pub fn check_transcript_reductions(
    original: &TypedInstance,
    transcript: &Transcript,
    alpha: &Rational,
    caps: &OracleCaps,
) -> Vec<ReductionCheck> {
    let mut checks = Vec::new();
    let mut cur = original.clone();
    for (idx, step) in transcript.steps.iter().enumerate() {
        match step {
            LiftStep::Order { .. } => {
                cur = order_instance(&cur).0;
            }
            LiftStep::ZeroMms { type_index, .. } => {
                cur.type_sizes.remove(*type_index);
                cur.valuations.remove(*type_index);
            }
            LiftStep::Reduce {
                rule,
                receiver_type,
                items,
                type_removed,
                ..
            } => {
                let keep: Vec<usize> =
                    (1..=cur.m).filter(|id| !items.contains(*id)).collect();
                let mut post = TypedInstance {
                    m: keep.len(),
                    type_sizes: cur.type_sizes.clone(),
                    valuations: cur
                        .valuations
                        .iter()
                        .map(|v| keep.iter().map(|&id| v[id - 1].clone()).collect())
                        .collect(),
                };
                post.type_sizes[*receiver_type] -= 1;
                if *type_removed {
                    post.type_sizes.remove(*receiver_type);
                    post.valuations.remove(*receiver_type);
                }
                let check = match check_reduction_validity(&cur, step, &post, alpha, caps) {
                    Ok(findings) => ReductionCheck {
                        step_index: idx,
                        rule: *rule,
                        findings,
                        skipped: false,
                    },
                    Err(_) => ReductionCheck {
                        step_index: idx,
                        rule: *rule,
                        findings: Vec::new(),
                        skipped: true,
                    },
                };
                checks.push(check);
                cur = post;
            }
            LiftStep::Normalize { .. } => break,
        }
    }
    checks
}

// ── instance generation ──────────────────────────────────────────────────────

/// How the item count relates to the drawn agent count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemsSpec {
    Absolute(usize, usize),
    PerAgent(usize, usize),
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub types: usize,
    /// Inclusive range for the total agent count.
    pub agents: (usize, usize),
    pub items: ItemsSpec,
    /// Values are drawn uniformly from `[0, max_value]`.
    pub max_value: u64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), InputError> {
        if self.types == 0 {
            return Err(InputError::BadGenParams("need at least one type".into()));
        }
        if self.agents.0 > self.agents.1 || self.agents.0 < self.types {
            return Err(InputError::BadGenParams(format!(
                "agent range {:?} must be non-empty and at least the type count {}",
                self.agents, self.types
            )));
        }
        let ok = match self.items {
            ItemsSpec::Absolute(lo, hi) => lo <= hi,
            ItemsSpec::PerAgent(lo, hi) => lo <= hi,
        };
        if !ok {
            return Err(InputError::BadGenParams("empty item range".into()));
        }
        Ok(())
    }
}

/// Deterministic from the seed: draws n, m, a composition of n into the k
/// types, and uniform integer values.
pub fn gen_instance(params: &GenParams) -> Result<TypedInstance, InputError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = rng.gen_range(params.agents.0..=params.agents.1);
    let m = match params.items {
        ItemsSpec::Absolute(lo, hi) => rng.gen_range(lo..=hi),
        ItemsSpec::PerAgent(lo, hi) => rng.gen_range(lo * n..=hi * n),
    };
    let mut type_sizes = vec![1usize; params.types];
    for _ in 0..n - params.types {
        type_sizes[rng.gen_range(0..params.types)] += 1;
    }
    let valuations = (0..params.types)
        .map(|_| {
            (0..m)
                .map(|_| {
                    Rational::from_integer(rng.gen_range(0..=params.max_value).into())
                })
                .collect()
        })
        .collect();
    TypedInstance::new(m, type_sizes, valuations)
}
