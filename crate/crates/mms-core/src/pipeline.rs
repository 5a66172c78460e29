//! The order → reduce → normalize → order pipeline that turns an arbitrary
//! instance into an ordered, normalized, totally-irreducible (ONI) one,
//! together with a transcript that lifts allocations of the transformed
//! instance back to the original while preserving the α-MMS guarantee.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{InputError, SolveError};
use crate::model::{Allocation, Bundle, TypedInstance};
use crate::oracle::{mms_exact, mms_value};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionRule {
    R1,
    R2,
    R3,
}

impl ReductionRule {
    pub fn name(self) -> &'static str {
        match self {
            ReductionRule::R1 => "R1",
            ReductionRule::R2 => "R2",
            ReductionRule::R3 => "R3",
        }
    }
}

/// One replayable pipeline step. Lifting runs the steps in reverse.
#[derive(Debug, Clone, PartialEq)]
pub enum LiftStep {
    /// Per-type permutation: `perms[t][j-1]` is the pre-order item id sitting
    /// at ordered position `j` (sorted by value descending, ties by id).
    Order { perms: Vec<Vec<usize>> },
    /// A reduction assigned `items` (pre-step ids) to one agent of
    /// `receiver_type`; the type disappears when its last agent is served.
    Reduce {
        rule: ReductionRule,
        receiver_type: usize,
        items: Bundle,
        receiver_mms: Rational,
        type_removed: bool,
        m_before: usize,
    },
    /// Per-type MMS witness and per-bundle scale factors 1/v(P_j).
    /// Item ids are unchanged; lifting is the identity.
    Normalize {
        witnesses: Vec<Vec<Bundle>>,
        scales: Vec<Vec<Rational>>,
    },
    /// A type whose MMS hit zero: all its agents take empty bundles
    /// (0 ≥ α·0) and the type leaves the instance.
    ZeroMms { type_index: usize, agents: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transcript {
    pub steps: Vec<LiftStep>,
}

impl Transcript {
    pub fn reduce_steps(&self) -> impl Iterator<Item = &LiftStep> {
        self.steps
            .iter()
            .filter(|s| matches!(s, LiftStep::Reduce { .. }))
    }

    /// The normalize step's per-type MMS witnesses, mapped through the final
    /// order step into the finished instance's item ids. In the ONI instance
    /// every one of these bundles is worth exactly 1 to its type, so callers
    /// can reuse them instead of re-deriving an MMS partition.
    pub fn final_witnesses(&self) -> Option<Vec<Vec<Bundle>>> {
        let norm_pos = self
            .steps
            .iter()
            .rposition(|s| matches!(s, LiftStep::Normalize { .. }))?;
        let LiftStep::Normalize { witnesses, .. } = &self.steps[norm_pos] else {
            unreachable!();
        };
        let LiftStep::Order { perms } = self.steps.get(norm_pos + 1)? else {
            return None;
        };
        let mapped = witnesses
            .iter()
            .zip(perms)
            .map(|(type_witness, perm)| {
                let mut pos_of = vec![0usize; perm.len() + 1];
                for (j, &g) in perm.iter().enumerate() {
                    pos_of[g] = j + 1;
                }
                type_witness
                    .iter()
                    .map(|bundle| bundle.ids().map(|g| pos_of[g]).collect())
                    .collect()
            })
            .collect();
        Some(mapped)
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| match s {
                LiftStep::Order { perms } => json!({
                    "kind": "order",
                    "perms": perms,
                }),
                LiftStep::Reduce {
                    rule,
                    receiver_type,
                    items,
                    receiver_mms,
                    type_removed,
                    m_before,
                } => json!({
                    "kind": "reduce",
                    "rule": rule.name(),
                    "type": receiver_type,
                    "items": items.to_json(),
                    "receiver_mms": format_rational(receiver_mms),
                    "type_removed": type_removed,
                    "m_before": m_before,
                }),
                LiftStep::Normalize { witnesses, scales } => json!({
                    "kind": "normalize",
                    "witnesses": witnesses
                        .iter()
                        .map(|w| w.iter().map(Bundle::to_json).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "scales": scales
                        .iter()
                        .map(|row| row.iter().map(|s| format_rational(s)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }),
                LiftStep::ZeroMms { type_index, agents } => json!({
                    "kind": "zero_mms",
                    "type": type_index,
                    "agents": agents,
                }),
            })
            .collect();
        json!({ "steps": steps })
    }
}

/// Sorts every type's values descending. The returned step records, per type,
/// the permutation from ordered position back to the input item id.
pub fn order_instance(instance: &TypedInstance) -> (TypedInstance, LiftStep) {
    let mut perms = Vec::with_capacity(instance.k());
    let mut valuations = Vec::with_capacity(instance.k());
    for values in &instance.valuations {
        let mut ids: Vec<usize> = (1..=instance.m).collect();
        ids.sort_by(|&a, &b| values[b - 1].cmp(&values[a - 1]).then(a.cmp(&b)));
        valuations.push(ids.iter().map(|&id| values[id - 1].clone()).collect());
        perms.push(ids);
    }
    let ordered = TypedInstance {
        m: instance.m,
        type_sizes: instance.type_sizes.clone(),
        valuations,
    };
    (ordered, LiftStep::Order { perms })
}

/// The bundle `S_k` a reduction rule offers, as 1-based positions of the
/// current ordered instance, or `None` when the instance is too small.
fn rule_bundle(rule: ReductionRule, n: usize, m: usize) -> Option<Bundle> {
    match rule {
        ReductionRule::R1 => (m >= 1).then(|| Bundle::from_ids([1])),
        ReductionRule::R2 => (m >= n + 1).then(|| Bundle::from_ids([n, n + 1])),
        ReductionRule::R3 => {
            (m >= 2 * n + 1).then(|| Bundle::from_ids([2 * n - 1, 2 * n, 2 * n + 1]))
        }
    }
}

fn remove_items(instance: &TypedInstance, items: &Bundle) -> TypedInstance {
    let keep: Vec<usize> = (1..=instance.m).filter(|id| !items.contains(*id)).collect();
    TypedInstance {
        m: keep.len(),
        type_sizes: instance.type_sizes.clone(),
        valuations: instance
            .valuations
            .iter()
            .map(|v| keep.iter().map(|&id| v[id - 1].clone()).collect())
            .collect(),
    }
}

fn remove_type(instance: &mut TypedInstance, t: usize) {
    instance.type_sizes.remove(t);
    instance.valuations.remove(t);
}

/// Applies R1, R2, R3 (restarting from R1 after every hit) until the instance
/// is totally-α-irreducible. Types whose MMS reaches zero are retired with
/// empty bundles. Per-type MMS values are recomputed after every change.
pub fn reduce_instance(instance: &TypedInstance, alpha: &Rational) -> (TypedInstance, Vec<LiftStep>) {
    assert!(instance.is_ordered(), "reduce requires an ordered instance");
    let mut cur = instance.clone();
    let mut steps = Vec::new();
    'outer: loop {
        if cur.k() == 0 {
            break;
        }
        let n = cur.n();
        let mms: Vec<Rational> = cur
            .valuations
            .iter()
            .map(|v| mms_value(v, n).expect("non-negative values"))
            .collect();

        if let Some(t) = mms.iter().position(|v| v.is_zero()) {
            steps.push(LiftStep::ZeroMms {
                type_index: t,
                agents: cur.type_sizes[t],
            });
            remove_type(&mut cur, t);
            continue;
        }

        for rule in [ReductionRule::R1, ReductionRule::R2, ReductionRule::R3] {
            let Some(items) = rule_bundle(rule, n, cur.m) else {
                continue;
            };
            let receiver = (0..cur.k())
                .filter(|&t| items.value(&cur.valuations[t]) >= alpha * &mms[t])
                .max_by(|&a, &b| {
                    cur.type_sizes[a]
                        .cmp(&cur.type_sizes[b])
                        .then(b.cmp(&a))
                });
            if let Some(t) = receiver {
                let m_before = cur.m;
                let mut next = remove_items(&cur, &items);
                next.type_sizes[t] -= 1;
                let type_removed = next.type_sizes[t] == 0;
                if type_removed {
                    remove_type(&mut next, t);
                }
                assert!(next.is_ordered(), "item removal must preserve order");
                steps.push(LiftStep::Reduce {
                    rule,
                    receiver_type: t,
                    items,
                    receiver_mms: mms[t].clone(),
                    type_removed,
                    m_before,
                });
                cur = next;
                continue 'outer;
            }
        }
        break;
    }
    (cur, steps)
}

/// Rescales every good by the reciprocal of its witness bundle's value, so
/// each type's MMS partition bundles are worth exactly 1.
pub fn normalize_instance(
    instance: &TypedInstance,
) -> Result<(TypedInstance, LiftStep), SolveError> {
    let n = instance.n();
    let mut witnesses = Vec::with_capacity(instance.k());
    let mut scales = Vec::with_capacity(instance.k());
    let mut valuations = Vec::with_capacity(instance.k());
    for (t, values) in instance.valuations.iter().enumerate() {
        let witness = mms_exact(values, n)?.partition;
        let mut scaled = values.clone();
        let mut row = Vec::with_capacity(witness.len());
        for bundle in &witness {
            let total = bundle.value(values);
            if total.is_zero() {
                return Err(SolveError::InvariantBreach {
                    context: "normalize".into(),
                    detail: format!("type {t} has MMS 0; caller must retire it first"),
                    dump: String::new(),
                });
            }
            let scale = total.recip();
            for id in bundle.ids() {
                scaled[id - 1] = &scaled[id - 1] * &scale;
            }
            row.push(scale);
        }
        witnesses.push(witness);
        scales.push(row);
        valuations.push(scaled);
    }
    let normalized = TypedInstance {
        m: instance.m,
        type_sizes: instance.type_sizes.clone(),
        valuations,
    };
    Ok((normalized, LiftStep::Normalize { witnesses, scales }))
}

/// Cheap structural checks on a finished ONI instance (no oracle calls; the
/// verifier's `check_oni_properties` re-proves the MMS = 1 part).
fn assert_oni_shape(instance: &TypedInstance, alpha: &Rational) -> Result<(), SolveError> {
    let breach = |detail: String| SolveError::InvariantBreach {
        context: "build_oni".into(),
        detail,
        dump: String::new(),
    };
    if instance.k() == 0 {
        return Ok(());
    }
    if !instance.is_ordered() {
        return Err(breach("output not ordered".into()));
    }
    let n = instance.n();
    if instance.m < 2 * n {
        return Err(breach(format!("m = {} < 2n = {}", instance.m, 2 * n)));
    }
    // rule irreducibility under the normalized MMS of 1
    for rule in [ReductionRule::R1, ReductionRule::R2, ReductionRule::R3] {
        if let Some(items) = rule_bundle(rule, n, instance.m) {
            for (t, values) in instance.valuations.iter().enumerate() {
                if &items.value(values) >= alpha {
                    return Err(breach(format!(
                        "{} still fires for type {t}",
                        rule.name()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// order → reduce_α → normalize → order. The second order pass is needed
/// because normalization can disrupt orderedness.
pub fn build_oni(
    instance: &TypedInstance,
    alpha: &Rational,
) -> Result<(TypedInstance, Transcript), SolveError> {
    let mut steps = Vec::new();
    let (ordered, order1) = order_instance(instance);
    steps.push(order1);
    let (reduced, reduce_steps) = reduce_instance(&ordered, alpha);
    steps.extend(reduce_steps);
    let final_instance = if reduced.k() == 0 {
        reduced
    } else {
        let (normalized, norm_step) = normalize_instance(&reduced)?;
        steps.push(norm_step);
        let (reordered, order2) = order_instance(&normalized);
        steps.push(order2);
        reordered
    };
    assert_oni_shape(&final_instance, alpha)?;
    Ok((final_instance, Transcript { steps }))
}

fn lift_order(perms: &[Vec<usize>], alloc: &Allocation) -> Result<Allocation, InputError> {
    let m = perms.first().map_or(0, Vec::len);
    let mut owner = vec![usize::MAX; m + 1];
    for (slot, bundle) in alloc.bundles.iter().enumerate() {
        for id in bundle.ids() {
            if id == 0 || id > m {
                return Err(InputError::ItemOutOfRange { id, m });
            }
            owner[id] = slot;
        }
    }
    let mut used = vec![false; m + 1];
    let mut cursors = vec![0usize; perms.len()];
    let mut bundles = vec![Bundle::new(); alloc.bundles.len()];
    // most valuable position first; the owner picks their own best remaining
    // original good (the permutation order encodes value-then-id preference)
    for pos in 1..=m {
        let slot = owner[pos];
        if slot == usize::MAX {
            continue;
        }
        let t = alloc.agent_types[slot];
        if t >= perms.len() {
            return Err(InputError::BadAllocation(format!(
                "agent type {t} outside the order step's {} types",
                perms.len()
            )));
        }
        let cursor = &mut cursors[t];
        while *cursor < m && used[perms[t][*cursor]] {
            *cursor += 1;
        }
        assert!(*cursor < m, "picker ran out of items");
        let picked = perms[t][*cursor];
        used[picked] = true;
        bundles[slot].insert(picked);
    }
    let leftover = (1..=m).filter(|&id| !used[id]).collect();
    Ok(Allocation {
        bundles,
        agent_types: alloc.agent_types.clone(),
        leftover,
    })
}

fn lift_reduce(
    items: &Bundle,
    receiver_type: usize,
    type_removed: bool,
    m_before: usize,
    alloc: &Allocation,
) -> Result<Allocation, InputError> {
    // post ids map to the pre-step ids that survived the removal
    let survivors: Vec<usize> = (1..=m_before).filter(|id| !items.contains(*id)).collect();
    let remap = |bundle: &Bundle| -> Result<Bundle, InputError> {
        bundle
            .ids()
            .map(|id| {
                survivors.get(id - 1).copied().ok_or(InputError::ItemOutOfRange {
                    id,
                    m: survivors.len(),
                })
            })
            .collect::<Result<_, _>>()
    };
    let mut lifted = Allocation {
        bundles: alloc
            .bundles
            .iter()
            .map(remap)
            .collect::<Result<Vec<_>, _>>()?,
        agent_types: alloc
            .agent_types
            .iter()
            .map(|&t| if type_removed && t >= receiver_type { t + 1 } else { t })
            .collect(),
        leftover: remap(&alloc.leftover)?,
    };
    lifted.push(receiver_type, items.clone());
    Ok(lifted)
}

fn lift_zero_mms(type_index: usize, agents: usize, alloc: &Allocation) -> Allocation {
    let mut lifted = Allocation {
        bundles: alloc.bundles.clone(),
        agent_types: alloc
            .agent_types
            .iter()
            .map(|&t| if t >= type_index { t + 1 } else { t })
            .collect(),
        leftover: alloc.leftover.clone(),
    };
    for _ in 0..agents {
        lifted.push(type_index, Bundle::new());
    }
    lifted
}

/// Replays the transcript in reverse, producing an allocation over the
/// original instance's agents and items.
pub fn lift_allocation(
    transcript: &Transcript,
    allocation: Allocation,
) -> Result<Allocation, InputError> {
    let mut alloc = allocation;
    for step in transcript.steps.iter().rev() {
        alloc = match step {
            LiftStep::Normalize { .. } => alloc,
            LiftStep::Order { perms } => lift_order(perms, &alloc)?,
            LiftStep::Reduce {
                items,
                receiver_type,
                type_removed,
                m_before,
                ..
            } => lift_reduce(items, *receiver_type, *type_removed, *m_before, &alloc)?,
            LiftStep::ZeroMms { type_index, agents } => {
                lift_zero_mms(*type_index, *agents, &alloc)
            }
        };
    }
    Ok(alloc)
}

/// True when the instance is normalized in the structural sense used by the
/// solvers: every value is already scaled (checked by the verifier against
/// the oracle; this helper only guards obvious misuse).
pub fn total_type_value(instance: &TypedInstance, t: usize) -> Rational {
    instance.valuations[t]
        .iter()
        .fold(Rational::zero(), |acc, v| acc + v)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    fn one_type(values: &[i64], agents: usize) -> TypedInstance {
        TypedInstance::new(values.len(), vec![agents], vec![ints(values)]).unwrap()
    }

    #[test]
    fn order_sorts_and_records_permutation() {
        let inst = one_type(&[3, 1, 2], 1);
        let (ordered, step) = order_instance(&inst);
        assert_eq!(ordered.valuations[0], ints(&[3, 2, 1]));
        match step {
            LiftStep::Order { perms } => assert_eq!(perms, vec![vec![1, 3, 2]]),
            _ => panic!("expected order step"),
        }
    }

    #[test]
    fn order_is_identity_on_ordered_input() {
        let inst = one_type(&[5, 4, 4, 1], 2);
        let (ordered, step) = order_instance(&inst);
        assert_eq!(ordered, inst);
        match step {
            LiftStep::Order { perms } => assert_eq!(perms, vec![vec![1, 2, 3, 4]]),
            _ => panic!(),
        }
    }

    #[test]
    fn permuted_types_merge_after_ordering() {
        let inst = TypedInstance::new(
            2,
            vec![1, 1],
            vec![ints(&[1, 2]), ints(&[2, 1])],
        )
        .unwrap();
        let (ordered, _) = order_instance(&inst);
        assert_eq!(ordered.valuations[0], ordered.valuations[1]);
        let merged = crate::model::canonicalize_types(&ordered);
        assert_eq!(merged.k(), 1);
        assert_eq!(merged.type_sizes, vec![2]);
    }

    #[test]
    fn reduce_fires_r1_on_dominant_item() {
        // MMS([10,3,3,3,3], 2) = 10, so item 1 alone reaches 4/5·10
        let inst = one_type(&[10, 3, 3, 3, 3], 2);
        let (reduced, steps) = reduce_instance(&inst, &rat(4, 5));
        assert_eq!(steps.len(), 1);
        match &steps[0] {
            LiftStep::Reduce {
                rule,
                items,
                receiver_mms,
                type_removed,
                ..
            } => {
                assert_eq!(*rule, ReductionRule::R1);
                assert_eq!(items, &Bundle::from_ids([1]));
                assert_eq!(receiver_mms, &rat_int(10));
                assert!(!type_removed);
            }
            other => panic!("expected a reduce step, got {other:?}"),
        }
        assert_eq!(reduced.type_sizes, vec![1]);
        assert_eq!(reduced.valuations[0], ints(&[3, 3, 3, 3]));
        assert_eq!(mms_value(&reduced.valuations[0], 1).unwrap(), rat_int(12));
    }

    #[test]
    fn reduce_leaves_irreducible_instances_alone() {
        let values = vec![rat(1, 4); 4];
        let inst = TypedInstance::new(4, vec![1], vec![values]).unwrap();
        let (reduced, steps) = reduce_instance(&inst, &rat(4, 5));
        assert!(steps.is_empty());
        assert_eq!(reduced, inst);
    }

    #[test]
    fn reduce_single_agent_takes_everything_when_one_item() {
        let inst = one_type(&[1], 1);
        let (reduced, steps) = reduce_instance(&inst, &rat(4, 5));
        assert_eq!(steps.len(), 1);
        assert_eq!(reduced.k(), 0);
        assert_eq!(reduced.m, 0);
    }

    #[test]
    fn zero_mms_type_is_retired_with_empty_bundles() {
        // two agents, one item: MMS over 2 bundles is 0
        let inst = one_type(&[5], 2);
        let (reduced, steps) = reduce_instance(&inst, &rat(4, 5));
        assert_eq!(steps.len(), 1);
        assert!(matches!(
            steps[0],
            LiftStep::ZeroMms {
                type_index: 0,
                agents: 2
            }
        ));
        assert_eq!(reduced.k(), 0);
        assert_eq!(reduced.m, 1); // the item stays behind as leftover
    }

    #[test]
    fn normalize_rescales_witness_bundles_to_one() {
        // MMS([2,1,1], 2) = 2 with witness {1},{2,3}
        let inst = one_type(&[2, 1, 1], 2);
        let (normalized, step) = normalize_instance(&inst).unwrap();
        assert_eq!(
            normalized.valuations[0],
            vec![rat_int(1), rat(1, 2), rat(1, 2)]
        );
        match step {
            LiftStep::Normalize { witnesses, scales } => {
                assert_eq!(
                    witnesses[0],
                    vec![Bundle::from_ids([1]), Bundle::from_ids([2, 3])]
                );
                assert_eq!(scales[0], vec![rat(1, 2), rat(1, 2)]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn normalize_is_identity_on_normalized_input() {
        let values = vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)];
        let inst = TypedInstance::new(4, vec![2], vec![values.clone()]).unwrap();
        let (normalized, _) = normalize_instance(&inst).unwrap();
        assert_eq!(normalized.valuations[0], values);
    }

    #[test]
    fn build_oni_on_oni_instance_is_three_identity_steps() {
        let values = vec![rat(1, 4); 4];
        let inst = TypedInstance::new(4, vec![1], vec![values]).unwrap();
        let (oni, transcript) = build_oni(&inst, &rat(4, 5)).unwrap();
        assert_eq!(oni, inst);
        assert_eq!(transcript.steps.len(), 3);
        assert!(matches!(transcript.steps[0], LiftStep::Order { .. }));
        assert!(matches!(transcript.steps[1], LiftStep::Normalize { .. }));
        assert!(matches!(transcript.steps[2], LiftStep::Order { .. }));
    }

    #[test]
    fn build_oni_composes_reduction_and_normalization() {
        let inst = one_type(&[10, 3, 3, 3, 3], 2);
        let (oni, transcript) = build_oni(&inst, &rat(4, 5)).unwrap();
        assert_eq!(transcript.reduce_steps().count(), 1);
        assert_eq!(oni.type_sizes, vec![1]);
        assert_eq!(oni.valuations[0], vec![rat(1, 4); 4]);
        assert_eq!(total_type_value(&oni, 0), rat_int(1));
    }

    #[test]
    fn lift_order_uses_the_picking_procedure() {
        let alloc = Allocation {
            bundles: vec![Bundle::from_ids([1])],
            agent_types: vec![0],
            leftover: Bundle::from_ids([2, 3]),
        };
        let step = Transcript {
            steps: vec![LiftStep::Order {
                perms: vec![vec![2, 1, 3]],
            }],
        };
        let lifted = lift_allocation(&step, alloc).unwrap();
        assert_eq!(lifted.bundles[0], Bundle::from_ids([2]));
        assert_eq!(lifted.leftover, Bundle::from_ids([1, 3]));
    }

    #[test]
    fn lift_reduce_reinserts_the_served_agent() {
        let alloc = Allocation {
            bundles: vec![Bundle::from_ids([1, 2])],
            agent_types: vec![0],
            leftover: Bundle::new(),
        };
        let step = Transcript {
            steps: vec![LiftStep::Reduce {
                rule: ReductionRule::R1,
                receiver_type: 0,
                items: Bundle::from_ids([1]),
                receiver_mms: rat_int(1),
                type_removed: false,
                m_before: 3,
            }],
        };
        let lifted = lift_allocation(&step, alloc).unwrap();
        assert_eq!(lifted.slots(), 2);
        // surviving agent's items shift past the removed id
        assert!(lifted.bundles.contains(&Bundle::from_ids([2, 3])));
        assert!(lifted.bundles.contains(&Bundle::from_ids([1])));
    }

    #[test]
    fn lift_zero_mms_restores_type_indices() {
        let alloc = Allocation {
            bundles: vec![Bundle::from_ids([1])],
            agent_types: vec![0],
            leftover: Bundle::new(),
        };
        let step = Transcript {
            steps: vec![LiftStep::ZeroMms {
                type_index: 0,
                agents: 2,
            }],
        };
        let lifted = lift_allocation(&step, alloc).unwrap();
        assert_eq!(lifted.agent_types, vec![0, 0, 1]);
        assert_eq!(lifted.bundles[2], Bundle::from_ids([1]));
        assert!(lifted.bundles[0].is_empty() && lifted.bundles[1].is_empty());
    }

    #[test]
    fn transcript_serializes() {
        let inst = one_type(&[10, 3, 3, 3, 3], 2);
        let (_, transcript) = build_oni(&inst, &rat(4, 5)).unwrap();
        let v = transcript.to_json();
        let steps = v.get("steps").unwrap().as_array().unwrap();
        assert_eq!(steps.len(), 4); // order, reduce, normalize, order
        assert_eq!(steps[1].get("rule").unwrap(), "R1");
    }
}
