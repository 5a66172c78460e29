//! 4/5-MMS allocation for 2-type ONI instances: build the majority type's SHV
//! partition, sort its bags by the minority valuation ascending, hand the
//! cheapest T₁ bags to the majority, and serve the minority either directly
//! (every remaining bag claimed) or by re-seeding the pooled items around
//! their HV items and filling until claimed.

use num_traits::Zero;

use crate::error::SolveError;
use crate::fill::{fill_until_claimed, Claimant};
use crate::model::{Bundle, TypedInstance};
use crate::rational::{rat, Rational};
use crate::shv::{build_shv_partition, shv_threshold, ShvPartition};

/// Which branch the solver took; campaigns report these frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoTypeBranch {
    Direct,
    Pooled,
}

#[derive(Debug, Clone)]
pub struct TwoTypeSolution {
    /// `(type index, bundle)` per served agent.
    pub assignments: Vec<(usize, Bundle)>,
    pub leftover: Bundle,
    pub branch: TwoTypeBranch,
}

/// Collects a partition's HV items (ids ≤ n) and asserts one per bag.
fn seed_hv_items(bags: &[Bundle], n: usize, context: &str) -> Result<Vec<usize>, SolveError> {
    let mut hv = Vec::with_capacity(bags.len());
    for bag in bags {
        let ids: Vec<usize> = bag.ids().filter(|&id| id <= n).collect();
        if ids.len() != 1 {
            return Err(SolveError::InvariantBreach {
                context: context.into(),
                detail: format!("bag {:?} holds {} HV items, expected 1", bag, ids.len()),
                dump: String::new(),
            });
        }
        hv.push(ids[0]);
    }
    hv.sort_unstable();
    Ok(hv)
}

/// `majority_witness`, when supplied, is a known MMS partition of the
/// majority type (the pipeline's normalize step produces one).
pub fn solve_two_type(
    instance: &TypedInstance,
    majority_witness: Option<Vec<Bundle>>,
) -> Result<TwoTypeSolution, SolveError> {
    assert_eq!(instance.k(), 2, "two-type solver requires exactly 2 types");
    assert!(
        instance.type_sizes[0] >= instance.type_sizes[1],
        "instance must be canonical (T1 >= T2)"
    );
    let n = instance.n();
    let (t1, t2) = (instance.type_sizes[0], instance.type_sizes[1]);
    let v1 = &instance.valuations[0];
    let v2 = &instance.valuations[1];
    let alpha = shv_threshold();

    let ShvPartition { mut bags, leftover } = build_shv_partition(v1, n, majority_witness)?;
    // ascending by the minority valuation; stable, so ties keep bag order
    bags.sort_by(|a, b| a.value(v2).cmp(&b.value(v2)));

    let rest = bags.split_off(t1);
    let mut assignments: Vec<(usize, Bundle)> = bags.into_iter().map(|b| (0, b)).collect();

    if rest.iter().all(|b| b.value(v2) >= alpha) {
        assignments.extend(rest.into_iter().map(|b| (1, b)));
        return Ok(TwoTypeSolution {
            assignments,
            leftover,
            branch: TwoTypeBranch::Direct,
        });
    }

    // pool the remaining bags (and the SHV leftover, which carries no HV
    // items), seed one new bag per HV item, and fill until type 2 claims
    let hv = seed_hv_items(&rest, n, "two_type pooled branch")?;
    debug_assert_eq!(hv.len(), t2);
    let mut pool: Vec<usize> = rest
        .iter()
        .flat_map(Bundle::ids)
        .chain(leftover.ids())
        .filter(|id| !hv.contains(id))
        .collect();
    pool.sort_unstable(); // ascending id = descending value

    let seeds: Vec<Bundle> = hv.into_iter().map(|h| Bundle::from_ids([h])).collect();
    let mut claimants = [Claimant {
        type_index: 1,
        valuation: v2,
        threshold: alpha.clone(),
        remaining: t2,
    }];
    let outcome = fill_until_claimed(seeds, pool, &mut claimants, "two_type pooled branch")?;
    assignments.extend(outcome.assigned.into_iter().map(|(b, _)| (1, b)));

    // the theorem's accounting: total minority value of assigned bags < n
    let assigned_v2: Rational = assignments
        .iter()
        .map(|(_, b)| b.value(v2))
        .fold(Rational::zero(), |acc, v| acc + v);
    debug_assert!(assigned_v2 < rat(n as i64, 1));

    Ok(TwoTypeSolution {
        assignments,
        leftover: outcome.unused.into_iter().collect(),
        branch: TwoTypeBranch::Pooled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_guarantee(sol: &TwoTypeSolution, inst: &TypedInstance) {
        let alpha = shv_threshold();
        let mut counts = vec![0usize; 2];
        for (t, bag) in &sol.assignments {
            counts[*t] += 1;
            assert!(
                bag.value(&inst.valuations[*t]) >= alpha,
                "type {t} bag below 4/5"
            );
        }
        assert_eq!(counts, inst.type_sizes);
        // disjoint cover
        let mut seen = vec![false; inst.m + 1];
        for bag in sol.assignments.iter().map(|(_, b)| b).chain([&sol.leftover]) {
            for id in bag.ids() {
                assert!(!seen[id]);
                seen[id] = true;
            }
        }
        assert!((1..=inst.m).all(|id| seen[id]));
    }

    #[test]
    fn direct_branch_when_minority_claims_everything() {
        // both types value the SHV bags above 4/5
        let values = vec![rat(3, 5), rat(3, 5), rat(2, 5), rat(2, 5)];
        let inst = TypedInstance::new(
            4,
            vec![1, 1],
            vec![values.clone(), values],
        )
        .unwrap();
        let sol = solve_two_type(&inst, None).unwrap();
        assert_eq!(sol.branch, TwoTypeBranch::Direct);
        check_guarantee(&sol, &inst);
    }

    #[test]
    fn pooled_branch_reseeds_hv_items() {
        // type 2 concentrates its value on items the majority's witness
        // scatters, leaving some remaining bag below 4/5 for type 2
        let v1 = vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)];
        let v2 = vec![rat(1, 2), rat(1, 2), rat(3, 4), rat(1, 8), rat(1, 8), rat(0, 1)];
        let inst = TypedInstance::new(6, vec![1, 1], vec![v1, v2]).unwrap();
        let sol = solve_two_type(&inst, None).unwrap();
        check_guarantee(&sol, &inst);
    }

    #[test]
    fn minority_smallest_bag_goes_to_majority() {
        // n=2, T=(1,1): type 1 takes the bag type 2 values least
        let v1 = vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)];
        let v2 = vec![rat(9, 10), rat(1, 10), rat(9, 10), rat(1, 10)];
        let inst = TypedInstance::new(4, vec![1, 1], vec![v1, v2]).unwrap();
        let sol = solve_two_type(&inst, None).unwrap();
        check_guarantee(&sol, &inst);
        let (t, bag) = &sol.assignments[0];
        assert_eq!(*t, 0);
        // v1's witness is {1,2},{3,4}; swap makes {2,3},{1,4}, worth 1 and
        // 1 to type 2... both bags tie at 1 for v2, ties keep bag order
        assert_eq!(bag.value(&inst.valuations[1]), rat(1, 1));
    }
}
