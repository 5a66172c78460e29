//! Shared bag-filling: add pooled items to seeded bags until an unsaturated
//! claimant type claims each bag. Used by the 2-type solver's pooled branch,
//! the 3-type solver's case-2 branch, and the case-4 machine's second phase.

use serde_json::{json, Value};

use crate::error::SolveError;
use crate::model::Bundle;
use crate::rational::{format_rational, Rational};

/// One type competing for bags: its valuation, its claim threshold, and how
/// many of its agents still need a bag.
pub struct Claimant<'a> {
    pub type_index: usize,
    pub valuation: &'a [Rational],
    pub threshold: Rational,
    pub remaining: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FillOutcome {
    /// `(bag, claiming type)` in processing order.
    pub assigned: Vec<(Bundle, usize)>,
    /// Pool items never added to any bag.
    pub unused: Vec<usize>,
}

fn claim_check(bag: &Bundle, claimants: &[Claimant]) -> Option<usize> {
    // claimants arrive sorted by type index, so the first hit is the
    // lowest-index unsaturated type that claims the bag
    claimants
        .iter()
        .position(|c| c.remaining > 0 && bag.value(c.valuation) >= c.threshold)
}

fn dump_state(bag: &Bundle, claimants: &[Claimant], assigned: &[(Bundle, usize)]) -> String {
    let v: Value = json!({
        "stuck_bag": bag.to_json(),
        "bag_values": claimants.iter().map(|c| json!({
            "type": c.type_index,
            "value": format_rational(&bag.value(c.valuation)),
            "threshold": format_rational(&c.threshold),
            "remaining": c.remaining,
        })).collect::<Vec<_>>(),
        "assigned_so_far": assigned.iter().map(|(b, t)| json!({
            "items": b.to_json(),
            "type": t,
        })).collect::<Vec<_>>(),
    });
    v.to_string()
}

/// Processes `seeds` in order; items from `pool` (already in fill order) are
/// added one at a time until some claimant claims the bag. A bag that is
/// claimed as seeded is assigned with zero fill items.
pub fn fill_until_claimed(
    seeds: Vec<Bundle>,
    pool: Vec<usize>,
    claimants: &mut [Claimant],
    context: &str,
) -> Result<FillOutcome, SolveError> {
    debug_assert!(claimants.windows(2).all(|w| w[0].type_index < w[1].type_index));
    let mut pool = pool.into_iter().peekable();
    let mut assigned = Vec::with_capacity(seeds.len());
    let mut unused = Vec::new();
    for mut bag in seeds {
        if claimants.iter().all(|c| c.remaining == 0) {
            unused.extend(bag.ids());
            continue;
        }
        loop {
            if let Some(idx) = claim_check(&bag, claimants) {
                claimants[idx].remaining -= 1;
                assigned.push((bag, claimants[idx].type_index));
                break;
            }
            match pool.next() {
                Some(id) => bag.insert(id),
                None => {
                    return Err(SolveError::FillExhausted {
                        context: context.to_string(),
                        dump: dump_state(&bag, claimants, &assigned),
                    })
                }
            }
        }
    }
    unused.extend(pool);
    Ok(FillOutcome { assigned, unused })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn seed_claimed_with_zero_fill_items() {
        let values = vec![rat(9, 10), rat(1, 10)];
        let mut claimants = [Claimant {
            type_index: 0,
            valuation: &values,
            threshold: rat(4, 5),
            remaining: 1,
        }];
        let out = fill_until_claimed(
            vec![Bundle::from_ids([1])],
            vec![2],
            &mut claimants,
            "test",
        )
        .unwrap();
        assert_eq!(out.assigned, vec![(Bundle::from_ids([1]), 0)]);
        assert_eq!(out.unused, vec![2]);
    }

    #[test]
    fn fills_until_threshold_and_stops() {
        let values = vec![rat(3, 10), rat(3, 10), rat(3, 10), rat(3, 10)];
        let mut claimants = [Claimant {
            type_index: 1,
            valuation: &values,
            threshold: rat(4, 5),
            remaining: 1,
        }];
        let out = fill_until_claimed(
            vec![Bundle::from_ids([1])],
            vec![2, 3, 4],
            &mut claimants,
            "test",
        )
        .unwrap();
        // stops at the first claim: 3/10 + 3/10 + 3/10 = 9/10 ≥ 4/5
        assert_eq!(out.assigned, vec![(Bundle::from_ids([1, 2, 3]), 1)]);
        assert_eq!(out.unused, vec![4]);
    }

    #[test]
    fn simultaneous_claim_goes_to_lowest_type_index() {
        let v0 = vec![rat(1, 1)];
        let v1 = vec![rat(1, 1)];
        let mut claimants = [
            Claimant {
                type_index: 1,
                valuation: &v0,
                threshold: rat(4, 5),
                remaining: 1,
            },
            Claimant {
                type_index: 2,
                valuation: &v1,
                threshold: rat(4, 5),
                remaining: 1,
            },
        ];
        let out =
            fill_until_claimed(vec![Bundle::from_ids([1])], vec![], &mut claimants, "test")
                .unwrap();
        assert_eq!(out.assigned[0].1, 1);
        assert_eq!(claimants[0].remaining, 0);
        assert_eq!(claimants[1].remaining, 1);
    }

    #[test]
    fn exhaustion_is_reported_with_state() {
        let values = vec![rat(1, 10), rat(1, 10)];
        let mut claimants = [Claimant {
            type_index: 0,
            valuation: &values,
            threshold: rat(4, 5),
            remaining: 1,
        }];
        let err = fill_until_claimed(
            vec![Bundle::from_ids([1])],
            vec![2],
            &mut claimants,
            "test",
        )
        .unwrap_err();
        match err {
            SolveError::FillExhausted { dump, .. } => {
                assert!(dump.contains("stuck_bag"));
            }
            other => panic!("expected FillExhausted, got {other:?}"),
        }
    }

    #[test]
    fn saturated_claimants_never_claim() {
        let values = vec![rat(1, 1), rat(1, 1)];
        let mut claimants = [Claimant {
            type_index: 0,
            valuation: &values,
            threshold: rat(1, 2),
            remaining: 1,
        }];
        let out = fill_until_claimed(
            vec![Bundle::from_ids([1]), Bundle::from_ids([2])],
            vec![],
            &mut claimants,
            "test",
        )
        .unwrap();
        // second seed has no unsaturated claimant left; items fall through
        assert_eq!(out.assigned.len(), 1);
        assert_eq!(out.unused, vec![2]);
    }
}
