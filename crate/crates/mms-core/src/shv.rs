//! Single-High-Valued partition builder: turns an exact MMS partition of a
//! 1-type ONI instance into n bags that each hold exactly one HV item and are
//! worth at least 4/5, by swapping surplus HV items into HV-free bags and
//! repairing any bag the swap pushed below the threshold with pooled filling.

use num_traits::One;
use serde_json::{json, Value};

use crate::error::SolveError;
use crate::model::Bundle;
use crate::oracle::mms_partition_eps;
use crate::rational::{format_rational, rat, Rational};

/// n bags over [m], one HV item each, every bag worth ≥ 4/5 to the building
/// type. Items the repair step did not consume stay in `leftover`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShvPartition {
    pub bags: Vec<Bundle>,
    pub leftover: Bundle,
}

pub fn shv_threshold() -> Rational {
    rat(4, 5)
}

/// ε = min(0.04, 1/(5n)). The exact oracle returns ε = 0 witnesses, which
/// satisfy every bound; the value is kept for the flawed-bag invariant.
pub fn shv_epsilon(n: usize) -> Rational {
    let cap = rat(1, 25);
    let per_n = rat(1, 5 * n as i64);
    if cap < per_n {
        cap
    } else {
        per_n
    }
}

/// Working state of the repair loop: `flawed` bags still violate the
/// exactly-one-HV shape, `correct` bags are finished.
#[derive(Debug, Clone)]
pub struct RepairState {
    pub flawed: Vec<Bundle>,
    pub correct: Vec<Bundle>,
    pub epsilon: Rational,
}

fn hv_count(bundle: &Bundle, n: usize) -> usize {
    bundle.ids().take_while(|&id| id <= n).count()
}

impl RepairState {
    /// The four loop invariants; checked after every iteration.
    pub fn check_invariants(&self, values: &[Rational], n: usize) -> Result<(), String> {
        if self.flawed.len() + self.correct.len() != n {
            return Err(format!(
                "bag count {} + {} != n = {n}",
                self.flawed.len(),
                self.correct.len()
            ));
        }
        let floor = Rational::one() - &self.epsilon;
        let threshold = shv_threshold();
        for (i, bag) in self.flawed.iter().enumerate() {
            if hv_count(bag, n) == 1 {
                return Err(format!("flawed bag {i} holds exactly one HV item"));
            }
            if bag.value(values) < floor {
                return Err(format!("flawed bag {i} below 1-eps"));
            }
        }
        for (i, bag) in self.correct.iter().enumerate() {
            if hv_count(bag, n) != 1 {
                return Err(format!("correct bag {i} does not hold exactly one HV item"));
            }
            if bag.value(values) < threshold {
                return Err(format!("correct bag {i} below 4/5"));
            }
        }
        let hv_free = self.flawed.iter().filter(|b| hv_count(b, n) == 0).count();
        for bag in &self.flawed {
            let k = hv_count(bag, n);
            if k > 1 && hv_free < k - 1 {
                return Err(format!(
                    "bag with {k} HV items but only {hv_free} HV-free flawed bags"
                ));
            }
        }
        Ok(())
    }

    pub fn dump(&self, values: &[Rational]) -> Value {
        let row = |bags: &[Bundle]| -> Vec<Value> {
            bags.iter()
                .map(|b| {
                    json!({
                        "items": b.to_json(),
                        "value": format_rational(&b.value(values)),
                    })
                })
                .collect()
        };
        json!({
            "flawed": row(&self.flawed),
            "correct": row(&self.correct),
            "epsilon": format_rational(&self.epsilon),
        })
    }
}

fn breach(state: &RepairState, values: &[Rational], detail: String) -> SolveError {
    SolveError::InvariantBreach {
        context: "shv_builder".into(),
        detail,
        dump: state.dump(values).to_string(),
    }
}

/// Swaps the `k-1` lowest-valued HV items of `a` one-for-one against the
/// `k-1` highest-valued items pooled from the HV-free bags `others`.
/// Pairing: ascending HV list against descending replacement list.
/// Returns the swapped-out HV items in pairing order.
fn swap_step(a: &mut Bundle, others: &mut [Bundle], values: &[Rational], n: usize) -> Vec<usize> {
    let k = hv_count(a, n);
    debug_assert!(k > 1 && others.len() == k - 1);
    // ascending by value, ties by ascending id
    let mut hv: Vec<usize> = a.ids().filter(|&id| id <= n).collect();
    hv.sort_by(|&x, &y| values[x - 1].cmp(&values[y - 1]).then(x.cmp(&y)));
    let outgoing: Vec<usize> = hv[..k - 1].to_vec();

    // k-1 highest valued pooled items, ties by smallest id
    let mut pool: Vec<(usize, usize)> = others
        .iter()
        .enumerate()
        .flat_map(|(b, bag)| bag.ids().map(move |id| (id, b)))
        .collect();
    pool.sort_by(|&(x, _), &(y, _)| values[y - 1].cmp(&values[x - 1]).then(x.cmp(&y)));
    let incoming: Vec<(usize, usize)> = pool[..k - 1].to_vec();

    let before: Vec<Rational> = others.iter().map(|b| b.value(values)).collect();
    for (&h, &(g, src)) in outgoing.iter().zip(&incoming) {
        a.remove(h);
        a.insert(g);
        others[src].remove(g);
        others[src].insert(h);
    }
    for (bag, old) in others.iter().zip(&before) {
        debug_assert!(
            &bag.value(values) >= old,
            "swap must not lower an HV-free bag's value"
        );
    }
    outgoing
}

/// Builds an SHV 4/5 partition for one valuation over a 1-type ONI instance
/// with `n` agents. Items are `1..=values.len()`.
///
/// `initial` supplies a known (1−ε)-MMS partition (the pipeline already has
/// one for every normalized instance); without it the exact oracle runs.
pub fn build_shv_partition(
    values: &[Rational],
    n: usize,
    initial: Option<Vec<Bundle>>,
) -> Result<ShvPartition, SolveError> {
    let threshold = shv_threshold();
    let epsilon = shv_epsilon(n);
    let witness = match initial {
        Some(w) => w,
        None => mms_partition_eps(values, n, &epsilon)?,
    };

    let mut state = RepairState {
        flawed: Vec::new(),
        correct: Vec::new(),
        epsilon,
    };
    for bag in witness {
        if hv_count(&bag, n) == 1 {
            state.correct.push(bag);
        } else {
            state.flawed.push(bag);
        }
    }
    state
        .check_invariants(values, n)
        .map_err(|d| breach(&state, values, format!("initial partition: {d}")))?;

    let mut leftover = Bundle::new();
    while state.correct.len() < n {
        // the flawed bag with the most HV items, ties by lowest index
        let (a_idx, k) = state
            .flawed
            .iter()
            .enumerate()
            .map(|(i, b)| (i, hv_count(b, n)))
            .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
            .ok_or_else(|| breach(&state, values, "no flawed bag left to repair".into()))?;
        if k < 2 {
            return Err(breach(
                &state,
                values,
                "no flawed bag with multiple HV items".into(),
            ));
        }
        let mut a = state.flawed.remove(a_idx);

        // lowest-indexed HV-free flawed bags
        let free_idx: Vec<usize> = state
            .flawed
            .iter()
            .enumerate()
            .filter(|(_, b)| hv_count(b, n) == 0)
            .map(|(i, _)| i)
            .take(k - 1)
            .collect();
        if free_idx.len() < k - 1 {
            return Err(breach(
                &state,
                values,
                format!("need {} HV-free bags, found {}", k - 1, free_idx.len()),
            ));
        }
        let mut others: Vec<Bundle> = Vec::with_capacity(k - 1);
        for &i in free_idx.iter().rev() {
            others.push(state.flawed.remove(i));
        }
        others.reverse();

        let swapped_hv = swap_step(&mut a, &mut others, values, n);

        if a.value(values) < threshold {
            // dissolve the HV-free bags into a pool and rebuild k-1 bags
            // around the swapped HV items, filling until each is claimed
            let mut pool: Vec<usize> = others
                .iter()
                .flat_map(Bundle::ids)
                .filter(|id| !swapped_hv.contains(id))
                .collect();
            pool.sort_unstable(); // ascending id = descending value
            let mut pool = pool.into_iter();

            let mut rebuilt = vec![a];
            rebuilt.extend(swapped_hv.iter().map(|&h| Bundle::from_ids([h])));
            for bag in &mut rebuilt {
                while bag.value(values) < threshold {
                    match pool.next() {
                        Some(id) => bag.insert(id),
                        None => {
                            return Err(breach(
                                &state,
                                values,
                                "repair bag-filling ran out of pool items".into(),
                            ))
                        }
                    }
                }
            }
            state.correct.extend(rebuilt);
            for id in pool {
                leftover.insert(id);
            }
        } else {
            state.correct.push(a);
            for bag in others {
                if hv_count(&bag, n) == 1 {
                    state.correct.push(bag);
                } else {
                    state.flawed.push(bag);
                }
            }
        }

        state
            .check_invariants(values, n)
            .map_err(|d| breach(&state, values, d))?;
    }

    Ok(ShvPartition {
        bags: state.correct,
        leftover,
    })
}
