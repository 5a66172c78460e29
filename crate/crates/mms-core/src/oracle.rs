//! Exact maximin-share computation.
//!
//! `mms_exact` replaces the PTAS the literature invokes: at desk scale
//! (m up to ~21 items, d up to ~7 bundles) the exact optimum is reachable by
//! search. The value is found by binary search over candidate thresholds with
//! a branch-and-bound feasibility check; the witness partition is then rebuilt
//! as the lexicographically least item-to-bundle assignment among optima, so
//! transcripts and fixtures are reproducible.
//!
//! `mms_bruteforce` is a deliberately naive enumeration over all d^m
//! assignments (with first-occurrence symmetry breaking) kept as an
//! independent cross-check; it shares no search code with `mms_exact`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::OracleError;
use crate::model::Bundle;
use crate::rational::Rational;

pub const DEFAULT_BRUTEFORCE_CAP: usize = 12;

/// An exact MMS value together with a witnessing partition into `d` bundles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsResult {
    pub value: Rational,
    pub partition: Vec<Bundle>,
}

/// Arithmetic the search runs on: exactly-scaled u128 on the fast path,
/// BigInt when the scaling would overflow.
trait Weight: Clone + Ord + std::hash::Hash {
    fn zero() -> Self;
    fn unit() -> Self;
    fn add_ref(&mut self, o: &Self);
    fn sub_ref(&mut self, o: &Self);
    fn sum(items: &[Self]) -> Self;
    fn half_up(lo: &Self, hi: &Self) -> Self;
    fn div_floor_usize(&self, k: usize) -> Self;
}

impl Weight for u128 {
    fn zero() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn add_ref(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_ref(&mut self, o: &Self) {
        *self -= o;
    }
    fn sum(items: &[Self]) -> Self {
        items.iter().sum()
    }
    fn half_up(lo: &Self, hi: &Self) -> Self {
        (lo + hi + 1) / 2
    }
    fn div_floor_usize(&self, k: usize) -> Self {
        self / k as u128
    }
}

impl Weight for BigInt {
    fn zero() -> Self {
        <BigInt as num_traits::Zero>::zero()
    }
    fn unit() -> Self {
        <BigInt as One>::one()
    }
    fn add_ref(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_ref(&mut self, o: &Self) {
        *self -= o;
    }
    fn sum(items: &[Self]) -> Self {
        items.iter().sum()
    }
    fn half_up(lo: &Self, hi: &Self) -> Self {
        (lo + hi + BigInt::one()).div_floor(&BigInt::from(2))
    }
    fn div_floor_usize(&self, k: usize) -> Self {
        self.div_floor(&BigInt::from(k))
    }
}

/// Backtracking cover search over residual needs. The state is fully
/// described by (next item index, sorted outstanding needs, whether a
/// covered bundle exists to absorb surplus items), so failed states are
/// memoized once and shared across the whole binary search and the witness
/// reconstruction.
struct CoverSearch<'a, W: Weight> {
    /// Nonzero item values, descending.
    items: &'a [W],
    /// `suffix[i]` = sum of `items[i..]`.
    suffix: Vec<W>,
    failed: std::collections::HashSet<(u32, bool, Vec<W>)>,
}

const MEMO_CAP: usize = 1 << 20;

impl<'a, W: Weight> CoverSearch<'a, W> {
    fn new(items: &'a [W]) -> Self {
        let mut suffix = vec![W::zero(); items.len() + 1];
        for i in (0..items.len()).rev() {
            let mut s = suffix[i + 1].clone();
            s.add_ref(&items[i]);
            suffix[i] = s;
        }
        CoverSearch {
            items,
            suffix,
            failed: std::collections::HashSet::new(),
        }
    }

    /// Can `items[i..]` raise every outstanding need to zero? `needs` is
    /// sorted descending and strictly positive. `has_dump` records whether a
    /// bundle is already covered, letting surplus items be skipped.
    ///
    /// Branching uses a cover dominance: if the current item covers some
    /// need, covering the largest coverable need is at least as good as any
    /// other placement of the item (covering a smaller need, topping up a
    /// larger one, or dumping it), because the sets can be swapped without
    /// breaking any bundle. So at most one covering branch is explored, and
    /// the dump branch only exists when the item covers nothing.
    fn can_cover(&mut self, needs: &[W], i: usize, has_dump: bool) -> bool {
        if needs.is_empty() {
            return true;
        }
        let left = self.items.len() - i;
        if needs.len() > left {
            return false; // every needy bundle takes at least one item
        }
        if W::sum(needs) > self.suffix[i] {
            return false;
        }
        if needs.len() == 1 {
            return true; // funnel everything into the one needy bundle
        }
        let v = &self.items[i];
        // needs above the largest remaining item take at least two items
        let two_item_needs = needs.iter().take_while(|c| *c > v).count();
        if needs.len() + two_item_needs > left {
            return false;
        }
        let key = (i as u32, has_dump, needs.to_vec());
        if self.failed.contains(&key) {
            return false;
        }
        let mut done = false;
        // partial placements: needs too big for v, one per distinct value
        for idx in 0..two_item_needs {
            if idx > 0 && needs[idx] == needs[idx - 1] {
                continue;
            }
            let mut next: Vec<W> = Vec::with_capacity(needs.len());
            next.extend_from_slice(&needs[..idx]);
            next.extend_from_slice(&needs[idx + 1..]);
            let mut residue = needs[idx].clone();
            residue.sub_ref(v);
            let pos = next
                .iter()
                .position(|x| x < &residue)
                .unwrap_or(next.len());
            next.insert(pos, residue);
            if self.can_cover(&next, i + 1, has_dump) {
                done = true;
                break;
            }
        }
        if !done && two_item_needs < needs.len() {
            // the dominant covering branch: cover the largest coverable need
            let next = [&needs[..two_item_needs], &needs[two_item_needs + 1..]].concat();
            done = self.can_cover(&next, i + 1, true);
        } else if !done && has_dump {
            // v covers nothing; it may ride along in a covered bundle
            done = self.can_cover(needs, i + 1, true);
        }
        if !done && self.failed.len() < MEMO_CAP {
            self.failed.insert(key);
        }
        done
    }

    /// Feasibility of raising `d` empty bundles to `t`.
    fn feasible(&mut self, t: &W, d: usize) -> bool {
        if *t == W::zero() {
            return true;
        }
        let needs = vec![t.clone(); d];
        self.can_cover(&needs, 0, false)
    }
}

/// Greedy descending assignment to the lightest bundle: a quick, feasible
/// lower bound that narrows the binary search.
fn greedy_min<W: Weight>(items_desc: &[W], d: usize) -> W {
    let mut sums = vec![W::zero(); d];
    for v in items_desc {
        let idx = (0..d).min_by(|&a, &b| sums[a].cmp(&sums[b])).unwrap();
        sums[idx].add_ref(v);
    }
    sums.into_iter().min().unwrap()
}

/// Largest `t` such that the items partition into `d` bundles of value ≥ `t`.
fn max_min_value<W: Weight>(search: &mut CoverSearch<W>, d: usize) -> W {
    let items = search.items;
    if items.len() < d {
        return W::zero();
    }
    let total = search.suffix[0].clone();
    let mut lo = greedy_min(items, d);
    let mut hi = total.div_floor_usize(d);
    while lo < hi {
        let mid = W::half_up(&lo, &hi);
        if search.feasible(&mid, d) {
            lo = mid;
        } else {
            let mut h = mid;
            h.sub_ref(&W::unit());
            hi = h;
        }
    }
    lo
}

/// Lexicographically least assignment of items to bundles achieving min ≥ opt.
/// Zero-valued items always fit in bundle 1, so only nonzero items are searched.
fn lex_witness<W: Weight>(scaled: &[W], d: usize, opt: &W) -> Vec<usize> {
    let m = scaled.len();
    let zero = W::zero();
    let mut assignment = vec![0usize; m]; // 0-based bundle index per item
    let mut sums = vec![W::zero(); d];

    // multiset of remaining nonzero values, kept sorted descending
    let mut remaining: Vec<W> = scaled.iter().filter(|v| **v > zero).cloned().collect();
    remaining.sort_by(|a, b| b.cmp(a));

    for id in 1..=m {
        let v = scaled[id - 1].clone();
        if v == zero {
            assignment[id - 1] = 0;
            continue;
        }
        // remove one occurrence of v from the remaining multiset
        let pos = remaining
            .iter()
            .position(|x| *x == v)
            .expect("remaining multiset out of sync");
        remaining.remove(pos);

        // one memoized search per placed item, shared across bundle tries
        let mut search = CoverSearch::new(&remaining);
        let mut placed = false;
        for b in 0..d {
            sums[b].add_ref(&v);
            let mut needs: Vec<W> = Vec::with_capacity(d);
            let mut has_dump = false;
            for s in &sums {
                if s < opt {
                    let mut gap = opt.clone();
                    gap.sub_ref(s);
                    needs.push(gap);
                } else {
                    has_dump = true;
                }
            }
            needs.sort_by(|a, b| b.cmp(a));
            if search.can_cover(&needs, 0, has_dump) {
                assignment[id - 1] = b;
                placed = true;
                break;
            }
            sums[b].sub_ref(&v);
        }
        assert!(placed, "witness search lost feasibility");
    }
    assignment
}

/// Scales rationals to a common-denominator integer vector. Returns the
/// scaled values and the scale factor (the denominators' lcm).
fn common_scale(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    let scaled = values
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    (scaled, lcm)
}

fn validate(values: &[Rational], d: usize) -> Result<(), OracleError> {
    if d < 1 {
        return Err(OracleError::ZeroBundles);
    }
    if values.iter().any(|v| v.is_negative()) {
        return Err(OracleError::NegativeValue);
    }
    Ok(())
}

fn run_search(values: &[Rational], d: usize, with_witness: bool) -> (Rational, Vec<usize>) {
    let (scaled_big, lcm) = common_scale(values);
    let total: BigInt = scaled_big.iter().sum();
    let fits_u128 = scaled_big
        .iter()
        .all(|v| u128::try_from(v.clone()).is_ok())
        && u128::try_from(&total * BigInt::from(d + 1)).is_ok();

    let (opt_big, assignment) = if fits_u128 {
        let scaled: Vec<u128> = scaled_big
            .iter()
            .map(|v| u128::try_from(v.clone()).unwrap())
            .collect();
        let mut desc: Vec<u128> = scaled.iter().copied().filter(|v| *v > 0).collect();
        desc.sort_unstable_by(|a, b| b.cmp(a));
        let opt = max_min_value(&mut CoverSearch::new(&desc), d);
        let assignment = if with_witness {
            lex_witness(&scaled, d, &opt)
        } else {
            Vec::new()
        };
        (BigInt::from(opt), assignment)
    } else {
        let mut desc: Vec<BigInt> = scaled_big
            .iter()
            .filter(|v| !v.is_zero())
            .cloned()
            .collect();
        desc.sort_by(|a, b| b.cmp(a));
        let opt = max_min_value(&mut CoverSearch::new(&desc), d);
        let assignment = if with_witness {
            lex_witness(&scaled_big, d, &opt)
        } else {
            Vec::new()
        };
        (opt, assignment)
    };

    (Rational::new(opt_big, lcm), assignment)
}

/// Exact MMS value plus a deterministic witnessing partition.
///
/// `d` may exceed the item count; the MMS is then 0 and the witness contains
/// empty bundles.
pub fn mms_exact(values: &[Rational], d: usize) -> Result<MmsResult, OracleError> {
    validate(values, d)?;
    let (value, assignment) = run_search(values, d, true);
    let mut partition = vec![Bundle::new(); d];
    for (idx, &b) in assignment.iter().enumerate() {
        partition[b].insert(idx + 1);
    }
    Ok(MmsResult { value, partition })
}

/// Exact MMS value only (skips the witness reconstruction).
pub fn mms_value(values: &[Rational], d: usize) -> Result<Rational, OracleError> {
    validate(values, d)?;
    Ok(run_search(values, d, false).0)
}

/// Does a partition into `d` bundles with minimum value ≥ `t` exist?
/// One-sided: cheaper than `mms_value` because no infeasibility proof at
/// `t + ε` is needed. `MMS ≥ t` iff this returns true.
pub fn mms_feasible(values: &[Rational], d: usize, t: &Rational) -> Result<bool, OracleError> {
    validate(values, d)?;
    if t <= &Rational::zero() {
        return Ok(true);
    }
    let mut padded: Vec<Rational> = values.to_vec();
    padded.push(t.clone());
    let (mut scaled_big, _) = common_scale(&padded);
    let t_scaled = scaled_big.pop().expect("threshold was appended");
    let total: BigInt = scaled_big.iter().sum();
    if u128::try_from(&total * BigInt::from(d + 1)).is_ok()
        && u128::try_from(t_scaled.clone()).is_ok()
    {
        let mut desc: Vec<u128> = scaled_big
            .iter()
            .map(|v| u128::try_from(v.clone()).unwrap())
            .filter(|v| *v > 0)
            .collect();
        desc.sort_unstable_by(|a, b| b.cmp(a));
        let t_int = u128::try_from(t_scaled).unwrap();
        Ok(CoverSearch::new(&desc).feasible(&t_int, d))
    } else {
        let mut desc: Vec<BigInt> = scaled_big.into_iter().filter(|v| !v.is_zero()).collect();
        desc.sort_by(|a, b| b.cmp(a));
        Ok(CoverSearch::new(&desc).feasible(&t_scaled, d))
    }
}

/// A partition whose minimum bundle is at least `(1 − eps)·MMS`. Backed by
/// the exact search, which satisfies every `eps ≥ 0`; the parameter is kept
/// so a true approximation scheme can be substituted later.
pub fn mms_partition_eps(
    values: &[Rational],
    d: usize,
    eps: &Rational,
) -> Result<Vec<Bundle>, OracleError> {
    let _ = eps;
    Ok(mms_exact(values, d)?.partition)
}

/// Naive enumeration over all d^m assignments with first-occurrence symmetry
/// breaking. Kept independent of the exact search as a cross-check oracle.
pub fn mms_bruteforce(values: &[Rational], d: usize) -> Result<Rational, OracleError> {
    mms_bruteforce_capped(values, d, DEFAULT_BRUTEFORCE_CAP)
}

pub fn mms_bruteforce_capped(
    values: &[Rational],
    d: usize,
    cap: usize,
) -> Result<Rational, OracleError> {
    validate(values, d)?;
    if values.len() > cap {
        return Err(OracleError::CapExceeded {
            m: values.len(),
            cap,
        });
    }
    let mut best = Rational::zero();
    let mut sums = vec![Rational::zero(); d];
    enumerate(values, 0, 0, &mut sums, &mut best);
    Ok(best)
}

fn enumerate(
    values: &[Rational],
    i: usize,
    max_used: usize,
    sums: &mut [Rational],
    best: &mut Rational,
) {
    if i == values.len() {
        let min = sums.iter().min().expect("d >= 1");
        if min > best {
            *best = min.clone();
        }
        return;
    }
    let limit = max_used.min(sums.len() - 1);
    for b in 0..=limit {
        sums[b] += &values[i];
        enumerate(values, i + 1, max_used.max(b + 1), sums, best);
        sums[b] -= &values[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use num_traits::One;

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn single_bundle_is_the_total() {
        let v = ints(&[3, 1, 4]);
        let r = mms_exact(&v, 1).unwrap();
        assert_eq!(r.value, rat_int(8));
        assert_eq!(r.partition[0], Bundle::from_ids([1, 2, 3]));
    }

    #[test]
    fn symmetric_pairs() {
        let r = mms_exact(&ints(&[1, 1, 1, 1, 1, 1]), 3).unwrap();
        assert_eq!(r.value, rat_int(2));
        for b in &r.partition {
            assert_eq!(b.value(&ints(&[1, 1, 1, 1, 1, 1])), rat_int(2));
        }
    }

    #[test]
    fn five_items_two_bundles() {
        // frozen from the naive enumeration over all 2^5 bipartitions
        let v = ints(&[7, 5, 4, 3, 2]);
        let r = mms_exact(&v, 2).unwrap();
        assert_eq!(r.value, rat_int(10));
        assert_eq!(r.partition[0], Bundle::from_ids([1, 3]));
        assert_eq!(r.partition[1], Bundle::from_ids([2, 4, 5]));
        assert_eq!(mms_bruteforce(&v, 2).unwrap(), rat_int(10));
    }

    #[test]
    fn more_bundles_than_items_gives_zero() {
        let r = mms_exact(&ints(&[1]), 2).unwrap();
        assert_eq!(r.value, rat_int(0));
        assert_eq!(r.partition.len(), 2);
        assert_eq!(mms_bruteforce(&ints(&[1]), 2).unwrap(), rat_int(0));
        assert_eq!(mms_bruteforce(&[], 3).unwrap(), rat_int(0));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(mms_exact(&ints(&[1]), 0).is_err());
        assert!(mms_exact(&[rat(-1, 2)], 1).is_err());
        assert!(matches!(
            mms_bruteforce(&ints(&[1; 13]), 2),
            Err(OracleError::CapExceeded { .. })
        ));
    }

    #[test]
    fn rational_values_scale_exactly() {
        let v = vec![rat(1, 2), rat(1, 3), rat(1, 6)];
        let r = mms_exact(&v, 2).unwrap();
        // {1/2} vs {1/3, 1/6} both reach 1/2
        assert_eq!(r.value, rat(1, 2));
    }

    #[test]
    fn zero_items_go_to_the_first_bundle() {
        let v = ints(&[0, 5, 0, 5]);
        let r = mms_exact(&v, 2).unwrap();
        assert_eq!(r.value, rat_int(5));
        assert!(r.partition[0].contains(1));
        assert!(r.partition[0].contains(3));
    }

    #[test]
    fn witness_matches_value_exactly() {
        let v = ints(&[9, 8, 7, 6, 5, 4, 3, 2, 1]);
        for d in 1..=4 {
            let r = mms_exact(&v, d).unwrap();
            let min = r
                .partition
                .iter()
                .map(|b| b.value(&v))
                .min()
                .unwrap();
            assert_eq!(min, r.value);
            let all: usize = r.partition.iter().map(Bundle::len).sum();
            assert_eq!(all, v.len());
        }
    }

    #[test]
    fn agrees_with_bruteforce_on_small_instances() {
        // deterministic mini-sweep; the acceptance suite runs the full campaign
        let cases: &[(&[i64], usize)] = &[
            (&[10, 3, 3, 3, 3], 2),
            (&[20, 19, 2, 2, 2, 1], 3),
            (&[4, 4, 4, 4], 4),
            (&[6, 5, 5, 4, 4, 3, 3], 3),
            (&[1, 1, 1, 1, 1, 5], 2),
            (&[0, 0, 0], 2),
        ];
        for (vals, d) in cases {
            let v = ints(vals);
            assert_eq!(
                mms_exact(&v, *d).unwrap().value,
                mms_bruteforce(&v, *d).unwrap(),
                "mismatch on {vals:?} d={d}"
            );
        }
    }

    #[test]
    fn monotone_in_bundle_count() {
        let v = ints(&[12, 9, 7, 4, 4, 2, 1]);
        let mut prev = mms_value(&v, 1).unwrap();
        for d in 2..=6 {
            let cur = mms_value(&v, d).unwrap();
            assert!(cur <= prev);
            prev = cur;
        }
    }

    #[test]
    fn scale_equivariant() {
        let v = ints(&[7, 5, 4, 3, 2]);
        let c = rat(3, 7);
        let scaled: Vec<Rational> = v.iter().map(|x| x * &c).collect();
        let a = mms_exact(&v, 2).unwrap();
        let b = mms_exact(&scaled, 2).unwrap();
        assert_eq!(b.value, &a.value * &c);
        assert_eq!(a.partition, b.partition);
    }

    #[test]
    fn upper_bounded_by_average() {
        let v = ints(&[11, 7, 5, 3, 2, 2]);
        for d in 1..=5 {
            let total: Rational = v.iter().sum();
            let avg = total / rat_int(d as i64);
            assert!(mms_value(&v, d as usize).unwrap() <= avg);
        }
    }

    #[test]
    fn bigint_fallback_path() {
        // denominators engineered so the common scale exceeds u128
        let huge = BigInt::from(u128::MAX);
        let v = vec![
            Rational::new(BigInt::one(), huge.clone()),
            Rational::new(BigInt::one(), &huge + BigInt::from(2)),
            Rational::one(),
        ];
        let r = mms_exact(&v, 2).unwrap();
        let min = r.partition.iter().map(|b| b.value(&v)).min().unwrap();
        assert_eq!(min, r.value);
    }
}
