//! End-to-end solving: canonicalize, build the ONI instance at the α the
//! type count dictates, dispatch to the matching solver, lift the result
//! back through the transcript, and verify against the exact oracle.

use num_traits::One;

use crate::error::SolveError;
use crate::model::{
    canonicalize_types_with_map, Allocation, Bundle, TypedInstance, TypeGroups,
};
use crate::oracle::mms_exact;
use crate::pipeline::{build_oni, lift_allocation, order_instance, Transcript};
use crate::rational::{rat, Rational};
use crate::three_type::{solve_three_type, Case4Trace, ThreeTypeBranch};
use crate::two_type::{solve_two_type, TwoTypeBranch};
use crate::verify::{verify_allocation, OracleCaps, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveBranch {
    /// No agents survived the reductions.
    Empty,
    OneType,
    TwoTypeDirect,
    TwoTypePooled,
    ThreeTypeCase1,
    ThreeTypeCase2Direct,
    ThreeTypeCase2Pooled,
    ThreeTypeCase3,
    ThreeTypeCase4,
}

impl SolveBranch {
    pub fn name(self) -> &'static str {
        match self {
            SolveBranch::Empty => "empty",
            SolveBranch::OneType => "one_type",
            SolveBranch::TwoTypeDirect => "two_type_direct",
            SolveBranch::TwoTypePooled => "two_type_pooled",
            SolveBranch::ThreeTypeCase1 => "three_type_case1",
            SolveBranch::ThreeTypeCase2Direct => "three_type_case2_direct",
            SolveBranch::ThreeTypeCase2Pooled => "three_type_case2_pooled",
            SolveBranch::ThreeTypeCase3 => "three_type_case3",
            SolveBranch::ThreeTypeCase4 => "three_type_case4",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Allocation over the input instance's agents and items.
    pub allocation: Allocation,
    /// 1, 4/5, or 16/21, fixed by the type count after ordering.
    pub guarantee: Rational,
    pub transcript: Transcript,
    /// The transformed instance the solver actually ran on (pre-merge).
    pub oni_instance: TypedInstance,
    pub branch: SolveBranch,
    pub case4_trace: Option<Case4Trace>,
    /// Oracle verification at the guarantee; `None` when the instance
    /// exceeds the verification cap.
    pub report: Option<VerificationReport>,
}

/// Splits a merged type's slots back across the original types it absorbed.
/// Any split is valid because merged types share one valuation.
fn unmerge_allocation(alloc: Allocation, map: &TypeGroups) -> Allocation {
    let mut out = Allocation::empty();
    let mut cursor = vec![0usize; map.len()]; // slots consumed per merged type
    for (slot, bundle) in alloc.bundles.into_iter().enumerate() {
        let merged = alloc.agent_types[slot];
        let mut offset = cursor[merged];
        cursor[merged] += 1;
        let mut original = None;
        for &(orig, count) in &map[merged] {
            if offset < count {
                original = Some(orig);
                break;
            }
            offset -= count;
        }
        out.push(original.expect("slot count matches group size"), bundle);
    }
    out.leftover = alloc.leftover;
    out
}

fn alpha_for(k: usize) -> Rational {
    match k {
        1 => Rational::one(),
        2 => rat(4, 5),
        _ => rat(16, 21),
    }
}

/// Canonicalize → pick α from the post-ordering type count → build the ONI
/// instance → solve → lift → verify.
pub fn solve_end_to_end(
    instance: &TypedInstance,
    caps: &OracleCaps,
) -> Result<SolveOutcome, SolveError> {
    instance.validate()?;
    let (canon, input_map) = canonicalize_types_with_map(instance);
    if canon.k() > 3 {
        return Err(SolveError::UnsupportedTypes(canon.k()));
    }

    // the effective type count: ordering can merge permuted valuations
    let (probe, _) = order_instance(&canon);
    let (probe_merged, _) = canonicalize_types_with_map(&probe);
    let guarantee = alpha_for(probe_merged.k());

    let (oni, transcript) = build_oni(&canon, &guarantee)?;

    // reductions can merge further; solvers want the merged, size-sorted view
    let (merged, merge_map) = canonicalize_types_with_map(&oni);
    // the normalize step's witness for the majority type, in final item ids:
    // an exact MMS partition of the ONI instance (every bundle worth 1)
    let majority_witness = transcript.final_witnesses().and_then(|mut w| {
        let first_member = merge_map.first()?.first()?.0;
        Some(std::mem::take(&mut w[first_member]))
    });
    let (assignments, solver_leftover, branch, trace): (
        Vec<(usize, Bundle)>,
        Bundle,
        SolveBranch,
        Option<Case4Trace>,
    ) = match merged.k() {
        0 => (
            Vec::new(),
            (1..=oni.m).collect(),
            SolveBranch::Empty,
            None,
        ),
        1 => {
            // the exact MMS partition is the allocation; every witness
            // bundle of a normalized instance is worth exactly 1
            let witness = match majority_witness {
                Some(w) => w,
                None => mms_exact(&merged.valuations[0], merged.n())?.partition,
            };
            (
                witness.into_iter().map(|b| (0, b)).collect(),
                Bundle::new(),
                SolveBranch::OneType,
                None,
            )
        }
        2 => {
            let sol = solve_two_type(&merged, majority_witness)?;
            let branch = match sol.branch {
                TwoTypeBranch::Direct => SolveBranch::TwoTypeDirect,
                TwoTypeBranch::Pooled => SolveBranch::TwoTypePooled,
            };
            (sol.assignments, sol.leftover, branch, None)
        }
        _ => {
            let sol = solve_three_type(&merged, majority_witness)?;
            let branch = match sol.branch {
                ThreeTypeBranch::Case1 => SolveBranch::ThreeTypeCase1,
                ThreeTypeBranch::Case2Direct => SolveBranch::ThreeTypeCase2Direct,
                ThreeTypeBranch::Case2Pooled => SolveBranch::ThreeTypeCase2Pooled,
                ThreeTypeBranch::Case3 => SolveBranch::ThreeTypeCase3,
                ThreeTypeBranch::Case4 => SolveBranch::ThreeTypeCase4,
            };
            (sol.assignments, sol.leftover, branch, sol.trace)
        }
    };

    let mut merged_alloc = Allocation::empty();
    for (t, bundle) in assignments {
        merged_alloc.push(t, bundle);
    }
    merged_alloc.leftover = solver_leftover;

    let oni_alloc = unmerge_allocation(merged_alloc, &merge_map);
    let mut canon_alloc = lift_allocation(&transcript, oni_alloc)?;

    // leftovers go to the first agent of the majority type: values are
    // non-negative, so completeness costs nothing
    if !canon_alloc.leftover.is_empty() && !canon_alloc.bundles.is_empty() {
        let extra = std::mem::take(&mut canon_alloc.leftover);
        canon_alloc.bundles[0] = canon_alloc.bundles[0].union(&extra);
    }

    let allocation = unmerge_allocation(canon_alloc, &input_map);
    allocation.validate_against(instance)?;

    let report = if instance.m <= caps.verify {
        Some(verify_allocation(instance, &allocation, &guarantee, caps)?)
    } else {
        None
    };

    Ok(SolveOutcome {
        allocation,
        guarantee,
        transcript,
        oni_instance: oni,
        branch,
        case4_trace: trace,
        report,
    })
}
