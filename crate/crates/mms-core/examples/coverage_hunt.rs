// hunt for generator shapes that reach the deep solver branches end-to-end
use mms_core::driver::{solve_end_to_end, SolveBranch};
use mms_core::pipeline::build_oni;
use mms_core::rational::{rat, rat_int};
use mms_core::verify::OracleCaps;
use mms_core::TypedInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn gen(seed: u64, k: usize, n_range: (usize, usize), mpa: (usize, usize), lo: u64, hi: u64) -> TypedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(n_range.0..=n_range.1);
    let m = rng.gen_range(mpa.0 * n..=mpa.1 * n);
    let mut sizes = vec![1usize; k];
    for _ in 0..n - k {
        sizes[rng.gen_range(0..k)] += 1;
    }
    let vals = (0..k)
        .map(|_| (0..m).map(|_| rat_int(rng.gen_range(lo..=hi) as i64)).collect())
        .collect();
    TypedInstance::new(m, sizes, vals).unwrap()
}

fn gen_mix(seed: u64, k: usize, n_range: (usize, usize), mpa: (usize, usize)) -> TypedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(n_range.0..=n_range.1);
    let m = rng.gen_range(mpa.0 * n..=mpa.1 * n);
    let mut sizes = vec![1usize; k];
    for _ in 0..n - k {
        sizes[rng.gen_range(0..k)] += 1;
    }
    // per-type value palette: flat, steep, or bimodal
    let palettes: [&[i64]; 4] = [&[1, 2], &[1, 10], &[1, 2, 20], &[4, 5]];
    let vals = (0..k)
        .map(|_| {
            let palette = palettes[rng.gen_range(0..palettes.len())];
            (0..m)
                .map(|_| rat_int(palette[rng.gen_range(0..palette.len())]))
                .collect()
        })
        .collect();
    TypedInstance::new(m, sizes, vals).unwrap()
}

fn gen_directed(
    seed: u64,
    n_range: (usize, usize),
    mpa: (usize, usize),
    palettes: [&[i64]; 3],
) -> TypedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(n_range.0..=n_range.1);
    let m = rng.gen_range(mpa.0 * n..=mpa.1 * n);
    let mut sizes = vec![1usize; 3];
    for _ in 0..n - 3 {
        sizes[rng.gen_range(0..3)] += 1;
    }
    let vals = palettes
        .iter()
        .map(|palette| {
            (0..m)
                .map(|_| rat_int(palette[rng.gen_range(0..palette.len())]))
                .collect()
        })
        .collect();
    TypedInstance::new(m, sizes, vals).unwrap()
}

fn main() {
    let caps = OracleCaps::unlimited();

    // directed shapes: flat majority, spiky minorities
    let directed: &[(&str, (usize, usize), (usize, usize), [&[i64]; 3])] = &[
        ("d-case4", (9, 12), (3, 4), [&[4, 5], &[1, 10], &[1, 10]]),
        ("d-case1", (9, 12), (3, 4), [&[4, 5], &[1, 10], &[2, 3]]),
        ("d-sparse", (9, 12), (2, 3), [&[4, 5], &[0, 1, 10], &[0, 1, 10]]),
    ];
    for &(label, nr, mpa, palettes) in directed {
        let mut hist: BTreeMap<&'static str, usize> = BTreeMap::new();
        let mut fails = 0;
        for seed in 0..2000u64 {
            let inst = gen_directed(seed * 2741 + 1, nr, mpa, palettes);
            match solve_end_to_end(&inst, &caps) {
                Ok(out) => {
                    *hist.entry(out.branch.name()).or_insert(0) += 1;
                    if out.report.map(|r| !r.pass).unwrap_or(false) {
                        fails += 1;
                        println!("  FAIL {label} seed {seed}");
                    }
                    if matches!(
                        out.branch,
                        SolveBranch::ThreeTypeCase4
                            | SolveBranch::TwoTypePooled
                            | SolveBranch::ThreeTypeCase2Pooled
                            | SolveBranch::ThreeTypeCase1
                    ) && hist[out.branch.name()] <= 5
                    {
                        println!("  {} at {label} seed {seed}", out.branch.name());
                    }
                }
                Err(e) => {
                    fails += 1;
                    println!("  ERR {label} seed {seed}: {e}");
                }
            }
        }
        println!("{label}: fails={fails} {hist:?}");
    }

    for (label, k, nr, mpa) in [
        ("mix3", 3usize, (6usize, 9usize), (2usize, 4usize)),
        ("mix3big", 3, (9, 12), (2, 4)),
        ("mix2", 2, (4, 8), (2, 4)),
    ] {
        let mut hist: BTreeMap<&'static str, usize> = BTreeMap::new();
        let mut fails = 0;
        for seed in 0..2000u64 {
            let inst = gen_mix(seed * 6151 + 3, k, nr, mpa);
            match solve_end_to_end(&inst, &caps) {
                Ok(out) => {
                    *hist.entry(out.branch.name()).or_insert(0) += 1;
                    if out.report.map(|r| !r.pass).unwrap_or(false) {
                        fails += 1;
                        println!("  FAIL {label} seed {seed}");
                    }
                    if matches!(
                        out.branch,
                        SolveBranch::ThreeTypeCase4
                            | SolveBranch::TwoTypePooled
                            | SolveBranch::ThreeTypeCase2Pooled
                            | SolveBranch::ThreeTypeCase1
                    ) && hist[out.branch.name()] <= 3
                    {
                        println!("  {} at {label} seed {seed}", out.branch.name());
                    }
                }
                Err(e) => {
                    fails += 1;
                    println!("  ERR {label} seed {seed}: {e}");
                }
            }
        }
        println!("{label}: fails={fails} {hist:?}");
    }

    // (label, k, n range, m per agent, value lo, value hi)
    let shapes: &[(&str, usize, (usize, usize), (usize, usize), u64, u64)] = &[
        ("flat12", 3, (6, 9), (2, 4), 1, 2),
        ("flat13", 3, (6, 9), (2, 4), 1, 3),
        ("flat12-n9", 3, (9, 9), (3, 4), 1, 2),
        ("wide", 3, (6, 9), (2, 4), 1, 20),
        ("flat2t", 2, (4, 8), (2, 4), 1, 2),
        ("mid2t", 2, (4, 8), (2, 4), 1, 5),
    ];
    for &(label, k, nr, mpa, lo, hi) in shapes {
        let mut hist: BTreeMap<&'static str, usize> = BTreeMap::new();
        let mut fails = 0;
        for seed in 0..1500u64 {
            let inst = gen(seed * 7919 + 13, k, nr, mpa, lo, hi);
            match solve_end_to_end(&inst, &caps) {
                Ok(out) => {
                    *hist.entry(out.branch.name()).or_insert(0) += 1;
                    if out.report.map(|r| !r.pass).unwrap_or(false) {
                        fails += 1;
                        println!("  FAIL {label} seed {seed}");
                    }
                    if out.branch == SolveBranch::ThreeTypeCase4
                        || out.branch == SolveBranch::TwoTypePooled
                        || out.branch == SolveBranch::ThreeTypeCase2Pooled
                        || out.branch == SolveBranch::ThreeTypeCase1
                    {
                        if hist[out.branch.name()] <= 3 {
                            println!("  {} at {label} seed {seed}", out.branch.name());
                        }
                    }
                }
                Err(e) => {
                    fails += 1;
                    println!("  ERR {label} seed {seed}: {e}");
                }
            }
        }
        println!("{label}: fails={fails} {hist:?}");
    }

    // 1-type nonempty-ONI rate for the SHV criterion
    let mut nonempty = 0;
    for seed in 0..500u64 {
        let inst = gen(seed * 104729 + 7, 1, (2, 8), (2, 4), 1, 20);
        let (oni, _) = build_oni(&inst, &rat(4, 5)).unwrap();
        if oni.k() > 0 {
            nonempty += 1;
        }
    }
    println!("1-type nonempty ONI rate: {nonempty}/500");
}
