// quick perf probe for the exact search at acceptance scale
use mms_core::oracle::{mms_exact, mms_value};
use mms_core::rational::rat_int;
use rand::{Rng, SeedableRng};
use std::time::Instant;

fn main() {
    let mut worst_val = std::time::Duration::ZERO;
    let mut worst_wit = std::time::Duration::ZERO;
    let start = Instant::now();
    for seed in 0..200u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=7);
        let m = rng.gen_range(n..=3 * n);
        let values: Vec<_> = (0..m).map(|_| rat_int(rng.gen_range(0..=20))).collect();
        let t0 = Instant::now();
        let v = mms_value(&values, n).unwrap();
        worst_val = worst_val.max(t0.elapsed());
        let t1 = Instant::now();
        let r = mms_exact(&values, n).unwrap();
        worst_wit = worst_wit.max(t1.elapsed());
        assert_eq!(r.value, v);
    }
    println!(
        "200 draws in {:?} (worst value {:?}, worst witness {:?})",
        start.elapsed(),
        worst_val,
        worst_wit
    );
    // hard case: many equal items
    let values: Vec<_> = (0..21).map(|_| rat_int(20)).collect();
    let t = Instant::now();
    let r = mms_exact(&values, 7).unwrap();
    println!("all-equal m=21 d=7: {:?} value={}", t.elapsed(), r.value);
    let values: Vec<_> = (0..21).map(|i| rat_int(20 - (i % 3))).collect();
    let t = Instant::now();
    let r = mms_exact(&values, 7).unwrap();
    println!("near-equal m=21 d=7: {:?} value={}", t.elapsed(), r.value);
}
