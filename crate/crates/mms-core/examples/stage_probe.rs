// which pipeline stage is slow on seed 648?
use mms_core::model::canonicalize_types_with_map;
use mms_core::oracle::{mms_exact, mms_value};
use mms_core::pipeline::{build_oni, order_instance};
use mms_core::rational::{format_rational, rat, rat_int};
use mms_core::shv::build_shv_partition;
use mms_core::verify::check_oni_properties;
use mms_core::TypedInstance;
use std::time::Instant;

fn main() {
    let rows: [&[i64]; 3] = [
        &[8, 11, 15, 15, 16, 4, 8, 16, 17, 13, 2, 6, 9, 1, 9, 5, 6, 4, 6, 4, 12, 11, 10, 8, 16, 9, 15, 8],
        &[15, 7, 15, 9, 6, 7, 19, 1, 12, 6, 3, 11, 0, 5, 19, 11, 1, 15, 0, 3, 7, 18, 0, 19, 7, 0, 6, 12],
        &[8, 7, 10, 8, 7, 5, 13, 4, 3, 8, 0, 5, 1, 1, 13, 11, 17, 1, 19 as i64, 2, 7, 13, 0, 7, 5, 6, 20, 3],
    ];
    // counts 4, 2, 1
    let vals: Vec<Vec<_>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rat_int(x)).collect())
        .collect();
    let inst = TypedInstance::new(28, vec![4, 2, 1], vals).unwrap();
    let (canon, _) = canonicalize_types_with_map(&inst);
    let (probe, _) = order_instance(&canon);
    let (pm, _) = canonicalize_types_with_map(&probe);
    println!("k' = {}", pm.k());

    let t = Instant::now();
    let (oni, _tr) = build_oni(&canon, &rat(16, 21)).unwrap();
    println!("build_oni: {:?}; oni k={} n={} m={}", t.elapsed(), oni.k(), oni.n(), oni.m);

    for (t_idx, v) in oni.valuations.iter().enumerate() {
        let t = Instant::now();
        let val = mms_value(v, oni.n()).unwrap();
        println!(
            "  mms_value(type {t_idx}, d={}) = {} in {:?}",
            oni.n(),
            format_rational(&val),
            t.elapsed()
        );
        let t = Instant::now();
        let _ = mms_exact(v, oni.n()).unwrap();
        println!("  mms_exact witness in {:?}", t.elapsed());
    }

    let t = Instant::now();
    let shv = build_shv_partition(&oni.valuations[0], oni.n(), None);
    println!("shv: {:?} ok={}", t.elapsed(), shv.is_ok());

    let t = Instant::now();
    let findings = check_oni_properties(&oni, &rat(16, 21));
    println!("check_oni: {:?} findings={}", t.elapsed(), findings.len());
}
