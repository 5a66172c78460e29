// dissect the hard seed-425 instance
use mms_core::oracle::{mms_exact, mms_value};
use mms_core::rational::rat_int;
use std::time::Instant;

fn main() {
    let rows: [&[i64]; 3] = [
        &[1, 9, 15, 20, 15, 5, 7, 11, 19, 7, 9, 16, 16, 10, 1, 14, 19, 1, 3, 16, 7, 20, 2, 8, 15, 12, 1],
        &[15, 16, 3, 13, 14, 16, 20, 16, 17, 13, 16, 9, 20, 9, 7, 8, 7, 20, 11, 17, 9, 9, 10, 11, 10, 16, 12],
        &[4, 8, 8, 4, 18, 11, 5, 14, 6, 13, 17, 12, 9, 14, 2, 14, 20, 0, 9, 16, 19, 5, 3, 16, 7, 19, 11],
    ];
    for (t, row) in rows.iter().enumerate() {
        let values: Vec<_> = row.iter().map(|&x| rat_int(x)).collect();
        for d in [6usize, 7] {
            let t0 = Instant::now();
            let v = mms_value(&values, d).unwrap();
            let t1 = t0.elapsed();
            let t0 = Instant::now();
            let e = mms_exact(&values, d).unwrap();
            let t2 = t0.elapsed();
            assert_eq!(e.value, v);
            println!("type {t} d={d}: value {v} in {t1:?}, witness in {t2:?}");
        }
    }
}
