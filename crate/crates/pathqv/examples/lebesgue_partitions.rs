//! Lebesgue partitions: stopping times at which a path reaches a new dyadic
//! grid level of spacing 2^-n.

use pathqv::partitions::{lebesgue_1d, lebesgue_multi, oscillation};
use pathqv::paths::{synth_walk, SampledPath};

fn main() {
    // a small hand path first: level spacing 0.5
    let p = SampledPath::scalar_path(
        vec![0.0, 1.0, 2.0, 3.0, 4.0],
        vec![0.1, 0.3, 0.6, 0.4, 1.1],
        4.0,
    )
    .unwrap();
    let trace = lebesgue_1d(&p, 1).unwrap();
    println!("hand path, n = 1 (grid 0.5):");
    for (k, t) in trace.partition.times().iter().enumerate() {
        println!("  pi_{k} = {t}  level value {}", trace.level_value(k));
    }

    // a seeded walk: oscillation along the partition shrinks like 2^-n
    let walk = synth_walk(4096, 1.0, 2f64.powi(-6), 1).unwrap();
    println!("\nwalk, oscillation along Lebesgue partitions:");
    for n in 2..=8 {
        let trace = lebesgue_1d(&walk, n).unwrap();
        println!(
            "  n = {n}: {:4} stopping times, oscillation {:.5} (threshold {:.5})",
            trace.partition.len(),
            oscillation(&walk, &trace.partition),
            2f64.powi(-n)
        );
    }

    // multidimensional version: union over coordinates and pairwise sums
    let values: Vec<f64> = (0..walk.len())
        .flat_map(|k| [walk.scalar(k), -0.5 * walk.scalar(k)])
        .collect();
    let two = SampledPath::new(2, 1.0, walk.times().to_vec(), values).unwrap();
    let multi = lebesgue_multi(&two, 5).unwrap();
    println!("\n2-d path, n = 5: {} union stopping times", multi.len());
}
