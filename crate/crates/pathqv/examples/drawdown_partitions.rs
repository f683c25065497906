//! Drawup/drawdown stopping times and the combined partition they form
//! together with the intra-move times.

use pathqv::partitions::{drawupdown, Direction};
use pathqv::paths::{synth_walk, SampledPath};

fn main() {
    // sawtooth: every reversal of size >= 0.5 is detected at n = 1
    let saw = SampledPath::scalar_path(
        (0..=6).map(|k| k as f64).collect(),
        vec![0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0],
        6.0,
    )
    .unwrap();
    let trace = drawupdown(&saw, 1).unwrap();
    println!("sawtooth, threshold 0.5:");
    for (k, (rho, dir)) in trace.rho.iter().zip(&trace.directions).enumerate() {
        let arrow = if *dir == Direction::Up { "drawup" } else { "drawdown" };
        println!("  rho_{k} = {rho}  ({arrow})");
    }
    println!("  combined partition: {:?}", trace.combined.times());

    let walk = synth_walk(4096, 1.0, 2f64.powi(-6), 5).unwrap();
    println!("\nwalk, alternating reversal counts by threshold:");
    for n in 2..=7 {
        let trace = drawupdown(&walk, n).unwrap();
        let intra: usize = trace.intra.iter().map(Vec::len).sum();
        println!(
            "  n = {n}: {:4} reversal times, {:5} intra times, combined size {:5}",
            trace.rho.len(),
            intra,
            trace.combined.len()
        );
    }
}
