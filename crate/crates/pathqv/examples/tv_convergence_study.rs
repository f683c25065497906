//! The c*TV^c -> <S,S> convergence study, and the oscillator fixture where no
//! finite limit exists.

use pathqv::paths::{synth_oscillator, synth_walk};
use pathqv::quadvar::qv_limit;
use pathqv::truncvar::{qv_via_tv, truncated_variation_fast};

fn main() {
    let walk = synth_walk(1 << 18, 1.0, 2f64.powi(-9), 29).unwrap();
    // levels 9..11 all refine every sample of the 2^-9 walk, so the QV limit
    // is exact and the Cauchy diffs are identically zero
    let (reference, report) = qv_limit(&walk, 9, 11, 1e-9).unwrap();
    println!(
        "QV reference [S,S]_1 = {} (converged: {})",
        reference.entry(reference.len() - 1, 0, 0),
        report.converged
    );

    let grid: Vec<f64> = (3..=8).map(|k| 2f64.powi(-k)).collect();
    let estimates = qv_via_tv(&walk, &grid, Some(&reference)).unwrap();
    println!("\n    c        c*TV^c    2c*TV^2c   sup err vs reference");
    for e in &estimates {
        println!(
            "  2^{:3.0}   {:8.5}   {:8.5}   {:8.5}",
            e.c.log2(),
            e.estimate_final[0],
            e.scaled_final[0],
            e.sup_err_vs_reference.unwrap()
        );
    }

    // pathological path: n^2 oscillations of size 1/sqrt(n) on [1/(n+1), 1/n];
    // c*TV^c grows without bound as c shrinks, so no quadratic variation in
    // the truncated-variation sense
    let osc = synth_oscillator(100).unwrap();
    println!("\noscillator fixture ({} samples):", osc.len());
    for c in [0.5, 0.4, 0.3, 0.2, 0.15, 0.12] {
        let tv = truncated_variation_fast(&osc, c).unwrap().total;
        println!("  c = {c:4}: c*TV^c = {:9.2}", c * tv);
    }
    println!("  strictly increasing as c decreases: no finite limit detected");
}
