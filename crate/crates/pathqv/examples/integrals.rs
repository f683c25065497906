//! Lebesgue-Stieltjes and left-endpoint Riemann-sum integrals, simple trading
//! strategies, and integration by parts - all exact finite sums on step paths.

use pathqv::integrals::{
    follmer_integral, ibp_residual_typical, lebesgue_stieltjes, simple_strategy_integral,
    SimpleStrategy,
};
use pathqv::partitions::{lebesgue_1d, Partition};
use pathqv::paths::synth_walk;
use pathqv::quadvar::discrete_qv;

fn main() {
    let walk = synth_walk(4096, 1.0, 2f64.powi(-6), 13).unwrap();

    // self-integral along a refining Lebesgue ladder: once the grid refines
    // every sample the Riemann sums stop moving
    let ladder: Vec<Partition> =
        (3..=8).map(|n| lebesgue_1d(&walk, n).unwrap().partition).collect();
    let (levels, cauchy) = follmer_integral(&walk, &walk, &ladder, 1e-9).unwrap();
    println!("int S dS along Lebesgue levels 3..8:");
    for (lvl, proc) in levels.iter().enumerate() {
        println!("  level {}: value at T = {:.6}", lvl + 3, proc.total());
    }
    println!("  sup diffs {:?}", cauchy.sup_diffs);
    println!("  converged: {}", cauchy.converged);

    // the closed form at full refinement: (w(T)^2 - w(0)^2)/2 - [S,S]_T/2
    let full = Partition::all_samples(&walk);
    let qv = discrete_qv(&walk, &full);
    let k = walk.len() - 1;
    let closed = 0.5 * walk.scalar(k).powi(2) - 0.5 * qv.entry(k, 0, 0);
    let (exact, _) = follmer_integral(&walk, &walk, &[full.clone()], 1e-12).unwrap();
    println!("\nfull refinement: integral {:.6} closed form {closed:.6}", exact[0].total());

    // Stieltjes against a finite-variation integrator, and integration by parts
    let ls = lebesgue_stieltjes(&walk, &walk).unwrap();
    println!("Stieltjes form of the same sum: {:.6}", ls.total());
    let ibp = ibp_residual_typical(&walk, &qv, 0, 0, &[full.clone()]).unwrap();
    println!("integration-by-parts sup residual: {:.2e}", ibp.sup_residual);

    // buy-and-hold on a coarse partition == the coarse Riemann sum, exactly
    let coarse = Partition::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], 1.0).unwrap();
    let h = SimpleStrategy::from_path(&walk, &coarse).unwrap();
    let gains = simple_strategy_integral(&h, &walk).unwrap();
    let (riemann, _) = follmer_integral(&walk, &walk, &[coarse], 1e-12).unwrap();
    println!(
        "\nquarterly rebalanced strategy: gains {:.6}, coarse Riemann sum {:.6}",
        gains.total(),
        riemann[0].total()
    );
}
