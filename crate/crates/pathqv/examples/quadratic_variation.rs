//! Discrete quadratic variation along refining Lebesgue partitions, its
//! jump/continuous split, and the polarization identity.

use pathqv::partitions::{lebesgue_multi, Partition};
use pathqv::paths::{synth_walk, SampledPath};
use pathqv::quadvar::{discrete_qv_with_jump_threshold, polarized_qv, qv_limit};

fn main() {
    // walk with h = 2^-8: at level n = 9 the dyadic grid refines every sample,
    // so the QV limit is hit exactly (sum of squared increments = 1)
    let walk = synth_walk(1 << 16, 1.0, 2f64.powi(-8), 7).unwrap();
    let (qv, report) = qv_limit(&walk, 3, 10, 1e-9).unwrap();
    println!("walk [S,S]_1 = {}", qv.entry(qv.len() - 1, 0, 0));
    println!("levels {:?}", report.levels);
    println!("consecutive sup diffs {:?}", report.sup_diffs);
    println!("converged: {}", report.converged);

    // jump decomposition: one big jump on top of the walk
    let mut values: Vec<f64> = (0..walk.len()).map(|k| walk.scalar(k)).collect();
    for v in values.iter_mut().skip(walk.len() / 2) {
        *v += 2.0;
    }
    let jumpy = SampledPath::scalar_path(walk.times().to_vec(), values, 1.0).unwrap();
    let qv = discrete_qv_with_jump_threshold(&jumpy, &Partition::all_samples(&jumpy), 0.5);
    let k = jumpy.len() - 1;
    println!(
        "\nwith an added jump of 2: total {:.4}, jump part {:.4}, continuous part {:.4}",
        qv.entry(k, 0, 0),
        qv.jump_at(k)[0],
        qv.cont_at(k)[0]
    );

    // polarization on a 2-d path: R - T = 4Q at every time
    let second = synth_walk(1 << 16, 1.0, 2f64.powi(-8), 8).unwrap();
    let values: Vec<f64> = (0..walk.len())
        .flat_map(|k| [walk.scalar(k), second.scalar(k)])
        .collect();
    let pair = SampledPath::new(2, 1.0, walk.times().to_vec(), values).unwrap();
    let partition = lebesgue_multi(&pair, 6).unwrap();
    let pol = polarized_qv(&pair, &partition, 0, 1).unwrap();
    let k = pair.len() - 1;
    println!(
        "\npolarization at T: R = {:.5}, T = {:.5}, (R - T)/4 = {:.5e}",
        pol.r[k],
        pol.t[k],
        pol.q[k]
    );
}
