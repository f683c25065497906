//! Exact truncated variation `TV^c`, the finite-variation companion path
//! (dead-zone tracking), their sandwich and integral identities, and the
//! `c * TV^c` estimators of the continuous quadratic variation.

use crate::error::{PathError, Result};
use crate::numeric::KahanSum;
use crate::partitions::drawupdown;
use crate::paths::SampledPath;
use crate::quadvar::QVMatrixProcess;
use serde::Serialize;

/// Running truncated variation for a fixed truncation parameter.
#[derive(Clone, Debug)]
pub struct TVResult {
    pub c: f64,
    /// `TV^c(f, [0, t_k])` at every sample time.
    pub running: Vec<f64>,
    pub total: f64,
}

impl TVResult {
    /// Serializes as CSV `t,tv_running`.
    pub fn write_csv<W: std::io::Write>(&self, times: &[f64], mut out: W) -> Result<()> {
        writeln!(out, "t,tv_running")?;
        for (t, v) in times.iter().zip(&self.running) {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

fn require_1d(path: &SampledPath) -> Result<()> {
    if path.dim() != 1 {
        return Err(PathError::NotOneDimensional(path.dim()));
    }
    Ok(())
}

/// Reference quadratic-time dynamic program for the supremum
/// `sup sum max(|f(t_ij) - f(t_i(j-1))| - c, 0)` over all subsequences.
pub fn truncated_variation(path: &SampledPath, c: f64) -> Result<TVResult> {
    require_1d(path)?;
    if c < 0.0 {
        return Err(PathError::InvalidParameter("truncation parameter must be >= 0".into()));
    }
    let m = path.len();
    let mut best = vec![0.0f64; m]; // best value of a subsequence ending at i
    let mut running = Vec::with_capacity(m);
    let mut run_max = 0.0f64;
    for i in 0..m {
        let xi = path.scalar(i);
        let mut b = 0.0f64;
        for j in 0..i {
            let gain = ((xi - path.scalar(j)).abs() - c).max(0.0);
            b = b.max(best[j] + gain);
        }
        best[i] = b;
        run_max = run_max.max(b);
        running.push(run_max);
    }
    Ok(TVResult { c, running, total: run_max })
}

/// Linear-time fast path: the same dynamic program with the inner maxima
/// maintained as running prefix maxima of `B[j] - x_j`, `B[j] + x_j` and
/// `B[j]`. Certified against the quadratic DP by the equivalence suite.
pub fn truncated_variation_fast(path: &SampledPath, c: f64) -> Result<TVResult> {
    require_1d(path)?;
    if c < 0.0 {
        return Err(PathError::InvalidParameter("truncation parameter must be >= 0".into()));
    }
    let m = path.len();
    let x0 = path.scalar(0);
    let mut up = -x0; // max over j of B[j] - x_j
    let mut down = x0; // max over j of B[j] + x_j
    let mut run_max = 0.0f64;
    let mut running = Vec::with_capacity(m);
    running.push(0.0);
    for i in 1..m {
        let xi = path.scalar(i);
        let b = (up + xi - c).max(down - xi - c).max(run_max);
        run_max = run_max.max(b);
        up = up.max(b - xi);
        down = down.max(b + xi);
        running.push(run_max);
    }
    Ok(TVResult { c, running, total: run_max })
}

/// Exhaustive maximum over all `2^m` subsequences; the test oracle. Supports
/// several truncation parameters in one sweep.
pub fn brute_force_tv_multi(path: &SampledPath, cs: &[f64]) -> Result<Vec<f64>> {
    require_1d(path)?;
    const MAX: usize = 18;
    let m = path.len();
    if m > MAX {
        return Err(PathError::PathTooLong { len: m, max: MAX });
    }
    let mut best = vec![0.0f64; cs.len()];
    let values: Vec<f64> = (0..m).map(|k| path.scalar(k)).collect();
    let mut sums = vec![0.0f64; cs.len()];
    for mask in 1u32..(1u32 << m) {
        for s in sums.iter_mut() {
            *s = 0.0;
        }
        let mut bits = mask;
        let mut prev: Option<f64> = None;
        while bits != 0 {
            let idx = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let x = values[idx];
            if let Some(p) = prev {
                let d = (x - p).abs();
                for (s, &c) in sums.iter_mut().zip(cs) {
                    *s += (d - c).max(0.0);
                }
            }
            prev = Some(x);
        }
        for (b, s) in best.iter_mut().zip(&sums) {
            if *s > *b {
                *b = *s;
            }
        }
    }
    Ok(best)
}

pub fn brute_force_tv(path: &SampledPath, c: f64) -> Result<f64> {
    Ok(brute_force_tv_multi(path, &[c])?[0])
}

/// The finite-variation companion path within uniform distance `c` of the
/// source, produced by coordinate-wise dead-zone tracking.
#[derive(Clone, Debug)]
pub struct RegularizedPath {
    pub c: f64,
    pub path: SampledPath,
    /// Total variation of each coordinate of the companion.
    pub tv_per_coord: Vec<f64>,
}

/// Dead-zone recursion: the companion moves only when the source escapes the
/// closed `c`-tube around it (a move of exactly `c` does not trigger).
pub fn regularize(path: &SampledPath, c: f64) -> Result<RegularizedPath> {
    if !(c > 0.0) {
        return Err(PathError::InvalidParameter("c must be > 0".into()));
    }
    let d = path.dim();
    let m = path.len();
    let mut state: Vec<f64> = path.value(0).to_vec();
    let mut values = Vec::with_capacity(m * d);
    values.extend_from_slice(&state);
    let mut tv: Vec<KahanSum> = vec![KahanSum::new(); d];
    for k in 1..m {
        for i in 0..d {
            let x = path.value(k)[i];
            if x > state[i] + c {
                tv[i].add(x - c - state[i]);
                state[i] = x - c;
            } else if x < state[i] - c {
                tv[i].add(state[i] - (x + c));
                state[i] = x + c;
            }
        }
        values.extend_from_slice(&state);
    }
    let companion = SampledPath::new(d, path.horizon(), path.times().to_vec(), values)?;
    Ok(RegularizedPath { c, path: companion, tv_per_coord: tv.iter().map(|k| k.value()).collect() })
}

/// Result of the `TV^{2c} <= TV(w^c) <= TV^{2c} + 2c` sandwich check at every
/// sample time of a 1-d path.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichCheck {
    pub c: f64,
    pub tv_2c_total: f64,
    pub tv_regularized_total: f64,
    /// Worst violation of the lower resp. upper bound (0 when the sandwich holds).
    pub max_lower_violation: f64,
    pub max_upper_violation: f64,
}

/// Verifies the sandwich at every sample time; a violation beyond round-off
/// signals an implementation bug and is reported as an error.
pub fn tv_sandwich_check(path: &SampledPath, c: f64) -> Result<SandwichCheck> {
    require_1d(path)?;
    if !(c > 0.0) {
        return Err(PathError::InvalidParameter("c must be > 0".into()));
    }
    let tv2c = truncated_variation_fast(path, 2.0 * c)?;
    let reg = regularize(path, c)?;
    // TV^0 of a step path is the running sum of absolute increments
    let mut acc = KahanSum::new();
    let mut reg_running = Vec::with_capacity(path.len());
    reg_running.push(0.0);
    for k in 1..path.len() {
        acc.add((reg.path.scalar(k) - reg.path.scalar(k - 1)).abs());
        reg_running.push(acc.value());
    }
    let mut max_lower = 0.0f64;
    let mut max_upper = 0.0f64;
    for k in 0..path.len() {
        max_lower = max_lower.max(tv2c.running[k] - reg_running[k]);
        max_upper = max_upper.max(reg_running[k] - tv2c.running[k] - 2.0 * c);
    }
    let scale = 1.0 + tv2c.total.abs() + acc.value().abs();
    let check = SandwichCheck {
        c,
        tv_2c_total: tv2c.total,
        tv_regularized_total: acc.value(),
        max_lower_violation: max_lower.max(0.0),
        max_upper_violation: max_upper.max(0.0),
    };
    if max_lower > 1e-12 * scale || max_upper > 1e-12 * scale {
        return Err(PathError::InvariantViolation(format!(
            "truncated-variation sandwich breached at c = {c}: lower gap {max_lower}, upper gap {max_upper}"
        )));
    }
    Ok(check)
}

/// Both sides of `c * TV(w^c)(t) = int_(0,t] (w - w^c) dw^c` and the largest
/// absolute residual over the sample grid (integrand at the post-jump value).
#[derive(Clone, Debug, Serialize)]
pub struct IntegralIdentityCheck {
    pub c: f64,
    pub lhs_total: f64,
    pub rhs_total: f64,
    pub max_residual: f64,
}

pub fn tv_integral_identity(path: &SampledPath, c: f64) -> Result<IntegralIdentityCheck> {
    require_1d(path)?;
    let reg = regularize(path, c)?;
    let mut tv_acc = KahanSum::new();
    let mut int_acc = KahanSum::new();
    let mut max_residual = 0.0f64;
    for k in 1..path.len() {
        let d_reg = reg.path.scalar(k) - reg.path.scalar(k - 1);
        tv_acc.add(d_reg.abs());
        int_acc.add((path.scalar(k) - reg.path.scalar(k)) * d_reg);
        max_residual = max_residual.max((c * tv_acc.value() - int_acc.value()).abs());
    }
    Ok(IntegralIdentityCheck {
        c,
        lhs_total: c * tv_acc.value(),
        rhs_total: int_acc.value(),
        max_residual,
    })
}

/// One `c` of the truncated-variation estimate of the continuous quadratic
/// (co)variation: diagonal entries `c * TV^c(w^i)`, off-diagonal entries
/// `c * (TV^c(w^i + w^j) - TV^c(w^i - w^j)) / 4`.
#[derive(Clone, Debug)]
pub struct TvQvEstimate {
    pub c: f64,
    pub times: Vec<f64>,
    /// Running `d x d` estimate process, row-major per time (statement form).
    pub process: Vec<f64>,
    /// Terminal matrix of the statement form `c * TV^c`.
    pub estimate_final: Vec<f64>,
    /// Terminal matrix of the proof form `2c * TV^{2c}`.
    pub scaled_final: Vec<f64>,
    /// Sup-norm distance of the estimate process from the reference continuous
    /// part, when a reference was supplied.
    pub sup_err_vs_reference: Option<f64>,
}

/// Per-`c` estimates of the continuous QV from truncated variation. Both the
/// statement form `c * TV^c` and the proof form `2c * TV^{2c}` are emitted.
pub fn qv_via_tv(
    path: &SampledPath,
    c_list: &[f64],
    reference: Option<&QVMatrixProcess>,
) -> Result<Vec<TvQvEstimate>> {
    if c_list.is_empty() || c_list.iter().any(|c| !(*c > 0.0)) {
        return Err(PathError::InvalidParameter("c grid must be positive".into()));
    }
    if c_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(PathError::InvalidParameter("c grid must be decreasing".into()));
    }
    let d = path.dim();
    let dd = d * d;
    let m = path.len();
    let coords: Vec<SampledPath> = (0..d).map(|i| path.coordinate(i)).collect();
    let mut out = Vec::with_capacity(c_list.len());
    for &c in c_list {
        let mut process = vec![0.0; m * dd];
        let mut scaled_final = vec![0.0; dd];
        for i in 0..d {
            let tv = truncated_variation_fast(&coords[i], c)?;
            let tv2 = truncated_variation_fast(&coords[i], 2.0 * c)?;
            for k in 0..m {
                process[k * dd + i * d + i] = c * tv.running[k];
            }
            scaled_final[i * d + i] = 2.0 * c * tv2.total;
            for j in i + 1..d {
                let sum = path.coordinate_sum(i, j);
                let diff = path.coordinate_diff(i, j);
                let tv_sum = truncated_variation_fast(&sum, c)?;
                let tv_diff = truncated_variation_fast(&diff, c)?;
                for k in 0..m {
                    let v = c * (tv_sum.running[k] - tv_diff.running[k]) / 4.0;
                    process[k * dd + i * d + j] = v;
                    process[k * dd + j * d + i] = v;
                }
                let tv2_sum = truncated_variation_fast(&sum, 2.0 * c)?;
                let tv2_diff = truncated_variation_fast(&diff, 2.0 * c)?;
                let v2 = 2.0 * c * (tv2_sum.total - tv2_diff.total) / 4.0;
                scaled_final[i * d + j] = v2;
                scaled_final[j * d + i] = v2;
            }
        }
        let estimate_final = process[(m - 1) * dd..].to_vec();
        // the supplied process is taken as the continuous QV reference itself
        let sup_err_vs_reference = reference.map(|r| {
            let mut err = 0.0f64;
            for k in 0..m {
                let cont = r.matrix_at(k);
                for e in 0..dd {
                    err = err.max((process[k * dd + e] - cont[e]).abs());
                }
            }
            err
        });
        out.push(TvQvEstimate {
            c,
            times: path.times().to_vec(),
            process,
            estimate_final,
            scaled_final,
            sup_err_vs_reference,
        });
    }
    Ok(out)
}

/// Finite evaluation of the drawup/drawdown correction sum and the combined
/// partition's discrete quadratic variation at the horizon.
#[derive(Clone, Debug, Serialize)]
pub struct PropositionCheck {
    pub level: i32,
    pub residual: f64,
    pub combined_qv: f64,
}

/// Evaluates the correction sum over the drawup/drawdown skeleton (signs
/// `(-1)^{k+1}` in the up-first branch, `(-1)^k` otherwise) together with the
/// discrete QV along the combined partition.
pub fn proposition_residual(path: &SampledPath, n: i32) -> Result<PropositionCheck> {
    require_1d(path)?;
    let trace = drawupdown(path, n)?;
    let horizon = path.horizon();
    let threshold = 2f64.powi(-n);
    let up_first = trace
        .directions
        .first()
        .map_or(false, |d| *d == crate::partitions::Direction::Up);
    let mut residual = KahanSum::new();
    let last_k = trace.rho.len().saturating_sub(1);
    for k in 1..=last_k {
        let (next, indicator) = if k + 1 < trace.rho.len() {
            (trace.rho[k + 1].min(horizon), trace.indicator[k])
        } else {
            (horizon, false)
        };
        let sigma = {
            let exp = if up_first { k + 1 } else { k };
            if exp % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let tau = trace.tau_last_before_next(k).min(horizon);
        let w_next = path.scalar_at(next);
        let w_tau = path.scalar_at(tau);
        let correction = if indicator { sigma * threshold } else { 0.0 };
        residual.add(threshold * (w_next + correction - w_tau).abs() - (w_next - w_tau).powi(2));
    }
    let mut qv = KahanSum::new();
    for w in trace.combined.times().windows(2) {
        qv.add((path.scalar_at(w[1]) - path.scalar_at(w[0])).powi(2));
    }
    Ok(PropositionCheck { level: n, residual: residual.value(), combined_qv: qv.value() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::synth_walk;
    use rand::{Rng, SeedableRng};

    fn path_1d(times: &[f64], values: &[f64]) -> SampledPath {
        SampledPath::scalar_path(times.to_vec(), values.to_vec(), *times.last().unwrap()).unwrap()
    }

    fn random_path(len: usize, seed: u64) -> SampledPath {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let times: Vec<f64> = (0..len).map(|k| k as f64).collect();
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        path_1d(&times, &values)
    }

    #[test]
    fn tv_constant_path_zero() {
        let p = path_1d(&[0.0, 1.0, 2.0], &[5.0, 5.0, 5.0]);
        for c in [0.0, 0.3, 2.0] {
            assert_eq!(truncated_variation(&p, c).unwrap().total, 0.0);
        }
    }

    #[test]
    fn tv_monotone_rise_single_increment() {
        // splitting a monotone rise into k pieces loses (k-1)c
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.4, 0.7, 1.0]);
        let tv = truncated_variation(&p, 0.2).unwrap();
        assert!((tv.total - 0.8).abs() < 1e-15);
    }

    #[test]
    fn tv_square_wave_enumeration_value() {
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 0.0, 1.0]);
        let tv = truncated_variation(&p, 0.5).unwrap();
        assert!((tv.total - 1.5).abs() < 1e-15);
        assert_eq!(tv.total, brute_force_tv(&p, 0.5).unwrap());
    }

    #[test]
    fn tv_mixed_path_enumeration_value() {
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.3, -0.2, 0.5]);
        let tv = truncated_variation(&p, 0.5).unwrap();
        assert!((tv.total - 0.2).abs() < 1e-15);
        assert_eq!(tv.total, brute_force_tv(&p, 0.5).unwrap());
    }

    #[test]
    fn tv_zero_truncation_is_total_variation() {
        let p = random_path(40, 3);
        let tv = truncated_variation(&p, 0.0).unwrap();
        let direct: f64 = (1..p.len()).map(|k| (p.scalar(k) - p.scalar(k - 1)).abs()).sum();
        assert!((tv.total - direct).abs() < 1e-12);
    }

    #[test]
    fn brute_force_small_cases() {
        let p = path_1d(&[0.0, 1.0], &[0.0, 0.3]);
        assert_eq!(brute_force_tv(&p, 0.5).unwrap(), 0.0);
        let long = random_path(19, 1);
        assert!(matches!(brute_force_tv(&long, 0.1), Err(PathError::PathTooLong { .. })));
    }

    #[test]
    fn dp_matches_brute_force_on_random_paths() {
        let cs: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        for seed in 0..60u64 {
            let len = 4 + (seed as usize % 11);
            let p = random_path(len, seed);
            let oracle = brute_force_tv_multi(&p, &cs).unwrap();
            for (c, expect) in cs.iter().zip(&oracle) {
                let dp = truncated_variation(&p, *c).unwrap().total;
                let fast = truncated_variation_fast(&p, *c).unwrap().total;
                assert!((dp - expect).abs() <= 1e-12, "seed {seed} c {c}: dp {dp} oracle {expect}");
                assert!((fast - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn fast_path_matches_dp_running_values() {
        for seed in 0..20u64 {
            let p = random_path(50, seed + 100);
            for c in [0.0, 0.05, 0.3, 0.9] {
                let dp = truncated_variation(&p, c).unwrap();
                let fast = truncated_variation_fast(&p, c).unwrap();
                for k in 0..p.len() {
                    assert!(
                        (dp.running[k] - fast.running[k]).abs() <= 1e-12,
                        "seed {seed} c {c} k {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn tv_monotone_in_c_and_time() {
        let p = random_path(60, 7);
        let mut prev_running: Option<Vec<f64>> = None;
        for c in [0.0, 0.1, 0.25, 0.5, 1.0] {
            let tv = truncated_variation_fast(&p, c).unwrap();
            assert_eq!(tv.running[0], 0.0);
            for w in tv.running.windows(2) {
                assert!(w[1] + 1e-15 >= w[0]);
            }
            if let Some(prev) = &prev_running {
                for (hi, lo) in prev.iter().zip(&tv.running) {
                    assert!(lo <= &(hi + 1e-12), "TV must be nonincreasing in c");
                }
            }
            prev_running = Some(tv.running);
        }
    }

    #[test]
    fn tv_lipschitz_under_fv_perturbation() {
        // |TV^c(S+A) - TV^c(S)| <= TV^0(A)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let p = random_path(40, rng.gen());
            let perturb: Vec<f64> = (0..40).map(|_| rng.gen_range(-0.2..0.2)).collect();
            let tv_a: f64 = perturb.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            let shifted: Vec<f64> =
                (0..40).map(|k| p.scalar(k) + perturb[k]).collect();
            let q = path_1d(p.times(), &shifted);
            for c in [0.05, 0.2, 0.6] {
                let a = truncated_variation_fast(&p, c).unwrap().total;
                let b = truncated_variation_fast(&q, c).unwrap().total;
                assert!((a - b).abs() <= tv_a + 1e-12);
            }
        }
    }

    #[test]
    fn regularize_hand_recursion() {
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.3, -0.2, 0.5]);
        let reg = regularize(&p, 0.25).unwrap();
        let vals: Vec<f64> = (0..4).map(|k| reg.path.scalar(k)).collect();
        for (got, want) in vals.iter().zip([0.0, 0.05, 0.05, 0.25]) {
            assert!((got - want).abs() < 1e-15, "{vals:?}");
        }
        assert!((reg.tv_per_coord[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn regularize_dead_zone_never_exited() {
        let p = path_1d(&[0.0, 1.0, 2.0], &[0.0, 0.2, -0.3]);
        let reg = regularize(&p, 0.3).unwrap();
        for k in 0..3 {
            assert_eq!(reg.path.scalar(k), 0.0);
        }
    }

    #[test]
    fn regularize_monotone_one_sided_tracking() {
        let p = path_1d(&[0.0, 1.0, 2.0], &[0.0, 0.5, 1.0]);
        let reg = regularize(&p, 0.25).unwrap();
        assert_eq!(reg.path.scalar(2), 0.75);
        assert!((reg.tv_per_coord[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn regularize_properties_on_walks() {
        for seed in 0..10u64 {
            let p = synth_walk(512, 1.0, 0.05, seed).unwrap();
            for c in [0.1, 0.25, 0.5] {
                let reg = regularize(&p, c).unwrap();
                assert_eq!(reg.path.scalar(0), p.scalar(0));
                for k in 0..p.len() {
                    assert!((p.scalar(k) - reg.path.scalar(k)).abs() <= c + 1e-15);
                }
                for k in 1..p.len() {
                    let dj = (reg.path.scalar(k) - reg.path.scalar(k - 1)).abs();
                    let pj = (p.scalar(k) - p.scalar(k - 1)).abs();
                    assert!(dj <= pj + 1e-15);
                }
            }
        }
    }

    #[test]
    fn regularize_causality_by_truncation() {
        let p = synth_walk(256, 1.0, 0.07, 21).unwrap();
        let c = 0.2;
        let reg = regularize(&p, c).unwrap();
        let cut = p.times()[p.len() / 2];
        let reg_trunc = regularize(&p.truncate_at(cut), c).unwrap();
        for k in 0..p.len() {
            if p.times()[k] <= cut {
                assert_eq!(reg.path.scalar(k), reg_trunc.path.scalar(k));
            }
        }
    }

    #[test]
    fn sandwich_hand_example() {
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.3, -0.2, 0.5]);
        let check = tv_sandwich_check(&p, 0.25).unwrap();
        assert!((check.tv_2c_total - 0.2).abs() < 1e-15);
        assert!((check.tv_regularized_total - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sandwich_constant_path() {
        let p = path_1d(&[0.0, 1.0], &[1.0, 1.0]);
        let check = tv_sandwich_check(&p, 0.5).unwrap();
        assert_eq!(check.tv_2c_total, 0.0);
        assert_eq!(check.tv_regularized_total, 0.0);
    }

    #[test]
    fn sandwich_holds_on_random_walks() {
        for seed in 0..25u64 {
            let p = synth_walk(256, 1.0, 0.06, seed).unwrap();
            for k in 2..=6 {
                let c = 2f64.powi(-k);
                tv_sandwich_check(&p, c).unwrap();
            }
        }
    }

    #[test]
    fn integral_identity_hand_example() {
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.3, -0.2, 0.5]);
        let check = tv_integral_identity(&p, 0.25).unwrap();
        assert!((check.lhs_total - 0.0625).abs() < 1e-15);
        assert!((check.rhs_total - 0.0625).abs() < 1e-15);
        assert!(check.max_residual < 1e-15);
    }

    #[test]
    fn integral_identity_on_walks() {
        for seed in 0..25u64 {
            let p = synth_walk(512, 1.0, 0.04, seed).unwrap();
            for k in 2..=6 {
                let check = tv_integral_identity(&p, 2f64.powi(-k)).unwrap();
                let scale = 1.0 + check.lhs_total.abs() + check.rhs_total.abs();
                assert!(check.max_residual <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn qv_via_tv_pure_jump_estimates_vanish() {
        // finitely many jumps all larger than c_max: TV^c stays bounded, so
        // c * TV^c heads to 0, matching a zero continuous part
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, -0.5, 0.5]);
        let tv0: f64 = (1..4).map(|k| (p.scalar(k) - p.scalar(k - 1)).abs()).sum();
        let cs = [0.4, 0.2, 0.1, 0.05];
        let est = qv_via_tv(&p, &cs, None).unwrap();
        for (i, e) in est.iter().enumerate() {
            let tv_c = e.estimate_final[0] / e.c;
            assert!(tv_c <= tv0 + 1e-12);
            assert!(tv_c >= tv0 - 3.0 * e.c - 1e-12);
            if i > 0 {
                assert!(e.estimate_final[0] <= est[i - 1].estimate_final[0] + 1e-12);
            }
        }
        assert!(est.last().unwrap().estimate_final[0] < 0.2);
    }

    #[test]
    fn qv_via_tv_constant_path_zero() {
        let p = path_1d(&[0.0, 1.0], &[2.0, 2.0]);
        let est = qv_via_tv(&p, &[0.5, 0.25], None).unwrap();
        for e in est {
            assert_eq!(e.estimate_final[0], 0.0);
            assert_eq!(e.scaled_final[0], 0.0);
        }
    }

    #[test]
    fn qv_via_tv_rejects_bad_grid() {
        let p = path_1d(&[0.0, 1.0], &[0.0, 1.0]);
        assert!(qv_via_tv(&p, &[0.1, 0.2], None).is_err());
        assert!(qv_via_tv(&p, &[], None).is_err());
        assert!(qv_via_tv(&p, &[0.0], None).is_err());
    }

    #[test]
    fn proposition_trivial_paths() {
        let c = path_1d(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]);
        let check = proposition_residual(&c, 3).unwrap();
        assert_eq!(check.residual, 0.0);
        assert_eq!(check.combined_qv, 0.0);

        let mono = path_1d(&[0.0, 1.0, 2.0], &[0.0, 0.02, 0.05]);
        let check = proposition_residual(&mono, 3).unwrap();
        assert_eq!(check.residual, 0.0);
    }

    #[test]
    fn proposition_sweep_on_walk() {
        // meaningful regime is h << 2^-n: the residual shrinks as n grows while
        // the threshold stays well above the walk's step size
        let p = synth_walk(1 << 18, 1.0, 2f64.powi(-9), 17).unwrap();
        let target = 1.0; // sum of squared increments
        for (n, residual_bound) in [(4, 0.06), (5, 0.01), (6, 0.005)] {
            let check = proposition_residual(&p, n).unwrap();
            assert!(
                check.residual.abs() <= residual_bound,
                "n={n}: residual {} exceeds {residual_bound}",
                check.residual
            );
        }
        let check = proposition_residual(&p, 7).unwrap();
        assert!((check.combined_qv - target).abs() < 0.01);
    }
}
