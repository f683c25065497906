//! Discrete quadratic (co)variation along partitions, its Lebesgue-partition
//! limit with Cauchy diagnostics, the jump/continuous split, and polarization.

use crate::error::{PathError, Result};
use crate::numeric::KahanSum;
use crate::partitions::{lebesgue_multi, oscillation, Partition};
use crate::paths::SampledPath;
use serde::Serialize;

/// Running d x d quadratic (co)variation process evaluated on the path's
/// sample grid, with the jump part `sum_{0<s<=t} dw^i dw^j` carried alongside.
/// The continuous part is the entry-wise difference.
#[derive(Clone, Debug)]
pub struct QVMatrixProcess {
    dim: usize,
    times: Vec<f64>,
    /// Row-major `m * d * d` matrices `[S^i,S^j]_t`.
    matrices: Vec<f64>,
    /// Same shape: running jump Gram sums.
    jump_part: Vec<f64>,
}

impl QVMatrixProcess {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn matrix_at(&self, k: usize) -> &[f64] {
        let dd = self.dim * self.dim;
        &self.matrices[k * dd..(k + 1) * dd]
    }

    pub fn jump_at(&self, k: usize) -> &[f64] {
        let dd = self.dim * self.dim;
        &self.jump_part[k * dd..(k + 1) * dd]
    }

    pub fn cont_at(&self, k: usize) -> Vec<f64> {
        self.matrix_at(k)
            .iter()
            .zip(self.jump_at(k))
            .map(|(m, j)| m - j)
            .collect()
    }

    pub fn entry(&self, k: usize, i: usize, j: usize) -> f64 {
        self.matrix_at(k)[i * self.dim + j]
    }

    /// Terminal matrix `[S]_T`.
    pub fn final_matrix(&self) -> &[f64] {
        self.matrix_at(self.len() - 1)
    }

    /// Frobenius norm of the terminal matrix, `|[S]_T|`.
    pub fn frobenius_final(&self) -> f64 {
        self.final_matrix().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Sup over times of the max-abs entry difference between two processes on
    /// the same evaluation grid.
    pub fn sup_norm_diff(&self, other: &QVMatrixProcess) -> f64 {
        assert_eq!(self.times, other.times, "processes must share the evaluation grid");
        self.matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Serializes as CSV `t, qv_11, ..., qv_dd, jump_11, ..., jump_dd`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let d = self.dim;
        let mut header = vec!["t".to_string()];
        for i in 1..=d {
            for j in 1..=d {
                header.push(format!("qv_{i}{j}"));
            }
        }
        for i in 1..=d {
            for j in 1..=d {
                header.push(format!("jump_{i}{j}"));
            }
        }
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.len() {
            let mut row = format!("{}", self.times[k]);
            for v in self.matrix_at(k).iter().chain(self.jump_at(k)) {
                row.push(',');
                row.push_str(&format!("{v}"));
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

/// Running jump Gram sums for one path; a change counts as a jump only when
/// its Euclidean magnitude exceeds `delta_jump` (0 means every change, the
/// exact step-path semantics).
fn jump_gram(path: &SampledPath, delta_jump: f64) -> Vec<f64> {
    let d = path.dim();
    let dd = d * d;
    let m = path.len();
    let mut out = vec![0.0; m * dd];
    let mut acc: Vec<KahanSum> = vec![KahanSum::new(); dd];
    for k in 1..m {
        let delta: Vec<f64> = (0..d).map(|i| path.value(k)[i] - path.value(k - 1)[i]).collect();
        let mag = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if mag > delta_jump || (delta_jump == 0.0 && mag > 0.0) {
            for i in 0..d {
                for j in 0..d {
                    acc[i * d + j].add(delta[i] * delta[j]);
                }
            }
        }
        for e in 0..dd {
            out[k * dd + e] = acc[e].value();
        }
    }
    out
}

/// Discrete quadratic (co)variation `Q^{i,j,tau}_t` along a partition,
/// evaluated at every sample time with the `^ t` capping of the paper's sums.
pub fn discrete_qv(path: &SampledPath, partition: &Partition) -> QVMatrixProcess {
    discrete_qv_with_jump_threshold(path, partition, 0.0)
}

pub fn discrete_qv_with_jump_threshold(
    path: &SampledPath,
    partition: &Partition,
    delta_jump: f64,
) -> QVMatrixProcess {
    let d = path.dim();
    let dd = d * d;
    let m = path.len();
    let taus = partition.times();
    let mut completed: Vec<KahanSum> = vec![KahanSum::new(); dd];
    let mut v_prev: Vec<f64> = path.value_at(taus[0]).to_vec();
    let mut pi = 1usize;
    let mut matrices = vec![0.0; m * dd];

    for k in 0..m {
        let t = path.times()[k];
        while pi < taus.len() && taus[pi] <= t {
            let v = path.value_at(taus[pi]);
            for i in 0..d {
                for j in 0..d {
                    completed[i * d + j].add((v[i] - v_prev[i]) * (v[j] - v_prev[j]));
                }
            }
            v_prev = v.to_vec();
            pi += 1;
        }
        let v = path.value(k);
        for i in 0..d {
            for j in 0..d {
                matrices[k * dd + i * d + j] =
                    completed[i * d + j].value() + (v[i] - v_prev[i]) * (v[j] - v_prev[j]);
            }
        }
    }

    QVMatrixProcess {
        dim: d,
        times: path.times().to_vec(),
        matrices,
        jump_part: jump_gram(path, delta_jump),
    }
}

/// Running sum of outer products of the path's jump vectors, as a process
/// whose matrices equal its jump part.
pub fn jump_qv(path: &SampledPath, delta_jump: f64) -> QVMatrixProcess {
    let jump_part = jump_gram(path, delta_jump);
    QVMatrixProcess {
        dim: path.dim(),
        times: path.times().to_vec(),
        matrices: jump_part.clone(),
        jump_part,
    }
}

/// Cauchy diagnostics of the quadratic-variation limit along Lebesgue levels.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub levels: Vec<i32>,
    pub sup_diffs: Vec<f64>,
    pub converged: bool,
    #[serde(skip)]
    pub achieved_tol: f64,
    pub tol: f64,
}

/// Computes discrete QV along the multidimensional Lebesgue partitions for
/// `n = n_min..=n_max` and reports the sup-norm distances between consecutive
/// levels. Converged means the last two diffs are within `tol`; non-convergence
/// is reported, never thrown.
pub fn qv_limit(
    path: &SampledPath,
    n_min: i32,
    n_max: i32,
    tol: f64,
) -> Result<(QVMatrixProcess, ConvergenceReport)> {
    if n_min > n_max {
        return Err(PathError::InvalidParameter("n_min must be <= n_max".into()));
    }
    if !(tol > 0.0) {
        return Err(PathError::InvalidParameter("tol must be > 0".into()));
    }
    let mut levels = Vec::new();
    let mut sup_diffs = Vec::new();
    let mut prev: Option<QVMatrixProcess> = None;
    for n in n_min..=n_max {
        let partition = lebesgue_multi(path, n)?;
        let qv = discrete_qv(path, &partition);
        if let Some(p) = &prev {
            sup_diffs.push(p.sup_norm_diff(&qv));
        }
        levels.push(n);
        prev = Some(qv);
    }
    let tail: Vec<f64> = sup_diffs.iter().rev().take(2).copied().collect();
    let achieved_tol = tail.iter().copied().fold(0.0, f64::max);
    let converged = tail.iter().all(|d| *d <= tol);
    let report = ConvergenceReport { levels, sup_diffs, converged, achieved_tol, tol };
    Ok((prev.unwrap(), report))
}

/// Polarization processes along a partition: `R = sum (dw^i + dw^j)^2`,
/// `T = sum (dw^i - dw^j)^2`, and `Q = (R - T)/4`.
#[derive(Clone, Debug)]
pub struct PolarizedQv {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub q: Vec<f64>,
}

pub fn polarized_qv(
    path: &SampledPath,
    partition: &Partition,
    i: usize,
    j: usize,
) -> Result<PolarizedQv> {
    let d = path.dim();
    if i >= d || j >= d {
        return Err(PathError::InvalidParameter(format!(
            "coordinate indices ({i},{j}) out of range for d = {d}"
        )));
    }
    let sum = path.coordinate_sum(i, j);
    let diff = path.coordinate_diff(i, j);
    let r_proc = discrete_qv(&sum, partition);
    let t_proc = discrete_qv(&diff, partition);
    let m = path.len();
    let mut r = Vec::with_capacity(m);
    let mut t = Vec::with_capacity(m);
    let mut q = Vec::with_capacity(m);
    for k in 0..m {
        let rv = r_proc.entry(k, 0, 0);
        let tv = t_proc.entry(k, 0, 0);
        r.push(rv);
        t.push(tv);
        q.push((rv - tv) / 4.0);
    }
    Ok(PolarizedQv { times: path.times().to_vec(), r, t, q })
}

/// Membership in `Omega_{q,M}`: terminal Frobenius norm of the QV matrix at
/// most `q` and sup-norm of the path at most `M`.
pub fn omega_qm(path: &SampledPath, qv: &QVMatrixProcess, q: f64, big_m: f64) -> Result<bool> {
    if !(q > 0.0) || !(big_m > 0.0) {
        return Err(PathError::InvalidParameter("q and M must be > 0".into()));
    }
    if qv.frobenius_final() > q {
        return Ok(false);
    }
    let sup = (0..path.len()).map(|k| path.norm_at(k)).fold(0.0, f64::max);
    Ok(sup <= big_m)
}

/// One row of the partition-independence table.
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct IndependenceRow {
    pub label: String,
    pub oscillation: f64,
    pub sup_error: f64,
}

/// For each partition, the pair (oscillation along it, sup-norm distance of
/// its discrete QV from the reference). The table is the deliverable; no
/// convergence verdict is asserted for a single path.
pub fn partition_independence_study(
    path: &SampledPath,
    partitions: &[(String, Partition)],
    reference: &QVMatrixProcess,
) -> Vec<IndependenceRow> {
    partitions
        .iter()
        .map(|(label, partition)| {
            let qv = discrete_qv(path, partition);
            IndependenceRow {
                label: label.clone(),
                oscillation: oscillation(path, partition),
                sup_error: qv.sup_norm_diff(reference),
            }
        })
        .collect()
}

/// Certifies `min eigenvalue >= -shift` for a symmetric matrix by Cholesky on
/// `mat + shift * I`: success implies the bound.
pub fn psd_within(mat: &[f64], d: usize, shift: f64) -> bool {
    let mut a = mat.to_vec();
    for i in 0..d {
        a[i * d + i] += shift;
    }
    // in-place Cholesky; fails iff a pivot goes negative
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= a[i * d + k] * a[j * d + k];
            }
            if i == j {
                if s < 0.0 {
                    return false;
                }
                a[i * d + i] = s.sqrt();
            } else {
                a[i * d + j] = if a[j * d + j] > 0.0 { s / a[j * d + j] } else { 0.0 };
            }
        }
    }
    true
}

/// `-1e-10 * trace` PSD shift from the acceptance bound.
pub fn psd_shift(mat: &[f64], d: usize) -> f64 {
    let trace: f64 = (0..d).map(|i| mat[i * d + i]).sum();
    1e-10 * trace.abs().max(f64::MIN_POSITIVE)
}
