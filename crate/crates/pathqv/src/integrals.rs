//! Lebesgue–Stieltjes and left-endpoint Riemann-sum integrals for step paths,
//! simple-strategy integral processes, co-jump sums, and the
//! integration-by-parts residual checks. Every integral here is a finite sum;
//! limits along partition ladders become Cauchy diagnostics.

use crate::error::{PathError, Result};
use crate::numeric::KahanSum;
use crate::partitions::Partition;
use crate::paths::SampledPath;
use crate::quadvar::QVMatrixProcess;
use serde::Serialize;

/// Running integral evaluated on a sample grid; piecewise constant between
/// integrator sample times, 0 at time 0.
#[derive(Clone, Debug)]
pub struct IntegralProcess {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl IntegralProcess {
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn sup_diff(&self, other: &IntegralProcess) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Serializes as CSV `t,value`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
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

/// Sample value of `g` strictly before `t` (the left limit of the step path);
/// at or before the first sample this is the initial value.
fn value_before(g: &SampledPath, t: f64) -> f64 {
    let times = g.times();
    let mut lo = 0usize;
    let mut hi = times.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if times[mid] < t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    g.scalar(lo.saturating_sub(1))
}

/// `int_(0,t] g(s-) da(s)` as the finite jump sum `sum_{u<=t} g(u-) * da(u)`,
/// evaluated on the integrator's sample grid.
pub fn lebesgue_stieltjes(g: &SampledPath, a: &SampledPath) -> Result<IntegralProcess> {
    require_1d(g)?;
    require_1d(a)?;
    let mut acc = KahanSum::new();
    let mut values = Vec::with_capacity(a.len());
    values.push(0.0);
    for k in 1..a.len() {
        let u = a.times()[k];
        acc.add(value_before(g, u) * (a.scalar(k) - a.scalar(k - 1)));
        values.push(acc.value());
    }
    Ok(IntegralProcess { times: a.times().to_vec(), values })
}

/// Sup-norm Cauchy diagnostics between consecutive ladder levels.
#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub sup_diffs: Vec<f64>,
    pub converged: bool,
    pub tol: f64,
}

fn riemann_sum_process(g: &SampledPath, x: &SampledPath, partition: &Partition) -> IntegralProcess {
    // left-endpoint sums sum_i g(tau_{i-1}) (x(tau_i ^ t) - x(tau_{i-1} ^ t)),
    // swept along the integrator's sample grid
    let taus = partition.times();
    let mut acc = KahanSum::new(); // completed intervals
    let mut seg = 1usize; // current interval is (taus[seg-1], taus[seg]]
    let mut values = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let t = x.times()[k];
        while seg < taus.len() && taus[seg] <= t {
            let weight = g.scalar_at(taus[seg - 1]);
            acc.add(weight * (x.scalar_at(taus[seg]) - x.scalar_at(taus[seg - 1])));
            seg += 1;
        }
        let mut v = acc.value();
        if seg <= taus.len() {
            let left = taus[seg - 1];
            if t > left {
                v += g.scalar_at(left) * (x.scalar_at(t) - x.scalar_at(left));
            }
        }
        values.push(v);
    }
    IntegralProcess { times: x.times().to_vec(), values }
}

/// Left-endpoint Riemann-sum integral of `g` against `x` along a refining
/// partition ladder. Returns one process per level plus Cauchy diagnostics
/// (converged when the final consecutive sup difference is within `tol`).
pub fn follmer_integral(
    g: &SampledPath,
    x: &SampledPath,
    partitions: &[Partition],
    tol: f64,
) -> Result<(Vec<IntegralProcess>, CauchyReport)> {
    require_1d(g)?;
    require_1d(x)?;
    if partitions.is_empty() {
        return Err(PathError::InvalidParameter("at least one partition level required".into()));
    }
    let levels: Vec<IntegralProcess> =
        partitions.iter().map(|p| riemann_sum_process(g, x, p)).collect();
    let sup_diffs: Vec<f64> = levels.windows(2).map(|w| w[0].sup_diff(&w[1])).collect();
    let converged = sup_diffs.last().map_or(true, |d| *d <= tol);
    Ok((levels, CauchyReport { sup_diffs, converged, tol }))
}

/// Piecewise-constant trading strategy: weight `h_k` (a `d`-vector) held on
/// `(tau_k, tau_{k+1}]`, the last weight held to the horizon.
#[derive(Clone, Debug)]
pub struct SimpleStrategy {
    times: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

impl SimpleStrategy {
    pub fn new(times: Vec<f64>, weights: Vec<Vec<f64>>, dim: usize) -> Result<Self> {
        if times.is_empty() || times.len() != weights.len() {
            return Err(PathError::InvalidParameter(
                "strategy needs one weight per stopping time".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(PathError::InvalidParameter("strategy must start at time 0".into()));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(PathError::InvalidParameter("strategy times must be nondecreasing".into()));
        }
        if weights.iter().any(|h| h.len() != dim || h.iter().any(|v| !v.is_finite())) {
            return Err(PathError::InvalidParameter("strategy weights must be finite d-vectors".into()));
        }
        Ok(Self { times, weights })
    }

    /// Buy-and-hold strategy `h_k = g(tau_k)` read off a 1-d path at the
    /// partition points (all but the terminal one).
    pub fn from_path(g: &SampledPath, partition: &Partition) -> Result<Self> {
        let times = partition.times().to_vec();
        let weights = times.iter().map(|t| vec![g.scalar_at(*t)]).collect();
        Self::new(times, weights, 1)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }
}

/// `(H . S)_t = sum_k h_k . (S_{tau_{k+1} ^ t} - S_{tau_k ^ t})` on the path's
/// sample grid.
pub fn simple_strategy_integral(strategy: &SimpleStrategy, path: &SampledPath) -> Result<IntegralProcess> {
    let d = path.dim();
    if strategy.weights.iter().any(|h| h.len() != d) {
        return Err(PathError::DimMismatch { expected: d, got: strategy.weights[0].len() });
    }
    let taus = &strategy.times;
    // weight times the path increment, coordinate-wise, so the finite sums
    // match the left-endpoint Riemann sums bit for bit
    let dot_incr = |h: &[f64], a: f64, b: f64| -> f64 {
        h.iter()
            .zip(path.value_at(a).iter().zip(path.value_at(b)))
            .map(|(w, (xa, xb))| w * (xb - xa))
            .sum::<f64>()
    };
    let mut acc = KahanSum::new();
    let mut seg = 0usize; // active weight index
    let mut values = Vec::with_capacity(path.len());
    for k in 0..path.len() {
        let t = path.times()[k];
        while seg + 1 < taus.len() && taus[seg + 1] <= t {
            acc.add(dot_incr(&strategy.weights[seg], taus[seg], taus[seg + 1]));
            seg += 1;
        }
        let mut v = acc.value();
        if t > taus[seg] {
            v += dot_incr(&strategy.weights[seg], taus[seg], t);
        }
        values.push(v);
    }
    Ok(IntegralProcess { times: path.times().to_vec(), values })
}

/// Residual process of an integration-by-parts identity plus its sup-norm,
/// reported at the finest supplied ladder level.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub sup_residual: f64,
    /// index of the ladder level used (the finest)
    pub level: usize,
    #[serde(skip)]
    pub process: IntegralProcess,
}

/// Residual of `w^i w^j - w^i(0) w^j(0) = (F)int w^i dw^j + (F)int w^j dw^i +
/// [S^i, S^j]` with both integrals at the finest supplied level. Exactly 0
/// when the level refines every sample time and `qv` matches that refinement.
pub fn ibp_residual_typical(
    path: &SampledPath,
    qv: &QVMatrixProcess,
    i: usize,
    j: usize,
    partitions: &[Partition],
) -> Result<ResidualReport> {
    let finest = partitions
        .last()
        .ok_or_else(|| PathError::InvalidParameter("at least one partition level required".into()))?;
    if qv.len() != path.len() {
        return Err(PathError::InvalidParameter("qv grid must match the path samples".into()));
    }
    let wi = path.coordinate(i);
    let wj = path.coordinate(j);
    let int_ij = riemann_sum_process(&wi, &wj, finest);
    let int_ji = riemann_sum_process(&wj, &wi, finest);
    let mut values = Vec::with_capacity(path.len());
    let mut sup = 0.0f64;
    for k in 0..path.len() {
        let lhs = wi.scalar(k) * wj.scalar(k) - wi.scalar(0) * wj.scalar(0);
        let rhs = int_ij.values[k] + int_ji.values[k] + qv.entry(k, i, j);
        let r = lhs - rhs;
        sup = sup.max(r.abs());
        values.push(r);
    }
    Ok(ResidualReport {
        sup_residual: sup,
        level: partitions.len() - 1,
        process: IntegralProcess { times: path.times().to_vec(), values },
    })
}

/// Running filtered co-jump sum `sum_{0<s<=t, |db(s)|>eps} da(s) db(s)`.
/// `eps` must not coincide with any nonzero jump size of `b`.
pub fn co_jump_sum(a: &SampledPath, b: &SampledPath, eps: f64) -> Result<IntegralProcess> {
    require_1d(a)?;
    require_1d(b)?;
    if a.times() != b.times() {
        return Err(PathError::InvalidParameter("co-jump sum needs a common sample grid".into()));
    }
    if eps < 0.0 {
        return Err(PathError::InvalidParameter("jump filter must be >= 0".into()));
    }
    for k in 1..b.len() {
        let db = (b.scalar(k) - b.scalar(k - 1)).abs();
        if db > 0.0 && db == eps {
            return Err(PathError::EpsOnJumpSize { eps });
        }
    }
    let mut acc = KahanSum::new();
    let mut values = Vec::with_capacity(a.len());
    values.push(0.0);
    for k in 1..a.len() {
        let db = b.scalar(k) - b.scalar(k - 1);
        if db.abs() > eps {
            acc.add((a.scalar(k) - a.scalar(k - 1)) * db);
        }
        values.push(acc.value());
    }
    Ok(IntegralProcess { times: a.times().to_vec(), values })
}

/// Residual of the finite-variation integration-by-parts identity
/// `w^i f^j - w^i(0) f^j(0) = (F)int f^j dw^i + int w^i(s-) df^j + sum dw^i df^j`,
/// Riemann sums at the finest supplied level. Exactly 0 at full refinement.
pub fn ibp_residual_fv(
    path: &SampledPath,
    fv: &SampledPath,
    i: usize,
    j: usize,
    partitions: &[Partition],
) -> Result<ResidualReport> {
    let finest = partitions
        .last()
        .ok_or_else(|| PathError::InvalidParameter("at least one partition level required".into()))?;
    let wi = path.coordinate(i);
    let fj = fv.coordinate(j);
    if wi.times() != fj.times() {
        return Err(PathError::InvalidParameter("paths must share a sample grid".into()));
    }
    let riemann = riemann_sum_process(&fj, &wi, finest);
    let stieltjes = lebesgue_stieltjes(&wi, &fj)?;
    let co_jumps = co_jump_sum(&wi, &fj, 0.0)?;
    let mut values = Vec::with_capacity(path.len());
    let mut sup = 0.0f64;
    for k in 0..path.len() {
        let lhs = wi.scalar(k) * fj.scalar(k) - wi.scalar(0) * fj.scalar(0);
        let rhs = riemann.values[k] + stieltjes.values[k] + co_jumps.values[k];
        let r = lhs - rhs;
        sup = sup.max(r.abs());
        values.push(r);
    }
    Ok(ResidualReport {
        sup_residual: sup,
        level: partitions.len() - 1,
        process: IntegralProcess { times: path.times().to_vec(), values },
    })
}
