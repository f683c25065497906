//! Path data model, CSV ingestion, sample-space membership and synthetic generators.
//!
//! A [`SampledPath`] is a d-dimensional right-continuous step function given by
//! finitely many samples: the path equals the value at the largest sample time
//! `t_k <= t` and is constant on `[t_m, T]`. Every analysis in this crate is a
//! finite, exact computation on this step-path model.

use crate::error::{PathError, Result};
use std::io::{Read, Write};

/// A d-dimensional cadlag step path given by finitely many samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    dim: usize,
    horizon: f64,
    times: Vec<f64>,
    /// Row-major `m x d` sample values.
    values: Vec<f64>,
}

impl SampledPath {
    /// Builds a path from sample times and row-major values, validating the invariants:
    /// strictly increasing times starting at 0, all finite values, horizon past the
    /// last sample.
    pub fn new(dim: usize, horizon: f64, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(PathError::InvalidParameter("dimension must be positive".into()));
        }
        if times.is_empty() {
            return Err(PathError::EmptyInput);
        }
        if values.len() != times.len() * dim {
            return Err(PathError::DimMismatch { expected: times.len() * dim, got: values.len() });
        }
        if times[0] != 0.0 {
            return Err(PathError::FirstTimeNonZero(times[0]));
        }
        for k in 1..times.len() {
            if times[k] == times[k - 1] {
                return Err(PathError::DuplicateTime { row: k + 2 });
            }
            if times[k] < times[k - 1] {
                return Err(PathError::NonMonotoneTime {
                    row: k + 2,
                    time: times[k],
                    prev: times[k - 1],
                });
            }
        }
        let last = *times.last().unwrap();
        if !(horizon > 0.0) || horizon < last {
            return Err(PathError::HorizonBeforeLastSample { horizon, last });
        }
        for (k, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(PathError::NonFiniteValue { row: k / dim + 2, value: *v });
            }
        }
        Ok(Self { dim, horizon, times, values })
    }

    /// Convenience constructor for 1-d paths.
    pub fn scalar_path(times: Vec<f64>, values: Vec<f64>, horizon: f64) -> Result<Self> {
        Self::new(1, horizon, times, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Value vector at sample index `k`.
    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    /// Scalar value at sample index `k` (1-d paths).
    pub fn scalar(&self, k: usize) -> f64 {
        debug_assert_eq!(self.dim, 1);
        self.values[k]
    }

    /// Index of the largest sample time `t_k <= t` (step-path evaluation).
    pub fn index_at(&self, t: f64) -> usize {
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(k) => k,
            Err(0) => 0,
            Err(k) => k - 1,
        }
    }

    /// Path value at an arbitrary time, right-continuous step semantics.
    pub fn value_at(&self, t: f64) -> &[f64] {
        self.value(self.index_at(t))
    }

    pub fn scalar_at(&self, t: f64) -> f64 {
        debug_assert_eq!(self.dim, 1);
        self.values[self.index_at(t)]
    }

    /// Euclidean norm of the sample value at index `k`.
    pub fn norm_at(&self, k: usize) -> f64 {
        self.value(k).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The 1-d path of coordinate `i`.
    pub fn coordinate(&self, i: usize) -> SampledPath {
        assert!(i < self.dim);
        let values = (0..self.len()).map(|k| self.value(k)[i]).collect();
        SampledPath { dim: 1, horizon: self.horizon, times: self.times.clone(), values }
    }

    /// The 1-d path `w^i + w^j`.
    pub fn coordinate_sum(&self, i: usize, j: usize) -> SampledPath {
        assert!(i < self.dim && j < self.dim);
        let values = (0..self.len()).map(|k| self.value(k)[i] + self.value(k)[j]).collect();
        SampledPath { dim: 1, horizon: self.horizon, times: self.times.clone(), values }
    }

    /// The 1-d path `w^i - w^j`.
    pub fn coordinate_diff(&self, i: usize, j: usize) -> SampledPath {
        assert!(i < self.dim && j < self.dim);
        let values = (0..self.len()).map(|k| self.value(k)[i] - self.value(k)[j]).collect();
        SampledPath { dim: 1, horizon: self.horizon, times: self.times.clone(), values }
    }

    /// Freezes the path at time `u`: samples after `u` take the value at `u`.
    /// The time grid is unchanged. Used by the causality (truncation) tests.
    pub fn truncate_at(&self, u: f64) -> SampledPath {
        let frozen: Vec<f64> = self.value_at(u).to_vec();
        let mut values = self.values.clone();
        for k in 0..self.len() {
            if self.times[k] > u {
                values[k * self.dim..(k + 1) * self.dim].copy_from_slice(&frozen);
            }
        }
        SampledPath { dim: self.dim, horizon: self.horizon, times: self.times.clone(), values }
    }

    /// All sample-to-sample nonzero value changes, time-ordered.
    pub fn jumps(&self) -> JumpList {
        let mut entries = Vec::new();
        for k in 1..self.len() {
            let delta: Vec<f64> = (0..self.dim)
                .map(|i| self.value(k)[i] - self.value(k - 1)[i])
                .collect();
            if delta.iter().any(|d| *d != 0.0) {
                entries.push((self.times[k], delta));
            }
        }
        JumpList { entries }
    }

    /// Serializes the path as CSV `t,x1,...,xd` with round-trip float formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> =
            std::iter::once("t".to_string()).chain((1..=self.dim).map(|i| format!("x{i}"))).collect();
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.len() {
            let mut row = format!("{}", self.times[k]);
            for i in 0..self.dim {
                row.push(',');
                row.push_str(&format!("{}", self.value(k)[i]));
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

/// Time-ordered nonzero jumps of a path.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpList {
    pub entries: Vec<(f64, Vec<f64>)>,
}

impl JumpList {
    /// Coordinate-wise sum of all jumps; equals `w(T) - w(0)` for step paths.
    pub fn total(&self, dim: usize) -> Vec<f64> {
        let mut acc = vec![0.0; dim];
        for (_, delta) in &self.entries {
            for (a, d) in acc.iter_mut().zip(delta) {
                *a += d;
            }
        }
        acc
    }
}

/// Nondecreasing, nonnegative jump-bound function psi on `[0, inf)`.
#[derive(Clone, Debug)]
pub enum PsiSpec {
    Identity,
    Constant(f64),
    /// Piecewise-linear nondecreasing table of `(x, psi(x))` knots; constant
    /// extrapolation beyond the last knot.
    Table(Vec<(f64, f64)>),
}

impl PsiSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PsiSpec::Identity => Ok(()),
            PsiSpec::Constant(k) => {
                if *k >= 0.0 {
                    Ok(())
                } else {
                    Err(PathError::InvalidParameter("psi constant must be >= 0".into()))
                }
            }
            PsiSpec::Table(knots) => {
                if knots.is_empty() {
                    return Err(PathError::InvalidParameter("psi table is empty".into()));
                }
                let mut prev: Option<(f64, f64)> = None;
                for &(x, y) in knots {
                    if y < 0.0 {
                        return Err(PathError::InvalidParameter("psi table value < 0".into()));
                    }
                    if let Some((px, py)) = prev {
                        if x <= px || y < py {
                            return Err(PathError::InvalidParameter(
                                "psi table must be strictly increasing in x and nondecreasing in value".into(),
                            ));
                        }
                    }
                    prev = Some((x, y));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PsiSpec::Identity => x,
            PsiSpec::Constant(k) => *k,
            PsiSpec::Table(knots) => {
                if x <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    let (x0, y0) = w[0];
                    let (x1, y1) = w[1];
                    if x <= x1 {
                        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
                    }
                }
                knots.last().unwrap().1
            }
        }
    }
}

/// First point at which a path leaves the sample space `Omega_psi`.
#[derive(Clone, Debug)]
pub struct MembershipViolation {
    pub time: f64,
    pub coordinate: usize,
    pub jump: f64,
    pub bound: f64,
}

/// Checks whether every jump satisfies `dw^i(t) >= -psi(sup_{s<t} |w(s)|)`,
/// the supremum taken over sample values strictly before `t`.
pub fn check_membership(path: &SampledPath, psi: &PsiSpec) -> (bool, Option<MembershipViolation>) {
    let mut sup_norm = path.norm_at(0);
    for k in 1..path.len() {
        let bound = -psi.eval(sup_norm);
        for i in 0..path.dim() {
            let jump = path.value(k)[i] - path.value(k - 1)[i];
            if jump < bound {
                return (
                    false,
                    Some(MembershipViolation {
                        time: path.times()[k],
                        coordinate: i,
                        jump,
                        bound,
                    }),
                );
            }
        }
        sup_norm = sup_norm.max(path.norm_at(k));
    }
    (true, None)
}

/// Parses CSV with header `t,x1,...,xd`; rows sorted by time. The horizon
/// defaults to the last sample time unless `horizon` is given.
pub fn load_csv<R: Read>(source: R, horizon: Option<f64>) -> Result<SampledPath> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(PathError::EmptyInput),
    };
    let fields: Vec<&str> = header.iter().map(|f| f.trim()).collect();
    if fields.len() < 2 || fields[0] != "t" {
        return Err(PathError::BadHeader(fields.join(",")));
    }
    for (i, f) in fields[1..].iter().enumerate() {
        if *f != format!("x{}", i + 1) {
            return Err(PathError::BadHeader(fields.join(",")));
        }
    }
    let dim = fields.len() - 1;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (idx, rec) in records.enumerate() {
        let rec = rec?;
        let row = idx + 2; // header is row 1
        if rec.len() != dim + 1 {
            return Err(PathError::MissingColumn { row, expected: dim + 1, got: rec.len() });
        }
        let parse = |col: usize, name: String| -> Result<f64> {
            let cell = rec.get(col).unwrap().trim();
            cell.parse::<f64>().map_err(|_| PathError::NonNumericCell {
                row,
                col: name,
                cell: cell.to_string(),
            })
        };
        let t = parse(0, "t".into())?;
        if let Some(&prev) = times.last() {
            if t == prev {
                return Err(PathError::DuplicateTime { row });
            }
            if t < prev {
                return Err(PathError::NonMonotoneTime { row, time: t, prev });
            }
        }
        times.push(t);
        for i in 0..dim {
            values.push(parse(i + 1, format!("x{}", i + 1))?);
        }
    }
    if times.is_empty() {
        return Err(PathError::EmptyInput);
    }
    let t_last = *times.last().unwrap();
    let horizon = horizon.unwrap_or(t_last);
    SampledPath::new(dim, if horizon > 0.0 { horizon } else { t_last.max(f64::MIN_POSITIVE) }, times, values)
}

/// Seeded +-h random walk on an even grid: times `k*T/N`, values the partial
/// sums of i.i.d. signs drawn from ChaCha8 (one boolean per step).
///
/// The generator is fixed so identical arguments reproduce identical paths on
/// every platform; the sum of squared increments is `N*h^2` exactly.
pub fn synth_walk(steps: usize, horizon: f64, step_size: f64, seed: u64) -> Result<SampledPath> {
    use rand::{Rng, SeedableRng};
    if steps == 0 {
        return Err(PathError::ZeroSteps);
    }
    if !(step_size > 0.0) || !(horizon > 0.0) {
        return Err(PathError::InvalidParameter("horizon and step size must be positive".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(0.0);
    let mut level: i64 = 0;
    for k in 1..=steps {
        level += if rng.gen::<bool>() { 1 } else { -1 };
        times.push(k as f64 * horizon / steps as f64);
        // integer level times h keeps partial sums exact for dyadic h
        values.push(level as f64 * step_size);
    }
    SampledPath::new(1, horizon, times, values)
}

/// Pathological fixture: on each `[1/(n+1), 1/n]`, `n <= n_max`, the path makes
/// `n^2` up-down oscillations of amplitude `1/sqrt(n)` sampled at the extremes;
/// value 0 at time 0. Its total variation is `sum_{n<=n_max} 2 n^2 / sqrt(n)`
/// while `c*TV^c` blows up as the construction is extended.
pub fn synth_oscillator(n_max: usize) -> Result<SampledPath> {
    if n_max == 0 {
        return Err(PathError::InvalidParameter("n_max must be >= 1".into()));
    }
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    for n in (1..=n_max).rev() {
        let left = 1.0 / (n as f64 + 1.0);
        let right = 1.0 / n as f64;
        let amp = 1.0 / (n as f64).sqrt();
        let substeps = 2 * n * n;
        for j in 1..=substeps {
            let t = left + (right - left) * j as f64 / substeps as f64;
            times.push(t);
            values.push(if j % 2 == 1 { amp } else { 0.0 });
        }
    }
    SampledPath::new(1, 1.0, times, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_1d(times: &[f64], values: &[f64]) -> SampledPath {
        SampledPath::scalar_path(times.to_vec(), values.to_vec(), *times.last().unwrap()).unwrap()
    }

    #[test]
    fn load_csv_basic() {
        let p = load_csv("t,x1\n0,0\n1,1".as_bytes(), None).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.times(), &[0.0, 1.0]);
        assert_eq!(p.scalar(0), 0.0);
        assert_eq!(p.scalar(1), 1.0);
    }

    #[test]
    fn load_csv_duplicate_time_reports_row() {
        let err = load_csv("t,x1\n0,0\n0,1".as_bytes(), None).unwrap_err();
        match err {
            PathError::DuplicateTime { row } => assert_eq!(row, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_csv_two_dims() {
        let p = load_csv("t,x1,x2\n0,0,1\n2,3,4".as_bytes(), None).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.horizon(), 2.0);
        assert_eq!(p.value(1), &[3.0, 4.0]);
    }

    #[test]
    fn load_csv_error_paths() {
        assert!(matches!(load_csv("".as_bytes(), None), Err(PathError::EmptyInput)));
        assert!(matches!(load_csv("t,x1\n".as_bytes(), None), Err(PathError::EmptyInput)));
        assert!(matches!(
            load_csv("t,x1\n0,abc".as_bytes(), None),
            Err(PathError::NonNumericCell { row: 2, .. })
        ));
        assert!(matches!(
            load_csv("t,x1\n0,0\n2,1\n1,2".as_bytes(), None),
            Err(PathError::NonMonotoneTime { row: 4, .. })
        ));
        assert!(matches!(
            load_csv("t,x1,x2\n0,0".as_bytes(), None),
            Err(PathError::MissingColumn { row: 2, .. })
        ));
        assert!(matches!(load_csv("a,b\n0,0".as_bytes(), None), Err(PathError::BadHeader(_))));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let p = path_1d(&[0.0, 0.5, 1.25], &[0.0, -0.1, 3.75]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = load_csv(buf.as_slice(), None).unwrap();
        assert_eq!(p.times(), q.times());
        for k in 0..p.len() {
            assert_eq!(p.scalar(k), q.scalar(k));
        }
    }

    #[test]
    fn membership_identity_allows_bounded_down_jump() {
        let p = path_1d(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.5]);
        let (ok, v) = check_membership(&p, &PsiSpec::Identity);
        assert!(ok, "down-jump -0.5 >= -1 should pass: {v:?}");
    }

    #[test]
    fn membership_constant_flags_violation() {
        let p = path_1d(&[0.0, 1.0, 2.0], &[0.0, 1.0, -0.5]);
        let (ok, v) = check_membership(&p, &PsiSpec::Constant(1.0));
        assert!(!ok);
        let v = v.unwrap();
        assert_eq!(v.time, 2.0);
        assert_eq!(v.jump, -1.5);
        assert_eq!(v.bound, -1.0);
    }

    #[test]
    fn membership_nonnegative_path_identity_psi() {
        // the Omega_+ case: nonnegative paths always pass with psi = identity
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[2.0, 5.0, 0.0, 1.0]);
        let (ok, _) = check_membership(&p, &PsiSpec::Identity);
        assert!(ok);
    }

    #[test]
    fn membership_large_constant_always_true() {
        let p = path_1d(&[0.0, 1.0, 2.0], &[0.0, 100.0, -100.0]);
        let (ok, _) = check_membership(&p, &PsiSpec::Constant(1e300));
        assert!(ok);
    }

    #[test]
    fn walk_fixed_seed_partial_sums() {
        // seed chosen so the first four ChaCha8 sign draws are (+,-,+,+)
        let p = synth_walk(4, 4.0, 1.0, WALK_SEED_PMPP).unwrap();
        let vals: Vec<f64> = (0..5).map(|k| p.scalar(k)).collect();
        assert_eq!(vals, vec![0.0, 1.0, 0.0, 1.0, 2.0]);
    }

    /// Seed whose first four sign draws are (+,-,+,+); located by scanning seeds.
    const WALK_SEED_PMPP: u64 = 9;

    #[test]
    fn walk_seed_scan_confirms_frozen_seed() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(WALK_SEED_PMPP);
        let signs: Vec<bool> = (0..4).map(|_| rng.gen::<bool>()).collect();
        assert_eq!(signs, vec![true, false, true, true]);
    }

    #[test]
    fn walk_squared_increments_identity() {
        for seed in [0u64, 1, 17] {
            let p = synth_walk(512, 1.0, 0.25, seed).unwrap();
            let sum: f64 = (1..p.len()).map(|k| (p.scalar(k) - p.scalar(k - 1)).powi(2)).sum();
            assert_eq!(sum, 512.0 * 0.0625);
        }
    }

    #[test]
    fn walk_exact_unit_quadratic_sum() {
        let p = synth_walk(1 << 18, 1.0, 0.5f64.powi(9), 3).unwrap();
        let sum: f64 = (1..p.len()).map(|k| (p.scalar(k) - p.scalar(k - 1)).powi(2)).sum();
        assert_eq!(sum, 1.0);
    }

    #[test]
    fn walk_is_deterministic_per_seed() {
        let a = synth_walk(100, 1.0, 0.1, 42).unwrap();
        let b = synth_walk(100, 1.0, 0.1, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oscillator_level_one() {
        let p = synth_oscillator(1).unwrap();
        assert_eq!(p.times(), &[0.0, 0.75, 1.0]);
        assert_eq!(p.value(1), &[1.0]);
        assert_eq!(p.value(2), &[0.0]);
    }

    #[test]
    fn oscillator_total_variation() {
        let n_max = 5;
        let p = synth_oscillator(n_max).unwrap();
        let tv: f64 = (1..p.len()).map(|k| (p.scalar(k) - p.scalar(k - 1)).abs()).sum();
        let expected: f64 = (1..=n_max).map(|n| 2.0 * (n * n) as f64 / (n as f64).sqrt()).sum();
        assert!((tv - expected).abs() < 1e-9, "tv {tv} expected {expected}");
    }

    #[test]
    fn jumps_basics() {
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 1.0, 3.0]);
        let j = p.jumps();
        assert_eq!(j.entries, vec![(1.0, vec![1.0]), (3.0, vec![2.0])]);
        assert_eq!(j.total(1), vec![3.0]);

        let c = path_1d(&[0.0, 1.0], &[2.0, 2.0]);
        assert!(c.jumps().entries.is_empty());
    }

    #[test]
    fn jumps_keep_constant_coordinate_zero() {
        let p = SampledPath::new(2, 2.0, vec![0.0, 1.0, 2.0], vec![0.0, 5.0, 1.0, 5.0, 1.0, 5.0])
            .unwrap();
        let j = p.jumps();
        assert_eq!(j.entries, vec![(1.0, vec![1.0, 0.0])]);
    }

    #[test]
    fn jump_sum_matches_endpoint_difference() {
        let p = synth_walk(257, 1.0, 0.125, 9).unwrap();
        let total = p.jumps().total(1)[0];
        assert!((total - (p.scalar(p.len() - 1) - p.scalar(0))).abs() < 1e-12);
    }

    #[test]
    fn truncate_freezes_tail() {
        let p = path_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 2.0, 3.0]);
        let q = p.truncate_at(1.5);
        assert_eq!(q.scalar(0), 0.0);
        assert_eq!(q.scalar(1), 1.0);
        assert_eq!(q.scalar(2), 1.0);
        assert_eq!(q.scalar(3), 1.0);
    }
}
