//! Stopping-time partition families: Lebesgue (dyadic level crossings),
//! drawup/drawdown, epsilon-oscillation, and the oscillation measure along a
//! partition.
//!
//! All partition times are sample times of the input path, every internal time
//! is computable from the path restricted to `[0, t]` (the testable surrogate
//! of optionality), and the horizon `T` is always appended so that Riemann
//! sums telescope to `w(T)`.
//!
//! Dyadic levels are tracked as integer indices `j` at level `n` (the level
//! value is `j * 2^-n`). Comparisons happen in the scaled space `x * 2^n`,
//! which is exact in binary floating point since scaling by a power of two
//! only shifts the exponent.

use crate::error::{PathError, Result};
use crate::paths::SampledPath;
use serde::Serialize;

/// An ordered partition of `[0, T]`: starts at 0, ends at `T`, strictly
/// increasing. `exhausted` records that generation stopped because no further
/// crossing exists before the horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    times: Vec<f64>,
    exhausted: bool,
}

impl Partition {
    /// Builds a partition from internal stopping times (without 0 / T); the
    /// endpoints are added and duplicates collapsed.
    pub fn from_internal(mut internal: Vec<f64>, horizon: f64, exhausted: bool) -> Partition {
        internal.retain(|t| *t > 0.0 && *t < horizon);
        internal.sort_by(|a, b| a.partial_cmp(b).unwrap());
        internal.dedup();
        let mut times = Vec::with_capacity(internal.len() + 2);
        times.push(0.0);
        times.extend(internal);
        times.push(horizon);
        Partition { times, exhausted }
    }

    /// Validates an explicit list of times as a partition of `[0, horizon]`.
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Partition> {
        if times.first() != Some(&0.0) {
            return Err(PathError::InvalidParameter("partition must start at 0".into()));
        }
        if times.last() != Some(&horizon) {
            return Err(PathError::InvalidParameter("partition must end at the horizon".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PathError::InvalidParameter("partition times must strictly increase".into()));
        }
        Ok(Partition { times, exhausted: false })
    }

    /// The trivial partition `(0, T)`.
    pub fn trivial(horizon: f64) -> Partition {
        Partition { times: vec![0.0, horizon], exhausted: true }
    }

    /// Every sample time of the path, plus the horizon.
    pub fn all_samples(path: &SampledPath) -> Partition {
        Partition::from_internal(path.times().to_vec(), path.horizon(), false)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ordered union of two partitions over the same horizon.
    pub fn merge(&self, other: &Partition) -> Partition {
        let mut times: Vec<f64> = self.times.iter().chain(&other.times).copied().collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        Partition { times, exhausted: self.exhausted && other.exhausted }
    }

    /// Serializes as CSV `k,t`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,t")?;
        for (k, t) in self.times.iter().enumerate() {
            writeln!(out, "{k},{t}")?;
        }
        Ok(())
    }
}

/// Largest integer `j` with `j <= s`, for the exact scaled value `s = x * 2^n`.
fn floor_index(s: f64) -> i64 {
    s.floor() as i64
}

fn ceil_index(s: f64) -> i64 {
    s.ceil() as i64
}

/// Nearest integer to `s` within `[lo, hi]`, ties broken toward the smaller
/// integer (the smaller dyadic).
fn nearest_index_half_down(s: f64, lo: i64, hi: i64) -> i64 {
    let f = s.floor();
    let j = if s - f > 0.5 { f as i64 + 1 } else { f as i64 };
    j.clamp(lo, hi)
}

/// The crossing trace of a 1-d Lebesgue partition: partition times plus the
/// dyadic level reached at each crossing.
#[derive(Clone, Debug, Serialize)]
pub struct LebesgueTrace {
    pub level: i32,
    pub partition: Partition,
    /// `D^n_0`: index of the largest dyadic `<= w(0)`.
    pub initial_index: i64,
    /// `D^n_k` for each crossing `k >= 1`, as dyadic indices.
    pub level_indices: Vec<i64>,
}

impl LebesgueTrace {
    /// Dyadic value of `D^n_k` (`k = 0` is the initial level).
    pub fn level_value(&self, k: usize) -> f64 {
        let idx = if k == 0 { self.initial_index } else { self.level_indices[k - 1] };
        idx as f64 * 2f64.powi(-self.level)
    }
}

/// The n-th Lebesgue partition of a 1-d path: stopping times at which the path
/// brackets a dyadic level (spacing `2^-n`) different from the last one hit.
///
/// Crossing detection happens only at sample times; a jump across several
/// dyadics yields one partition point. When the bracket offers several new
/// dyadics the one closest to the arrival value wins, ties toward the smaller.
pub fn lebesgue_1d(path: &SampledPath, n: i32) -> Result<LebesgueTrace> {
    if path.dim() != 1 {
        return Err(PathError::NotOneDimensional(path.dim()));
    }
    let scale = 2f64.powi(n);
    let m = path.len();
    let scaled: Vec<f64> = (0..m).map(|k| path.scalar(k) * scale).collect();

    let initial_index = floor_index(scaled[0]);
    let mut prev_d = initial_index;
    let mut pos = 0usize;
    let mut crossing_times = Vec::new();
    let mut level_indices = Vec::new();

    'outer: loop {
        let s_prev = scaled[pos];
        for t_idx in pos + 1..m {
            let s_t = scaled[t_idx];
            let lo = ceil_index(s_prev.min(s_t));
            let hi = floor_index(s_prev.max(s_t));
            if lo > hi || (lo == hi && lo == prev_d) {
                continue;
            }
            let mut best = nearest_index_half_down(s_t, lo, hi);
            if best == prev_d {
                let cand_lo = (prev_d - 1).max(lo);
                let cand_hi = (prev_d + 1).min(hi);
                let mut choice: Option<i64> = None;
                for c in [cand_lo, cand_hi] {
                    if c == prev_d {
                        continue;
                    }
                    choice = Some(match choice {
                        None => c,
                        Some(b) => {
                            let db = (b as f64 - s_t).abs();
                            let dc = (c as f64 - s_t).abs();
                            if dc < db || (dc == db && c < b) {
                                c
                            } else {
                                b
                            }
                        }
                    });
                }
                best = choice.expect("bracket contained a dyadic other than the previous one");
            }
            prev_d = best;
            pos = t_idx;
            crossing_times.push(path.times()[t_idx]);
            level_indices.push(best);
            continue 'outer;
        }
        break;
    }

    let horizon = path.horizon();
    let exhausted = crossing_times.last().map_or(true, |t| *t < horizon);
    let partition = Partition::from_internal(crossing_times, horizon, exhausted);
    Ok(LebesgueTrace { level: n, partition, initial_index, level_indices })
}

/// The multidimensional Lebesgue partition: ordered union of the 1-d Lebesgue
/// partition times of every coordinate `w^i` and every pairwise sum `w^i + w^j`.
pub fn lebesgue_multi(path: &SampledPath, n: i32) -> Result<Partition> {
    let d = path.dim();
    if d == 1 {
        return Ok(lebesgue_1d(path, n)?.partition);
    }
    let mut internal: Vec<f64> = Vec::new();
    let mut exhausted = true;
    let mut absorb = |trace: LebesgueTrace| {
        exhausted &= trace.partition.exhausted();
        let times = trace.partition.times();
        internal.extend_from_slice(&times[1..times.len() - 1]);
    };
    for i in 0..d {
        absorb(lebesgue_1d(&path.coordinate(i), n)?);
    }
    for i in 0..d {
        for j in i + 1..d {
            absorb(lebesgue_1d(&path.coordinate_sum(i, j), n)?);
        }
    }
    Ok(Partition::from_internal(internal, path.horizon(), exhausted))
}

/// Direction of a drawup/drawdown event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Up,
    Down,
}

/// Drawup/drawdown trace at threshold `2^-n`: the alternating event times
/// `rho_k`, the intra oscillation times `tau_{k,i}` between them, and the
/// combined partition of all of these.
#[derive(Clone, Debug, Serialize)]
pub struct DrawTrace {
    pub level: i32,
    /// `rho_0 = 0` followed by the finite event times.
    pub rho: Vec<f64>,
    /// Direction of `rho_k` for `k >= 1`; alternates after the first.
    pub directions: Vec<Direction>,
    /// For each `k` the times `tau_{k,i}`, `i >= 1` (`tau_{k,0} = rho_k`).
    pub intra: Vec<Vec<f64>>,
    /// For each `k`: whether `rho_{k+1} <= T`.
    pub indicator: Vec<bool>,
    pub combined: Partition,
}

impl DrawTrace {
    /// `tau_{k, i(k,n)}`: the last intra time strictly before `rho_{k+1}` when
    /// `rho_{k+1}` is finite, otherwise `tau_{k,0} = rho_k`.
    pub fn tau_last_before_next(&self, k: usize) -> f64 {
        if k + 1 < self.rho.len() {
            let next = self.rho[k + 1];
            self.intra[k]
                .iter()
                .copied()
                .filter(|t| *t < next)
                .next_back()
                .unwrap_or(self.rho[k])
        } else {
            self.rho[k]
        }
    }
}

/// First sample index at which the drawup (`up = true`) or drawdown quantity
/// reaches the threshold. `start` is the index of the interval's left endpoint;
/// `seed_with_start` controls whether that endpoint's value seeds the running
/// extremum (it does for the initial events over `(0, t]`, where the value at 0
/// persists by right-continuity; it does not for the later `(rho_k, t]` events).
fn first_passage(
    path: &SampledPath,
    start: usize,
    seed_with_start: bool,
    up: bool,
    threshold: f64,
) -> Option<usize> {
    let mut extremum = if seed_with_start {
        path.scalar(start)
    } else if up {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    for t in start + 1..path.len() {
        let x = path.scalar(t);
        if up {
            extremum = extremum.min(x);
            if x - extremum >= threshold {
                return Some(t);
            }
        } else {
            extremum = extremum.max(x);
            if extremum - x >= threshold {
                return Some(t);
            }
        }
    }
    None
}

/// The sequence of drawup and drawdown times at threshold `2^-n`, the intra
/// times, and the combined partition. The paper's `= 2^-n` equalities are read
/// as first passage to `>= 2^-n` (sampled paths overshoot).
pub fn drawupdown(path: &SampledPath, n: i32) -> Result<DrawTrace> {
    if path.dim() != 1 {
        return Err(PathError::NotOneDimensional(path.dim()));
    }
    let threshold = 2f64.powi(-n);
    let times = path.times();

    let rho_u = first_passage(path, 0, true, true, threshold);
    let rho_d = first_passage(path, 0, true, false, threshold);
    // rho_u < rho_d picks the up-first branch; ties and double-infinity fall
    // to the down-first branch, matching the paper's "otherwise"
    let up_first = match (rho_u, rho_d) {
        (Some(u), Some(d)) => u < d,
        (Some(_), None) => true,
        _ => false,
    };

    let mut rho_idx: Vec<usize> = vec![0];
    let mut directions = Vec::new();
    let mut next_up = up_first;
    let mut first = match if up_first { rho_u } else { rho_d } {
        Some(i) => Some(i),
        None => None,
    };
    while let Some(idx) = first {
        rho_idx.push(idx);
        directions.push(if next_up { Direction::Up } else { Direction::Down });
        next_up = !next_up;
        first = first_passage(path, idx, false, next_up, threshold);
    }

    let rho: Vec<f64> = rho_idx.iter().map(|&i| times[i]).collect();
    let mut intra: Vec<Vec<f64>> = Vec::with_capacity(rho.len());
    let mut indicator: Vec<bool> = Vec::with_capacity(rho.len());
    let mut all_points: Vec<f64> = rho.clone();

    for k in 0..rho_idx.len() {
        let upper_idx = rho_idx.get(k + 1).copied();
        indicator.push(upper_idx.is_some());
        // scan (tau_{k,i-1}, rho_{k+1} ^ T] for moves of at least the threshold
        let limit = upper_idx.unwrap_or(path.len() - 1);
        let mut prev = rho_idx[k];
        let mut taus = Vec::new();
        let mut t = prev + 1;
        while t <= limit {
            if (path.scalar(t) - path.scalar(prev)).abs() >= threshold {
                taus.push(times[t]);
                prev = t;
            }
            t += 1;
        }
        all_points.extend_from_slice(&taus);
        intra.push(taus);
    }

    let combined = Partition::from_internal(all_points, path.horizon(), true);
    Ok(DrawTrace { level: n, rho, directions, intra, indicator, combined })
}

/// Greedy oscillation-stopping times: `t_i` is the first sample after `t_{i-1}`
/// with `|w(t) - w(t_{i-1})| > eps`. The induced left-closed step function stays
/// within `eps` of the path uniformly.
pub fn epsilon_partition(path: &SampledPath, eps: f64) -> Result<Partition> {
    if path.dim() != 1 {
        return Err(PathError::NotOneDimensional(path.dim()));
    }
    if !(eps > 0.0) {
        return Err(PathError::InvalidParameter("eps must be > 0".into()));
    }
    let mut internal = Vec::new();
    let mut anchor = 0usize;
    for t in 1..path.len() {
        if (path.scalar(t) - path.scalar(anchor)).abs() > eps {
            internal.push(path.times()[t]);
            anchor = t;
        }
    }
    let horizon = path.horizon();
    let exhausted = internal.last().map_or(true, |t| *t < horizon);
    Ok(Partition::from_internal(internal, horizon, exhausted))
}

/// The oscillation `O_T` of a path along a partition: the largest Euclidean
/// distance between two sample values inside one half-open partition interval
/// `[tau_{i-1}, tau_i)`.
pub fn oscillation(path: &SampledPath, partition: &Partition) -> f64 {
    let times = partition.times();
    let mut max_osc: f64 = 0.0;
    let mut k = 0usize; // sample cursor
    let m = path.len();
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        while k < m && path.times()[k] < a {
            k += 1;
        }
        let start = k;
        let mut end = k;
        while end < m && path.times()[end] < b {
            end += 1;
        }
        if end > start + 1 {
            if path.dim() == 1 {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for s in start..end {
                    let x = path.scalar(s);
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                max_osc = max_osc.max(hi - lo);
            } else {
                for s in start..end {
                    for t in s + 1..end {
                        let d2: f64 = (0..path.dim())
                            .map(|i| {
                                let d = path.value(t)[i] - path.value(s)[i];
                                d * d
                            })
                            .sum();
                        max_osc = max_osc.max(d2.sqrt());
                    }
                }
            }
        }
        k = end;
    }
    max_osc
}
