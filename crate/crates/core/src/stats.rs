//! Moment oracles, sample means with standard errors, and the goodness-of-fit
//! tests used by the verification suites.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::simplex::{DirichletParams, FaceSubset, SimplexPoint};
use crate::special::pochhammer;

/// Cells with a smaller expected count are pooled in chi-square tests.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Mean and standard error of `values`, reduced in input order.
pub fn mean_and_se(values: &[f64]) -> Result<MeanEstimate> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(MeanEstimate { mean, std_error, n })
}

/// Exponents `n_0, ..., n_d` of a mixed moment `E(prod X_i^{n_i})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MomentIndex {
    n: Vec<u32>,
    order: u32,
}

impl MomentIndex {
    pub fn new(n: Vec<u32>) -> Self {
        let order = n.iter().sum();
        Self { n, order }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    /// Every index of total order `1..=max_order` in `dim` coordinates.
    pub fn all_up_to(dim: usize, max_order: u32) -> Vec<MomentIndex> {
        let mut out = Vec::new();
        for order in 1..=max_order {
            for b in crate::combinatorics::Compositions::new(dim, order) {
                out.push(MomentIndex::new(b));
            }
        }
        out
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.n
            .iter()
            .zip(x)
            .map(|(ni, xi)| xi.powi(*ni as i32))
            .product()
    }
}

impl std::fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.n.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Outcome of a statistical check. For standard-error bands `statistic` is
/// the z-score and `p_value` its two-sided normal tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
    pub n_used: usize,
}

impl TestReport {
    /// Passes when `estimate` lies within `threshold` standard errors of
    /// `expected`.
    pub fn se_band(estimate: &MeanEstimate, expected: f64, threshold: f64) -> Self {
        let diff = estimate.mean - expected;
        let z = if diff.abs() <= 1e-12 * expected.abs().max(1.0) {
            0.0
        } else if estimate.std_error > 0.0 {
            diff / estimate.std_error
        } else {
            diff.signum() * f64::INFINITY
        };
        TestReport {
            statistic: z,
            p_value: erfc(z.abs() / std::f64::consts::SQRT_2),
            pass: z.abs() <= threshold,
            n_used: estimate.n,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// `E(prod X_i^{n_i}) = prod (a_i)_{n_i} / (a)_{order}` for `X ~ D(a)`.
pub fn dirichlet_moment_oracle(params: &DirichletParams, idx: &MomentIndex) -> Result<f64> {
    if idx.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: idx.dim() });
    }
    let num: f64 = params
        .a()
        .iter()
        .zip(&idx.n)
        .map(|(ai, ni)| pochhammer(*ai, *ni as u64))
        .product();
    Ok(num / pochhammer(params.total(), idx.order as u64))
}

/// Sample mean of `prod x_i^{n_i}` and its standard error.
pub fn empirical_moment(samples: &[SimplexPoint], idx: &MomentIndex) -> Result<MeanEstimate> {
    let mut values = Vec::with_capacity(samples.len());
    for x in samples {
        if x.dim() != idx.dim() {
            return Err(Error::DimensionMismatch { expected: idx.dim(), found: x.dim() });
        }
        values.push(idx.eval(x.coords()));
    }
    mean_and_se(&values)
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Energy statistic from pair sums over unordered pairs.
fn energy_from_sums(sums: [f64; 3], n: usize, m: usize) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let within = |s: f64, k: f64| if k > 1.0 { 2.0 * s / (k * (k - 1.0)) } else { 0.0 };
    let e = 2.0 * sums[1] / (nf * mf) - within(sums[0], nf) - within(sums[2], mf);
    e * nf * mf / (nf + mf)
}

/// Permutations evaluated per pass over the distance matrix.
const PERM_BATCH: usize = 32;

/// Pair sums `[S_xx, S_xy, S_yy]` for each labelling in `ys`, where `ys`
/// holds `count` 0/1 indicator columns of the second sample, row-major.
/// With `y` an indicator, `S_yy = y'Dy / 2`, `S_xy = 1'Dy - y'Dy` and
/// `S_xx = (1'D1 - 2 1'Dy + y'Dy) / 2`.
fn batched_pair_sums(dist: &[f64], size: usize, total: f64, ys: &[f64], count: usize) -> Vec<[f64; 3]> {
    let mut ydy = vec![0.0; count];
    let mut one_dy = vec![0.0; count];
    let mut acc = vec![0.0; count];
    for i in 0..size {
        acc.iter_mut().for_each(|v| *v = 0.0);
        let row = &dist[i * size..(i + 1) * size];
        for (j, d) in row.iter().enumerate() {
            let yj = &ys[j * count..(j + 1) * count];
            for (a, y) in acc.iter_mut().zip(yj) {
                *a += d * y;
            }
        }
        let yi = &ys[i * count..(i + 1) * count];
        for b in 0..count {
            ydy[b] += yi[b] * acc[b];
            one_dy[b] += acc[b];
        }
    }
    (0..count)
        .map(|b| {
            [
                0.5 * (total - 2.0 * one_dy[b] + ydy[b]),
                one_dy[b] - ydy[b],
                0.5 * ydy[b],
            ]
        })
        .collect()
}

/// Two-sample energy test with a permutation p-value
/// `(#{perm >= observed} + 1) / (permutations + 1)`. Passes when the p-value
/// exceeds `alpha`. Permutation `p` shuffles with `stream.substream(p)`.
pub fn energy_two_sample_test(
    xs: &[SimplexPoint],
    ys: &[SimplexPoint],
    permutations: usize,
    stream: &RngStream,
    alpha: f64,
) -> Result<TestReport> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let dim = xs[0].dim();
    if let Some(bad) = xs.iter().chain(ys).find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    let (n, m) = (xs.len(), ys.len());
    let size = n + m;
    let pooled: Vec<&[f64]> = xs.iter().chain(ys).map(|p| p.coords()).collect();
    let mut dist = vec![0.0; size * size];
    dist.par_chunks_mut(size).enumerate().for_each(|(i, row)| {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = distance(pooled[i], pooled[j]);
        }
    });
    let total: f64 = dist.iter().sum();
    let mut labels = vec![0.0; n];
    labels.resize(size, 1.0);
    let observed = energy_from_sums(batched_pair_sums(&dist, size, total, &labels, 1)[0], n, m);
    let starts: Vec<usize> = (0..permutations).step_by(PERM_BATCH).collect();
    let exceed: usize = starts
        .into_par_iter()
        .map(|start| {
            let count = PERM_BATCH.min(permutations - start);
            let mut ys = vec![0.0; size * count];
            for b in 0..count {
                let mut perm = labels.clone();
                perm.shuffle(&mut stream.substream((start + b) as u64));
                for (j, y) in perm.into_iter().enumerate() {
                    ys[j * count + b] = y;
                }
            }
            batched_pair_sums(&dist, size, total, &ys, count)
                .into_iter()
                .filter(|sums| energy_from_sums(*sums, n, m) >= observed)
                .count()
        })
        .sum();
    let p_value = (exceed + 1) as f64 / (permutations + 1) as f64;
    Ok(TestReport { statistic: observed, p_value, pass: p_value > alpha, n_used: size })
}

/// Merges cells, smallest expected count first, until every cell expects at
/// least [`MIN_EXPECTED_COUNT`]. Cells are `(observed, expected)`.
fn pool_cells(mut cells: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    cells.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for cell in cells {
        if pool.1 > 0.0 || cell.1 < MIN_EXPECTED_COUNT {
            pool.0 += cell.0;
            pool.1 += cell.1;
            if pool.1 >= MIN_EXPECTED_COUNT {
                out.push(pool);
                pool = (0.0, 0.0);
            }
        } else {
            out.push(cell);
        }
    }
    if pool.1 > 0.0 {
        match out.first_mut() {
            Some(first) => {
                first.0 += pool.0;
                first.1 += pool.1;
            }
            None => out.push(pool),
        }
    }
    out
}

fn chi_square_tail(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("positive df").sf(statistic)
}

/// Pearson chi-square test of the faces `supp(x)` against expected face
/// probabilities. Passes when the p-value exceeds `alpha`.
pub fn chi_square_face_test(
    samples: &[SimplexPoint],
    expected: &BTreeMap<FaceSubset, f64>,
    alpha: f64,
) -> Result<TestReport> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let total: f64 = expected.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!("expected face masses sum to {total}")));
    }
    let mut observed: BTreeMap<FaceSubset, usize> = BTreeMap::new();
    for x in samples {
        let face = x.support();
        match expected.get(&face) {
            Some(p) if *p > 0.0 => *observed.entry(face).or_default() += 1,
            _ => return Err(Error::Unclassifiable(format!("sample supported on {face}"))),
        }
    }
    let n = samples.len() as f64;
    let cells = expected
        .iter()
        .filter(|(_, p)| **p > 0.0)
        .map(|(face, p)| (observed.get(face).copied().unwrap_or(0) as f64, p * n))
        .collect();
    let cells = pool_cells(cells);
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let p_value = chi_square_tail(statistic, cells.len().saturating_sub(1));
    Ok(TestReport { statistic, p_value, pass: p_value > alpha, n_used: samples.len() })
}

/// Chi-square test that two samples share the same face frequencies.
pub fn chi_square_homogeneity(
    xs: &[SimplexPoint],
    ys: &[SimplexPoint],
    alpha: f64,
) -> Result<TestReport> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts: BTreeMap<FaceSubset, (f64, f64)> = BTreeMap::new();
    for x in xs {
        counts.entry(x.support()).or_default().0 += 1.0;
    }
    for y in ys {
        counts.entry(y.support()).or_default().1 += 1.0;
    }
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let share = n / (n + m);
    // Pool on the smaller of the two expected counts per category.
    let mut cats: Vec<(f64, f64)> = counts.into_values().collect();
    cats.sort_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1)));
    let min_share = share.min(1.0 - share);
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for c in cats {
        if pool.0 + pool.1 > 0.0 || (c.0 + c.1) * min_share < MIN_EXPECTED_COUNT {
            pool.0 += c.0;
            pool.1 += c.1;
            if (pool.0 + pool.1) * min_share >= MIN_EXPECTED_COUNT {
                merged.push(pool);
                pool = (0.0, 0.0);
            }
        } else {
            merged.push(c);
        }
    }
    if pool.0 + pool.1 > 0.0 {
        match merged.first_mut() {
            Some(first) => {
                first.0 += pool.0;
                first.1 += pool.1;
            }
            None => merged.push(pool),
        }
    }
    let statistic: f64 = merged
        .iter()
        .map(|(ox, oy)| {
            let row = ox + oy;
            let (ex, ey) = (row * share, row * (1.0 - share));
            (ox - ex).powi(2) / ex + (oy - ey).powi(2) / ey
        })
        .sum();
    let p_value = chi_square_tail(statistic, merged.len().saturating_sub(1));
    Ok(TestReport {
        statistic,
        p_value,
        pass: p_value > alpha,
        n_used: xs.len() + ys.len(),
    })
}
