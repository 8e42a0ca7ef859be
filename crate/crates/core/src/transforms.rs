//! The `T_c` transform `f -> E <f, X>^{-c}` on strictly positive vectors `f`:
//! closed forms, Monte Carlo estimates, and the identities tying them
//! together.

use serde::Serialize;

use crate::combinatorics::{
    composition_count, enumerate_portraits, Compositions, DEFAULT_ENUMERATION_CAP,
};
use crate::error::{Error, Result};
use crate::rng::{draw_batch, RngStream};
use crate::samplers::sample_dirichlet;
use crate::simplex::{DirichletParams, SimplexPoint};
use crate::special::{as_small_integer, pochhammer, rising_over_factorial};
use crate::stats::{mean_and_se, MeanEstimate};

/// Closed divided-difference formulas are used only when the smallest
/// pairwise gap, relative to the largest entry, exceeds this.
pub const DEGENERACY_THRESHOLD: f64 = 1e-3;

/// A positive evaluation vector and an exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformQuery {
    f: Vec<f64>,
    c: f64,
}

impl TransformQuery {
    pub fn new(f: Vec<f64>, c: f64) -> Result<Self> {
        check_positive(&f)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("exponent c must be positive, got {c}")));
        }
        Ok(Self { f, c })
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The same `f` with another exponent.
    pub fn with_exponent(&self, c: f64) -> Result<Self> {
        Self::new(self.f.clone(), c)
    }
}

pub(crate) fn check_positive(f: &[f64]) -> Result<()> {
    if f.is_empty() || f.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::NonPositive);
    }
    Ok(())
}

fn check_dim(query: &TransformQuery, params: &DirichletParams) -> Result<()> {
    if query.f.len() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: query.f.len(),
        });
    }
    Ok(())
}

/// `sigma_j = sum_i a_i / f_i^j` for `j = 1..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    sigma: Vec<f64>,
}

impl PowerSums {
    pub fn new(a: &[f64], f: &[f64], k: u32) -> Self {
        let mut sigma = vec![0.0; k as usize];
        for (ai, fi) in a.iter().zip(f) {
            let inv = 1.0 / fi;
            let mut pow = 1.0;
            for s in sigma.iter_mut() {
                pow *= inv;
                *s += ai * pow;
            }
        }
        Self { sigma }
    }

    /// Builds the sums from precomputed values, e.g. integrals of `α(dw)/f(w)^j`.
    pub fn from_values(sigma: Vec<f64>) -> Self {
        Self { sigma }
    }

    /// `sigma_j`, `j >= 1`.
    pub fn get(&self, j: usize) -> f64 {
        self.sigma[j - 1]
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// `(k!/(a)_k) sum_m prod_j sigma_j^{m_j} / (j^{m_j} m_j!)` over the
    /// partitions of `k`, with total mass `a`.
    pub fn partition_sum(&self, total_mass: f64) -> Result<f64> {
        let k = self.sigma.len() as u32;
        let scaled: Vec<f64> = self
            .sigma
            .iter()
            .enumerate()
            .map(|(idx, s)| s / (idx as f64 + 1.0))
            .collect();
        let mut acc = 0.0;
        for m in enumerate_portraits(k)? {
            let mut term = 1.0;
            for (t, &mj) in scaled.iter().zip(m.multiplicities()) {
                for r in 1..=mj {
                    term *= t / r as f64;
                }
            }
            acc += term;
        }
        Ok(acc / rising_over_factorial(total_mass, k as u64))
    }
}

/// `T_a` of `D(a_0, ..., a_d)` at its own total: `prod f_i^{-a_i}`.
pub fn tc_dirichlet(query: &TransformQuery, params: &DirichletParams) -> Result<f64> {
    check_dim(query, params)?;
    if (query.c - params.total()).abs() > 1e-12 * params.total().max(1.0) {
        return Err(Error::InvalidParams(format!(
            "closed form holds only at c = a = {}, got c = {}",
            params.total(),
            query.c
        )));
    }
    let ln: f64 = params
        .a()
        .iter()
        .zip(&query.f)
        .map(|(ai, fi)| ai * fi.ln())
        .sum();
    Ok((-ln).exp())
}

/// How [`tc_quasi_bernoulli`] evaluates the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcMethod {
    /// Sum over compositions of `k`.
    Compositions,
    /// Sum over partitions of `k` using power sums.
    Partitions,
}

/// `T_k` of `B_k(params)` at `c = k`.
pub fn tc_quasi_bernoulli(
    query: &TransformQuery,
    params: &DirichletParams,
    method: TcMethod,
) -> Result<f64> {
    check_dim(query, params)?;
    let k = match as_small_integer(query.c) {
        Some(k) if k >= 1 && k <= u32::MAX as u64 => k as u32,
        _ => {
            return Err(Error::InvalidParams(format!(
                "quasi-Bernoulli transform needs a positive integer exponent, got {}",
                query.c
            )))
        }
    };
    match method {
        TcMethod::Compositions => tc_qb_compositions(&query.f, params, k),
        TcMethod::Partitions => PowerSums::new(params.a(), &query.f, k).partition_sum(params.total()),
    }
}

fn tc_qb_compositions(f: &[f64], params: &DirichletParams, k: u32) -> Result<f64> {
    let count = composition_count(params.dim(), k);
    if count > DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    // table[i][n] = (a_i)_n / (n! f_i^n)
    let table: Vec<Vec<f64>> = params
        .a()
        .iter()
        .zip(f)
        .map(|(ai, fi)| {
            let mut row = Vec::with_capacity(k as usize + 1);
            let mut v = 1.0;
            row.push(v);
            for n in 0..k {
                let n = n as f64;
                v *= (ai + n) / ((n + 1.0) * fi);
                row.push(v);
            }
            row
        })
        .collect();
    let mut acc = 0.0;
    for b in Compositions::new(params.dim(), k) {
        acc += b
            .iter()
            .zip(&table)
            .map(|(bi, row)| row[*bi as usize])
            .product::<f64>();
    }
    Ok(acc / rising_over_factorial(params.total(), k as u64))
}

/// Sample mean and standard error of `<f, x>^{-c}` over `samples`.
pub fn tc_monte_carlo(samples: &[SimplexPoint], query: &TransformQuery) -> Result<MeanEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut values = Vec::with_capacity(samples.len());
    for x in samples {
        if x.dim() != query.f.len() {
            return Err(Error::DimensionMismatch {
                expected: query.f.len(),
                found: x.dim(),
            });
        }
        values.push(x.dot(&query.f).powf(-query.c));
    }
    mean_and_se(&values)
}

/// Outcome of checking `T_a(X) T_k(B) = T_{a+k}(X)` against simulation.
#[derive(Debug, Clone, Serialize)]
pub struct RatioIdentityReport {
    pub tc_dirichlet: f64,
    pub tc_quasi_bernoulli: f64,
    /// `T_a(X)(f) T_k(B)(f)`.
    pub closed_product: f64,
    /// Monte Carlo estimate of `T_{a+k}(X)(f)`.
    pub mc: MeanEstimate,
    /// `|closed - mc| / se`; zero when both agree exactly.
    pub se_distance: f64,
    pub threshold_se: f64,
    pub pass: bool,
}

/// Compares the closed product `T_a(X) T_k(B)` with a Monte Carlo estimate of
/// `T_{a+k}(X)` over `n` Dirichlet draws.
pub fn verify_ratio_identity(
    params: &DirichletParams,
    k: u32,
    f: &[f64],
    n: usize,
    stream: &RngStream,
    threshold_se: f64,
) -> Result<RatioIdentityReport> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let a = params.total();
    let q_a = TransformQuery::new(f.to_vec(), a)?;
    let t_a = tc_dirichlet(&q_a, params)?;
    let t_k = tc_quasi_bernoulli(&q_a.with_exponent(k as f64)?, params, TcMethod::Partitions)?;
    let closed = t_a * t_k;
    let exponent = a + k as f64;
    let values = draw_batch(stream, n, |rng| {
        sample_dirichlet(params, rng).dot(f).powf(-exponent)
    });
    let mc = mean_and_se(&values)?;
    let se_distance = se_distance(closed, &mc);
    Ok(RatioIdentityReport {
        tc_dirichlet: t_a,
        tc_quasi_bernoulli: t_k,
        closed_product: closed,
        mc,
        se_distance,
        threshold_se,
        pass: se_distance <= threshold_se,
    })
}

/// `|expected - estimate| / se`. Differences at rounding level count as exact
/// agreement, since the SE of nearly constant values is rounding noise too.
pub(crate) fn se_distance(expected: f64, est: &MeanEstimate) -> f64 {
    let diff = (expected - est.mean).abs();
    if diff <= 1e-12 * expected.abs().max(1.0) {
        0.0
    } else if est.std_error > 0.0 {
        diff / est.std_error
    } else {
        f64::INFINITY
    }
}

/// Outcome of the finite-difference check of `H^k T_a(X) = (a)_k T_{a+k}(X)`.
#[derive(Debug, Clone, Serialize)]
pub struct DiffRelationReport {
    pub finite_difference: f64,
    pub closed_form: f64,
    pub relative_error: f64,
}

/// Applies `H = -(d/df_0 + ... + d/df_d)` `k` times to `prod f_i^{-a_i}` by
/// central differences with step `h` and compares with
/// `(a)_k T_a(X)(f) T_k(B)(f)`.
///
/// `H` is minus the derivative along `(1, ..., 1)`, so `H^k` is the `k`-th
/// derivative of `s -> T_a(X)(f - s 1)` at zero.
pub fn verify_diff_relation(
    params: &DirichletParams,
    k: u32,
    f: &[f64],
    h: f64,
) -> Result<DiffRelationReport> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParams(format!("k must be 1 or 2, got {k}")));
    }
    let a = params.total();
    let query = TransformQuery::new(f.to_vec(), a)?;
    let min_f = f.iter().copied().fold(f64::INFINITY, f64::min);
    if !(h > 0.0 && h < min_f) {
        return Err(Error::InvalidParams(format!(
            "step h = {h} must be positive and below min(f) = {min_f}"
        )));
    }
    let at = |s: f64| -> Result<f64> {
        let shifted: Vec<f64> = f.iter().map(|x| x - s).collect();
        tc_dirichlet(&TransformQuery::new(shifted, a)?, params)
    };
    let finite_difference = match k {
        1 => (at(h)? - at(-h)?) / (2.0 * h),
        _ => (at(h)? - 2.0 * at(0.0)? + at(-h)?) / (h * h),
    };
    let t_k = tc_quasi_bernoulli(&query.with_exponent(k as f64)?, params, TcMethod::Partitions)?;
    let closed_form = pochhammer(a, k as u64) * tc_dirichlet(&query, params)? * t_k;
    Ok(DiffRelationReport {
        finite_difference,
        closed_form,
        relative_error: (finite_difference - closed_form).abs() / closed_form.abs(),
    })
}

/// `Pr(B_i = 0 for i in zero_set)` for `B ~ B_c(params)`:
/// `Γ(a) Γ(a' + c) / (Γ(a + c) Γ(a'))` with `a'` the mass off the zero set.
pub fn face_mass(params: &DirichletParams, c: f64, zero_set: &[usize]) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("c must be positive, got {c}")));
    }
    let mut zeroed = vec![false; params.dim()];
    for &i in zero_set {
        if i >= params.dim() {
            return Err(Error::InvalidParams(format!("index {i} out of range")));
        }
        zeroed[i] = true;
    }
    let a = params.total();
    let a_rest: f64 = params
        .a()
        .iter()
        .zip(&zeroed)
        .filter(|(_, z)| !**z)
        .map(|(ai, _)| ai)
        .sum();
    if a_rest <= 0.0 {
        return Err(Error::InvalidParams(
            "the coordinates outside the zero set must carry positive mass".into(),
        ));
    }
    if a_rest == a {
        return Ok(1.0);
    }
    Ok(crate::special::gamma_ratio(a_rest, c) / crate::special::gamma_ratio(a, c))
}

/// `Pr(B = e_i)` for `B ~ B_c(params)`.
pub fn vertex_mass(params: &DirichletParams, c: f64, i: usize) -> Result<f64> {
    let zero_set: Vec<usize> = (0..params.dim()).filter(|j| *j != i).collect();
    face_mass(params, c, &zero_set)
}

/// Monte Carlo settings for evaluations whose closed form is unusable.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub samples: usize,
    pub stream: RngStream,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 200_000,
            stream: RngStream::new(0x5eed, 0),
        }
    }
}

/// A value computed in closed form or estimated by simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Evaluation {
    Closed { value: f64 },
    MonteCarlo { value: f64, std_error: f64, n: usize },
}

impl Evaluation {
    pub fn value(&self) -> f64 {
        match self {
            Evaluation::Closed { value } | Evaluation::MonteCarlo { value, .. } => *value,
        }
    }

    pub fn std_error(&self) -> f64 {
        match self {
            Evaluation::Closed { .. } => 0.0,
            Evaluation::MonteCarlo { std_error, .. } => *std_error,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Evaluation::Closed { .. })
    }
}

/// Smallest pairwise gap divided by the largest entry; infinite for a single
/// entry.
pub fn relative_min_gap(f: &[f64]) -> f64 {
    let max = f.iter().copied().fold(0.0, f64::max);
    let mut gap = f64::INFINITY;
    for (i, x) in f.iter().enumerate() {
        for y in &f[i + 1..] {
            gap = gap.min((x - y).abs());
        }
    }
    gap / max
}

/// Divided-difference formula for `∫ λ(dx) / <f, x>^c`, `λ` uniform on the
/// simplex spanned by `f.len()` vertices. `None` when the entries of `f` are
/// too close together or the Pochhammer denominator vanishes.
pub fn uniform_face_transform_closed(f: &[f64], c: f64) -> Option<f64> {
    let k = f.len() - 1;
    if k == 0 {
        return Some(f[0].powf(-c));
    }
    if relative_min_gap(f) <= DEGENERACY_THRESHOLD {
        return None;
    }
    // k! / ((c-k)(c-k+1)...(c-1))
    let mut prefactor = 1.0;
    for m in 1..=k {
        let factor = c - m as f64;
        if factor.abs() < 1e-9 {
            return None;
        }
        prefactor *= m as f64 / factor;
    }
    let mut acc = 0.0;
    for (i, fi) in f.iter().enumerate() {
        let mut denom = fi.powf(c - k as f64);
        for (j, fj) in f.iter().enumerate() {
            if j != i {
                denom *= fj - fi;
            }
        }
        acc += 1.0 / denom;
    }
    Some(prefactor * acc)
}

/// `∫ λ(dx) / <f, x>^c` for `λ` uniform on the simplex with `f.len()`
/// vertices, closed form when possible and Monte Carlo otherwise.
pub fn uniform_face_transform(f: &[f64], c: f64, mc: &McConfig) -> Result<Evaluation> {
    check_positive(f)?;
    if let Some(value) = uniform_face_transform_closed(f, c) {
        return Ok(Evaluation::Closed { value });
    }
    let est = uniform_face_monte_carlo(f, c, mc)?;
    Ok(Evaluation::MonteCarlo {
        value: est.mean,
        std_error: est.std_error,
        n: est.n,
    })
}

pub(crate) fn uniform_face_monte_carlo(f: &[f64], c: f64, mc: &McConfig) -> Result<MeanEstimate> {
    let uniform = DirichletParams::uniform(f.len());
    let values = draw_batch(&mc.stream, mc.samples, |rng| {
        sample_dirichlet(&uniform, rng).dot(f).powf(-c)
    });
    mean_and_se(&values)
}

/// `F_c(f) = ∫ Λ_d(dx) / <f, x>^{c+d+1}`, with `Λ_d = D(1, ..., 1)` and
/// `d = f.len() - 1`.
pub fn fc_uniform(f: &[f64], c: f64, mc: &McConfig) -> Result<Evaluation> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("c must be nonnegative, got {c}")));
    }
    let d = f.len().saturating_sub(1);
    uniform_face_transform(f, c + d as f64 + 1.0, mc)
}

/// Closed path of [`fc_uniform`] only.
pub fn fc_uniform_closed(f: &[f64], c: f64) -> Option<f64> {
    let d = f.len().checked_sub(1)?;
    uniform_face_transform_closed(f, c + d as f64 + 1.0)
}

/// Monte Carlo path of [`fc_uniform`] only.
pub fn fc_uniform_monte_carlo(f: &[f64], c: f64, mc: &McConfig) -> Result<MeanEstimate> {
    check_positive(f)?;
    let d = f.len() - 1;
    uniform_face_monte_carlo(f, c + d as f64 + 1.0, mc)
}

/// `T_c` of a law given by i.i.d. draws, for callers holding a sampler rather
/// than a sample.
pub fn tc_of_sampler<F>(f: &[f64], c: f64, n: usize, stream: &RngStream, draw: F) -> Result<MeanEstimate>
where
    F: Fn(&mut crate::rng::StreamRng) -> SimplexPoint + Sync,
{
    check_positive(f)?;
    let values = draw_batch(stream, n, |rng| draw(rng).dot(f).powf(-c));
    mean_and_se(&values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &[f64]) -> DirichletParams {
        DirichletParams::new(a.to_vec()).unwrap()
    }

    fn q(f: &[f64], c: f64) -> TransformQuery {
        TransformQuery::new(f.to_vec(), c).unwrap()
    }

    #[test]
    fn query_rejects_nonpositive() {
        assert_eq!(TransformQuery::new(vec![1.0, 0.0], 1.0), Err(Error::NonPositive));
        assert!(TransformQuery::new(vec![1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn dirichlet_closed_form() {
        let p = params(&[1.0, 1.0]);
        assert_eq!(tc_dirichlet(&q(&[1.0, 1.0], 2.0), &p).unwrap(), 1.0);
        assert!((tc_dirichlet(&q(&[1.0, 2.0], 2.0), &p).unwrap() - 0.5).abs() < 1e-15);
        assert!(tc_dirichlet(&q(&[1.0, 2.0], 1.5), &p).is_err());
    }

    #[test]
    fn qb_total_mass_and_low_orders() {
        let p = params(&[1.0, 2.0, 3.0]);
        let ones = [1.0, 1.0, 1.0];
        let f = [1.0, 2.0, 3.0];
        for method in [TcMethod::Compositions, TcMethod::Partitions] {
            for k in 1..6 {
                let v = tc_quasi_bernoulli(&q(&ones, k as f64), &p, method).unwrap();
                assert!((v - 1.0).abs() < 1e-13, "{method:?} k={k}: {v}");
            }
            let k1 = tc_quasi_bernoulli(&q(&f, 1.0), &p, method).unwrap();
            let expect1 = (1.0 / 1.0 + 2.0 / 2.0 + 3.0 / 3.0) / 6.0;
            assert!((k1 - expect1).abs() < 1e-15);
            let s1: f64 = 1.0 + 1.0 + 1.0;
            let s2: f64 = 1.0 + 2.0 / 4.0 + 3.0 / 9.0;
            let expect2 = (s1 * s1 + s2) / (6.0 * 7.0);
            let k2 = tc_quasi_bernoulli(&q(&f, 2.0), &p, method).unwrap();
            assert!((k2 - expect2).abs() < 1e-15, "{k2} vs {expect2}");
        }
        assert!(tc_quasi_bernoulli(&q(&f, 1.5), &p, TcMethod::Partitions).is_err());
    }

    #[test]
    fn monte_carlo_on_constant_vertex() {
        let samples = vec![SimplexPoint::vertex(2, 0); 10];
        let est = tc_monte_carlo(&samples, &q(&[2.0, 5.0], 3.0)).unwrap();
        assert_eq!(est.mean, 0.125);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(tc_monte_carlo(&[], &q(&[1.0], 1.0)), Err(Error::EmptySample));
    }

    #[test]
    fn diff_relation_examples() {
        let r = verify_diff_relation(&params(&[1.0, 1.0]), 1, &[1.0, 2.0], 1e-5).unwrap();
        assert!(r.relative_error < 1e-6, "{r:?}");
        let r = verify_diff_relation(&params(&[1.0, 1.0]), 1, &[1.0, 1.0], 1e-5).unwrap();
        assert!((r.closed_form - 2.0).abs() < 1e-14);
        assert!((r.finite_difference - 2.0).abs() < 1e-6);
        let r = verify_diff_relation(&params(&[1.0, 1.0, 1.0]), 2, &[1.0, 2.0, 3.0], 1e-4).unwrap();
        assert!(r.relative_error < 1e-4, "{r:?}");
        assert!(verify_diff_relation(&params(&[1.0]), 3, &[1.0], 1e-4).is_err());
    }

    #[test]
    fn face_mass_examples() {
        let p = params(&[0.5, 0.5]);
        assert_eq!(face_mass(&p, 2.0, &[]).unwrap(), 1.0);
        assert!((face_mass(&p, 2.0, &[1]).unwrap() - 0.375).abs() < 1e-15);
        assert!((vertex_mass(&p, 2.0, 0).unwrap() - 0.375).abs() < 1e-15);
        assert!(face_mass(&p, 2.0, &[0, 1]).is_err());
    }

    #[test]
    fn face_mass_matches_beta_ratio() {
        use statrs::function::beta::ln_beta;
        let (a0, a1, c) = (0.7, 2.2, 1.3);
        let p = params(&[a0, a1]);
        let expected = (ln_beta(a0 + c, a1) - ln_beta(a0, a1)).exp();
        assert!((face_mass(&p, c, &[1]).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn fc_uniform_examples() {
        let mc = McConfig::default();
        assert_eq!(fc_uniform(&[1.0, 1.0, 1.0], 2.0, &mc).unwrap().value(), 1.0);
        let v = fc_uniform(&[2.0, 1.0], 0.0, &mc).unwrap();
        assert!(v.is_closed());
        assert!((v.value() - 0.5).abs() < 1e-15);
        let (f0, f1, c): (f64, f64, f64) = (1.5, 4.0, 0.7);
        let expected = (f1.powf(-c - 1.0) - f0.powf(-c - 1.0)) / ((c + 1.0) * (f0 - f1));
        let got = fc_uniform_closed(&[f0, f1], c).unwrap();
        assert!((got - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn fc_uniform_degenerate_uses_monte_carlo() {
        let mc = McConfig { samples: 50_000, stream: RngStream::new(3, 0) };
        let f = [1.0, 1.0 + 1e-4, 2.0];
        let e = fc_uniform(&f, 1.5, &mc).unwrap();
        assert!(!e.is_closed());
        // nearby well-separated point gives a continuous reference
        let near = fc_uniform_closed(&[1.0, 1.01, 2.0], 1.5).unwrap();
        assert!((e.value() - near).abs() < 0.05 * near);
    }

    #[test]
    fn homogeneity_of_closed_forms() {
        let p = params(&[0.6, 1.1, 2.3]);
        let f = [0.8, 1.9, 1.3];
        for lambda in [0.5, 2.0] {
            let g: Vec<f64> = f.iter().map(|x| x * lambda).collect();
            let a = p.total();
            let r = tc_dirichlet(&q(&g, a), &p).unwrap() / tc_dirichlet(&q(&f, a), &p).unwrap();
            assert!((r / lambda.powf(-a) - 1.0).abs() < 1e-12);
            for method in [TcMethod::Compositions, TcMethod::Partitions] {
                let r = tc_quasi_bernoulli(&q(&g, 4.0), &p, method).unwrap()
                    / tc_quasi_bernoulli(&q(&f, 4.0), &p, method).unwrap();
                assert!((r / lambda.powi(-4) - 1.0).abs() < 1e-12);
            }
            let c = 1.7;
            let r = fc_uniform_closed(&g, c).unwrap() / fc_uniform_closed(&f, c).unwrap();
            assert!((r / lambda.powf(-(c + 3.0)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_sums() {
        let s = PowerSums::new(&[1.0, 2.0], &[1.0, 2.0], 3);
        assert_eq!(s.get(1), 2.0);
        assert_eq!(s.get(2), 1.5);
        assert_eq!(s.get(3), 1.25);
    }
}
