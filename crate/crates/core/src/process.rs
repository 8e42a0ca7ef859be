//! Quasi-Bernoulli random probabilities `B_k(α)` on `[0, 1]`: a Chinese
//! restaurant portrait of `k` with concentration `a = α([0,1])`, one
//! location per block drawn from `α / a`, and Dirichlet block weights.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::combinatorics::face_weights;
use crate::error::{Error, Result};
use crate::rng::{draw_batch, RngStream};
use crate::samplers::{dirichlet_from_shapes, sample_beta_pair, sample_crp_portrait};
use crate::simplex::{DirichletParams, SimplexPoint};
use crate::stats::{chi_square_face_test, mean_and_se, TestReport};
use crate::transforms::{tc_quasi_bernoulli, PowerSums, TcMethod, TransformQuery};

/// Normalized shape of the base measure on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseDistribution {
    Uniform,
    Beta { p: f64, q: f64 },
    /// CDF through the knots `(x, F(x))`, linear in between. Repeated `x`
    /// values encode atoms.
    PiecewiseLinearCdf { knots: Vec<(f64, f64)> },
}

impl BaseDistribution {
    fn validate(&self) -> Result<()> {
        match self {
            BaseDistribution::Uniform => Ok(()),
            BaseDistribution::Beta { p, q } => {
                if *p > 0.0 && *q > 0.0 && p.is_finite() && q.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParams(format!("beta shapes must be positive, got ({p}, {q})")))
                }
            }
            BaseDistribution::PiecewiseLinearCdf { knots } => {
                let ok = knots.len() >= 2
                    && knots[0] == (0.0, 0.0)
                    && *knots.last().unwrap() == (1.0, 1.0)
                    && knots.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1);
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidParams(
                        "knots must run from (0,0) to (1,1) with nondecreasing x and F".into(),
                    ))
                }
            }
        }
    }

    /// Right-continuous CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            BaseDistribution::Uniform => x,
            BaseDistribution::Beta { p, q } => Beta::new(*p, *q).expect("validated").cdf(x),
            BaseDistribution::PiecewiseLinearCdf { knots } => {
                // last knot with knot.x <= x carries the right limit at jumps
                let idx = knots.partition_point(|k| k.0 <= x);
                if idx >= knots.len() {
                    return 1.0;
                }
                let (x0, f0) = knots[idx - 1];
                let (x1, f1) = knots[idx];
                f0 + (f1 - f0) * (x - x0) / (x1 - x0)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            BaseDistribution::Uniform => rng.random(),
            BaseDistribution::Beta { p, q } => sample_beta_pair(*p, *q, rng).0,
            BaseDistribution::PiecewiseLinearCdf { knots } => {
                let u: f64 = rng.random();
                let idx = knots.partition_point(|k| k.1 <= u).clamp(1, knots.len() - 1);
                let (x0, f0) = knots[idx - 1];
                let (x1, f1) = knots[idx];
                if x1 == x0 {
                    x0
                } else {
                    x0 + (u - f0) / (f1 - f0) * (x1 - x0)
                }
            }
        }
    }
}

/// A finite measure `α` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaseMeasure {
    pub total_mass: f64,
    pub base: BaseDistribution,
}

impl BaseMeasure {
    pub fn new(total_mass: f64, base: BaseDistribution) -> Result<Self> {
        if !(total_mass > 0.0 && total_mass.is_finite()) {
            return Err(Error::InvalidParams(format!("total mass must be positive, got {total_mass}")));
        }
        base.validate()?;
        Ok(Self { total_mass, base })
    }

    pub fn uniform(total_mass: f64) -> Result<Self> {
        Self::new(total_mass, BaseDistribution::Uniform)
    }

    /// `α` of bin `i` of `edges`; bin 0 is `[e_0, e_1]`, later bins `(e_i, e_{i+1}]`.
    pub fn bin_masses(&self, edges: &BinEdges) -> Vec<f64> {
        let e = edges.edges();
        (0..edges.len())
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { self.base.cdf(e[i]) };
                self.total_mass * (self.base.cdf(e[i + 1]) - lo)
            })
            .collect()
    }
}

/// A partition of `[0, 1]` into consecutive bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinEdges {
    edges: Vec<f64>,
}

impl BinEdges {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        let ok = edges.len() >= 2
            && edges[0] == 0.0
            && *edges.last().unwrap() == 1.0
            && edges.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidParams(
                "bin edges must increase strictly from 0 to 1".into(),
            ));
        }
        Ok(Self { edges })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Number of bins.
    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bin holding `x`, consistent with [`BaseMeasure::bin_masses`].
    pub fn index_of(&self, x: f64) -> usize {
        let inner = &self.edges[1..self.edges.len() - 1];
        inner.partition_point(|e| *e < x)
    }
}

/// A discrete probability on `[0, 1]` with distinct atom locations, sorted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicProbability {
    atoms: Vec<(f64, f64)>,
}

impl AtomicProbability {
    /// Sorts the atoms and merges equal locations.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySample);
        }
        if atoms
            .iter()
            .any(|(loc, w)| !(0.0..=1.0).contains(loc) || w.is_nan() || *w < 0.0)
        {
            return Err(Error::InvalidParams("atoms need locations in [0,1] and nonnegative weights".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("atom weights sum to {total}")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (loc, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == loc => last.1 += w,
                _ => merged.push((loc, w)),
            }
        }
        Ok(Self { atoms: merged })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `(P(A_0), ..., P(A_d))` for the bins `A_i`; empty bins are exact zeros.
    pub fn bin(&self, edges: &BinEdges) -> SimplexPoint {
        let mut coords = vec![0.0; edges.len()];
        for (loc, w) in &self.atoms {
            coords[edges.index_of(*loc)] += w;
        }
        SimplexPoint::normalize(coords)
    }
}

/// One draw of `B_k(α)`.
pub fn sample_qb_process<R: Rng + ?Sized>(
    k: u32,
    measure: &BaseMeasure,
    rng: &mut R,
) -> Result<AtomicProbability> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    let portrait = sample_crp_portrait(k, measure.total_mass, rng);
    let blocks = portrait.block_sizes();
    let locations: Vec<f64> = (0..blocks.len()).map(|_| measure.base.sample(rng)).collect();
    let shapes: Vec<f64> = blocks.sizes().iter().map(|&b| b as f64).collect();
    let w = dirichlet_from_shapes(&shapes, rng);
    let atoms = locations.into_iter().zip(w.coords().iter().copied()).collect();
    AtomicProbability::new(atoms)
}

/// Positive step function on `[0, 1]`, value `values[i]` on bin `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    pub edges: BinEdges,
    pub values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn new(edges: BinEdges, values: Vec<f64>) -> Result<Self> {
        if values.len() != edges.len() {
            return Err(Error::DimensionMismatch { expected: edges.len(), found: values.len() });
        }
        crate::transforms::check_positive(&values)?;
        Ok(Self { edges, values })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(BinEdges::new(vec![0.0, 1.0])?, vec![value])
    }
}

/// `E(∫ P(dw) f(w))^{-k}` for `P ~ B_k(α)`, from
/// `σ_j = ∫ α(dw) / f(w)^j` and the partition sum.
pub fn tc_process(f: &PiecewiseConstant, k: u32, measure: &BaseMeasure) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    let masses = measure.bin_masses(&f.edges);
    let sigma = (1..=k as i32)
        .map(|j| masses.iter().zip(&f.values).map(|(m, v)| m / v.powi(j)).sum())
        .collect();
    PowerSums::from_values(sigma).partition_sum(measure.total_mass)
}

/// Checks that binned process draws follow `B_k(α(A_0), ..., α(A_d))`.
#[derive(Debug, Clone, Serialize)]
pub struct PberReport {
    pub bin_masses: Vec<f64>,
    pub face: TestReport,
    /// One standard-error band per evaluation vector.
    pub transforms: Vec<(Vec<f64>, TestReport)>,
    pub pass: bool,
}

/// Draws `n` processes, bins them, and runs a face chi-square test plus a
/// transform comparison within `threshold_se` standard errors for each `f`.
#[allow(clippy::too_many_arguments)]
pub fn verify_pber(
    k: u32,
    measure: &BaseMeasure,
    edges: &BinEdges,
    n: usize,
    fs: &[Vec<f64>],
    stream: &RngStream,
    threshold_se: f64,
    alpha: f64,
) -> Result<PberReport> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    let masses = measure.bin_masses(edges);
    if let Some(index) = masses.iter().position(|m| m.is_nan() || *m <= 0.0) {
        return Err(Error::ZeroMassBin { index });
    }
    let params = DirichletParams::new(masses.clone())?;
    let points: Vec<SimplexPoint> = draw_batch(stream, n, |rng| {
        sample_qb_process(k, measure, rng).expect("k >= 1").bin(edges)
    });
    let face = chi_square_face_test(&points, &face_weights(k, &params)?, alpha)?;
    let mut transforms = Vec::with_capacity(fs.len());
    for f in fs {
        let query = TransformQuery::new(f.clone(), k as f64)?;
        if f.len() != params.dim() {
            return Err(Error::DimensionMismatch { expected: params.dim(), found: f.len() });
        }
        let exact = tc_quasi_bernoulli(&query, &params, TcMethod::Partitions)?;
        let values: Vec<f64> = points.iter().map(|x| x.dot(f).powi(-(k as i32))).collect();
        let est = mean_and_se(&values)?;
        transforms.push((f.clone(), TestReport::se_band(&est, exact, threshold_se)));
    }
    let pass = face.pass && transforms.iter().all(|(_, r)| r.pass);
    Ok(PberReport { bin_masses: masses, face, transforms, pass })
}
