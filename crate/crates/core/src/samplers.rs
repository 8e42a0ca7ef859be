//! Random generation on the simplex.
//!
//! Gamma variates for shape below one use the boosting identity
//! `G_a = G_{a+1} U^{1/a}`, carried out in log space so that a small shape
//! cannot underflow a whole Dirichlet draw to zero. Coordinates whose
//! parameter is zero come out as exact zeros, and vertices as exact 0/1
//! vectors, so the face a sample lies on can be read off without thresholds.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};

use crate::combinatorics::PartitionPortrait;
use crate::continuous::{nu_weights, NuSpec};
use crate::error::{Error, Result};
use crate::simplex::{DirichletParams, SimplexPoint};

/// `ln G` for `G ~ Gamma(shape, 1)`, `shape > 0`.
pub fn sample_ln_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0);
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).expect("positive shape");
        return g.sample(rng).ln();
    }
    let boosted = Gamma::new(shape + 1.0, 1.0).expect("positive shape");
    // U in (0, 1]
    let u: f64 = 1.0 - rng.random::<f64>();
    boosted.sample(rng).ln() + u.ln() / shape
}

/// Normalized gamma draws with the given shapes; zero shapes give exact zeros.
pub(crate) fn dirichlet_from_shapes<R: Rng + ?Sized>(shapes: &[f64], rng: &mut R) -> SimplexPoint {
    let logs: Vec<f64> = shapes
        .iter()
        .map(|&s| if s > 0.0 { sample_ln_gamma(s, rng) } else { f64::NEG_INFINITY })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    debug_assert!(top.is_finite());
    let weights = logs
        .into_iter()
        .map(|l| if l == f64::NEG_INFINITY { 0.0 } else { (l - top).exp() })
        .collect();
    SimplexPoint::normalize(weights)
}

/// `(Y, 1 - Y)` for `Y ~ Beta(p, q)`, both computed without cancellation.
pub fn sample_beta_pair<R: Rng + ?Sized>(p: f64, q: f64, rng: &mut R) -> (f64, f64) {
    let lp = sample_ln_gamma(p, rng);
    let lq = sample_ln_gamma(q, rng);
    let y = 1.0 / (1.0 + (lq - lp).exp());
    let one_minus_y = 1.0 / (1.0 + (lp - lq).exp());
    (y, one_minus_y)
}

/// Index `i` with probability `weights[i] / total`. Zero weights are never
/// selected.
pub(crate) fn pick_index<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            acc += w;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// A draw from `D(a_0, ..., a_d)`, zero parameters allowed.
pub fn sample_dirichlet<R: Rng + ?Sized>(params: &DirichletParams, rng: &mut R) -> SimplexPoint {
    dirichlet_from_shapes(params.a(), rng)
}

/// The vertex `e_i` with probability `a_i / a`.
pub fn sample_bernoulli_vertex<R: Rng + ?Sized>(
    params: &DirichletParams,
    rng: &mut R,
) -> SimplexPoint {
    let i = pick_index(params.a(), params.total(), rng);
    SimplexPoint::vertex(params.dim(), i)
}

/// Multinomial counts of `k` trials with cell probabilities `p`, by
/// sequential conditional binomials.
fn sample_multinomial<R: Rng + ?Sized>(k: u32, p: &[f64], rng: &mut R) -> Vec<u32> {
    let mut counts = vec![0u32; p.len()];
    let mut remaining = k as u64;
    let mut mass_left = 1.0;
    for (i, pi) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == p.len() || *pi >= mass_left {
            counts[i] = remaining as u32;
            break;
        }
        let prob = (pi / mass_left).clamp(0.0, 1.0);
        let n = Binomial::new(remaining, prob)
            .expect("probability in [0, 1]")
            .sample(rng);
        counts[i] = n as u32;
        remaining -= n;
        mass_left -= pi;
    }
    counts
}

/// Which construction [`QuasiBernoulliSpec::sample`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbRoute {
    /// Dirichlet, then multinomial composition, then Dirichlet on the counts.
    Mixture,
    /// Chinese restaurant portrait, labeled blocks, Dirichlet block weights.
    Ewens,
}

/// The quasi-Bernoulli law `B_k(params)` together with a sampling route.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiBernoulliSpec {
    pub params: DirichletParams,
    pub k: u32,
    pub route: QbRoute,
}

impl QuasiBernoulliSpec {
    pub fn new(params: DirichletParams, k: u32, route: QbRoute) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams(
                "quasi-Bernoulli order k must be >= 1".into(),
            ));
        }
        Ok(Self { params, k, route })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SimplexPoint {
        match self.route {
            QbRoute::Mixture => sample_quasi_bernoulli_mixture(&self.params, self.k, rng),
            QbRoute::Ewens => sample_quasi_bernoulli_ewens(&self.params, self.k, rng),
        }
    }
}

/// `B_k(params)` through the Dirichlet–multinomial hierarchy: the composition
/// `N` has law `composition_weight`, and the output is `D(N)`.
pub fn sample_quasi_bernoulli_mixture<R: Rng + ?Sized>(
    params: &DirichletParams,
    k: u32,
    rng: &mut R,
) -> SimplexPoint {
    debug_assert!(k >= 1);
    let p = sample_dirichlet(params, rng);
    let counts = sample_multinomial(k, p.coords(), rng);
    let shapes: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    dirichlet_from_shapes(&shapes, rng)
}

/// Seats `k` customers one at a time: customer `t` joins a block of size `n`
/// with probability `n / (a + t - 1)` and opens a new block with probability
/// `a / (a + t - 1)`. Returns the portrait of the resulting block sizes.
pub fn sample_crp_portrait<R: Rng + ?Sized>(k: u32, a: f64, rng: &mut R) -> PartitionPortrait {
    assert!(k >= 1 && a > 0.0, "CRP needs k >= 1 and a > 0");
    let mut sizes: Vec<u32> = Vec::new();
    for t in 1..=k {
        let seated = (t - 1) as f64;
        let mut u = rng.random::<f64>() * (a + seated);
        let mut chosen = None;
        if u >= a {
            u -= a;
            for (idx, s) in sizes.iter().enumerate() {
                if u < *s as f64 {
                    chosen = Some(idx);
                    break;
                }
                u -= *s as f64;
            }
            // rounding past the last block
            if chosen.is_none() && !sizes.is_empty() {
                chosen = Some(sizes.len() - 1);
            }
        }
        match chosen {
            Some(idx) => sizes[idx] += 1,
            None => sizes.push(1),
        }
    }
    PartitionPortrait::from_block_sizes(&sizes).expect("CRP seats k >= 1 customers")
}

/// `B_k(params)` through the Ewens construction: portrait `M` by CRP with
/// concentration `a`, one category label per block drawn with probabilities
/// `a_i / a`, block weights `W ~ D(B(M))`, and coordinate `i` summing the
/// weights of the blocks labeled `i`.
pub fn sample_quasi_bernoulli_ewens<R: Rng + ?Sized>(
    params: &DirichletParams,
    k: u32,
    rng: &mut R,
) -> SimplexPoint {
    let portrait = sample_crp_portrait(k, params.total(), rng);
    let blocks = portrait.block_sizes();
    let labels: Vec<usize> = (0..blocks.len())
        .map(|_| pick_index(params.a(), params.total(), rng))
        .collect();
    let shapes: Vec<f64> = blocks.sizes().iter().map(|&b| b as f64).collect();
    let w = dirichlet_from_shapes(&shapes, rng);
    let mut coords = vec![0.0; params.dim()];
    for (label, wt) in labels.iter().zip(w.coords()) {
        coords[*label] += wt;
    }
    SimplexPoint::normalize(coords)
}

/// A draw from `Λ_k`: a `(k+1)`-subset of the `d+1` vertices chosen
/// uniformly, then the uniform law on that face.
pub fn sample_face_uniform<R: Rng + ?Sized>(
    d: usize,
    k: usize,
    rng: &mut R,
) -> Result<SimplexPoint> {
    if k > d {
        return Err(Error::InvalidParams(format!(
            "face dimension k = {k} exceeds d = {d}"
        )));
    }
    let dim = d + 1;
    let chosen = rand::seq::index::sample(rng, dim, k + 1);
    let mut shapes = vec![0.0; dim];
    for i in chosen.iter() {
        shapes[i] = 1.0;
    }
    Ok(dirichlet_from_shapes(&shapes, rng))
}

/// A draw from `ν_{c,d}`; fails when the measure has negative weights.
pub fn sample_nu<R: Rng + ?Sized>(c: f64, d: usize, rng: &mut R) -> Result<SimplexPoint> {
    let spec = nu_weights(c, d)?;
    sample_nu_with(&spec, rng)
}

/// As [`sample_nu`] with precomputed weights.
pub fn sample_nu_with<R: Rng + ?Sized>(spec: &NuSpec, rng: &mut R) -> Result<SimplexPoint> {
    if !spec.is_probability() {
        return Err(Error::NotAProbability {
            c: spec.c,
            d: spec.d,
        });
    }
    let weights: Vec<f64> = spec.dim_weights.iter().map(|w| w.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    let k = pick_index(&weights, total, rng);
    sample_face_uniform(spec.d, k, rng)
}
