//! The Markov chain `X(n+1) = (1 - Y) X(n) + Y B` with `Y ~ Beta(k, a)` and
//! `B ~ B_k(a)` drawn fresh at every step, whose stationary law is `D(a)`,
//! and the backward series that samples that law directly.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamRng};
use crate::samplers::{
    sample_beta_pair, sample_quasi_bernoulli_ewens, sample_quasi_bernoulli_mixture, QbRoute,
};
use crate::simplex::{DirichletParams, SimplexPoint};

pub const DEFAULT_BURN_IN: usize = 200;
pub const DEFAULT_THIN: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub params: DirichletParams,
    pub k: u32,
    pub burn_in: usize,
    pub thin: usize,
    pub x0: SimplexPoint,
    pub route: QbRoute,
}

impl ChainConfig {
    /// Starts at the barycenter with the default burn-in and thinning.
    pub fn new(params: DirichletParams, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("k must be >= 1".into()));
        }
        let x0 = SimplexPoint::barycenter(params.dim());
        Ok(Self {
            params,
            k,
            burn_in: DEFAULT_BURN_IN,
            thin: DEFAULT_THIN,
            x0,
            route: QbRoute::Mixture,
        })
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_thin(mut self, thin: usize) -> Result<Self> {
        if thin == 0 {
            return Err(Error::InvalidParams("thin must be >= 1".into()));
        }
        self.thin = thin;
        Ok(self)
    }

    pub fn with_x0(mut self, x0: SimplexPoint) -> Result<Self> {
        if x0.dim() != self.params.dim() {
            return Err(Error::DimensionMismatch { expected: self.params.dim(), found: x0.dim() });
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn with_route(mut self, route: QbRoute) -> Self {
        self.route = route;
        self
    }
}

fn draw_b<R: Rng + ?Sized>(params: &DirichletParams, k: u32, route: QbRoute, rng: &mut R) -> SimplexPoint {
    match route {
        QbRoute::Mixture => sample_quasi_bernoulli_mixture(params, k, rng),
        QbRoute::Ewens => sample_quasi_bernoulli_ewens(params, k, rng),
    }
}

/// `(1 - y) x + y b`, given `y` and `1 - y` separately.
pub fn affine_update(x: &SimplexPoint, b: &SimplexPoint, y: f64, one_minus_y: f64) -> SimplexPoint {
    let coords = x
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(xi, bi)| one_minus_y * xi + y * bi)
        .collect();
    SimplexPoint::normalize(coords)
}

/// One transition of the chain.
pub fn chain_step<R: Rng + ?Sized>(x: &SimplexPoint, config: &ChainConfig, rng: &mut R) -> SimplexPoint {
    let (y, one_minus_y) = sample_beta_pair(config.k as f64, config.params.total(), rng);
    let b = draw_b(&config.params, config.k, config.route, rng);
    affine_update(x, &b, y, one_minus_y)
}

/// Streaming output of [`run_chain`].
#[derive(Debug, Clone)]
pub struct ChainIter {
    config: ChainConfig,
    rng: StreamRng,
    state: SimplexPoint,
    burned: bool,
    remaining: usize,
}

impl Iterator for ChainIter {
    type Item = SimplexPoint;

    fn next(&mut self) -> Option<SimplexPoint> {
        if self.remaining == 0 {
            return None;
        }
        if !self.burned {
            for _ in 0..self.config.burn_in {
                self.state = chain_step(&self.state, &self.config, &mut self.rng);
            }
            self.burned = true;
        }
        for _ in 0..self.config.thin {
            self.state = chain_step(&self.state, &self.config, &mut self.rng);
        }
        self.remaining -= 1;
        Some(self.state.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for ChainIter {}

/// Emits `n` states after `burn_in` steps, keeping every `thin`-th state.
pub fn run_chain(config: &ChainConfig, n: usize, rng: StreamRng) -> ChainIter {
    ChainIter {
        config: config.clone(),
        rng,
        state: config.x0.clone(),
        burned: false,
        remaining: n,
    }
}

/// Runs `chains` independent copies of the chain, copy `i` driven by
/// `stream.substream(i)`, and concatenates their `per_chain` emitted states.
pub fn run_independent_chains(
    config: &ChainConfig,
    chains: usize,
    per_chain: usize,
    stream: &RngStream,
) -> Vec<SimplexPoint> {
    let runs: Vec<Vec<SimplexPoint>> = (0..chains)
        .into_par_iter()
        .map(|i| run_chain(config, per_chain, stream.substream(i as u64)).collect())
        .collect();
    runs.into_iter().flatten().collect()
}

/// A truncated backward-series draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDraw {
    pub point: SimplexPoint,
    pub terms_used: usize,
    /// `prod (1 - Y_j)` over the terms used.
    pub residual: f64,
}

/// Sums `Y_1 B_1 + (1 - Y_1) Y_2 B_2 + ...` until the remaining weight
/// `prod (1 - Y_j)` drops below `epsilon`, then divides by `1 - residual`.
pub fn backward_series_sample<R: Rng + ?Sized>(
    params: &DirichletParams,
    k: u32,
    epsilon: f64,
    route: QbRoute,
    rng: &mut R,
) -> Result<SeriesDraw> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    let mut acc = vec![0.0; params.dim()];
    let mut residual = 1.0;
    let mut terms_used = 0;
    while residual >= epsilon {
        let (y, one_minus_y) = sample_beta_pair(k as f64, params.total(), rng);
        let b = draw_b(params, k, route, rng);
        let w = residual * y;
        for (s, bi) in acc.iter_mut().zip(b.coords()) {
            *s += w * bi;
        }
        residual *= one_minus_y;
        terms_used += 1;
    }
    let scale = 1.0 / (1.0 - residual);
    let coords = acc.into_iter().map(|s| s * scale).collect();
    Ok(SeriesDraw { point: SimplexPoint::normalize(coords), terms_used, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ChainConfig {
        ChainConfig::new(DirichletParams::new(vec![1.0, 2.0, 3.0]).unwrap(), 2).unwrap()
    }

    #[test]
    fn single_emission_is_one_step() {
        let config = cfg().with_burn_in(0);
        let stream = RngStream::new(5, 0);
        let out: Vec<_> = run_chain(&config, 1, stream.rng()).collect();
        let mut rng = stream.rng();
        let expected = chain_step(&config.x0, &config, &mut rng);
        assert_eq!(out, vec![expected]);
    }

    #[test]
    fn runs_are_reproducible() {
        let config = cfg().with_thin(3).unwrap().with_route(QbRoute::Ewens);
        let a: Vec<_> = run_chain(&config, 50, RngStream::new(9, 2).rng()).collect();
        let b: Vec<_> = run_chain(&config, 50, RngStream::new(9, 2).rng()).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
    }

    #[test]
    fn affine_limits() {
        let x = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        let b = SimplexPoint::vertex(3, 1);
        let near_x = affine_update(&x, &b, 1e-12, 1.0 - 1e-12);
        let near_b = affine_update(&x, &b, 1.0 - 1e-12, 1e-12);
        for i in 0..3 {
            assert!((near_x.coords()[i] - x.coords()[i]).abs() < 1e-11);
            assert!((near_b.coords()[i] - b.coords()[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn backward_residual_is_below_epsilon() {
        let params = DirichletParams::new(vec![1.0, 2.0, 3.0]).unwrap();
        let mut rng = RngStream::new(1, 1).rng();
        for _ in 0..100 {
            let s = backward_series_sample(&params, 2, 1e-12, QbRoute::Mixture, &mut rng).unwrap();
            assert!(s.residual < 1e-12 && s.terms_used >= 1);
        }
        assert!(backward_series_sample(&params, 2, 1.0, QbRoute::Mixture, &mut rng).is_err());
    }

    #[test]
    fn backward_terms_shrink_with_k() {
        let params = DirichletParams::new(vec![1.0, 2.0, 3.0]).unwrap();
        let mut rng = RngStream::new(4, 0).rng();
        let mean_terms = |k: u32, rng: &mut StreamRng| {
            (0..2000)
                .map(|_| backward_series_sample(&params, k, 1e-9, QbRoute::Mixture, rng).unwrap().terms_used)
                .sum::<usize>() as f64
                / 2000.0
        };
        let t1 = mean_terms(1, &mut rng);
        let t4 = mean_terms(4, &mut rng);
        let t16 = mean_terms(16, &mut rng);
        assert!(t1 > t4 && t4 > t16, "{t1} {t4} {t16}");
    }

    #[test]
    fn rejects_bad_config() {
        assert!(ChainConfig::new(DirichletParams::uniform(2), 0).is_err());
        assert!(cfg().with_thin(0).is_err());
        assert!(cfg().with_x0(SimplexPoint::vertex(2, 0)).is_err());
    }
}
