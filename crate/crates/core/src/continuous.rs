//! The mixtures `ν_{c,d} = Σ_k w_k Λ_k` of face-uniform laws, which behave
//! like `B_c(1, ..., 1)` for real `c`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{as_small_integer, binomial};
use crate::transforms::{check_positive, fc_uniform, uniform_face_transform, McConfig};

/// Relative error below which [`verify_cp`] accepts two closed values.
pub const CP_TOLERANCE: f64 = 1e-8;

/// Standard errors within which [`verify_cp`] accepts Monte Carlo values.
pub const CP_SE_THRESHOLD: f64 = 4.0;

/// Weights of `Λ_0, ..., Λ_d` in `ν_{c,d}`. They sum to one but are signed in
/// general.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuSpec {
    pub c: f64,
    pub d: usize,
    pub dim_weights: Vec<f64>,
}

impl NuSpec {
    /// Whether every weight is nonnegative.
    pub fn is_probability(&self) -> bool {
        exists_probability(self.c, self.d)
    }

    /// Mass given to one particular `k`-face.
    pub fn per_face_weight(&self, k: usize) -> f64 {
        self.dim_weights[k] / binomial(self.d as u64 + 1, k as u64 + 1) as f64
    }
}

/// True when `c` is a positive integer or `c > d`.
pub fn exists_probability(c: f64, d: usize) -> bool {
    matches!(as_small_integer(c), Some(n) if n >= 1) || c > d as f64
}

/// Computes the weights
/// `d!(d+1)!/((c+1)...(c+d)) * (c-1)...(c-k) / (k!(k+1)!(d-k)!)`.
pub fn nu_weights(c: f64, d: usize) -> Result<NuSpec> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!("c must be positive, got {c}")));
    }
    if d == 0 {
        return Err(Error::InvalidParams("d must be at least 1".into()));
    }
    // Rewritten as C(d,k) * prod_{m=1}^{d} num_m / (c+m) with
    // num = (c-1), ..., (c-k), k+2, ..., d+1 to avoid factorial overflow.
    let dim_weights = (0..=d)
        .map(|k| {
            let mut w = binomial(d as u64, k as u64) as f64;
            for m in 1..=d {
                let num = if m <= k { c - m as f64 } else { (m + 1) as f64 };
                w *= num / (c + m as f64);
            }
            w
        })
        .collect();
    Ok(NuSpec { c, d, dim_weights })
}

/// Both sides of `∫ ν_{c,d}(dx)/<f,x>^c = f_0...f_d ∫ Λ_d(dx)/<f,x>^{c+d+1}`.
#[derive(Debug, Clone, Serialize)]
pub struct CpReport {
    pub c: f64,
    pub d: usize,
    pub lhs: f64,
    pub lhs_std_error: f64,
    pub rhs: f64,
    pub rhs_std_error: f64,
    pub relative_error: f64,
    /// True when neither side needed simulation.
    pub closed_form: bool,
    pub pass: bool,
}

/// Evaluates both sides of the identity. The left side sums, over faces with
/// nonzero weight, the face-restricted transform; the right side uses
/// [`fc_uniform`].
pub fn verify_cp(c: f64, d: usize, f: &[f64], mc: &McConfig) -> Result<CpReport> {
    check_positive(f)?;
    if f.len() != d + 1 {
        return Err(Error::DimensionMismatch { expected: d + 1, found: f.len() });
    }
    let spec = nu_weights(c, d)?;
    let mut lhs = 0.0;
    let mut lhs_var = 0.0;
    let mut closed = true;
    let mut face_stream = 0u64;
    for k in 0..=d {
        let w = spec.per_face_weight(k);
        if w == 0.0 {
            continue;
        }
        for mask in 1u64..(1u64 << (d + 1)) {
            if mask.count_ones() as usize != k + 1 {
                continue;
            }
            let f_t: Vec<f64> = (0..=d).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
            face_stream += 1;
            let face_mc = McConfig {
                samples: mc.samples,
                stream: mc.stream.with_stream(mc.stream.stream.wrapping_add(face_stream)),
            };
            let e = uniform_face_transform(&f_t, c, &face_mc)?;
            lhs += w * e.value();
            lhs_var += (w * e.std_error()).powi(2);
            closed &= e.is_closed();
        }
    }
    let product: f64 = f.iter().product();
    let fc = fc_uniform(f, c, mc)?;
    closed &= fc.is_closed();
    let rhs = product * fc.value();
    let rhs_se = product * fc.std_error();
    let lhs_se = lhs_var.sqrt();
    let relative_error = (lhs - rhs).abs() / rhs.abs();
    let se = (lhs_var + rhs_se * rhs_se).sqrt();
    let pass = relative_error < CP_TOLERANCE
        || (!closed && (lhs - rhs).abs() <= CP_SE_THRESHOLD * se);
    Ok(CpReport {
        c,
        d,
        lhs,
        lhs_std_error: lhs_se,
        rhs,
        rhs_std_error: rhs_se,
        relative_error,
        closed_form: closed,
        pass,
    })
}
