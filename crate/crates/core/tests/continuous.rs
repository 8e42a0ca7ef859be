use proptest::prelude::*;
use simplex_lab::combinatorics::{face_weights, weights_by_dimension};
use simplex_lab::continuous::{exists_probability, nu_weights, verify_cp};
use simplex_lab::transforms::{fc_uniform, McConfig};
use simplex_lab::{DirichletParams, RngStream};

/// Composite Simpson rule on `[lo, hi]` with `n` (even) intervals.
fn simpson(lo: f64, hi: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut s = g(lo) + g(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(lo + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫ λ(dx) <f,x>^{-c}` with `λ` uniform on the simplex spanned by up to
/// three vertices, by direct quadrature.
fn face_integral(f: &[f64], c: f64) -> f64 {
    match f.len() {
        1 => f[0].powf(-c),
        2 => simpson(0.0, 1.0, 2000, |t| (f[0] * t + f[1] * (1.0 - t)).powf(-c)),
        3 => {
            2.0 * simpson(0.0, 1.0, 600, |x| {
                simpson(0.0, 1.0 - x, 600, |y| (f[0] * x + f[1] * y + f[2] * (1.0 - x - y)).powf(-c))
            })
        }
        _ => unreachable!(),
    }
}

fn cp_sides_by_quadrature(c: f64, f: &[f64]) -> (f64, f64) {
    let d = f.len() - 1;
    let spec = nu_weights(c, d).unwrap();
    let mut lhs = 0.0;
    for mask in 1u32..(1 << f.len()) {
        let face: Vec<f64> = (0..f.len()).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
        lhs += spec.per_face_weight(face.len() - 1) * face_integral(&face, c);
    }
    let rhs = f.iter().product::<f64>() * face_integral(f, c + d as f64 + 1.0);
    (lhs, rhs)
}

#[test]
fn cp_sides_match_quadrature() {
    for (c, f) in [(3.5, vec![1.0, 2.0, 3.0]), (2.0, vec![1.0, 2.0]), (0.7, vec![0.5, 1.0, 1.8])] {
        let d = f.len() - 1;
        let r = verify_cp(c, d, &f, &McConfig::default()).unwrap();
        let (lhs, rhs) = cp_sides_by_quadrature(c, &f);
        assert!((r.lhs - lhs).abs() < 1e-8 * lhs.abs(), "c={c}: {} vs {lhs}", r.lhs);
        assert!((r.rhs - rhs).abs() < 1e-8 * rhs.abs(), "c={c}: {} vs {rhs}", r.rhs);
    }
}

#[test]
fn cp_grid_closed_form() {
    let grid = [
        (3.5, 2, vec![1.0, 2.0, 3.0]),
        (2.0, 1, vec![1.0, 2.0]),
        (4.0, 3, vec![0.6, 1.1, 1.9, 3.2]),
        (5.25, 4, vec![1.0, 1.5, 2.2, 3.0, 4.1]),
        (1.0, 2, vec![2.0, 0.7, 1.3]),
    ];
    for (c, d, f) in grid {
        let r = verify_cp(c, d, &f, &McConfig::default()).unwrap();
        assert!(r.closed_form && r.relative_error < 1e-8 && r.pass, "{r:?}");
    }
}

#[test]
fn cp_constant_vector() {
    let r = verify_cp(3.0, 2, &[1.0, 1.0, 1.0], &McConfig::default()).unwrap();
    assert!((r.rhs - 1.0).abs() < 1e-12 && (r.lhs - 1.0).abs() < 1e-12);
    assert!(r.pass);
}

#[test]
fn cp_degenerate_vector_falls_back_to_monte_carlo() {
    let mc = McConfig { samples: 100_000, stream: RngStream::new(31, 0) };
    let r = verify_cp(2.5, 2, &[1.0, 1.0001, 2.0], &mc).unwrap();
    assert!(!r.closed_form);
    assert!(r.lhs_std_error > 0.0 && r.rhs_std_error > 0.0);
    assert!(r.pass, "{r:?}");
    assert!(!fc_uniform(&[1.0, 1.0001, 2.0], 2.5, &mc).unwrap().is_closed());
}

#[test]
fn integer_c_matches_uniform_quasi_bernoulli() {
    for d in 1..=5usize {
        for k in 1..=d as u32 {
            let nu = nu_weights(k as f64, d).unwrap();
            let ones = DirichletParams::uniform(d + 1);
            let qb = weights_by_dimension(&face_weights(k, &ones).unwrap(), d + 1);
            for (a, b) in nu.dim_weights.iter().zip(&qb) {
                assert!((a - b).abs() < 1e-10, "d={d} k={k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn existence_examples() {
    assert!(exists_probability(2.0, 5));
    assert!(exists_probability(2.5, 2));
    assert!(!exists_probability(0.5, 1));
}

proptest! {
    #[test]
    fn signs_characterize_existence(c in 0.05f64..9.0, d in 1usize..8) {
        let spec = nu_weights(c, d).unwrap();
        let nonnegative = spec.dim_weights.iter().all(|w| *w >= -1e-14);
        prop_assert_eq!(nonnegative, exists_probability(c, d));
        let total: f64 = spec.dim_weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integer_c_always_exists(c in 1u32..12, d in 1usize..8) {
        let spec = nu_weights(c as f64, d).unwrap();
        prop_assert!(spec.is_probability());
        prop_assert!(spec.dim_weights.iter().all(|w| *w >= 0.0));
    }
}
