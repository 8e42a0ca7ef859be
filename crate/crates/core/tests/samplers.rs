use std::collections::HashMap;

use proptest::prelude::*;
use simplex_lab::combinatorics::{enumerate_portraits, ewens_pmf, face_weights};
use simplex_lab::rng::draw_batch;
use simplex_lab::samplers::{sample_crp_portrait, sample_dirichlet, sample_face_uniform, sample_nu};
use simplex_lab::stats::{
    chi_square_face_test, chi_square_homogeneity, dirichlet_moment_oracle, empirical_moment,
    energy_two_sample_test, MomentIndex, TestReport,
};
use simplex_lab::{DirichletParams, QbRoute, QuasiBernoulliSpec, RngStream, SimplexPoint};

fn assert_on_simplex(x: &SimplexPoint) {
    let s: f64 = x.coords().iter().sum();
    assert!((s - 1.0).abs() <= 1e-12, "sum {s}");
    assert!(x.coords().iter().all(|c| (0.0..=1.0).contains(c)));
}

#[test]
fn dirichlet_moments_match_oracle() {
    let p = DirichletParams::new(vec![0.4, 1.5, 3.0]).unwrap();
    let xs = draw_batch(&RngStream::new(11, 0), 100_000, |rng| sample_dirichlet(&p, rng));
    for idx in MomentIndex::all_up_to(3, 2) {
        let est = empirical_moment(&xs, &idx).unwrap();
        let r = TestReport::se_band(&est, dirichlet_moment_oracle(&p, &idx).unwrap(), 4.0);
        assert!(r.pass, "{idx}: {r:?}");
    }
}

#[test]
fn crp_matches_ewens_pmf() {
    for (k, a) in [(3u32, 1.0), (4, 0.5), (5, 2.7)] {
        let n = 100_000;
        let draws = draw_batch(&RngStream::new(12, k as u64), n, |rng| sample_crp_portrait(k, a, rng));
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
        for m in &draws {
            *counts.entry(m.multiplicities().to_vec()).or_default() += 1;
        }
        for m in enumerate_portraits(k).unwrap() {
            let p = ewens_pmf(&m, a).unwrap();
            let freq = counts.get(m.multiplicities()).copied().unwrap_or(0) as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() <= 4.0 * se, "k={k} a={a} {m:?}: {freq} vs {p}");
        }
    }
}

#[test]
fn routes_agree_in_distribution() {
    let n = 100_000;
    let cases: [(&[f64], u32); 4] = [
        (&[0.5, 1.5], 2),
        (&[0.5, 1.5], 3),
        (&[1.0, 2.0, 3.0], 2),
        (&[0.7, 0.7, 1.6], 3),
    ];
    for (i, (a, k)) in cases.iter().enumerate() {
        let p = DirichletParams::new(a.to_vec()).unwrap();
        let draw = |route, s| {
            let spec = QuasiBernoulliSpec::new(p.clone(), *k, route).unwrap();
            draw_batch(&RngStream::new(13, s), n, |rng| spec.sample(rng))
        };
        let xs = draw(QbRoute::Mixture, 2 * i as u64);
        let ys = draw(QbRoute::Ewens, 2 * i as u64 + 1);
        let expected = face_weights(*k, &p).unwrap();
        assert!(chi_square_face_test(&xs, &expected, 0.001).unwrap().pass);
        assert!(chi_square_face_test(&ys, &expected, 0.001).unwrap().pass);
        assert!(chi_square_homogeneity(&xs, &ys, 0.001).unwrap().pass);
        let interior = |s: &[SimplexPoint]| -> Vec<SimplexPoint> {
            s.iter().filter(|x| x.support().len() == p.dim()).take(1500).cloned().collect()
        };
        let (xi, yi) = (interior(&xs), interior(&ys));
        if p.dim() <= *k as usize {
            let r = energy_two_sample_test(&xi, &yi, 299, &RngStream::new(13, 100 + i as u64), 0.01).unwrap();
            assert!(r.pass, "case {i}: {r:?}");
        } else {
            assert!(xi.is_empty() && yi.is_empty());
        }
    }
}

#[test]
fn nu_face_frequencies() {
    // nu_{2,2}: each vertex and each edge 1/6
    let n = 60_000;
    let xs = draw_batch(&RngStream::new(14, 0), n, |rng| sample_nu(2.0, 2, rng).unwrap());
    let mut counts = [0usize; 2];
    for x in &xs {
        assert_on_simplex(x);
        counts[x.support().len() - 1] += 1;
    }
    let se = (0.25f64 / n as f64).sqrt();
    assert!((counts[0] as f64 / n as f64 - 0.5).abs() <= 4.0 * se);
}

#[test]
fn face_uniform_lands_on_k_faces() {
    let mut rng = RngStream::new(15, 0).rng();
    for _ in 0..1000 {
        let x = sample_face_uniform(4, 2, &mut rng).unwrap();
        assert_on_simplex(&x);
        assert_eq!(x.support().len(), 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outputs_are_simplex_points(
        a in prop::collection::vec(0.01f64..4.0, 2..6),
        k in 1u32..8,
        seed in any::<u64>(),
    ) {
        let p = DirichletParams::new(a).unwrap();
        let mut rng = RngStream::new(seed, 0).rng();
        for route in [QbRoute::Mixture, QbRoute::Ewens] {
            let spec = QuasiBernoulliSpec::new(p.clone(), k, route).unwrap();
            for _ in 0..20 {
                let x = spec.sample(&mut rng);
                assert_on_simplex(&x);
                prop_assert!(x.support().len() <= k as usize);
            }
        }
        assert_on_simplex(&sample_dirichlet(&p, &mut rng));
    }

    #[test]
    fn draws_are_bit_reproducible(seed in any::<u64>(), stream in 0u64..1000) {
        let p = DirichletParams::new(vec![0.3, 1.0, 2.5]).unwrap();
        let spec = QuasiBernoulliSpec::new(p, 4, QbRoute::Ewens).unwrap();
        let s = RngStream::new(seed, stream);
        let a = draw_batch(&s, 2500, |rng| spec.sample(rng));
        let b = draw_batch(&s, 2500, |rng| spec.sample(rng));
        prop_assert_eq!(a, b);
    }
}
