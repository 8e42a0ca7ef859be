//! Verification suites run by `simplex-lab verify`.
//!
//! Each check yields one [`TestReport`]. Exact checks report the largest
//! error as `statistic` and a `p_value` of 1 or 0. Checks that fold several
//! standard-error bands together report the largest |z| and smallest p-value.

use std::io::Write;

use simplex_lab::chain::{backward_series_sample, run_independent_chains, ChainConfig};
use simplex_lab::combinatorics::{composition_weight, enumerate_compositions, face_weights};
use simplex_lab::continuous::{exists_probability, nu_weights, verify_cp};
use simplex_lab::process::{verify_pber, BaseDistribution, BaseMeasure, BinEdges};
use simplex_lab::rng::{draw_batch, StreamRng};
use simplex_lab::samplers::{sample_beta_pair, sample_dirichlet};
use simplex_lab::stats::{
    chi_square_homogeneity, dirichlet_moment_oracle, empirical_moment, energy_two_sample_test, mean_and_se,
    MomentIndex, TestReport,
};
use simplex_lab::transforms::{
    face_mass, tc_quasi_bernoulli, verify_ratio_identity, vertex_mass, McConfig, TcMethod, TransformQuery,
};
use simplex_lab::{DirichletParams, QbRoute, QuasiBernoulliSpec, Result, RngStream, SimplexPoint};

use crate::{Failure, Suite};

struct Check {
    suite: &'static str,
    name: String,
    report: TestReport,
}

fn params(a: &[f64]) -> DirichletParams {
    DirichletParams::new(a.to_vec()).expect("valid constant parameters")
}

fn exact(error: f64, tolerance: f64, cases: usize) -> TestReport {
    let pass = error <= tolerance;
    TestReport { statistic: error, p_value: if pass { 1.0 } else { 0.0 }, pass, n_used: cases }
}

fn fold(reports: &[TestReport]) -> TestReport {
    let worst = reports
        .iter()
        .max_by(|a, b| a.statistic.abs().total_cmp(&b.statistic.abs()))
        .expect("at least one report");
    TestReport {
        statistic: worst.statistic,
        p_value: reports.iter().map(|r| r.p_value).fold(1.0, f64::min),
        pass: reports.iter().all(|r| r.pass),
        n_used: worst.n_used,
    }
}

fn moments_report(samples: &[SimplexPoint], p: &DirichletParams, threshold: f64) -> Result<TestReport> {
    let reports = MomentIndex::all_up_to(p.dim(), 3)
        .iter()
        .map(|idx| Ok(TestReport::se_band(&empirical_moment(samples, idx)?, dirichlet_moment_oracle(p, idx)?, threshold)))
        .collect::<Result<Vec<_>>>()?;
    Ok(fold(&reports))
}

fn core(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |name: &str, report| out.push(Check { suite: "core", name: name.into(), report });

    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for a in [&[0.3, 1.7, 2.0][..], &[1.0, 1.0], &[0.5, 0.5, 0.5, 0.5]] {
        let p = params(a);
        for k in 1..=6 {
            let mut total = 0.0;
            for b in enumerate_compositions(p.dim(), k)? {
                total += composition_weight(&b, &p)?;
            }
            worst = worst.max((total - 1.0).abs());
            cases += 1;
        }
    }
    push("composition_weights_sum_to_one", exact(worst, 1e-12, cases));

    let mut rng = RngStream::new(seed, 2).rng();
    let (mut worst, mut cases): (f64, usize) = (0.0, 0);
    for d in 1..=3usize {
        let a: Vec<f64> = (0..=d).map(|_| uniform(&mut rng, 0.2, 3.0)).collect();
        let p = DirichletParams::new(a)?;
        for k in 1..=6 {
            for _ in 0..20 {
                let f: Vec<f64> = (0..=d).map(|_| uniform(&mut rng, 0.5, 2.0)).collect();
                let q = TransformQuery::new(f, k as f64)?;
                let c = tc_quasi_bernoulli(&q, &p, TcMethod::Compositions)?;
                let s = tc_quasi_bernoulli(&q, &p, TcMethod::Partitions)?;
                worst = worst.max((c - s).abs() / s.abs());
                cases += 1;
            }
        }
    }
    push("compositions_match_partitions", exact(worst, 1e-10, cases));

    let (mut worst, mut cases): (f64, usize) = (0.0, 0);
    for a in [&[0.5, 0.5][..], &[1.0, 2.0, 3.0], &[0.3, 0.0, 1.2, 2.0]] {
        let p = params(a);
        for k in 1..=5 {
            let faces = face_weights(k, &p)?;
            let mut by_support = std::collections::BTreeMap::new();
            for b in enumerate_compositions(p.dim(), k)? {
                *by_support.entry(b.support()).or_insert(0.0) += composition_weight(&b, &p)?;
            }
            for (face, w) in &faces {
                worst = worst.max((w - by_support.get(face).copied().unwrap_or(0.0)).abs());
            }
            for (face, w) in &by_support {
                worst = worst.max((w - faces.get(face).copied().unwrap_or(0.0)).abs());
            }
            cases += 1;
        }
    }
    push("face_weights_match_compositions", exact(worst, 1e-12, cases));

    let display = [(1.0, [1.0, 0.0, 0.0]), (2.0, [0.5, 0.5, 0.0]), (3.0, [0.3, 0.6, 0.1])];
    let mut worst: f64 = 0.0;
    for (c, want) in display {
        for (got, want) in nu_weights(c, 2)?.dim_weights.iter().zip(want) {
            worst = worst.max((got - want).abs());
        }
    }
    push("nu_weights_at_d2", exact(worst, 2.0 * f64::EPSILON, display.len()));

    let verdicts = [
        (0.5, 1, false),
        (2.5, 2, true),
        (1.0, 5, true),
        (3.0, 7, true),
        (1.5, 3, false),
        (7.5, 7, true),
    ];
    let wrong = verdicts.iter().filter(|(c, d, want)| exists_probability(*c, *d) != *want).count();
    push("nu_existence", exact(wrong as f64, 0.0, verdicts.len()));

    let cp = verify_cp(3.5, 2, &[1.0, 2.0, 3.0], &McConfig::default())?;
    let cp_error = if cp.closed_form { cp.relative_error } else { f64::INFINITY };
    push("cp_identity", exact(cp_error, 1e-8, 1));
    Ok(out)
}

fn uniform(rng: &mut StreamRng, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    rng.random_range(lo..hi)
}

fn indicator(samples: &[SimplexPoint], expected: f64, hit: impl Fn(&SimplexPoint) -> bool) -> Result<TestReport> {
    let values: Vec<f64> = samples.iter().map(|x| if hit(x) { 1.0 } else { 0.0 }).collect();
    Ok(TestReport::se_band(&mean_and_se(&values)?, expected, 4.0))
}

fn transforms(seed: u64, n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |name: String, report| out.push(Check { suite: "transforms", name, report });

    let cases: [(&[f64], u32, &[f64]); 3] = [
        (&[1.0, 1.0], 1, &[1.0, 2.0]),
        (&[1.0, 2.0, 3.0], 2, &[1.0, 2.0, 3.0]),
        (&[0.5, 0.5, 0.5], 3, &[1.0, 2.0, 3.0]),
    ];
    for (i, (a, k, f)) in cases.iter().enumerate() {
        let r = verify_ratio_identity(&params(a), *k, f, n, &RngStream::new(seed, 30 + i as u64), 3.0)?;
        let report = TestReport::se_band(&r.mc, r.closed_product, r.threshold_se);
        push(format!("ratio_identity_{}", i + 1), report);
    }

    let p = params(&[1.0, 2.0, 3.0]);
    let spec = QuasiBernoulliSpec::new(p.clone(), 2, QbRoute::Mixture)?;
    let bs = draw_batch(&RngStream::new(seed, 50), n, |rng| spec.sample(rng));
    for i in 0..3 {
        let r = indicator(&bs, vertex_mass(&p, 2.0, i)?, |x| x.coords()[i] == 1.0)?;
        push(format!("vertex_mass_e{i}"), r);
    }
    let r = indicator(&bs, face_mass(&p, 2.0, &[0])?, |x| x.coords()[0] == 0.0)?;
    push("face_mass_b0_zero".into(), r);

    let route = |route, stream| -> Result<Vec<SimplexPoint>> {
        let spec = QuasiBernoulliSpec::new(p.clone(), 3, route)?;
        Ok(draw_batch(&RngStream::new(seed, stream), n, |rng| spec.sample(rng)))
    };
    let xs = route(QbRoute::Mixture, 60)?;
    let ys = route(QbRoute::Ewens, 61)?;
    push("routes_face_frequencies".into(), chi_square_homogeneity(&xs, &ys, 0.001)?);
    let interior =
        |s: &[SimplexPoint]| -> Vec<SimplexPoint> { s.iter().filter(|x| x.support().len() == 3).take(2000).cloned().collect() };
    let energy = energy_two_sample_test(&interior(&xs), &interior(&ys), 499, &RngStream::new(seed, 62), 0.01)?;
    push("routes_interior_energy".into(), energy);
    Ok(out)
}

fn chain(seed: u64, n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let p = params(&[1.0, 2.0, 3.0]);
    let mut stream_id = 40;
    for k in 1..=3u32 {
        for route in [QbRoute::Mixture, QbRoute::Ewens] {
            let spec = QuasiBernoulliSpec::new(p.clone(), k, route)?;
            let z = draw_batch(&RngStream::new(seed, stream_id), n, |rng| {
                let x = sample_dirichlet(&p, rng);
                let (y, one_minus_y) = sample_beta_pair(k as f64, p.total(), rng);
                simplex_lab::chain::affine_update(&x, &spec.sample(rng), y, one_minus_y)
            });
            stream_id += 1;
            let name = format!("perpetuity_k{k}_{}", if route == QbRoute::Mixture { "mixture" } else { "ewens" });
            out.push(Check { suite: "chain", name, report: moments_report(&z, &p, 4.0)? });
        }
    }

    let series = draw_batch(&RngStream::new(seed, 90), n, |rng| {
        backward_series_sample(&p, 2, 1e-12, QbRoute::Mixture, rng).map(|s| s.point)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    out.push(Check { suite: "chain", name: "backward_series".into(), report: moments_report(&series, &p, 4.0)? });

    let per_chain = 200;
    let config = ChainConfig::new(p.clone(), 2)?.with_thin(20)?;
    let forward = run_independent_chains(&config, n.div_ceil(per_chain), per_chain, &RngStream::new(seed, 91));
    out.push(Check { suite: "chain", name: "forward_chain".into(), report: moments_report(&forward, &p, 5.0)? });
    Ok(out)
}

fn process(seed: u64, n: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let cases = [
        ("uniform_k2", 2, BaseMeasure::uniform(2.0)?, vec![0.0, 0.3, 1.0], vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![1.0, 5.0]]),
        (
            "beta_k3",
            3,
            BaseMeasure::new(1.5, BaseDistribution::Beta { p: 0.5, q: 2.0 })?,
            vec![0.0, 0.1, 0.4, 1.0],
            vec![vec![1.0, 2.0, 3.0], vec![3.0, 1.0, 1.5]],
        ),
    ];
    for (i, (label, k, measure, edges, fs)) in cases.into_iter().enumerate() {
        let edges = BinEdges::new(edges)?;
        let r = verify_pber(k, &measure, &edges, n, &fs, &RngStream::new(seed, 100 + i as u64), 4.0, 0.001)?;
        out.push(Check { suite: "process", name: format!("{label}_faces"), report: r.face });
        for (j, (_, t)) in r.transforms.into_iter().enumerate() {
            out.push(Check { suite: "process", name: format!("{label}_transform_{}", j + 1), report: t });
        }
    }
    Ok(out)
}

/// Runs `suite`, printing one JSON line per check. Returns whether all passed.
pub fn run(suite: Suite, seed: u64, n: usize, out: &mut dyn Write) -> std::result::Result<bool, Failure> {
    let parts: &[Suite] = match suite {
        Suite::All => &[Suite::Core, Suite::Transforms, Suite::Chain, Suite::Process],
        _ => std::slice::from_ref(&suite),
    };
    let mut all_pass = true;
    for part in parts {
        let checks = match part {
            Suite::Core => core(seed),
            Suite::Transforms => transforms(seed, n),
            Suite::Chain => chain(seed, n),
            Suite::Process => process(seed, n),
            Suite::All => unreachable!("expanded above"),
        }?;
        for c in checks {
            all_pass &= c.report.pass;
            writeln!(
                out,
                "{{\"suite\":\"{}\",\"check\":\"{}\",\"report\":{}}}",
                c.suite,
                c.name,
                c.report.to_json()
            )?;
        }
    }
    Ok(all_pass)
}
