use std::fs::File;
use std::io::{self, BufWriter, Write};

use simplex_lab::chain::{backward_series_sample, run_chain, ChainConfig};
use simplex_lab::combinatorics::face_weights;
use simplex_lab::continuous::nu_weights;
use simplex_lab::io::{jsonl_atoms, OutputFormat, PointWriter};
use simplex_lab::process::{sample_qb_process, BaseDistribution, BaseMeasure, BinEdges};
use simplex_lab::rng::{draw_chunks, StreamRng, CHUNK};
use simplex_lab::samplers::{sample_bernoulli_vertex, sample_dirichlet, sample_face_uniform, sample_nu_with};
use simplex_lab::transforms::{tc_dirichlet, tc_monte_carlo, tc_quasi_bernoulli, TcMethod, TransformQuery};
use simplex_lab::{DirichletParams, QbRoute, QuasiBernoulliSpec, RngStream, SimplexPoint};

use crate::{
    ChainArgs, Cli, Command, Common, Dist, Failure, Format, Method, ProcessArgs, SampleArgs, TcArgs, TcDist,
    VerifyArgs, WeightsArgs,
};

/// Chunks drawn per output block; bounds memory for large `-n`.
const BLOCK_CHUNKS: usize = 64;

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    let mut out = open_output(common)?;
    match &cli.command {
        Command::Sample(args) => sample(args, common, &mut out),
        Command::Tc(args) => tc(args, common, &mut out),
        Command::Weights(args) => weights(args, &mut out),
        Command::Chain(args) => chain(args, common, &mut out),
        Command::Process(args) => process(args, common, &mut out),
        Command::Verify(args) => verify(args, common, &mut out),
    }?;
    out.flush()?;
    Ok(())
}

fn open_output(common: &Common) -> Result<Box<dyn Write>, Failure> {
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn need<T: Copy>(value: Option<T>, flag: &str, what: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(format!("{what} requires {flag}")))
}

fn point_format(common: &Common) -> OutputFormat {
    match common.format {
        Some(Format::Jsonl) => OutputFormat::Jsonl,
        _ => OutputFormat::Csv,
    }
}

fn stream_of(common: &Common) -> RngStream {
    RngStream::new(common.seed, common.stream)
}

/// Writes `n` draws in blocks of [`BLOCK_CHUNKS`] chunks. The output equals a
/// single `draw_batch` of size `n`.
fn emit_draws<T, F>(
    stream: &RngStream,
    n: usize,
    draw: F,
    mut write: impl FnMut(T) -> Result<(), Failure>,
) -> Result<(), Failure>
where
    T: Send,
    F: Fn(&mut StreamRng) -> simplex_lab::Result<T> + Sync,
{
    let block = BLOCK_CHUNKS * CHUNK;
    let mut done = 0;
    let mut first_chunk = 0u64;
    while done < n {
        let len = block.min(n - done);
        for item in draw_chunks(stream, first_chunk, len, &draw) {
            write(item?)?;
        }
        done += len;
        first_chunk += BLOCK_CHUNKS as u64;
    }
    Ok(())
}

fn write_points<F>(common: &Common, dim: usize, n: usize, out: &mut dyn Write, draw: F) -> Result<(), Failure>
where
    F: Fn(&mut StreamRng) -> simplex_lab::Result<SimplexPoint> + Sync,
{
    let mut writer = PointWriter::new(out, point_format(common));
    writer.write_header(dim)?;
    emit_draws(&stream_of(common), n, draw, |x| Ok(writer.write_point(&x)?))
}

fn sample(args: &SampleArgs, common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let name = format!("--dist {:?}", args.dist).to_lowercase();
    let uses_a = matches!(args.dist, Dist::Dirichlet | Dist::Bernoulli | Dist::QbMixture | Dist::QbEwens);
    if uses_a && args.a.is_empty() {
        return Err(usage(format!("{name} requires --a")));
    }
    if !uses_a && !args.a.is_empty() {
        return Err(usage(format!("{name} does not take --a")));
    }
    match args.dist {
        Dist::Dirichlet => {
            let p = DirichletParams::new(args.a.clone())?;
            write_points(common, p.dim(), args.n, out, |rng| Ok(sample_dirichlet(&p, rng)))
        }
        Dist::Bernoulli => {
            let p = DirichletParams::new(args.a.clone())?;
            write_points(common, p.dim(), args.n, out, |rng| Ok(sample_bernoulli_vertex(&p, rng)))
        }
        Dist::QbMixture | Dist::QbEwens => {
            let k = need(args.k, "--k", &name)?;
            let route = if args.dist == Dist::QbMixture { QbRoute::Mixture } else { QbRoute::Ewens };
            let spec = QuasiBernoulliSpec::new(DirichletParams::new(args.a.clone())?, k, route)?;
            write_points(common, spec.params.dim(), args.n, out, |rng| Ok(spec.sample(rng)))
        }
        Dist::FaceUniform => {
            let d = need(args.d, "--d", &name)?;
            let k = need(args.k, "--k", &name)? as usize;
            if k > d {
                return Err(usage(format!("face dimension --k {k} exceeds --d {d}")));
            }
            write_points(common, d + 1, args.n, out, |rng| sample_face_uniform(d, k, rng))
        }
        Dist::Nu => {
            let c = need(args.c, "--c", &name)?;
            let d = need(args.d, "--d", &name)?;
            let spec = nu_weights(c, d)?;
            if !spec.is_probability() {
                return Err(simplex_lab::Error::NotAProbability { c, d }.into());
            }
            write_points(common, d + 1, args.n, out, |rng| sample_nu_with(&spec, rng))
        }
    }
}

fn print_values(values: &[(&str, f64)], out: &mut dyn Write) -> io::Result<()> {
    if let [(_, v)] = values {
        return writeln!(out, "{v}");
    }
    for (label, v) in values {
        writeln!(out, "{label}\t{v}")?;
    }
    Ok(())
}

fn tc(args: &TcArgs, common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let params = DirichletParams::new(args.a.clone())?;
    if args.f.len() != params.dim() {
        return Err(usage(format!("--f has {} entries but --a has {}", args.f.len(), params.dim())));
    }
    let mut values: Vec<(&str, f64)> = Vec::new();
    let stream = stream_of(common);
    match args.dist {
        TcDist::Dirichlet => {
            if args.method.is_some() {
                return Err(usage("--method applies to --dist qb only"));
            }
            let c = args.c.unwrap_or(params.total());
            let q = TransformQuery::new(args.f.clone(), c)?;
            if (c - params.total()).abs() <= 1e-12 * params.total() {
                values.push(("closed", tc_dirichlet(&q, &params)?));
            } else if args.mc.is_none() {
                return Err(usage("the closed form needs --c equal to the sum of --a; pass --mc N to simulate"));
            }
            if let Some(n) = args.mc {
                let xs = simplex_lab::rng::draw_batch(&stream, n, |rng| sample_dirichlet(&params, rng));
                let est = tc_monte_carlo(&xs, &q)?;
                values.push(("mc", est.mean));
                values.push(("mc_se", est.std_error));
            }
        }
        TcDist::Qb => {
            let k = need(args.k, "--k", "--dist qb")?;
            if args.c.is_some() {
                return Err(usage("--dist qb uses the exponent --k"));
            }
            let q = TransformQuery::new(args.f.clone(), k as f64)?;
            let method = args.method.unwrap_or(Method::Compositions);
            if matches!(method, Method::Compositions | Method::Both) {
                values.push(("compositions", tc_quasi_bernoulli(&q, &params, TcMethod::Compositions)?));
            }
            if matches!(method, Method::Partitions | Method::Both) {
                values.push(("partitions", tc_quasi_bernoulli(&q, &params, TcMethod::Partitions)?));
            }
            if let Some(n) = args.mc {
                let spec = QuasiBernoulliSpec::new(params, k, QbRoute::Mixture)?;
                let xs = simplex_lab::rng::draw_batch(&stream, n, |rng| spec.sample(rng));
                let est = tc_monte_carlo(&xs, &q)?;
                values.push(("mc", est.mean));
                values.push(("mc_se", est.std_error));
            }
        }
    }
    print_values(&values, out)?;
    Ok(())
}

fn weights(args: &WeightsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut sum = 0.0;
    if let Some(k) = args.k {
        let params = DirichletParams::new(args.a.clone())?;
        for (face, w) in face_weights(k, &params)? {
            writeln!(out, "{face}\t{w}")?;
            sum += w;
        }
    } else if let (Some(c), Some(d)) = (args.c, args.d) {
        let spec = nu_weights(c, d)?;
        for (k, w) in spec.dim_weights.iter().enumerate() {
            writeln!(out, "dim {k}\t{w}")?;
            sum += w;
        }
        if !spec.is_probability() {
            eprintln!("note: nu_{{c,d}} is not a probability for c = {c}, d = {d}; weights are signed");
        }
    } else {
        return Err(usage("weights requires either --a and --k, or --c and --d"));
    }
    writeln!(out, "sum\t{sum}")?;
    Ok(())
}

fn chain(args: &ChainArgs, common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let params = DirichletParams::new(args.a.clone())?;
    let dim = params.dim();
    if args.backward {
        let (k, eps, route) = (args.k, args.epsilon, QbRoute::from(args.route));
        return write_points(common, dim, args.n, out, |rng| {
            backward_series_sample(&params, k, eps, route, rng).map(|s| s.point)
        });
    }
    let mut config = ChainConfig::new(params, args.k)?
        .with_burn_in(args.burn_in)
        .with_thin(args.thin)?
        .with_route(args.route.into());
    if let Some(x0) = &args.x0 {
        config = config.with_x0(SimplexPoint::new(x0.clone())?)?;
    }
    let mut writer = PointWriter::new(out, point_format(common));
    writer.write_header(dim)?;
    for x in run_chain(&config, args.n, stream_of(common).rng()) {
        writer.write_point(&x)?;
    }
    Ok(())
}

fn parse_list(s: &str, sep: char) -> Result<Vec<f64>, Failure> {
    s.split(sep)
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("not a number: {t:?}"))))
        .collect()
}

fn parse_base(spec: &str) -> Result<BaseDistribution, Failure> {
    let bad = || usage(format!("unrecognized --base {spec:?}; use uniform, beta:P,Q or cdf:X:Y,..."));
    if spec == "uniform" {
        return Ok(BaseDistribution::Uniform);
    }
    if let Some(rest) = spec.strip_prefix("beta:") {
        return match parse_list(rest, ',')?.as_slice() {
            [p, q] => Ok(BaseDistribution::Beta { p: *p, q: *q }),
            _ => Err(bad()),
        };
    }
    if let Some(rest) = spec.strip_prefix("cdf:") {
        let knots = rest
            .split(',')
            .map(|pair| match parse_list(pair, ':')?.as_slice() {
                [x, y] => Ok((*x, *y)),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(BaseDistribution::PiecewiseLinearCdf { knots });
    }
    Err(bad())
}

fn process(args: &ProcessArgs, common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    let measure = BaseMeasure::new(args.mass, parse_base(&args.base)?)?;
    if args.k == 0 {
        return Err(usage("-k must be at least 1"));
    }
    let k = args.k;
    match &args.bins {
        Some(edges) => {
            let edges = BinEdges::new(edges.clone())?;
            write_points(common, edges.len(), args.n, out, |rng| {
                sample_qb_process(k, &measure, rng).map(|p| p.bin(&edges))
            })
        }
        None => {
            if common.format == Some(Format::Csv) {
                return Err(usage("atom lists are written as JSONL; pass --bins for CSV"));
            }
            emit_draws(
                &stream_of(common),
                args.n,
                |rng| sample_qb_process(k, &measure, rng),
                |p| Ok(writeln!(out, "{}", jsonl_atoms(&p))?),
            )
        }
    }
}

fn verify(args: &VerifyArgs, common: &Common, out: &mut dyn Write) -> Result<(), Failure> {
    if args.n == 0 {
        return Err(usage("-n must be positive"));
    }
    let all_pass = crate::suites::run(args.suite, common.seed, args.n, out)?;
    out.flush()?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
