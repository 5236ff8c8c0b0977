mod render;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use beltrami_core::charts::{christoffel_at, metric_at};
use beltrami_core::identities::{expected_pass, suite_charts};
use beltrami_core::{
    builtin_chart, check_identity, delta1, delta1_pair, delta2, load_chart, BeltramiError, Chart, ChartError,
    ChartKind, CheckConfig, IdentityError, IdentityId, PsiVariant, ResidualReport, ScalarField,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use render::{ChristoffelEntry, ChristoffelOutput, DeltaOutput, MetricOutput};

/// Beltrami differential operators on coordinate charts.
#[derive(Parser)]
#[command(name = "beltrami", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Metric g_ij and inverse g^ij at a point
    Metric(PointArgs),
    /// Nonzero Christoffel symbols Γ^i_kl at a point
    Christoffel(PointArgs),
    /// First or second Beltrami operator of a field at a point
    Delta(DeltaArgs),
    /// Sampled checks of the operator identities
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ChartArgs {
    /// Builtin chart: euclidean, polar2, spherical3 or hyperspherical
    #[arg(long, required_unless_present = "chart_file", conflicts_with = "chart_file")]
    builtin: Option<String>,
    /// Dimension of a euclidean or hyperspherical chart
    #[arg(long)]
    dim: Option<usize>,
    /// JSON chart document with name, coords, embedding and domain
    #[arg(long, value_name = "PATH")]
    chart_file: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite decimal"))
        })
        .collect::<Result<_, _>>()
        .map(Point)
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    chart: ChartArgs,
    /// Comma-separated coordinates, e.g. 2,0.5
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    point: Point,
    /// Output format; pretty on a terminal, json otherwise
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Op {
    #[value(name = "1")]
    One,
    #[value(name = "1pair")]
    OnePair,
    #[value(name = "2")]
    Two,
}

#[derive(Args)]
struct DeltaArgs {
    #[arg(long, value_enum)]
    op: Op,
    /// Field expression over the chart coordinates
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
    /// Second field, required by --op 1pair
    #[arg(long, allow_hyphen_values = true)]
    psi: Option<String>,
    #[command(flatten)]
    at: PointArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
}

fn parse_identity(s: &str) -> Result<IdentityId, String> {
    s.parse().map_err(|e: IdentityError| e.to_string())
}

fn parse_psi(s: &str) -> Result<PsiVariant, String> {
    s.parse().map_err(|e: IdentityError| e.to_string())
}

fn parse_positive_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("`{s}` is not a positive tolerance")),
    }
}

fn parse_dim(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("`{s}` is not a dimension of at least 2")),
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Run every identity
    #[arg(long, value_enum, required_unless_present = "identity", conflicts_with = "identity")]
    suite: Option<Suite>,
    /// Identity ids, comma-separated or repeated
    #[arg(long, value_delimiter = ',', value_parser = parse_identity)]
    identity: Vec<IdentityId>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "200", value_parser = parse_positive_count)]
    samples: usize,
    #[arg(long, default_value = "1e-9", value_parser = parse_tolerance)]
    tol: f64,
    /// ψ profile of the harmonic constructions: paper or corrected
    #[arg(long, default_value = "corrected", value_parser = parse_psi)]
    psi: PsiVariant,
    /// Hyperspherical dimensions to sample
    #[arg(long, value_delimiter = ',', default_value = "2,4,6", value_parser = parse_dim)]
    dims: Vec<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// Failure with its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Mismatch(_) => 1,
            Self::Usage(_) => 2,
            Self::Domain(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Domain(m) | Self::Mismatch(m) => m,
        }
    }
}

impl From<ChartError> for Failure {
    fn from(e: ChartError) -> Self {
        match e {
            ChartError::UnknownKind(_)
            | ChartError::Unsupported { .. }
            | ChartError::Schema(_)
            | ChartError::Parse { .. }
            | ChartError::Shape { .. }
            | ChartError::Arity { .. } => Self::Usage(e.to_string()),
            _ => Self::Domain(e.to_string()),
        }
    }
}

impl From<BeltramiError> for Failure {
    fn from(e: BeltramiError) -> Self {
        match e {
            BeltramiError::Chart(c) => c.into(),
            BeltramiError::DimensionMismatch { .. } | BeltramiError::UnknownFunction(_) => Self::Usage(e.to_string()),
            _ => Self::Domain(e.to_string()),
        }
    }
}

impl From<IdentityError> for Failure {
    fn from(e: IdentityError) -> Self {
        match e {
            IdentityError::Chart(c) => c.into(),
            IdentityError::Beltrami(b) => b.into(),
            IdentityError::IncompatibleChart { .. }
            | IdentityError::UnknownIdentity(_)
            | IdentityError::UnknownPsi(_)
            | IdentityError::InvalidSpec(_) => Self::Usage(e.to_string()),
            _ => Self::Domain(e.to_string()),
        }
    }
}

fn resolve_chart(args: &ChartArgs) -> Result<Chart, Failure> {
    if let Some(path) = &args.chart_file {
        if args.dim.is_some() {
            return Err(Failure::Usage("--dim applies only to builtin charts".into()));
        }
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        return Ok(load_chart(&text)?);
    }
    let name = args.builtin.as_deref().unwrap_or_default();
    let kind: ChartKind = name.parse()?;
    let dim = match (kind, args.dim) {
        (_, Some(d)) => d,
        (ChartKind::Polar2, None) => 2,
        (ChartKind::Spherical3, None) => 3,
        (_, None) => return Err(Failure::Usage(format!("--dim is required for the {kind} chart"))),
    };
    Ok(builtin_chart(kind, dim)?)
}

fn checked_point(chart: &Chart, point: &Point) -> Result<Vec<f64>, Failure> {
    chart.check_point(&point.0)?;
    Ok(point.0.clone())
}

fn parse_field(text: &str, chart: &Chart) -> Result<ScalarField, Failure> {
    ScalarField::parse(text, chart.coords()).map_err(|e| Failure::Usage(e.to_string()))
}

fn output_format(requested: Option<Format>) -> Format {
    requested.unwrap_or(if io::stdout().is_terminal() {
        Format::Pretty
    } else {
        Format::Json
    })
}

fn cmd_metric(args: &PointArgs) -> Result<String, Failure> {
    let chart = resolve_chart(&args.chart)?;
    let point = checked_point(&chart, &args.point)?;
    let metric = metric_at(&chart, &point)?;
    let out = MetricOutput::new(&chart, &point, &metric);
    Ok(render::metric(&out, output_format(args.format)))
}

fn cmd_christoffel(args: &PointArgs) -> Result<String, Failure> {
    let chart = resolve_chart(&args.chart)?;
    let point = checked_point(&chart, &args.point)?;
    let gamma = christoffel_at(&chart, &point)?.gamma;
    let n = chart.dim();
    // entries below this are roundoff of symbols that vanish identically
    let cutoff = 1e-12 * gamma.max_abs().max(1.0);
    let coords = chart.coords();
    let mut entries = Vec::new();
    for i in 0..n {
        for k in 0..n {
            for l in 0..n {
                let value = gamma.get(i, k, l);
                if value.abs() > cutoff {
                    entries.push(ChristoffelEntry {
                        i: coords[i].clone(),
                        k: coords[k].clone(),
                        l: coords[l].clone(),
                        value,
                    });
                }
            }
        }
    }
    let out = ChristoffelOutput {
        chart: chart.name().to_string(),
        point,
        entries,
    };
    Ok(render::christoffel(&out, output_format(args.format)))
}

fn cmd_delta(args: &DeltaArgs) -> Result<String, Failure> {
    let chart = resolve_chart(&args.at.chart)?;
    let phi = parse_field(&args.phi, &chart)?;
    let psi = match (args.op, &args.psi) {
        (Op::OnePair, Some(text)) => Some(parse_field(text, &chart)?),
        (Op::OnePair, None) => return Err(Failure::Usage("--op 1pair requires --psi".into())),
        (_, Some(_)) => return Err(Failure::Usage("--psi is only used by --op 1pair".into())),
        (_, None) => None,
    };
    let point = checked_point(&chart, &args.at.point)?;
    let value = match (args.op, psi) {
        (Op::One, _) => delta1(&phi, &chart, &point)?,
        (Op::OnePair, Some(psi)) => delta1_pair(&phi, &psi, &chart, &point)?,
        (Op::Two, _) => delta2(&phi, &chart, &point)?,
        (Op::OnePair, None) => unreachable!(),
    };
    Ok(render::delta(&DeltaOutput { re: value.re, im: value.im }, output_format(args.at.format)))
}

/// Family name and dimension, so `hyperspherical10` sorts after `hyperspherical4`.
fn chart_sort_key(report: &ResidualReport) -> (IdentityId, String, usize) {
    let family = report.chart.trim_end_matches(|c: char| c.is_ascii_digit()).to_string();
    (report.identity, family, report.dim)
}

fn cmd_verify(args: &VerifyArgs) -> Result<String, Failure> {
    let identities: BTreeSet<IdentityId> = if args.suite.is_some() {
        IdentityId::ALL.into_iter().collect()
    } else {
        args.identity.iter().copied().collect()
    };
    let dims: Vec<usize> = args.dims.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let config = CheckConfig {
        seed: args.seed,
        samples: args.samples,
        tol: args.tol,
        psi: args.psi,
    };
    let mut reports = Vec::new();
    for &id in &identities {
        for chart in suite_charts(id, &dims)? {
            reports.push(check_identity(id, &chart, &config)?);
        }
    }
    reports.sort_by_key(chart_sort_key);
    let expected: Vec<bool> = reports
        .iter()
        .map(|r| expected_pass(r.identity, args.psi, r.dim))
        .collect();
    let text = render::reports(&reports, &expected, output_format(args.format));
    let mismatched: Vec<String> = reports
        .iter()
        .zip(&expected)
        .filter(|(r, &e)| r.pass != e)
        .map(|(r, _)| format!("{}@{}", r.identity, r.chart))
        .collect();
    if mismatched.is_empty() {
        Ok(text)
    } else {
        print_stdout(&text);
        Err(Failure::Mismatch(format!(
            "unexpected verdict for {}",
            mismatched.join(", ")
        )))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("BELTRAMI_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("BELTRAMI_THREADS=`{value}` is not a thread count")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Domain(e.to_string()))?;
    }
    Ok(())
}

fn print_stdout(text: &str) {
    let mut out = io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn run(cli: Cli) -> Result<String, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Metric(a) => cmd_metric(a),
        Command::Christoffel(a) => cmd_christoffel(a),
        Command::Delta(a) => cmd_delta(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print_stdout(&text);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
