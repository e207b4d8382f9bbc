//! Command-line front end. Structured results are written as JSON, scans as
//! CSV with a header row; log-space columns carry a `log_` prefix.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distance::{completeness_probe, distance_upper, gap_angle, metric, radial_path};
use crate::domain::{validate_configuration, CircularDomain, DomainFile};
use crate::error::{BergmanError, Result};
use crate::hilbert::{gram_matrix, standard_basis, Backend, KernelEvaluator, Region};
use crate::laurent_split::{inequality_suite, split, SampleSpace};
use crate::zwonek::majorant::ym_sup_computed;
use crate::zwonek::{generate, majorant, sandwich_scan, spacing_constant, verify_conditions, ZwonekParams};

/// Slack below which an estimate counts as violated.
pub const SLACK_TOL: f64 = -1e-9;
/// Largest ring checked for the spacing constant in reports.
pub const SPACING_RINGS: u32 = 10_000;

#[derive(Parser, Debug)]
#[command(name = "bergman", version, about = "Bergman kernels, metrics and certified bounds on circular domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Materialize a truncated construction as a domain file.
    Construct(ParamsArgs),
    /// Check a domain file for geometric and technical violations.
    Validate(DomainArgs),
    /// Certify the summability conditions of a construction.
    VerifyConditions(ParamsArgs),
    /// Kernel majorant on the gap circles `|z| = y_m`.
    MajorantScan(ParamsArgs),
    /// Majorant on gap circles against kernel lower bounds on ring circles.
    Sandwich(ParamsArgs),
    /// Gram matrix, its factorization, and the serialized evaluator.
    Gram(DomainArgs),
    /// Basis kernel and log-hessian on a grid.
    KernelScan(DomainArgs),
    /// Basis metric on a grid.
    MetricScan(DomainArgs),
    /// Graph upper bound for the Bergman distance between two points.
    Distance(DistanceArgs),
    /// Principal-part splitting of random sample functions.
    Decompose(DomainArgs),
    /// Stability estimates on random sample functions.
    InequalitySuite(DomainArgs),
    /// Conditions, spacing constant and sandwich in one JSON document.
    Report(ParamsArgs),
    /// Radial path toward the origin through a truncated construction.
    Probe(ParamsArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ParamsArgs {
    /// Construction parameters (JSON).
    #[arg(long, conflicts_with_all = ["paper_mode", "tame"])]
    pub config: Option<PathBuf>,
    /// Use the published parameters.
    #[arg(long)]
    pub paper_mode: bool,
    /// Use the desk-scale three-ring family.
    #[arg(long)]
    pub tame: bool,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Ring range `A..B` (inclusive).
    #[arg(long, value_parser = parse_range)]
    pub rings: Option<RangeInclusive<u32>>,
    /// Comparison constant multiplying the majorant.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Hole cap for `construct` and `probe`.
    #[arg(long, default_value_t = 10_000)]
    pub max_holes: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct DomainArgs {
    /// Domain file (JSON, log radii).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub degree: u32,
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    #[arg(long, default_value = "spectral")]
    pub backend: Backend,
    /// Grid points per axis for scans.
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    /// Random sample functions for `decompose` and `inequality-suite`.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Terms per random sample function.
    #[arg(long, default_value_t = 20)]
    pub terms: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Start point `re,im`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub from: Complex64,
    /// End point `re,im`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub to: Complex64,
    #[arg(long, default_value_t = 3)]
    pub level: u32,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err("empty range".into());
    }
    Ok(a..=b)
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let (a, b) = s.split_once(',').ok_or("expected re,im")?;
    Ok(Complex64::new(
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

/// What a successful run concluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
        }
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(common: &Common, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(common, &s)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn load_params(a: &ParamsArgs) -> Result<ZwonekParams> {
    let mut p = if let Some(path) = &a.config {
        read_json(path)?
    } else if a.paper_mode {
        ZwonekParams::paper(a.n_max.unwrap_or(2000))
    } else if a.tame {
        ZwonekParams::tame_three_rings()
    } else {
        return Err(BergmanError::InvalidArgument(
            "give --config, --paper-mode or --tame".into(),
        ));
    };
    if let Some(n) = a.n_max {
        p.n_max = n;
    }
    p.validate()?;
    Ok(p)
}

fn load_domain(a: &DomainArgs) -> Result<CircularDomain> {
    read_json::<DomainFile>(&a.config)?.into_domain()
}

fn evaluator(a: &DomainArgs, d: &CircularDomain) -> Result<KernelEvaluator> {
    let region = Region::whole(d);
    let basis = standard_basis(d, a.degree, a.order)?;
    Ok(KernelEvaluator::new(&gram_matrix(&basis, &region, a.backend)?, &region))
}

/// Grid points of `[-1, 1]²` inside the evaluator's domain, row-major.
fn grid_points(ke: &KernelEvaluator, n: usize) -> Vec<Complex64> {
    let n = n.max(2);
    let mut pts = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = Complex64::new(
                -1.0 + 2.0 * j as f64 / (n - 1) as f64,
                -1.0 + 2.0 * i as f64 / (n - 1) as f64,
            );
            if ke.contains(z) {
                pts.push(z);
            }
        }
    }
    pts
}

#[derive(Serialize)]
struct GramSummary {
    dimension: usize,
    rank: usize,
    dropped: Vec<usize>,
    reconstruction_error: f64,
    evaluator: serde_json::Value,
}

#[derive(Serialize)]
struct ConstructSummary {
    holes: usize,
    capped_s: Vec<u32>,
    domain: DomainFile,
}

#[derive(Serialize)]
struct DecomposeRow {
    sample: usize,
    residual: f64,
    truncated_holes: Vec<usize>,
    parts: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct SuiteSummary {
    samples: usize,
    min_slack: f64,
    ok: bool,
    reports: Vec<crate::laurent_split::EstimateReport>,
}

#[derive(Serialize)]
struct Report {
    conditions: crate::zwonek::ConditionReport,
    spacing: crate::zwonek::SpacingConstant,
    sandwich: Vec<crate::zwonek::SandwichRow>,
}

fn ring_range(a: &ParamsArgs, p: &ZwonekParams) -> RangeInclusive<u32> {
    a.rings.clone().unwrap_or(p.n0..=p.n_max)
}

/// Runs one command; I/O and usage problems are errors, a failed check is
/// a `Verdict::Fail`.
pub fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Construct(a) => {
            let p = load_params(&a)?;
            let g = generate(&p, a.max_holes)?;
            emit_json(
                &a.common,
                &ConstructSummary {
                    holes: g.domain.holes.len(),
                    capped_s: g.capped_s,
                    domain: DomainFile::from_domain(&g.domain),
                },
            )?;
            Ok(Verdict::Pass)
        }
        Command::Validate(a) => {
            let report = validate_configuration(&load_domain(&a)?);
            emit_json(&a.common, &report)?;
            Ok(Verdict::from_ok(report.ok))
        }
        Command::VerifyConditions(a) => {
            let report = verify_conditions(&load_params(&a)?)?;
            emit_json(&a.common, &report)?;
            Ok(Verdict::from_ok(report.ok))
        }
        Command::MajorantScan(a) => {
            let p = load_params(&a)?;
            let mut csv = String::from("m,y,log_majorant\n");
            for m in ring_range(&a, &p) {
                let y = p.y(m);
                let v = majorant(&p, Complex64::new(y, 0.0), a.c)?;
                csv.push_str(&format!("{m},{y:?},{:?}\n", v.ln()));
            }
            emit(&a.common, &csv)?;
            Ok(Verdict::Pass)
        }
        Command::Sandwich(a) => {
            let mut p = load_params(&a)?;
            let range = ring_range(&a, &p);
            p.n0 = *range.start();
            p.n_max = *range.end();
            let table = sandwich_scan(&p, a.c, p.n_max)?;
            emit_json(&a.common, &table)?;
            Ok(Verdict::from_ok(table.lower_monotone))
        }
        Command::Gram(a) => {
            let d = load_domain(&a)?;
            let region = Region::whole(&d);
            let basis = standard_basis(&d, a.degree, a.order)?;
            let build = gram_matrix(&basis, &region, a.backend)?;
            let ke = KernelEvaluator::new(&build, &region);
            emit_json(
                &a.common,
                &GramSummary {
                    dimension: basis.len(),
                    rank: build.rank(),
                    dropped: build.dropped.clone(),
                    reconstruction_error: build.reconstruction_error(),
                    evaluator: serde_json::from_str(&ke.to_json()?)?,
                },
            )?;
            Ok(Verdict::Pass)
        }
        Command::KernelScan(a) => {
            let d = load_domain(&a)?;
            let ke = evaluator(&a, &d)?;
            let mut csv = String::from("re,im,kernel,log_hessian\n");
            for z in grid_points(&ke, a.grid) {
                let (k, h) = ke.kernel_and_hessian(z)?;
                csv.push_str(&format!("{:?},{:?},{k:?},{h:?}\n", z.re, z.im));
            }
            emit(&a.common, &csv)?;
            Ok(Verdict::Pass)
        }
        Command::MetricScan(a) => {
            let d = load_domain(&a)?;
            let ke = evaluator(&a, &d)?;
            let mut csv = String::from("re,im,basis_metric\n");
            for z in grid_points(&ke, a.grid) {
                let b = metric(&ke, z)?;
                csv.push_str(&format!("{:?},{:?},{b:?}\n", z.re, z.im));
            }
            emit(&a.common, &csv)?;
            Ok(Verdict::Pass)
        }
        Command::Distance(a) => {
            let d = load_domain(&a.domain)?;
            let ke = evaluator(&a.domain, &d)?;
            let r = distance_upper(&ke, a.from, a.to, a.level)?;
            emit_json(&a.domain.common, &r)?;
            Ok(Verdict::Pass)
        }
        Command::Decompose(a) => {
            let d = load_domain(&a)?;
            let holes = d.holes.len();
            let space = SampleSpace::new(d, a.degree, a.order)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
            let mut rows = Vec::with_capacity(a.samples);
            for i in 0..a.samples {
                let f = space.random_sample(&mut rng, a.terms);
                let r = split(&space, &f, holes)?;
                rows.push(DecomposeRow {
                    sample: i,
                    residual: r.residual,
                    truncated_holes: r.truncated_holes,
                    parts: r
                        .parts
                        .iter()
                        .map(|p| p.coeffs.iter().filter(|c| c.norm() > 0.0).map(|c| [c.re, c.im]).collect())
                        .collect(),
                });
            }
            emit_json(&a.common, &rows)?;
            Ok(Verdict::Pass)
        }
        Command::InequalitySuite(a) => {
            let space = SampleSpace::new(load_domain(&a)?, a.degree, a.order)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
            let reports = (0..a.samples)
                .map(|_| inequality_suite(&space, &space.random_sample(&mut rng, a.terms)))
                .collect::<Result<Vec<_>>>()?;
            let min_slack = reports
                .iter()
                .map(|r| r.min_slack() / r.norm_sq.max(f64::MIN_POSITIVE))
                .fold(f64::INFINITY, f64::min);
            let ok = min_slack >= SLACK_TOL;
            emit_json(
                &a.common,
                &SuiteSummary {
                    samples: a.samples,
                    min_slack,
                    ok,
                    reports,
                },
            )?;
            Ok(Verdict::from_ok(ok))
        }
        Command::Report(a) => {
            let p = load_params(&a)?;
            let conditions = verify_conditions(&p)?;
            let spacing = spacing_constant(&p, p.n0..=SPACING_RINGS.max(p.n0));
            let range = ring_range(&a, &p);
            let table = sandwich_scan(&p, a.c, *range.end())?;
            let ok = conditions.ok && spacing.certified && table.lower_monotone;
            emit_json(
                &a.common,
                &Report {
                    conditions,
                    spacing,
                    sandwich: table.rows,
                },
            )?;
            Ok(Verdict::from_ok(ok))
        }
        Command::Probe(a) => {
            let p = load_params(&a)?;
            let g = generate(&p, a.max_holes)?;
            let region = Region::whole(&g.domain);
            let basis = standard_basis(&g.domain, 12, 2)?;
            let ke = KernelEvaluator::new(&gram_matrix(&basis, &region, Backend::Spectral)?, &region);
            let report = completeness_probe(&p, &ke, &radial_path(gap_angle(&p), 0.9), 20, a.c)?;
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            emit(&a.common, &String::from_utf8_lossy(&buf))?;
            // sup over the gap circles, for the log
            let sup = ym_sup_computed(&p, p.n0..=p.n_max);
            eprintln!(
                "rings crossed: {}, lower bounds increasing: {}, below majorant (c = {}): {}, gap-circle sum sup: e^{:.6}",
                report.every_ring_crossed,
                report.lower_increasing,
                a.c,
                report.below_majorant,
                sup.ln()
            );
            Ok(Verdict::from_ok(report.ok()))
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(v) => v.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
