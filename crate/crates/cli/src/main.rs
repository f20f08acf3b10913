//! `pagepope`: command-line harness for the family, its verification, the
//! formula audit, parameter sweeps and the limit comparison.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 internal audit mismatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pagepope::audit::{run_audit, zero_section_diameter_exponent, AuditRow};
use pagepope::exact_poly::{parse_rational, to_f64};
use pagepope::family::{cpn_catalogue, family_report, FamilyError, FamilyReport};
use pagepope::geom::{curvature, page_pope_chart, rescaled_chart, ChartMetric, GeomError, PointSummary};
use pagepope::limits::{limit_comparison, limit_smoothness, rho1_limit, u_closed_form, LimitError};
use pagepope::sweep::{run_sweep, Spacing, SweepError, SweepParameter, SweepSpec};
use pagepope::{int, FamilyParams, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pagepope", version, about = "Page-Pope Einstein metrics: construction, verification, audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form profile and derived data for one parameter tuple.
    Family(FamilyCmd),
    /// Sample chart points and check the Einstein condition.
    Verify(VerifyCmd),
    /// Printed constants against their derivations.
    Audit(AuditCmd),
    /// One-parameter sweep.
    Sweep(SweepCmd),
    /// Rescaled smooth family against the Ricci-flat limit.
    Limit(LimitCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone, Default)]
struct FamilyArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long = "Lambda", allow_negative_numbers = true)]
    einstein: Option<String>,
    #[arg(long)]
    r1: Option<String>,
    /// Degree of the line bundle over CP^n; sets lambda, c and Lambda.
    #[arg(long)]
    k: Option<u32>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyCmd {
    #[command(flatten)]
    params: FamilyArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartKind {
    Pagepope,
    Rescaled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rho1Choice {
    Derived,
    Printed,
    /// `rho1 = 0`, the flat cone.
    Zero,
}

#[derive(Args)]
struct VerifyCmd {
    #[command(flatten)]
    params: FamilyArgs,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = ChartKind::Pagepope)]
    chart: ChartKind,
    #[arg(long, value_enum, default_value_t = Rho1Choice::Derived)]
    rho1: Rho1Choice,
    /// Also require scalar/4 to equal the expected Einstein constant.
    #[arg(long = "Lambda-check")]
    lambda_check: bool,
    /// Upper end of the sampled radial range for the family chart.
    #[arg(long, default_value_t = 10.0)]
    r_max: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct AuditCmd {
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepCmd {
    #[arg(long, value_parser = parse_sweep_parameter)]
    param: SweepParameter,
    #[arg(long, allow_negative_numbers = true)]
    start: String,
    #[arg(long, allow_negative_numbers = true)]
    stop: String,
    #[arg(long)]
    count: usize,
    #[arg(long, value_parser = parse_spacing, default_value = "linear")]
    spacing: Spacing,
    /// Add the largest Einstein residual per row (n = 1).
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    params: FamilyArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct LimitCmd {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value = "0.1,0.01,0.001")]
    t_list: String,
    /// `start:stop:count` or a comma list, in units of rho1 unless --absolute.
    #[arg(long, default_value = "1.2:3:25")]
    rho_grid: String,
    #[arg(long)]
    absolute: bool,
    /// Also write the JSON summary here (CSV output only).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_sweep_parameter(s: &str) -> Result<SweepParameter, String> {
    s.parse().map_err(|e: SweepError| e.to_string())
}

fn parse_spacing(s: &str) -> Result<Spacing, String> {
    s.parse().map_err(|e: SweepError| e.to_string())
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        let code = if matches!(e, FamilyError::AuditMismatch { .. }) { 3 } else { 2 };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<LimitError> for Failure {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::Family(f) => f.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Family(f) => f.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn rational(flag: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| Failure::usage(format!("--{flag}: {e}")))
}

impl FamilyArgs {
    /// Resolves the tuple. `fallback` supplies values for flags the caller
    /// sweeps over; the catalogue shortcut is expanded first.
    fn resolve(&self, fallback: &FamilyArgs) -> Result<FamilyParams, Failure> {
        let n = self
            .n
            .or(fallback.n)
            .ok_or_else(|| Failure::usage("missing required flag --n"))?;
        let pick = |own: &Option<String>, other: &Option<String>, flag: &str| -> Result<Rational, Failure> {
            let text = own
                .as_ref()
                .or(other.as_ref())
                .ok_or_else(|| Failure::usage(format!("missing required flag --{flag}")))?;
            rational(flag, text)
        };
        let r1 = pick(&self.r1, &fallback.r1, "r1")?;
        if let Some(k) = self.k.or(fallback.k) {
            if self.lambda.is_some() || self.c.is_some() || self.einstein.is_some() {
                return Err(Failure::usage("--k replaces --lambda, --c and --Lambda"));
            }
            return Ok(cpn_catalogue(n, k)?.params(r1)?);
        }
        Ok(FamilyParams::new(
            n,
            pick(&self.lambda, &fallback.lambda, "lambda")?,
            pick(&self.c, &fallback.c, "c")?,
            pick(&self.einstein, &fallback.einstein, "Lambda")?,
            r1,
        )?)
    }
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>, Failure> {
    Ok(match &out.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv<T: Serialize>(sink: Box<dyn Write>, rows: &[T]) -> Result<(), Failure> {
    let mut writer = csv::Writer::from_writer(sink);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(mut sink: Box<dyn Write>, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut sink, value)?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

fn family_text(report: &FamilyReport) -> String {
    let mut s = String::new();
    s += &format!(
        "parameters: n={} lambda={} c={} Lambda={} r1={}\n",
        report.n, report.lambda, report.c, report.einstein_constant, report.r1
    );
    s += &format!("P(r) = {}\n", report.p_text);
    if let Some(edge) = &report.edge {
        s += "edge model:\n";
        s += &format!("  alpha = {}\n", edge.alpha);
        s += &format!("  scale = {}\n", edge.scale);
        s += &format!("  beta^2 derived = {}\n", edge.beta_sq_derived);
        s += &format!("  beta^2 printed = {}\n", edge.beta_sq_printed);
    }
    if let Some(conic) = &report.conic {
        s += "conic model:\n";
        s += &format!("  K = {} (printed {})\n", conic.leading_constant, conic.leading_constant_printed);
        s += &format!("  u scale = {}\n", conic.u_scale);
        s += &format!("  theta^2 coefficient = {}\n", conic.theta_coeff);
        s += &format!(
            "  base coefficient derived = {} (printed {})\n",
            conic.base_coeff_derived, conic.base_coeff_printed
        );
    }
    s += &format!("berger_coeff = {}\n", report.berger_coeff);
    s += &format!("z_scale = {}\n", report.z_scale);
    s += &format!("positive = {}\n", report.positive);
    s
}

fn cmd_family(cmd: &FamilyCmd) -> Result<u8, Failure> {
    let params = cmd.params.resolve(&FamilyArgs::default())?;
    let report = family_report(&params)?;
    let mut sink = open_output(&cmd.out)?;
    match cmd.out.format.unwrap_or(Format::Text) {
        Format::Json => write_json(sink, &report)?,
        Format::Csv => return Err(Failure::usage("family supports --format text|json")),
        Format::Text => {
            sink.write_all(family_text(&report).as_bytes())?;
            sink.flush()?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyRow {
    index: usize,
    x0: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    einstein_residual: f64,
    scalar: f64,
    bianchi_max: f64,
    symmetry_max: f64,
    lambda_gap: Option<f64>,
}

#[derive(Serialize)]
struct VerifyReport {
    chart: String,
    expected_lambda: f64,
    points: usize,
    seed: u64,
    tol: f64,
    max_einstein_residual: f64,
    max_lambda_gap: Option<f64>,
    bianchi_max: f64,
    symmetry_max: f64,
    worst_point: Vec<f64>,
    alpha_inf: Option<String>,
    pass: bool,
    samples: Vec<PointSummary>,
}

/// Chart, expected Einstein constant, sampler bounds for the first
/// coordinate, and the cone angle factor of the limit where relevant.
type VerifySetup = (ChartMetric<4>, f64, (f64, f64), Option<String>);

fn verify_setup(cmd: &VerifyCmd) -> Result<VerifySetup, Failure> {
    match cmd.chart {
        ChartKind::Pagepope => {
            let params = cmd.params.resolve(&FamilyArgs::default())?;
            let chart = page_pope_chart(&params)?;
            let lo = to_f64(params.r1()).max(1.0) + 0.1;
            if cmd.r_max <= lo {
                return Err(Failure::usage(format!("--r-max must exceed {lo}")));
            }
            Ok((chart, to_f64(params.einstein_constant()), (lo, cmd.r_max), None))
        }
        ChartKind::Rescaled => {
            let n = cmd.params.n.unwrap_or(1);
            let lambda = match &cmd.params.lambda {
                Some(text) => rational("lambda", text)?,
                None if matches!(cmd.rho1, Rho1Choice::Zero) => int(4),
                None => int(2),
            };
            let rho1_sq = match cmd.rho1 {
                Rho1Choice::Derived => rho1_limit(n)?.derived_sq,
                Rho1Choice::Printed => rho1_limit(n)?.printed_sq,
                Rho1Choice::Zero => int(0),
            };
            let profile = u_closed_form(n, lambda, rho1_sq)?;
            let chart = rescaled_chart(&profile)?;
            let (bounds, alpha) = if profile.rho1() > 0.0 {
                let r = profile.rho1();
                let alpha = limit_smoothness(&profile)?.alpha_inf.to_string();
                ((1.1 * r, 5.0 * r), Some(alpha))
            } else {
                ((0.2, 5.0), None)
            };
            Ok((chart, 0.0, bounds, alpha))
        }
    }
}

fn cmd_verify(cmd: &VerifyCmd) -> Result<u8, Failure> {
    if cmd.points == 0 {
        return Err(Failure::usage("--points must be at least 1"));
    }
    if cmd.tol.is_nan() || cmd.tol <= 0.0 {
        return Err(Failure::usage("--tol must be positive"));
    }
    let (chart, expected, (lo, hi), alpha_inf) = verify_setup(cmd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cmd.seed);
    let mut rows = Vec::with_capacity(cmd.points);
    let mut samples = Vec::with_capacity(cmd.points);
    for index in 0..cmd.points {
        let radius = 0.95 * rng.random::<f64>().sqrt();
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let point = [
            rng.random_range(lo..hi),
            rng.random_range(0.05..std::f64::consts::TAU - 0.05),
            radius * angle.cos(),
            radius * angle.sin(),
        ];
        let report = curvature(&chart, &point)?;
        let summary = report.summary(expected);
        let lambda_gap = cmd
            .lambda_check
            .then(|| (report.scalar / 4.0 - expected).abs() / expected.abs().max(1.0));
        rows.push(VerifyRow {
            index,
            x0: point[0],
            x1: point[1],
            x2: point[2],
            x3: point[3],
            einstein_residual: summary.einstein_residual,
            scalar: summary.scalar,
            bianchi_max: summary.bianchi_max,
            symmetry_max: summary.symmetry_max,
            lambda_gap,
        });
        samples.push(summary);
    }
    let worst = rows
        .iter()
        .max_by(|a, b| a.einstein_residual.total_cmp(&b.einstein_residual))
        .expect("at least one point");
    let max_gap = cmd
        .lambda_check
        .then(|| rows.iter().filter_map(|r| r.lambda_gap).fold(0.0f64, f64::max));
    let pass = worst.einstein_residual <= cmd.tol && max_gap.is_none_or(|g| g <= cmd.tol);
    let report = VerifyReport {
        chart: chart.name().to_string(),
        expected_lambda: expected,
        points: cmd.points,
        seed: cmd.seed,
        tol: cmd.tol,
        max_einstein_residual: worst.einstein_residual,
        max_lambda_gap: max_gap,
        bianchi_max: rows.iter().map(|r| r.bianchi_max).fold(0.0, f64::max),
        symmetry_max: rows.iter().map(|r| r.symmetry_max).fold(0.0, f64::max),
        worst_point: vec![worst.x0, worst.x1, worst.x2, worst.x3],
        alpha_inf,
        pass,
        samples,
    };
    let mut sink = open_output(&cmd.out)?;
    match cmd.out.format.unwrap_or(Format::Text) {
        Format::Json => write_json(sink, &report)?,
        Format::Csv => write_csv(sink, &rows)?,
        Format::Text => {
            writeln!(sink, "chart: {}", report.chart)?;
            writeln!(sink, "points: {} (seed {})", report.points, report.seed)?;
            writeln!(sink, "max einstein_residual: {:e}", report.max_einstein_residual)?;
            if let Some(gap) = report.max_lambda_gap {
                writeln!(sink, "max |scalar/4 - Lambda|: {gap:e}")?;
            }
            writeln!(sink, "bianchi_max: {:e}", report.bianchi_max)?;
            writeln!(sink, "symmetry_max: {:e}", report.symmetry_max)?;
            if let Some(alpha) = &report.alpha_inf {
                writeln!(sink, "cone angle factor at rho1: {alpha}")?;
            }
            writeln!(sink, "{} (tol {:e})", if pass { "PASS" } else { "FAIL" }, report.tol)?;
            sink.flush()?;
        }
    }
    if pass {
        Ok(0)
    } else {
        eprintln!(
            "verification failed: residual {:e} at {:?}",
            report.max_einstein_residual, report.worst_point
        );
        Ok(1)
    }
}

#[derive(Serialize)]
struct AuditReport<'a> {
    rows: &'a [AuditRow],
    zero_section_diameter_exponent: f64,
}

fn cmd_audit(cmd: &AuditCmd) -> Result<u8, Failure> {
    let rows = run_audit()?;
    let exponent = zero_section_diameter_exponent(1)?;
    let mut sink = open_output(&cmd.out)?;
    match cmd.out.format.unwrap_or(Format::Text) {
        Format::Json => write_json(
            sink,
            &AuditReport {
                rows: &rows,
                zero_section_diameter_exponent: exponent,
            },
        )?,
        Format::Csv => write_csv(sink, &rows)?,
        Format::Text => {
            writeln!(sink, "{:<32} {:<42} {:>12} {:>12} {:>12}  verdict", "quantity", "tuple", "printed", "derived", "arbiter")?;
            for row in &rows {
                writeln!(
                    sink,
                    "{:<32} {:<42} {:>12} {:>12} {:>12}  {}",
                    row.quantity,
                    row.tuple,
                    row.printed.to_string(),
                    row.derived.to_string(),
                    row.arbiter.to_string(),
                    row.verdict()
                )?;
            }
            writeln!(sink, "zero-section diameter exponent (n=1, lambda=2): {exponent}")?;
            sink.flush()?;
        }
    }
    Ok(0)
}

fn cmd_sweep(cmd: &SweepCmd) -> Result<u8, Failure> {
    let start = rational("start", &cmd.start)?;
    let stop = rational("stop", &cmd.stop)?;
    // The swept parameter needs no flag; the grid start stands in for it.
    let mut fallback = FamilyArgs::default();
    let start_text = Some(cmd.start.clone());
    match cmd.param {
        SweepParameter::R1 => fallback.r1 = start_text,
        SweepParameter::C => fallback.c = start_text,
        SweepParameter::T => {
            fallback.r1 = Some((int(1) + &start).to_string());
            fallback.c = Some("1".into());
        }
        SweepParameter::K => {
            if cmd.params.k.is_some() {
                return Err(Failure::usage("--k is the swept parameter"));
            }
            fallback.k = Some(1);
        }
    }
    let base = cmd.params.resolve(&fallback)?;
    let spec = SweepSpec {
        parameter: cmd.param,
        start,
        stop,
        count: cmd.count,
        spacing: cmd.spacing,
        base,
        verify: cmd.verify,
    };
    let rows = run_sweep(&spec)?;
    let sink = open_output(&cmd.out)?;
    match cmd.out.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(sink, &rows)?,
        Format::Csv => write_csv(sink, &rows)?,
        Format::Text => return Err(Failure::usage("sweep supports --format csv|json")),
    }
    Ok(0)
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::usage(format!("--rho-grid: cannot parse {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, count] => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            let count: usize = count.trim().parse().map_err(|_| bad())?;
            if count < 2 || a.is_nan() || b.is_nan() || a >= b {
                return Err(bad());
            }
            Ok((0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect())
        }
        [list] => list.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad())).collect(),
        _ => Err(bad()),
    }
}

#[derive(Serialize)]
struct LimitOutput<'a> {
    rows: &'a [pagepope::limits::LimitRow],
    summary: &'a pagepope::limits::LimitSummary,
}

fn cmd_limit(cmd: &LimitCmd) -> Result<u8, Failure> {
    let ts: Vec<Rational> = cmd
        .t_list
        .split(',')
        .map(|t| rational("t-list", t.trim()))
        .collect::<Result<_, _>>()?;
    let mut grid = parse_grid(&cmd.rho_grid)?;
    if !cmd.absolute {
        let rho1 = rho1_limit(cmd.n)?.derived;
        grid.iter_mut().for_each(|g| *g *= rho1);
    }
    let cmp = limit_comparison(cmd.n, &ts, &grid)?;
    let sink = open_output(&cmd.out)?;
    match cmd.out.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(
            sink,
            &LimitOutput {
                rows: &cmp.rows,
                summary: &cmp.summary,
            },
        )?,
        Format::Csv => {
            write_csv(sink, &cmp.rows)?;
            let summary = serde_json::to_string(&cmp.summary)?;
            match &cmd.summary {
                Some(path) => std::fs::write(path, summary + "\n")?,
                None => eprintln!("{summary}"),
            }
        }
        Format::Text => return Err(Failure::usage("limit supports --format csv|json")),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Family(cmd) => cmd_family(cmd),
        Command::Verify(cmd) => cmd_verify(cmd),
        Command::Audit(cmd) => cmd_audit(cmd),
        Command::Sweep(cmd) => cmd_sweep(cmd),
        Command::Limit(cmd) => cmd_limit(cmd),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            if failure.code == 2 {
                eprintln!("run with --help for usage");
            }
            ExitCode::from(failure.code)
        }
    }
}
