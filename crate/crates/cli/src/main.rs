mod render;

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use periodica::pipeline;
use periodica::{Error, InvertOptions, Precision, QuadratureConfig, ResidualGates};
use serde::Serialize;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_GATE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "periodica",
    version,
    about = "Period matrices and staircase polygons of z(z²−1)···(z²−a²) curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute Π₀, M, N and Y (with Π = iY).
    Period(PeriodArgs),
    /// Compute the period matrix and check every residual gate.
    Verify(PeriodArgs),
    /// Build the staircase polygon and its side identifications.
    Polygon(PolygonArgs),
    /// Recover branch parameters from polygon aspect ratios.
    Invert(InvertArgs),
    /// Run the π calibration integrals and integer identities.
    Selftest(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Working precision: standard (f64) or extended (double-double).
    #[arg(long, env = "PERIODICA_PRECISION", default_value = "standard", value_parser = parse_precision)]
    precision: Precision,

    /// Output format; pretty on a terminal, json otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write the report to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Relative accuracy requested from the quadrature.
    #[arg(long)]
    rel_tol: Option<f64>,

    /// Highest tanh–sinh refinement level.
    #[arg(long)]
    max_level: Option<usize>,

    /// Use the adaptive Gauss–Kronrod reference integrator.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    genus: usize,

    /// Branch parameters a₁,…,a_{g−1}, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..=1, allow_hyphen_values = true)]
    a: Vec<String>,
}

#[derive(Args, Debug)]
struct GateArgs {
    /// Exit with status 4 if any residual gate fails.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    tol_sym: Option<f64>,
    #[arg(long)]
    tol_det: Option<f64>,
    #[arg(long)]
    tol_square: Option<f64>,
    #[arg(long)]
    tol_closed_form: Option<f64>,
    #[arg(long)]
    tol_lemma: Option<f64>,
}

#[derive(Args, Debug)]
struct PeriodArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[command(flatten)]
    gates: GateArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct PolygonArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Also write the layout as SVG.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct InvertArgs {
    /// Defaults to one more than the number of aspect ratios.
    #[arg(long)]
    genus: Option<usize>,

    /// Target aspect ratios h/w of P₁,…,P_{g−1}, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    rho: Vec<f64>,

    /// Starting branch parameters; defaults to 2,3,…,g.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    guess: Vec<String>,

    #[arg(long)]
    max_iter: Option<usize>,

    /// Stop once the largest aspect-ratio mismatch is below this.
    #[arg(long)]
    tol: Option<f64>,

    #[command(flatten)]
    common: CommonArgs,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse()
}

/// Failure of a command, already mapped to its exit status.
enum Failure {
    Lib(Error),
    Io(String),
    Gates(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn report(&self) -> u8 {
        match self {
            Failure::Lib(e) => {
                eprintln!("error: {e}");
                if let Some(trace) = e.trace() {
                    eprintln!("iteration trace (max |ρ − target|):");
                    for (i, r) in trace.iter().enumerate() {
                        eprintln!("  {i:>3}  {r:.6e}");
                    }
                }
                if e.is_validation() {
                    EXIT_VALIDATION
                } else {
                    EXIT_NUMERICAL
                }
            }
            Failure::Io(msg) => {
                eprintln!("error: {msg}");
                EXIT_VALIDATION
            }
            Failure::Gates(msg) => {
                eprintln!("error: residual gates failed: {msg}");
                EXIT_GATE
            }
        }
    }
}

impl CommonArgs {
    fn quadrature(&self) -> QuadratureConfig {
        let mut cfg = QuadratureConfig::for_precision(self.precision);
        if let Some(t) = self.rel_tol {
            cfg.target_rel_tol = t;
        }
        if let Some(l) = self.max_level {
            cfg.max_level = l;
        }
        cfg.oracle_mode = self.oracle;
        cfg
    }

    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| {
            if self.output.is_none() && std::io::stdout().is_terminal() {
                Format::Pretty
            } else {
                Format::Json
            }
        })
    }

    fn emit<R: Serialize>(
        &self,
        report: &R,
        csv: impl FnOnce() -> String,
        pretty: impl FnOnce() -> String,
    ) -> Result<(), Failure> {
        let text = match self.format() {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Csv => csv(),
            Format::Pretty => pretty(),
        };
        match &self.output {
            Some(path) => write_atomic(path, text.as_bytes()),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Failure::Io(e.to_string()))
            }
        }
    }
}

impl GateArgs {
    fn gates(&self, precision: Precision) -> Result<ResidualGates, Failure> {
        let mut g = ResidualGates::for_precision(precision);
        let overrides = [
            (self.tol_sym, &mut g.symmetry),
            (self.tol_det, &mut g.det),
            (self.tol_square, &mut g.square),
            (self.tol_closed_form, &mut g.closed_form),
            (self.tol_lemma, &mut g.lemma),
        ];
        for (value, slot) in overrides {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "gate tolerance {v} must be finite and nonnegative"
                    ))
                    .into());
                }
                *slot = v;
            }
        }
        Ok(g)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn curve_values(c: &CurveArgs) -> Vec<&str> {
    c.a.iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect()
}

fn gate_summary(gates: &[periodica::periods::GateOutcome]) -> Option<String> {
    let failed: Vec<String> = gates
        .iter()
        .filter(|g| !g.passed)
        .map(|g| format!("{} = {:e} > {:e}", g.name, g.value, g.limit))
        .collect();
    (!failed.is_empty()).then(|| failed.join(", "))
}

fn warn_advisory(report: &periodica::report::PeriodReport) {
    if let (Some(adv), Precision::Standard) = (&report.advisory, report.precision) {
        eprintln!("warning: {adv}");
    }
}

fn period(args: &PeriodArgs) -> Result<(), Failure> {
    let cfg = args.common.quadrature();
    let a = curve_values(&args.curve);
    let gates = args.gates.gates(cfg.precision)?;
    let report = pipeline::run_period(args.curve.genus, &a, &cfg)?;
    warn_advisory(&report);
    args.common
        .emit(&report, || report.to_csv(), || render::period(&report))?;
    if args.gates.strict {
        let outcomes = gates.evaluate(&report.residuals);
        if let Some(msg) = gate_summary(&outcomes) {
            return Err(Failure::Gates(msg));
        }
    }
    Ok(())
}

fn verify(args: &PeriodArgs) -> Result<(), Failure> {
    let cfg = args.common.quadrature();
    let a = curve_values(&args.curve);
    let gates = args.gates.gates(cfg.precision)?;
    let report = pipeline::run_verify(args.curve.genus, &a, &cfg, &gates)?;
    warn_advisory(&report.period);
    args.common.emit(
        &report,
        || render::verify_csv(&report),
        || render::verify(&report),
    )?;
    match gate_summary(&report.gates) {
        Some(msg) => Err(Failure::Gates(msg)),
        None => Ok(()),
    }
}

fn polygon(args: &PolygonArgs) -> Result<(), Failure> {
    let cfg = args.common.quadrature();
    let a = curve_values(&args.curve);
    let report = pipeline::run_polygon(args.curve.genus, &a, &cfg)?;
    if let Some(path) = &args.svg {
        write_atomic(path, periodica::layout_svg(&report.layout).as_bytes())?;
    }
    args.common.emit(
        &report,
        || render::polygon_csv(&report),
        || render::polygon(&report),
    )
}

fn invert(args: &InvertArgs) -> Result<(), Failure> {
    let genus = args.genus.unwrap_or(args.rho.len() + 1);
    let guess = if args.guess.is_empty() {
        pipeline::default_guess(genus)
    } else {
        args.guess.clone()
    };
    let guess: Vec<&str> = guess.iter().map(|s| s.trim()).collect();
    let mut opts = InvertOptions {
        quadrature: args.common.quadrature(),
        ..InvertOptions::default()
    };
    if let Some(n) = args.max_iter {
        opts.max_iterations = n;
    }
    if let Some(t) = args.tol {
        opts.tolerance = t;
    }
    let report = pipeline::run_invert(genus, &args.rho, &guess, &opts)?;
    args.common.emit(
        &report,
        || render::invert_csv(&report),
        || render::invert(&report),
    )
}

fn selftest(args: &CommonArgs) -> Result<(), Failure> {
    let report = pipeline::run_selftest(&args.quadrature())?;
    args.emit(
        &report,
        || render::selftest_csv(&report),
        || render::selftest(&report),
    )?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Gates("selftest checks failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Period(a) => period(a),
        Command::Verify(a) => verify(a),
        Command::Polygon(a) => polygon(a),
        Command::Invert(a) => invert(a),
        Command::Selftest(a) => selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => ExitCode::from(f.report()),
    }
}
