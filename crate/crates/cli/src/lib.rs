//! Command-line front end: `fit`, `simulate`, `boost` and `experiment`.
//!
//! Exit codes: 0 success, 2 invalid input or flags, 3 degenerate design,
//! 4 numeric failure, 5 an experiment tolerance failed (the report is still
//! written).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relreg_core::estimators::{
    confidence_interval, ols_fit, sr_fit, variance_inflation, ConfidenceInterval, Dataset,
    FitResult, Method, Parameter,
};
use relreg_core::io::{read_dataset, write_dataset};
use relreg_core::kinematics::{Scale, SPEED_OF_LIGHT};
use relreg_core::simulation::{
    boost_dataset, generate_dataset, run_experiment, BoostMode, BoostSpec, Design,
    ExperimentConfig, ExperimentKind, FrameVelocity, TrueModel,
};
use relreg_core::ErrorKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_TOLERANCE: i32 = 5;

const BOOST_WARNING: &str = "transforming y uses the true slope (--beta1-true); \
this is a simulation facility and is not available for observational data";

#[derive(Debug, Parser)]
#[command(name = "relreg", version, about = "Regression with a covariate bounded by a speed c")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit OLS and/or the SR estimator to an `x,y` CSV file.
    Fit(FitArgs),
    /// Draw a dataset from `y = beta0 + beta1*x + N(0, sigma^2)`.
    Simulate(SimulateArgs),
    /// Re-express a dataset in a moving frame.
    Boost(BoostArgs),
    /// Run a Monte Carlo experiment described by a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Ols,
    Sr,
    Both,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV with header `x,y`.
    #[arg(long)]
    pub input: PathBuf,
    /// Bound on |x|, in the units of x. Defaults to 299792458 for SR fits;
    /// OLS alone needs no bound.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodChoice::Both)]
    pub method: MethodChoice,
    /// Known error variance; estimated from residuals when absent.
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Also report confidence intervals at this level.
    #[arg(long)]
    pub ci_level: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "design", required = true, multiple = false)]
pub struct DesignArgs {
    /// Fixed covariate values, comma separated, repeated cyclically to --n.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, group = "design")]
    pub fixed_x: Option<Vec<f64>>,
    /// x uniform on (-A, A).
    #[arg(long, value_name = "A", group = "design")]
    pub uniform_velocity: Option<f64>,
    /// x = c*tanh(u) with u uniform on (-B, B).
    #[arg(long, value_name = "B", group = "design")]
    pub uniform_rapidity: Option<f64>,
}

impl DesignArgs {
    fn design(&self) -> Design {
        match (&self.fixed_x, self.uniform_velocity, self.uniform_rapidity) {
            (Some(x), _, _) => Design::Fixed { x: x.clone() },
            (_, Some(a), _) => Design::UniformVelocity { a },
            (_, _, Some(b)) => Design::UniformRapidity { b },
            _ => unreachable!("clap requires one design"),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub beta0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: f64,
    #[arg(long)]
    pub sigma: f64,
    /// Number of rows; defaults to the number of --fixed-x values.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = SPEED_OF_LIGHT)]
    pub c: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Lorentz,
    Galilean,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("frame").required(true).args(["vstar", "theta_star"])))]
pub struct BoostArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Velocity of the new frame.
    #[arg(long, allow_negative_numbers = true)]
    pub vstar: Option<f64>,
    /// Rapidity of the new frame (Lorentz only).
    #[arg(long, allow_negative_numbers = true)]
    pub theta_star: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeChoice::Lorentz)]
    pub mode: ModeChoice,
    /// True slope, needed to carry y into the new frame.
    #[arg(long, allow_negative_numbers = true)]
    pub beta1_true: f64,
    #[arg(long, default_value_t = SPEED_OF_LIGHT)]
    pub c: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_parser = parse_kind)]
    pub kind: ExperimentKind,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads for replications; the report does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    s.replace('-', "_").parse().map_err(|e: relreg_core::Error| e.to_string())
}

/// Common wrapper of every JSON report.
#[derive(Debug, Serialize)]
pub struct ReportEnvelope<C, R> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config: C,
    pub results: R,
    pub warnings: Vec<String>,
}

impl<C, R> ReportEnvelope<C, R> {
    fn new(subcommand: &'static str, config: C, results: R, warnings: Vec<String>) -> Self {
        ReportEnvelope {
            tool: "relreg",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            config,
            results,
            warnings,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(relreg_core::Error),
    Input(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => EXIT_VALIDATION,
                ErrorKind::Degenerate => EXIT_DEGENERATE,
                ErrorKind::Numeric => EXIT_NUMERIC,
            },
            CliError::Input(_) => EXIT_VALIDATION,
            CliError::Output(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) | CliError::Output(m) => f.write_str(m),
        }
    }
}

impl From<relreg_core::Error> for CliError {
    fn from(e: relreg_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut out = sink(path)?;
    let fail = |e: &dyn std::fmt::Display| CliError::Output(format!("writing report: {e}"));
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| fail(&e))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| fail(&e))
}

fn scale(c: f64) -> CliResult<Scale> {
    Ok(Scale::new(c)?)
}

#[derive(Debug, Serialize)]
struct FitConfig<'a> {
    input: &'a Path,
    c: Option<f64>,
    method: MethodChoice,
    sigma2: Option<f64>,
    ci_level: Option<f64>,
}

#[derive(Debug, Serialize)]
struct IntervalRow {
    method: Method,
    #[serde(flatten)]
    interval: ConfidenceInterval,
}

#[derive(Debug, Serialize)]
struct FitOutput {
    n: usize,
    ols: Option<FitResult>,
    sr: Option<FitResult>,
    variance_inflation: Option<f64>,
    intervals: Vec<IntervalRow>,
}

fn cmd_fit(args: &FitArgs) -> CliResult<i32> {
    let mut warnings = Vec::new();
    let needs_c = args.method != MethodChoice::Ols;
    let c = match (args.c, needs_c) {
        (Some(c), _) => Some(c),
        (None, true) => {
            warnings.push(format!(
                "--c not given; using c = {SPEED_OF_LIGHT} (x must be in the same velocity units)"
            ));
            Some(SPEED_OF_LIGHT)
        }
        (None, false) => None,
    };
    let bound = c.map(scale).transpose()?;
    let data = read_dataset(open(&args.input)?, bound)?;
    let run = |m: MethodChoice| args.method == m || args.method == MethodChoice::Both;
    let ols = run(MethodChoice::Ols).then(|| ols_fit(&data, args.sigma2)).transpose()?;
    let sr = run(MethodChoice::Sr).then(|| sr_fit(&data, args.sigma2)).transpose()?;
    let inflation = match args.method {
        MethodChoice::Both => Some(variance_inflation(&data)?),
        _ => None,
    };

    let mut intervals = Vec::new();
    if let Some(level) = args.ci_level {
        for fit in ols.iter().chain(sr.iter()) {
            for parameter in [Parameter::Beta0, Parameter::Beta1] {
                match confidence_interval(fit, parameter, level) {
                    Ok(interval) => intervals.push(IntervalRow {
                        method: fit.method,
                        interval,
                    }),
                    Err(relreg_core::Error::NoVariance(m)) => {
                        warnings.push(format!("{} intervals skipped: {m}", fit.method.as_str()));
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }

    let config = FitConfig {
        input: &args.input,
        c,
        method: args.method,
        sigma2: args.sigma2,
        ci_level: args.ci_level,
    };
    let results = FitOutput {
        n: data.len(),
        ols,
        sr,
        variance_inflation: inflation,
        intervals,
    };
    emit_warnings(&warnings);
    write_json(
        args.output.as_deref(),
        &ReportEnvelope::new("fit", config, results, warnings),
    )?;
    Ok(EXIT_OK)
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<i32> {
    let design = args.design.design();
    let model = TrueModel {
        beta0: args.beta0,
        beta1: args.beta1,
        sigma: args.sigma,
        c: scale(args.c)?,
    };
    let n = match args.n.or_else(|| design.natural_len()) {
        Some(n) => n,
        None => return Err(CliError::Input("--n is required for a sampled design".into())),
    };
    let data = generate_dataset(&design, &model, n, args.seed)?;
    write_csv(args.output.as_deref(), &data)?;
    Ok(EXIT_OK)
}

fn write_csv(path: Option<&Path>, data: &Dataset) -> CliResult<()> {
    let out = sink(path)?;
    write_dataset(out, data).map_err(|e| CliError::Output(e.to_string()))
}

fn cmd_boost(args: &BoostArgs) -> CliResult<i32> {
    emit_warnings(&[BOOST_WARNING.to_string()]);
    let frame = match (args.vstar, args.theta_star) {
        (Some(v), _) => FrameVelocity::VStar(v),
        (_, Some(t)) => FrameVelocity::ThetaStar(t),
        _ => unreachable!("clap requires one frame"),
    };
    let mode = match args.mode {
        ModeChoice::Lorentz => BoostMode::Lorentz,
        ModeChoice::Galilean => BoostMode::Galilean,
    };
    let bound = match mode {
        BoostMode::Lorentz => Some(scale(args.c)?),
        BoostMode::Galilean => None,
    };
    let data = read_dataset(open(&args.input)?, bound)?;
    let spec = BoostSpec {
        mode,
        frame,
        beta1_true: args.beta1_true,
    };
    let boosted = boost_dataset(&data, &spec)?;
    write_csv(args.output.as_deref(), &boosted)?;
    Ok(EXIT_OK)
}

fn cmd_experiment(args: &ExperimentArgs) -> CliResult<i32> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let report = run_experiment(args.kind, &config, args.threads)?;
    let passed = report.passed;
    let envelope = ReportEnvelope::new("experiment", &report.config, &report, Vec::new());
    write_json(args.output.as_deref(), &envelope)?;
    Ok(match passed {
        Some(false) => EXIT_TOLERANCE,
        _ => EXIT_OK,
    })
}

fn emit_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn execute(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Boost(a) => cmd_boost(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
