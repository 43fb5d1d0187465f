//! Command dispatch for the `crlab` binary, usable in-process.

pub mod commands;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crlab::syntax::{parse_config, Config};

pub use report::{CheckResult, Report, Status};

pub const SEED_ENV: &str = "CRLAB_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "crlab", version, about = "Exact and numerical checks for the CR Yamabe equation on the Heisenberg group")]
pub struct Cli {
    /// Random seed; overrides CRLAB_SEED and the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// `key = value` file supplying defaults for seed, n, m, samples, points, grid, tolerance.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here and print a summary instead.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall time in the report's `elapsed` field.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Symbolic verification of an identity (or `all`).
    Verify(VerifyArgs),
    /// Exact and numeric checks of a member of the explicit family.
    SolutionCheck(SolutionArgs),
    /// Growth exponent of `∫_{B_R} e^{qf} |∂f|^r`.
    Growth(GrowthArgs),
    /// Growth exponent of `∫_{B_R} u^q` against the integral hypotheses.
    #[command(name = "th2-check")]
    IntegralCheck(IntegralArgs),
    /// Exact rational sampling of the lower bounds of c1, c4, c6.
    Coeffs(CoeffsArgs),
    /// Jets, residual and tensors of an expression at a point.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub identity: String,
    #[arg(long)]
    pub n: Option<usize>,
    /// `formal` or a rational value.
    #[arg(long)]
    pub m: Option<String>,
    /// `c<k>+1` or `drop:<term>`.
    #[arg(long)]
    pub mutate: Option<String>,
    /// Sign of the imaginary part of c5: `minus` (default) or `plus`.
    #[arg(long = "c5-sign")]
    pub c5_sign: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SolutionSource {
    /// Solution record; defaults to mu = 0, lambda = i.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SolutionArgs {
    #[command(flatten)]
    pub source: SolutionSource,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub source: SolutionSource,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub r: f64,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Args, Debug)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub source: SolutionSource,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SeriesArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    /// Comma-separated radii.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Write `R,estimate,stderr` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub samples: Option<usize>,
    /// Upper end of the sampled m range.
    #[arg(long = "m-max")]
    pub m_max: Option<String>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub expr: String,
    /// `x1=1/2, y1=0, t=1`; omitted coordinates are 0.
    #[arg(long)]
    pub at: String,
    #[arg(long)]
    pub n: Option<usize>,
}

/// A usage or configuration problem (exit code 2).
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Values from the command line, the environment and the config file.
pub struct Context {
    pub seed: u64,
    pub config: Config,
    pub inputs: BTreeMap<String, String>,
}

impl Context {
    pub fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.to_string(), value.to_string());
    }

    /// Flag value, else config entry, else default; recorded in the report inputs.
    pub fn pick<T: std::str::FromStr + ToString>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, UsageError> {
        let v = match flag {
            Some(v) => v,
            None => match self.config.get(key) {
                Some(s) => s.parse().map_err(|_| UsageError(format!("config key `{key}`: cannot parse `{s}`")))?,
                None => default,
            },
        };
        self.input(key, v.to_string());
        Ok(v)
    }
}

pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

fn usage(msg: String) -> RunOutput {
    RunOutput { code: 2, stdout: String::new(), stderr: msg, report: None }
}

/// Parses `argv` (including the program name), runs the command and renders the report.
/// `env_seed` is the value of `CRLAB_SEED`, if set.
pub fn run_command(argv: &[String], env_seed: Option<&str>) -> RunOutput {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                RunOutput { code, stdout: text, stderr: String::new(), report: None }
            } else {
                usage(text)
            };
        }
    };
    match run_parsed(&cli, env_seed) {
        Ok(report) => {
            let json = report.to_json();
            let code = if report.passed() { 0 } else { 1 };
            let stdout = match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &json) {
                        return usage(format!("cannot write {}: {e}", path.display()));
                    }
                    report.summary()
                }
                None => json,
            };
            RunOutput { code, stdout, stderr: String::new(), report: Some(report) }
        }
        Err(UsageError(msg)) => usage(format!("error: {msg}\n")),
    }
}

fn run_parsed(cli: &Cli, env_seed: Option<&str>) -> Result<Report, UsageError> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Config::default(),
    };
    let seed = match (cli.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(s)) => s.trim().parse().map_err(|_| UsageError(format!("{SEED_ENV} = `{s}` is not an unsigned integer")))?,
        (None, None) => match config.get("seed") {
            Some(s) => s.parse().map_err(|_| UsageError(format!("config seed `{s}` is not an unsigned integer")))?,
            None => DEFAULT_SEED,
        },
    };
    let mut ctx = Context { seed, config, inputs: BTreeMap::new() };
    let start = Instant::now();
    let (command, results) = match &cli.command {
        Command::Verify(a) => ("verify", commands::verify(&mut ctx, a)?),
        Command::SolutionCheck(a) => ("solution-check", commands::solution_check(&mut ctx, a)?),
        Command::Growth(a) => ("growth", commands::growth(&mut ctx, a)?),
        Command::IntegralCheck(a) => ("th2-check", commands::integral_check(&mut ctx, a)?),
        Command::Coeffs(a) => ("coeffs", commands::coeffs(&mut ctx, a)?),
        Command::Eval(a) => ("eval", commands::eval(&mut ctx, a)?),
    };
    Ok(Report {
        command: command.to_string(),
        inputs: ctx.inputs,
        seed,
        results,
        elapsed: cli.timing.then(|| start.elapsed().as_secs_f64()),
    })
}
