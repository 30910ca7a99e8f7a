//! Argument parsing and the three subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flatmod_core::moduli::{sample_x, sample_y_counted, SamplerConfig};

use crate::config::{RunConfig, Suite};
use crate::eval::{self, EvalRequest, FrameKind, PhiKind};
use crate::json::{read_points, JsonXPoint, JsonYPoint};
use crate::suites;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "flatmod", version, about = "Identity checks for flat SU(N) connections on surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run identity suites and write a JSON report.
    Verify(VerifyArgs),
    /// Evaluate a generator form at given or sampled points.
    Eval(EvalArgs),
    /// Sample points of Y_beta or of the extended chart.
    Sample(SampleArgs),
}

/// Model parameters shared by every subcommand. Flags override `--config`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub genus: Option<usize>,
    /// k in beta = exp(2 pi i k / N) I.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<i64>,
    /// Degrees of the Chern polynomials, comma separated.
    #[arg(long = "r", value_delimiter = ',')]
    pub r: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(g) = self.genus {
            cfg.genus = g;
        }
        if self.beta.is_some() {
            cfg.beta_index = self.beta;
        }
        if let Some(r) = &self.r {
            cfg.r_list = r.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Suites to run (repeatable or comma separated); default all.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<Suite>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long)]
    pub tol_fd: Option<f64>,
    #[arg(long)]
    pub tol_quad: Option<f64>,
    /// Grundmann-Moller index for simplex integrals.
    #[arg(long)]
    pub quadrature_order: Option<usize>,
    /// Report file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (all cores if absent).
    #[arg(long, env = "FLATMOD_JOBS")]
    pub jobs: Option<usize>,
}

impl VerifyArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = self.model.resolve()?;
        if !self.suite.is_empty() {
            cfg.suites = self.suite.clone();
        }
        if let Some(s) = self.samples {
            cfg.sample_count = s;
        }
        if let Some(h) = self.fd_step {
            cfg.fd_step = h;
        }
        if let Some(t) = self.tol_fd {
            cfg.tolerances.fd = t;
        }
        if let Some(t) = self.tol_quad {
            cfg.tolerances.quadrature = t;
        }
        if self.quadrature_order.is_some() {
            cfg.quadrature_order = self.quadrature_order;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// a_r, b_r_j, f_r, omega, omega_tilde, sigma_Q[_r], extended_{a,b,f}...
    #[arg(long)]
    pub form: String,
    /// JSON list of points as written by `flatmod sample`.
    #[arg(long, conflicts_with = "sample")]
    pub points: Option<PathBuf>,
    /// Evaluate at this many sampled points instead.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, value_enum, default_value = "reduced")]
    pub frame: FrameKind,
    /// Number of tangents in a random frame.
    #[arg(long, default_value_t = 6)]
    pub frame_size: usize,
    #[arg(long, value_enum, default_value = "zero")]
    pub phi: PhiKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Space {
    #[value(name = "Y")]
    Y,
    #[value(name = "X")]
    X,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub space: Space,
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Distance from Y_beta of the chart points.
    #[arg(long, default_value_t = 0.1)]
    pub offset: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))
}

fn verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let cfg = args.resolve()?;
    let report = suites::run(&cfg, args.jobs)?;
    emit(&args.out, &to_json(&report)?)?;
    for r in report.failures() {
        let detail = match (&r.error, r.max_residual) {
            (Some(e), _) => e.clone(),
            (None, Some(v)) => format!("residual {v:.3e} > {:.1e}", r.tolerance),
            (None, None) => "no residual".into(),
        };
        eprintln!("FAIL {}: {detail}", r.identity_id);
    }
    Ok(report.exit_code())
}

fn evaluate(args: &EvalArgs) -> Result<i32, CliError> {
    let config = args.model.resolve()?;
    let points = match &args.points {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
            Some(read_points(&text)?)
        }
        None => None,
    };
    let sample = if points.is_none() { Some(args.sample.unwrap_or(1)) } else { None };
    let seed = config.seed;
    let req = EvalRequest {
        config,
        form: args.form.clone(),
        points,
        sample,
        frame: args.frame,
        frame_size: args.frame_size,
        phi: args.phi,
    };
    emit(&args.out, &to_json(&eval::run(&req, seed)?)?)?;
    Ok(0)
}

fn sample(args: &SampleArgs) -> Result<i32, CliError> {
    let cfg = args.model.resolve()?;
    let m = cfg.moduli()?;
    if !(args.offset.is_finite() && args.offset > 0.0) {
        return Err(CliError::Usage(format!("offset must be positive, got {}", args.offset)));
    }
    let body = match args.space {
        Space::Y => {
            let (ys, failures) = sample_y_counted(&m, cfg.seed, args.count, &SamplerConfig::default())?;
            if failures > 0 {
                eprintln!("{failures} starts did not converge and were redrawn");
            }
            to_json(&ys.iter().map(JsonYPoint::from).collect::<Vec<_>>())?
        }
        Space::X => {
            let xs = sample_x(&m, cfg.seed, args.count, args.offset)?;
            to_json(&xs.iter().map(JsonXPoint::from).collect::<Vec<_>>())?
        }
    };
    emit(&args.out, &body)?;
    Ok(0)
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Eval(a) => evaluate(a),
        Command::Sample(a) => sample(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

