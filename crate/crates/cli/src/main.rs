//! `sl2r`: verification suites, translator residuals, reduced ODE solves,
//! phase portraits and NAK decompositions from the command line.
//!
//! Exit codes: 0 on success or certification, 1 when a check fails or a
//! surface is not certified, 2 on usage errors.

mod commands;
mod config;
mod output;
mod parse;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sl2r_core::ode::IntegratorConfig;
use sl2r_core::TranslatorProblem;

use commands::{PortraitOpts, ResidualOpts, SolveOpts, VerifyOpts, DEFAULT_TOL};
use config::ConfigFile;
use output::Format;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        Self::failure(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "sl2r",
    version,
    about = "Translating solitons of the mean curvature flow in SL(2,R)"
)]
struct Cli {
    /// File of `key = value` lines supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite, or `all`.
    Verify(VerifyArgs),
    /// Integrate the reduced translator ODE of a (family, field) problem.
    Solve(SolveArgs),
    /// Evaluate H - <N, X> for a catalog surface on an (s, t) grid.
    Residual(ResidualArgs),
    /// Sample the normalized direction field of the autonomous (y, phi) system.
    Portrait(PortraitArgs),
    /// Write a unimodular matrix as (x, y, theta) and classify it by trace.
    Decompose(DecomposeArgs),
    /// List the named surfaces and explicit solutions.
    Catalog(CatalogArgs),
}

#[derive(Args)]
struct VerifyArgs {
    suite: Option<String>,
    /// `table` or `json`.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// N, A or K.
    #[arg(long)]
    family: Option<String>,
    /// dx, dtheta, v or w.
    #[arg(long)]
    field: Option<String>,
    /// Initial state, e.g. `x=0,y=1,phi=0`.
    #[arg(long, allow_hyphen_values = true)]
    ic: Option<String>,
    /// `lo:hi` (default -3:3).
    #[arg(long = "s-range", allow_hyphen_values = true)]
    s_range: Option<String>,
    /// Parameter of the initial state (default 0, or the range start).
    #[arg(long, allow_hyphen_values = true)]
    s0: Option<String>,
    /// Relative and absolute RK45 tolerance (default 1e-10).
    #[arg(long)]
    tol: Option<String>,
    /// `rk45` or `rk4`.
    #[arg(long)]
    method: Option<String>,
    /// Step for `rk4`, or the largest step for `rk45`.
    #[arg(long)]
    step: Option<String>,
    /// Resample at this many evenly spaced points instead of the accepted steps.
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ResidualArgs {
    /// N, A or K (default: the first family the catalog lists for the surface).
    #[arg(long)]
    family: Option<String>,
    /// dx, dtheta, v or w.
    #[arg(long)]
    field: Option<String>,
    /// Catalog name with optional arguments, e.g. `sigma-y0:2` or `rot-cmc:H=2`.
    #[arg(long)]
    surface: Option<String>,
    /// `smin:smax:ns,tmin:tmax:nt`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Certification threshold on max |H - <N, X>| (default 1e-7).
    #[arg(long)]
    tol: Option<String>,
    /// Output file, or `-` for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PortraitArgs {
    /// Only `as` is available.
    #[arg(long)]
    system: Option<String>,
    /// `ymin:ymax:ny,phimin:phimax:nphi`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// `a,b,c,d` for the matrix [[a, b], [c, d]].
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long)]
    format: Option<String>,
}

fn required(name: &str, v: Option<String>) -> Result<String, CliError> {
    v.ok_or_else(|| CliError::usage(format!("missing --{name}")))
}

fn table_or_json(v: Option<String>) -> Result<bool, CliError> {
    match v.as_deref() {
        None | Some("table") => Ok(false),
        Some("json") => Ok(true),
        Some(other) => Err(CliError::usage(format!(
            "unknown format {other:?} (expected table or json)"
        ))),
    }
}

fn integrator(
    tol: Option<String>,
    method: Option<String>,
    step: Option<String>,
) -> Result<IntegratorConfig, CliError> {
    let tol = tol.map_or(Ok(1e-10), |t| parse::number("tol", &t))?;
    let step = step.map(|h| parse::number("step", &h)).transpose()?;
    let mut cfg = match method.as_deref() {
        None | Some("rk45") => IntegratorConfig {
            max_step: step,
            ..IntegratorConfig::with_tolerances(tol, tol)
        },
        Some("rk4") => {
            IntegratorConfig::rk4(step.ok_or_else(|| CliError::usage("rk4 needs --step"))?)
        }
        Some(other) => {
            return Err(CliError::usage(format!(
                "unknown method {other:?} (expected rk45 or rk4)"
            )))
        }
    };
    cfg.event_tol = cfg.event_tol.min(tol);
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Verify(a) => {
            let opts = VerifyOpts {
                suite: cfg.merge("suite", a.suite).unwrap_or_else(|| "all".into()),
                json: table_or_json(cfg.merge("format", a.format))?,
            };
            cfg.finish()?;
            commands::verify(&opts)
        }
        Command::Solve(a) => {
            let family = parse::family(&required("family", cfg.merge("family", a.family))?)?;
            let field = parse::field(&required("field", cfg.merge("field", a.field))?)?;
            let ic = required("ic", cfg.merge("ic", a.ic))?;
            let s_range = cfg
                .merge("s-range", a.s_range)
                .map_or(Ok((-3.0, 3.0)), |r| parse::range("s-range", &r))?;
            let s0 = cfg
                .merge("s0", a.s0)
                .map(|v| parse::number("s0", &v))
                .transpose()?;
            let config = integrator(
                cfg.merge("tol", a.tol),
                cfg.merge("method", a.method),
                cfg.merge("step", a.step),
            )?;
            let samples = cfg
                .merge("samples", a.samples)
                .map(|n| {
                    n.trim()
                        .parse::<usize>()
                        .map_err(|_| CliError::usage(format!("samples: bad count {n:?}")))
                })
                .transpose()?;
            let format = cfg
                .merge("format", a.format)
                .map_or(Ok(Format::Csv), |f| Format::parse(&f))?;
            let out = cfg.merge("out", a.out.map(path_string)).map(PathBuf::from);
            cfg.finish()?;
            commands::solve(&SolveOpts {
                problem: TranslatorProblem::new(family, field),
                ic,
                s_range,
                s0,
                config,
                samples,
                format,
                out,
            })
        }
        Command::Residual(a) => {
            let family = cfg
                .merge("family", a.family)
                .map(|f| parse::family(&f))
                .transpose()?;
            let field = parse::field(&required("field", cfg.merge("field", a.field))?)?;
            let surface = required("surface", cfg.merge("surface", a.surface))?;
            let grid = cfg.merge("grid", a.grid);
            let tol = cfg
                .merge("tol", a.tol)
                .map_or(Ok(DEFAULT_TOL), |t| parse::number("tol", &t))?;
            if !(tol > 0.0) {
                return Err(CliError::usage("tol must be positive"));
            }
            let out = cfg.merge("out", a.out.map(path_string)).map(PathBuf::from);
            cfg.finish()?;
            commands::residual_report(&ResidualOpts {
                family,
                field,
                surface,
                grid,
                tol,
                out,
            })
        }
        Command::Portrait(a) => {
            let system = cfg.merge("system", a.system).unwrap_or_else(|| "as".into());
            if system != "as" {
                return Err(CliError::usage(format!(
                    "unknown system {system:?} (expected as)"
                )));
            }
            let grid = required("grid", cfg.merge("grid", a.grid))?;
            let out = cfg.merge("out", a.out.map(path_string)).map(PathBuf::from);
            cfg.finish()?;
            commands::portrait(&PortraitOpts { grid, out })
        }
        Command::Decompose(a) => {
            let matrix = required("matrix", cfg.merge("matrix", a.matrix))?;
            let json = table_or_json(cfg.merge("format", a.format))?;
            cfg.finish()?;
            commands::decompose(&matrix, json)
        }
        Command::Catalog(a) => {
            let json = table_or_json(cfg.merge("format", a.format))?;
            cfg.finish()?;
            commands::catalog(json)
        }
    }
}

fn path_string(p: PathBuf) -> String {
    p.to_string_lossy().into_owned()
}

/// Caps the rayon pool at `SL2R_NUM_THREADS` when set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SL2R_NUM_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::usage(format!("SL2R_NUM_THREADS={v:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(CliError::internal)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
