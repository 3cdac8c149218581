//! Command-line front end.

pub mod commands;
pub mod config;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use config::{Command, ExperimentConfig, Overrides};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "curveheat",
    version,
    about = "Small-time heat content of closed curves in R^3"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Series coefficients with calibrated and printed constants.
    Expand(Flags),
    /// Heat content by direct quadrature on a time grid.
    Direct(Flags),
    /// Heat content of Frenet tubes around the curve.
    Tube(Flags),
    /// Direct values, series and tubes side by side, with fitted exponents.
    Compare(Flags),
    /// Circle closed forms against the numerical routines.
    Oracle(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// circle, ellipse, trefoil or custom
    #[arg(long)]
    curve: Option<String>,
    /// Circle radius
    #[arg(long)]
    radius: Option<f64>,
    /// Ellipse semi-axes or torus radii, as A,B
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<f64>>,
    /// Fourier coefficient file for a custom curve
    #[arg(long)]
    coeffs_file: Option<PathBuf>,
    /// Relative quadrature tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tube radius; repeat or separate by commas
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// product, qmc or boundary
    #[arg(long)]
    backend: Option<String>,
    /// QMC sample count
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    tsteps: Option<usize>,
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG plot
    #[arg(long)]
    svg: Option<PathBuf>,
    /// key=value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn into_overrides(self) -> Result<Overrides> {
        let file = match &self.config {
            Some(p) => Overrides::load(p)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            curve: self.curve,
            radius: self.radius,
            axes: self.axes,
            coeffs_file: self.coeffs_file,
            tol: self.tol,
            seed: self.seed,
            eps: self.eps,
            backend: self.backend,
            samples: self.samples,
            tmin: self.tmin,
            tmax: self.tmax,
            tsteps: self.tsteps,
            out: self.out,
            svg: self.svg,
        };
        Ok(file.merge(flags))
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_configuration() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Error::from),
    }
}

/// Parses arguments, runs the experiment and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (command, flags) = match cli.command {
        Sub::Expand(f) => (Command::Expand, f),
        Sub::Direct(f) => (Command::Direct, f),
        Sub::Tube(f) => (Command::Tube, f),
        Sub::Compare(f) => (Command::Compare, f),
        Sub::Oracle(f) => (Command::Oracle, f),
    };
    let cfg = match flags
        .into_overrides()
        .and_then(|o| ExperimentConfig::resolve(command, o))
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = commands::run(&cfg);
    finish(&cfg, result)
}

/// Writes the report (or the partial report of a failed run) and maps the
/// outcome to an exit code.
fn finish(cfg: &ExperimentConfig, result: std::result::Result<commands::Outcome, commands::Failure>) -> i32 {
    let hash = cfg.hash();
    match result {
        Ok(outcome) => {
            let text = outcome.report.render(cfg.seed, &hash);
            if let Err(e) = emit(&text, cfg.out.as_ref()) {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
            if let Some(p) = &cfg.svg {
                if let Err(e) = std::fs::write(p, svg::render(&outcome.panels)) {
                    eprintln!("error: {}: {e}", p.display());
                    return EXIT_CONFIG;
                }
            }
            EXIT_OK
        }
        Err(failure) => {
            eprintln!("error: {}", failure.error);
            if let Some(mut partial) = failure.partial {
                partial.note("partial_output", format!("aborted: {}", failure.error));
                let _ = emit(&partial.render(cfg.seed, &hash), cfg.out.as_ref());
            }
            exit_code(&failure.error)
        }
    }
}
