//! Batch pipeline driver: triangulate domains, build floe fields, smooth
//! them onto grids, and run convergence / thickness studies.
//!
//! Exit codes: 0 success, 2 validation error (bad config, schema, or
//! geometry), 3 numeric guard (degree floor violation, NaN output, or a
//! quadrature-dominated study).

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "polysmooth", version, about = "Field smoothing on polygonal domains")]
pub struct Cli {
    /// TOML configuration file; explicit flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for all randomized steps (Monte Carlo, probes, synthesis).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate a domain and write the mesh, quadrature sidecar, and stats.
    Triangulate(commands::TriangulateArgs),
    /// Smooth snapshot fields (mass, velocity, stress) onto a grid.
    Smooth(commands::SmoothArgs),
    /// Build piecewise field bundles from snapshots without smoothing.
    Fields(commands::FieldsArgs),
    /// Run an epsilon-convergence study of the Markov operator.
    Convergence(commands::ConvergenceArgs),
    /// Scan a domain for its thickness constant.
    Thickness(commands::ThicknessArgs),
}

/// Error category determining the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: config, schema, paths, geometry. Exit 2.
    Validation,
    /// Numeric guard: degree floor, NaN, quadrature dominance. Exit 3.
    Numeric,
}

#[derive(Debug)]
pub struct AppError {
    pub kind: ErrorKind,
    pub message: String,
}

impl AppError {
    pub fn validation(message: impl Into<String>) -> Self {
        AppError {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        AppError {
            kind: ErrorKind::Numeric,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::validation(format!("i/o error: {e}"))
    }
}

impl From<polysmooth::geometry::GeometryError> for AppError {
    fn from(e: polysmooth::geometry::GeometryError) -> Self {
        AppError::validation(e.to_string())
    }
}

impl From<polysmooth::kernels::KernelError> for AppError {
    fn from(e: polysmooth::kernels::KernelError) -> Self {
        AppError::validation(e.to_string())
    }
}

impl From<polysmooth::quadrature::QuadratureError> for AppError {
    fn from(e: polysmooth::quadrature::QuadratureError) -> Self {
        use polysmooth::quadrature::QuadratureError as Q;
        match e {
            Q::NonFiniteIntegrand { .. } | Q::RejectionStall { .. } => {
                AppError::numeric(e.to_string())
            }
            other => AppError::validation(other.to_string()),
        }
    }
}

impl From<polysmooth::operators::OperatorError> for AppError {
    fn from(e: polysmooth::operators::OperatorError) -> Self {
        use polysmooth::operators::OperatorError as O;
        match e {
            O::DegreeBelowFloor { .. } | O::QuadratureDominates { .. } | O::NonFinite { .. } => {
                AppError::numeric(e.to_string())
            }
            O::Quadrature(q) => q.into(),
            other => AppError::validation(other.to_string()),
        }
    }
}

impl From<polysmooth::dem::DemError> for AppError {
    fn from(e: polysmooth::dem::DemError) -> Self {
        use polysmooth::dem::DemError as D;
        match e {
            D::Quadrature(q) => q.into(),
            D::Operator(o) => o.into(),
            other => AppError::validation(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e.kind {
                ErrorKind::Validation => "validation",
                ErrorKind::Numeric => "numeric",
            };
            eprintln!(
                "{}",
                serde_json::json!({"error": {"category": kind, "message": e.message}})
            );
            match e.kind {
                ErrorKind::Validation => ExitCode::from(2),
                ErrorKind::Numeric => ExitCode::from(3),
            }
        }
    }
}
