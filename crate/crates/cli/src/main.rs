//! `vmkdv`: derive flows and Lax operators, sample dressed solutions and run the
//! verification suites.
//!
//! Exit status is 0 when every requested verification passes, 1 when one fails and 2
//! on configuration or I/O errors, which are also reported as JSON on stderr.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] vmkdv_core::Error),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Core(_) => "computation",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "vmkdv", version, about = "Vector mKdV hierarchy: exact flows, Lax data and dressed solutions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with defaults for any of the options below; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write artifacts into this directory instead of stdout
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    /// Number of grid points
    #[arg(long, global = true)]
    pub nx: Option<usize>,
    /// Accuracy order of the finite-difference stencils
    #[arg(long, global = true)]
    pub accuracy: Option<u32>,
}

#[derive(Debug, Args, Default)]
pub struct TimeArgs {
    /// Shift of x
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t5: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t7: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the flow u_{t_{2n+1}} = R^n u_1
    DeriveFlow {
        #[arg(long)]
        n: Option<u32>,
        /// Largest n the recursion may reach
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Print the Lax operator V_{2n+1} block by block
    Lax {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Check that the zero-curvature residual of level n vanishes identically
    CheckZcr {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Sample the one-soliton and verify it against the t3 (and t5) flows
    Soliton {
        #[command(flatten)]
        params: SolitonArgs,
        #[command(flatten)]
        times: TimeArgs,
        /// Residual tolerance for the t3 flow (t5 uses ten times this)
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Sample a dressed breather and verify it against the t3 flow
    Breather {
        /// JSON parameter file with mu, C and optional times
        #[arg(long)]
        params: Option<PathBuf>,
        /// Use C = e1 + i e_{j+2} in dimension N (given as N,j) instead of a file
        #[arg(long, value_parser = parse_pair, conflicts_with = "params")]
        unit: Option<(usize, usize)>,
        /// Pole mu as re,im (overrides the file)
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        mu: Option<[f64; 2]>,
        #[command(flatten)]
        times: TimeArgs,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Check the Backlund relation between the vacuum and a one-soliton
    BacklundCheck {
        #[command(flatten)]
        params: SolitonArgs,
        #[command(flatten)]
        times: TimeArgs,
        /// Scale the soliton amplitude (values other than 1 should fail)
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Run the full acceptance suite
    VerifyAll {
        /// Skip the n = 3 symbolic checks
        #[arg(long)]
        quick: bool,
        /// Directory with flow_t3.txt, flow_t5.txt and lax_v3.json replacing the built-in copies
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args, Default)]
pub struct SolitonArgs {
    /// JSON parameter file with mu, c0, c and optional times
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<f64>,
    /// Comma-separated components of c
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Option<Vec<f64>>,
    /// Rescale (c0, c) to unit length
    #[arg(long)]
    pub normalize: bool,
}

fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected re,im")?;
    Ok([a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?])
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected N,j")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Config(e.to_string().trim_end().to_string())),
    };
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{body}");
    ExitCode::from(2)
}
