//! `une`: command-line access to the expander toolkit.
//!
//! Structured results go to stdout as JSON; short human summaries go to
//! stderr. See `une --help` for the command list and `error::code` for exit
//! statuses.

mod commands;
mod error;
mod pipeline;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "une",
    version,
    about = "Bipartite unique-neighbour expander toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Working precision in decimal digits; `UNE_PRECISION` overrides it.
    #[arg(long, global = true, default_value_t = 30)]
    pub precision: usize,
    /// Cap on subsets examined by the gadget verifier.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub budget: u64,
    /// Spectral classification tolerance.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,
}

impl Global {
    pub fn digits(&self) -> usize {
        std::env::var("UNE_PRECISION")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(self.precision)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Singular spectrum and Ramanujan certificate of a BIGRAPH file.
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Edge-vertex incidence graph of a GRAPH file.
    Incidence {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the non-backtracking operators.
    Nbops {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Count non-backtracking paths from a left set.
    Nbcount {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated left vertices.
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long)]
        len: usize,
        #[arg(long, value_enum, default_value_t = CountMethod::Operator)]
        method: CountMethod,
    },
    /// Coefficients of `p_n`, optionally its closed form at a point.
    Poly {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        at: Option<f64>,
    },
    /// Numerical bound checks.
    Boundcheck {
        #[command(subcommand)]
        check: BoundCheck,
    },
    /// Sample or verify gadgets.
    Gadget {
        #[command(subcommand)]
        action: GadgetCommand,
    },
    /// Routed product of a big graph and a gadget.
    Product {
        #[arg(long)]
        big: PathBuf,
        #[arg(long)]
        gadget: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        export_pcm: Option<PathBuf>,
    },
    /// Gadget threshold q̂(c0, alpha), optionally with the wiring sheet for a q.
    Qhat {
        #[arg(long)]
        c0: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = DomainArg::AllIntegers)]
        interpretation: DomainArg,
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 10_000)]
        scan_margin: u64,
        /// Also derive the construction parameters at this q.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Path length and set-size fraction for the small-set degree bound.
    Constants {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Compare the small-set, mixing-lemma and vertex-expansion bounds.
    Bounds {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Certify, verify, compose and audit end to end.
    Pipeline(pipeline::PipelineArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CountMethod {
    Operator,
    AllInS,
    EndpointsInS,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DomainArg {
    AllIntegers,
    PrimePowers,
}

#[derive(Subcommand, Debug)]
pub enum BoundCheck {
    /// `|p_ℓ(λ²)|` over the band.
    Lemma6 {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Upper bound on paths returning to a small set.
    Lemma8 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long)]
        ell: usize,
    },
    /// Lower bound on all left-start paths.
    Lemma9 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Lower and upper bounds chained on one set.
    Chain {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long)]
        ell: usize,
    },
    /// `A_{2n} = p_n(MMᵀ)` exactly.
    Identity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Vertex-expansion bound `1 + (1+ε)√(d−1)` for d-regular graphs.
    Kahale {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Characteristic roots of the `p_n` recursion at `x`.
    Roots {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum GadgetCommand {
    Sample {
        #[arg(long = "L")]
        l: usize,
        #[arg(long = "R")]
        r: usize,
        #[arg(long)]
        c: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Disable the neighbourhood-size shortcut.
        #[arg(long)]
        no_prune: bool,
        /// Re-test every shortcut set exactly.
        #[arg(long)]
        audit: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return report_error(CliError::usage("--jobs must be positive"));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match commands::run(&cli) {
        Ok(out) => {
            emit(&out.json);
            if let Some(msg) = &out.summary {
                let _ = writeln!(std::io::stderr(), "{msg}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => report_error(e),
    }
}

/// Writes the JSON document to stdout. A closed pipe is not an error.
fn emit(json: &serde_json::Value) {
    let mut out = std::io::stdout().lock();
    if serde_json::to_writer_pretty(&mut out, json).is_ok() {
        let _ = writeln!(out);
    }
}

fn report_error(e: CliError) -> ExitCode {
    emit(&e.to_json());
    let _ = writeln!(std::io::stderr(), "une: {e}");
    ExitCode::from(e.code)
}
