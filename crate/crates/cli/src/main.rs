//! `tlchan`: build Temperley-Lieb channels and report their entropic and
//! structural properties as JSON or CSV.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tlchan_core::{Error, GroupSpec, DEFAULT_MAX_AMBIENT};

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "tlchan",
    version,
    about = "Temperley-Lieb quantum channels from O_N^+ and SU(2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions, q, theta net, capacity sandwich and the MOE lower bound.
    Info(Common),
    /// Compare the Choi matrix with the covariant projector.
    Choi(Common),
    /// Partial-transpose test of the Choi matrix.
    Ppt(Common),
    /// Minimum output entropy search.
    Moe {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Strategy::Witness)]
        strategy: Strategy,
        /// Gradient iterations for the descent strategy.
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
    /// Capacity estimates for bistochastic channels.
    Capacity(Common),
    /// Output spectrum of the tensor product channel on a covariant state.
    TensorSpectrum {
        #[command(flatten)]
        common: Common,
        /// Triple of the right-traced second channel.
        #[arg(long, value_parser = parse_triple)]
        second: (usize, usize, usize),
        /// Label of the covariant input state.
        #[arg(long)]
        i: usize,
        /// Which spectrum to emit in CSV mode.
        #[arg(long, value_enum, default_value_t = Source::Formula)]
        source: Source,
    },
    /// Haar-average separability check for the channel with k = l - m.
    HaarSep(Common),
    /// Degrading identity for the channel with k = l + m.
    DegradeCheck(Common),
    /// Run named invariant suites and print one JSON line per check.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run (repeatable); all suites when omitted.
        #[arg(long)]
        suite: Vec<String>,
        /// Largest irrep label used by grid scans.
        #[arg(long, default_value_t = 3)]
        max_label: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// "su2" or "onplus:<N>".
    #[arg(long, default_value = "su2", value_parser = parse_group)]
    group: GroupSpec,
    /// Admissible triple k,l,m.
    #[arg(long, value_parser = parse_triple)]
    triple: Option<(usize, usize, usize)>,
    #[arg(long, value_enum, default_value_t = TracedArg::Left)]
    traced: TracedArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Override the command's numerical tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_AMBIENT)]
    max_ambient: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Print entropies in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TracedArg {
    Left,
    Right,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Strategy {
    Witness,
    Random,
    Descent,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Formula,
    Bruteforce,
}

fn parse_group(s: &str) -> Result<GroupSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_triple(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.parse::<usize>()).collect();
    match nums.as_deref() {
        Ok([k, l, m]) => Ok((*k, *l, *m)),
        _ => Err(format!("expected three non-negative integers k,l,m, got '{s}'")),
    }
}

/// Failure after the report was produced: a checked identity did not hold.
pub struct Failed(pub String);

pub enum Outcome {
    Done,
    Failed(Failed),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed(Failed(why))) => {
            eprintln!("tlchan: check failed: {why}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("tlchan: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
