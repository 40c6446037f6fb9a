//! `qdilab` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or I/O failure, 2 verification
//! found violations.

mod args;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdilab::Protocol;

use args::{NetlistArgs, SpecArgs, VectorArgs};
use commands::Outcome;

#[derive(Debug, Parser)]
#[command(name = "qdilab", version, about = "Dual-rail asynchronous adder generator, simulator and checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the netlist JSON of one adder.
    Generate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Emit the gate-for-gate dual instead.
        #[arg(long)]
        dual: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate handshake cycles and write traces.jsonl.
    Simulate {
        #[command(flatten)]
        source: NetlistArgs,
        #[command(flatten)]
        vectors: VectorArgs,
        #[arg(long, env = "QDILAB_OUT", default_value = ".")]
        out_dir: PathBuf,
        /// Also write cycle0.vcd for the first cycle.
        #[arg(long)]
        vcd: bool,
    },
    /// Check results and QDI properties; exit 2 on any violation.
    Verify {
        #[command(flatten)]
        source: NetlistArgs,
        #[command(flatten)]
        vectors: VectorArgs,
        /// Attribute orphans to single input changes as well.
        #[arg(long)]
        strict: bool,
        /// Check every output rail cover for disjointness.
        #[arg(long)]
        dsop: bool,
        #[arg(long)]
        json: bool,
    },
    /// Measure a set of adders and write metrics and normalized series.
    Bench {
        /// Experiment config (TOML). Defaults to every mapped reference legend.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the default config and exit.
        #[arg(long)]
        print_config: bool,
        /// Override the random vector count.
        #[arg(long)]
        count: Option<usize>,
        /// Override the random seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "protocol")]
        protocols: Vec<Protocol>,
        #[arg(long, env = "QDILAB_OUT", default_value = "qdilab-out")]
        out_dir: PathBuf,
    },
    /// Ordinal agreement of measured metrics with the reference table.
    Compare {
        /// metrics.csv or metrics.json from `bench`. Measured on the fly if absent.
        #[arg(long)]
        measured: Option<PathBuf>,
        /// Reference CSV. Defaults to the bundled table.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Comma-separated `X:Y` pairs or lone legends (FL against RL).
        #[arg(long, default_value = "Z22:Z23,Z27:Z28,Z2:Z8,Z19")]
        pairs: String,
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Generate { spec, dual, output } => commands::generate(&spec, dual, output.as_deref())?,
        Command::Simulate { source, vectors, out_dir, vcd } => {
            commands::simulate(commands::SimulateOpts { source: &source, vectors: &vectors, out_dir: &out_dir, vcd })?
        }
        Command::Verify { source, vectors, strict, dsop, json } => {
            return commands::verify(commands::VerifyOpts { source: &source, vectors: &vectors, strict, dsop, json });
        }
        Command::Bench { print_config: true, .. } => print!("{}", config::ExperimentConfig::default_bench().to_toml()),
        Command::Bench { config, count, seed, protocols, out_dir, .. } => {
            commands::bench(commands::BenchOpts { config, count, seed, protocols, out_dir })?
        }
        Command::Compare { measured, reference, pairs, count, seed, json } => {
            commands::compare(commands::CompareOpts { measured, reference, pairs, count, seed, json })?
        }
    }
    Ok(Outcome::Clean)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
