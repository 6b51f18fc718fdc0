//! Command-line front end: schedule, bench, cluster, combine and unbundle.

mod commands;
mod table;

use std::io::{self, Write};
use std::path::PathBuf;

use circpack::cluster::ClusterError;
use circpack::formats::FormatError;
use circpack::model::{Algorithm, ModelError};
use circpack::packing::PackError;
use circpack::qasm::QasmError;
use circpack::queue::QueueError;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "circpack",
    version,
    about = "Pack quantum circuit queues onto trapped-ion devices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pack a queue and write the schedule.
    Schedule(ScheduleArgs),
    /// Compare all packers over sampled queues of several sizes.
    Bench(BenchArgs),
    /// Spread a sampled queue over several identical workers.
    Cluster(ClusterArgs),
    /// Write one combined QASM program per batch of a schedule.
    Combine(CombineArgs),
    /// Split counts of a combined program into per-circuit counts.
    Unbundle(UnbundleArgs),
}

#[derive(Debug, Args)]
pub struct DeviceArgs {
    /// Topology file (`traps = 10,10`, `alpha = 170`, `layout = linear`).
    #[arg(long)]
    pub topology: PathBuf,
    /// Cutoff threshold, replacing the topology's.
    #[arg(long)]
    pub alpha: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    /// Directory of .qasm files, a single .qasm file, or a manifest.
    #[arg(long)]
    pub queue: PathBuf,
    #[arg(long, default_value = "circpack")]
    pub algo: Algorithm,
    /// Schedule JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gantt chart SVG output.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Print a text Gantt chart.
    #[arg(long)]
    pub gantt: bool,
    /// Draw this many jobs from the queue with replacement.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[arg(long)]
    pub queue: PathBuf,
    /// Comma-separated queue sizes.
    #[arg(long, value_delimiter = ',', default_value = "20,100,150,200")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output; rows carry no timings so equal seeds give equal files.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[arg(long)]
    pub queue: PathBuf,
    #[arg(long)]
    pub workers: usize,
    /// Jobs drawn from the queue with replacement.
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value = "circpack")]
    pub algo: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for one schedule file per worker.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CombineArgs {
    /// Schedule JSON written by `schedule`.
    #[arg(long)]
    pub schedule: PathBuf,
    /// Queue the schedule was built from.
    #[arg(long)]
    pub queue: PathBuf,
    /// Only this batch.
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct UnbundleArgs {
    /// Counts of a combined program: `<bitstring> <count>` lines or JSON.
    #[arg(long)]
    pub counts: PathBuf,
    /// Layout sidecar written by `combine`.
    #[arg(long)]
    pub layout: PathBuf,
    /// Schedule and queue, to name circuits and score them against ideal
    /// outcomes from the manifest.
    #[arg(long, requires = "queue")]
    pub schedule: Option<PathBuf>,
    #[arg(long, requires = "schedule")]
    pub queue: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{path}: {source}")]
    Qasm {
        path: PathBuf,
        #[source]
        source: QasmError,
    },
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error(transparent)]
    Pack(#[from] PackError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("invalid option: {0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Output(#[source] io::Error),
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Schedule(args) => commands::schedule(&args, out),
        Command::Bench(args) => commands::bench(&args, out),
        Command::Cluster(args) => commands::cluster(&args, out),
        Command::Combine(args) => commands::combine(&args, out),
        Command::Unbundle(args) => commands::unbundle(&args, out),
    }
}
