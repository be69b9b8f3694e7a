use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ceec_sim::config::{parse_config, parse_list};
use ceec_sim::experiment::{run_experiment, ExperimentError};
use ceec_sim::ProtocolKind;

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Run clustering-protocol sweeps over a heterogeneous sensor network and
/// write per-round CSVs, a landmark summary and optional SVG plots.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Key-value configuration file (may be empty for all defaults).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Render SVG plots; overrides `emit_plots`.
    #[arg(long)]
    plots: bool,
    /// Comma-separated protocols: ceec,leach,sep,esep,deec.
    #[arg(long)]
    protocols: Option<String>,
    /// Comma-separated RNG seeds.
    #[arg(long)]
    seeds: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut spec = match parse_config(&args.config) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(out) = args.out {
        spec.output_dir = out;
    }
    spec.emit_plots |= args.plots;
    if let Some(list) = &args.protocols {
        match parse_list::<ProtocolKind>(list) {
            Ok(p) => spec.protocols = p,
            Err(e) => {
                eprintln!("error: --protocols: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    if let Some(list) = &args.seeds {
        match parse_list::<u64>(list) {
            Ok(s) => spec.seeds = s,
            Err(e) => {
                eprintln!("error: --seeds: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    if let Err(e) = spec.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }

    match run_experiment(&spec) {
        Ok(files) => {
            println!("wrote {} files to {}", files.len(), spec.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e @ ExperimentError::Engine(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
