//! Protocol × seed sweeps and their CSV/SVG outputs.
//!
//! Each `(protocol, seed)` run writes `<protocol>_seed<seed>.csv` with one
//! row per round. `summary.csv` collects the lifetime landmarks of every
//! run; a landmark that was never reached is reported as the round cap.
//! With plots enabled, four SVG charts overlay the protocols using each
//! protocol's run for the first listed seed.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::ProtocolKind;
use crate::config::ExperimentSpec;
use crate::engine::{run_simulation, EngineError};
use crate::plot::{line_chart, PlotError, Series};
use crate::{NetworkConfig, RoundMetrics, SimulationResult};

pub const ROUND_HEADER: [&str; 9] = [
    "round",
    "alive_total",
    "alive_normal",
    "alive_advance",
    "alive_super",
    "dead_total",
    "ch_count",
    "packets_to_bs",
    "total_residual_j",
];

pub const SUMMARY_HEADER: [&str; 5] = [
    "protocol",
    "seed",
    "first_death_round",
    "last_death_round",
    "total_packets_to_bs",
];

pub const SUMMARY_FILE: &str = "summary.csv";

pub const PLOT_FILES: [&str; 4] = [
    "alive_nodes.svg",
    "dead_nodes.svg",
    "packets_to_bs.svg",
    "cluster_heads.svg",
];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Plot(#[from] PlotError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub result: SimulationResult,
}

pub fn round_csv_name(protocol: ProtocolKind, seed: u64) -> String {
    format!("{}_seed{}.csv", protocol.key(), seed)
}

/// Runs every `(protocol, seed)` pair, in parallel, and returns them in
/// protocol-major order.
pub fn run_batch(
    base: &NetworkConfig,
    protocols: &[ProtocolKind],
    seeds: &[u64],
) -> Result<Vec<RunRecord>, EngineError> {
    let jobs: Vec<(ProtocolKind, u64)> = protocols
        .iter()
        .flat_map(|&p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(protocol, seed)| {
            let config = NetworkConfig { seed, ..base.clone() };
            Ok(RunRecord {
                protocol,
                seed,
                result: run_simulation(&config, protocol)?,
            })
        })
        .collect()
}

fn round_row(m: &RoundMetrics) -> [String; 9] {
    [
        m.round.to_string(),
        m.alive_total.to_string(),
        m.alive_normal.to_string(),
        m.alive_advance.to_string(),
        m.alive_super.to_string(),
        m.dead_total.to_string(),
        m.ch_count.to_string(),
        m.packets_to_bs.to_string(),
        format!("{:.9}", m.total_residual),
    ]
}

pub fn write_round_csv<W: Write>(out: W, result: &SimulationResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROUND_HEADER)?;
    for m in &result.per_round {
        w.write_record(round_row(m))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in records {
        w.write_record([
            r.protocol.key().to_string(),
            r.seed.to_string(),
            r.result.first_death_round.round().to_string(),
            r.result.last_death_round.round().to_string(),
            r.result.total_packets_to_bs().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_csv_file(path: &Path, write: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<(), ExperimentError> {
    let file = File::create(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write(BufWriter::new(file)).map_err(|source| ExperimentError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn render_plots(dir: &Path, records: &[RunRecord], first_seed: u64) -> Result<Vec<PathBuf>, ExperimentError> {
    type Metric = fn(&RoundMetrics) -> f64;
    let charts: [(&str, &str, &str, Metric); 4] = [
        (PLOT_FILES[0], "Alive nodes", "Alive nodes", |m| m.alive_total as f64),
        (PLOT_FILES[1], "Dead nodes", "Dead nodes", |m| m.dead_total as f64),
        (PLOT_FILES[2], "Packets to BS", "Packets received by BS", |m| {
            m.packets_to_bs as f64
        }),
        (PLOT_FILES[3], "Cluster heads per round", "Cluster heads", |m| {
            m.ch_count as f64
        }),
    ];
    let shown: Vec<&RunRecord> = records.iter().filter(|r| r.seed == first_seed).collect();
    let mut written = Vec::new();
    for (file, title, y_label, metric) in charts {
        let series: Vec<Series> = shown
            .iter()
            .map(|r| Series {
                label: r.protocol.label().to_string(),
                points: r.result.per_round.iter().map(|m| (m.round, metric(m))).collect(),
            })
            .collect();
        let path = dir.join(file);
        line_chart(&path, title, y_label, &series)?;
        written.push(path);
    }
    Ok(written)
}

/// Runs the sweep described by `spec` and writes its files into
/// `spec.output_dir`, returning the paths written.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<PathBuf>, ExperimentError> {
    let dir = &spec.output_dir;
    fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
        path: dir.clone(),
        source,
    })?;
    let records = run_batch(&spec.base, &spec.protocols, &spec.seeds)?;

    let mut written = Vec::new();
    for r in &records {
        let path = dir.join(round_csv_name(r.protocol, r.seed));
        write_csv_file(&path, |w| write_round_csv(w, &r.result))?;
        written.push(path);
    }
    let summary = dir.join(SUMMARY_FILE);
    write_csv_file(&summary, |w| write_summary_csv(w, &records))?;
    written.push(summary);

    if spec.emit_plots {
        written.extend(render_plots(dir, &records, spec.seeds[0])?);
    }
    Ok(written)
}
