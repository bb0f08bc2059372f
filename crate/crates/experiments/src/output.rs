//! CSV tables and the JSON run manifest.
//!
//! Floats are written in Rust's shortest round-trip form and missing values
//! as empty fields. Wall-clock columns stay empty unless timing is requested,
//! which keeps repeated runs byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{ExpError, ExpResult};
use crate::generalize::GeneralizeRow;
use crate::instance::CellSeeds;
use crate::sweep::{SweepRow, VarianceRatioRow};
use crate::trace::TrainingTrace;

pub const SWEEP_COLUMNS: [&str; 11] = [
    "n_qubits",
    "depth",
    "method",
    "repetitions",
    "noise_p",
    "seed",
    "J_inf",
    "J_inf_std",
    "iters_run",
    "evals_run",
    "wallclock_s",
];

pub const TRACE_COLUMNS: [&str; 12] = [
    "method",
    "seed",
    "iteration",
    "evals",
    "reward_mean",
    "reward_std",
    "best",
    "sigma",
    "baseline",
    "grad_norm",
    "degenerate",
    "wall_ms",
];

pub const RATIO_COLUMNS: [&str; 7] = [
    "n_qubits",
    "method",
    "repetitions",
    "noise_p",
    "seed_ratio",
    "within_ratio",
    "seeds",
];

pub const GENERALIZE_COLUMNS: [&str; 10] = [
    "n_qubits",
    "depth",
    "seed",
    "train_size",
    "set",
    "states",
    "fidelity",
    "std",
    "stderr",
    "J_inf",
];

/// Version string recorded in manifests: the crate version plus the git
/// revision the binary was built from, when known.
pub fn version_string() -> String {
    match option_env!("RLCOMPILE_GIT_REV") {
        Some(rev) if !rev.is_empty() => format!("{} ({rev})", env!("CARGO_PKG_VERSION")),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn f(x: f64) -> String {
    x.to_string()
}

fn opt_f(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

fn opt_u(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Creates `dir` and any parents.
pub fn ensure_dir(dir: &Path) -> ExpResult<()> {
    fs::create_dir_all(dir).map_err(|e| ExpError::output(dir, e))
}

fn write_table<I>(path: &Path, header: &[&str], records: I) -> ExpResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => ExpError::output(path, io),
        other => ExpError::Runtime(format!("csv: {other:?}")),
    };
    let file = fs::File::create(path).map_err(|e| ExpError::output(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(header).map_err(io)?;
    for r in records {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(|e| ExpError::output(path, e))
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow], timing: bool) -> ExpResult<()> {
    write_table(
        path,
        &SWEEP_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.n_qubits.to_string(),
                r.depth.to_string(),
                r.method.to_string(),
                r.repetitions.clone(),
                f(r.noise_p),
                r.seed.to_string(),
                opt_f(r.j_inf),
                opt_f(r.j_inf_std),
                opt_u(r.iters_run),
                opt_u(r.evals_run),
                if timing {
                    opt_f(r.wallclock_s)
                } else {
                    String::new()
                },
            ]
        }),
    )
}

pub fn write_trace_csv<'a, I>(path: &Path, traces: I, timing: bool) -> ExpResult<()>
where
    I: IntoIterator<Item = &'a TrainingTrace>,
{
    let records = traces.into_iter().flat_map(|t| {
        t.rows.iter().map(move |r| {
            vec![
                t.method.to_string(),
                t.seed_index.to_string(),
                r.iteration.to_string(),
                r.evals.to_string(),
                f(r.reward_mean),
                opt_f(r.reward_std),
                f(r.best),
                opt_f(r.sigma),
                opt_f(r.baseline),
                opt_f(r.grad_norm),
                r.degenerate.to_string(),
                if timing { f(r.wall_ms) } else { String::new() },
            ]
        })
    });
    write_table(path, &TRACE_COLUMNS, records)
}

pub fn write_ratio_csv(path: &Path, rows: &[VarianceRatioRow]) -> ExpResult<()> {
    write_table(
        path,
        &RATIO_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.n_qubits.to_string(),
                r.method.to_string(),
                r.repetitions.clone(),
                f(r.noise_p),
                opt_f(r.seed_ratio),
                opt_f(r.within_ratio),
                r.seeds.to_string(),
            ]
        }),
    )
}

pub fn write_generalize_csv(path: &Path, rows: &[GeneralizeRow]) -> ExpResult<()> {
    write_table(
        path,
        &GENERALIZE_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.n_qubits.to_string(),
                r.depth.to_string(),
                r.seed.to_string(),
                r.train_size.to_string(),
                r.set.name().to_string(),
                r.states.to_string(),
                opt_f(r.fidelity),
                opt_f(r.std),
                opt_f(r.stderr),
                opt_f(r.j_inf),
            ]
        }),
    )
}

/// A row that failed, as recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub row: usize,
    pub error: String,
}

/// Everything needed to rerun and audit a command.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<C: Serialize> {
    pub version: String,
    pub command: String,
    pub config: C,
    pub seeds: Vec<CellSeeds>,
    pub outputs: Vec<PathBuf>,
    pub failures: Vec<Failure>,
}

impl<C: Serialize> Manifest<C> {
    pub fn new(command: &str, config: C) -> Self {
        Self {
            version: version_string(),
            command: command.to_string(),
            config,
            seeds: Vec::new(),
            outputs: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> ExpResult<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| ExpError::Runtime(format!("manifest: {e}")))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| ExpError::output(path, e))
    }
}
