//! Trainability and noise sweeps over `(n, repetitions, noise, method, seed)`
//! cells.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{ExpError, ExpResult};
use crate::instance::CellSeeds;
use crate::trace::{Method, TrainingTrace};
use crate::train::run_method;

/// Readout of one sweep axis point: `"exact"` or a shot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Repetitions {
    Exact,
    Shots(u64),
}

impl Repetitions {
    pub fn shots(self) -> Option<u64> {
        match self {
            Repetitions::Exact => None,
            Repetitions::Shots(s) => Some(s),
        }
    }
}

impl Serialize for Repetitions {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Repetitions::Exact => s.serialize_str("exact"),
            Repetitions::Shots(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Repetitions {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Shots(u64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Shots(0) => Err(serde::de::Error::custom("shot count must be at least 1")),
            Raw::Shots(n) => Ok(Repetitions::Shots(n)),
            Raw::Word(w) if w == "exact" => Ok(Repetitions::Exact),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "repetitions must be \"exact\" or a shot count, got {w:?}"
            ))),
        }
    }
}

/// Grid for the trainability sweep. Every list is an axis of the cell
/// product; an empty axis yields no cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Shared settings. Its `n_qubits`, `shots` and `noise_p` are replaced
    /// per cell.
    pub base: ExperimentConfig,
    pub n_qubits: Vec<usize>,
    pub repetitions: Vec<Repetitions>,
    pub noise_p: Vec<f64>,
    pub methods: Vec<Method>,
    /// Seeds per cell; seed indices run `0..seeds`.
    pub seeds: u64,
    /// Give each DFO run the PG raw-evaluation budget `iterations · rollouts`
    /// instead of its own default.
    pub equal_budget: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            base: ExperimentConfig::default(),
            n_qubits: vec![5],
            repetitions: vec![Repetitions::Exact],
            noise_p: vec![0.0],
            methods: Method::ALL.to_vec(),
            seeds: 10,
            equal_budget: false,
        }
    }
}

/// One unit of sweep work.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub config: ExperimentConfig,
    pub method: Method,
    pub seed_index: u64,
    pub budget: Option<u64>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> ExpResult<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| ExpError::ConfigInvalid(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> ExpResult<Self> {
        Self::from_json(&crate::config::read_config_text(path)?)
    }

    /// Checks every cell configuration before anything runs.
    pub fn validate(&self) -> ExpResult<()> {
        self.base.validate()?;
        for cell in self.cells() {
            cell.config.validate()?;
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<SweepCell> {
        let mut cells = Vec::new();
        for &n in &self.n_qubits {
            for &reps in &self.repetitions {
                for &p in &self.noise_p {
                    let mut config = self.base.clone();
                    config.n_qubits = n;
                    config.shots = reps.shots();
                    config.noise_p = p;
                    for &method in &self.methods {
                        let budget = (self.equal_budget && method != Method::Pg)
                            .then(|| config.iterations * config.rollouts as u64);
                        for seed_index in 0..self.seeds {
                            cells.push(SweepCell {
                                config: config.clone(),
                                method,
                                seed_index,
                                budget,
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

/// One CSV row. Failed cells keep their coordinates and leave the result
/// fields empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n_qubits: usize,
    pub depth: usize,
    pub method: Method,
    pub repetitions: String,
    pub noise_p: f64,
    pub seed: u64,
    pub j_inf: Option<f64>,
    pub j_inf_std: Option<f64>,
    pub iters_run: Option<u64>,
    pub evals_run: Option<u64>,
    pub wallclock_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Full traces in row order, `None` for failed cells or when not kept.
    pub traces: Vec<Option<TrainingTrace>>,
    pub seeds: Vec<CellSeeds>,
}

impl SweepOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// Runs every cell, concurrently on the current rayon pool. Results are
/// collected in cell order, so the output does not depend on the thread
/// count. A failing cell is recorded in its row and the sweep continues.
pub fn run_cells(cells: &[SweepCell], keep_traces: bool) -> SweepOutcome {
    let results: Vec<(SweepRow, Option<TrainingTrace>)> = cells
        .par_iter()
        .map(|cell| {
            let result = run_method(&cell.config, cell.seed_index, cell.method, cell.budget);
            let mut row = SweepRow {
                n_qubits: cell.config.n_qubits,
                depth: cell.config.depth(),
                method: cell.method,
                repetitions: cell.config.repetitions_label(),
                noise_p: cell.config.noise_p,
                seed: cell.seed_index,
                j_inf: None,
                j_inf_std: None,
                iters_run: None,
                evals_run: None,
                wallclock_s: None,
                error: None,
            };
            match result {
                Ok(trace) => {
                    log::info!(
                        "n={} reps={} p={} {} seed {}: J_inf = {:.4}",
                        row.n_qubits,
                        row.repetitions,
                        row.noise_p,
                        row.method,
                        row.seed,
                        trace.j_inf
                    );
                    row.j_inf = Some(trace.j_inf);
                    row.j_inf_std = Some(trace.j_inf_std);
                    row.iters_run = Some(trace.iters_run);
                    row.evals_run = Some(trace.evals_run);
                    row.wallclock_s = Some(trace.wallclock_s);
                    (row, keep_traces.then_some(trace))
                }
                Err(e) => {
                    log::warn!("cell {} seed {} failed: {e}", row.method, row.seed);
                    row.error = Some(e.to_string());
                    (row, None)
                }
            }
        })
        .collect();
    let mut seeds: Vec<CellSeeds> = cells
        .iter()
        .map(|c| CellSeeds::new(c.config.master_seed, c.config.n_qubits, c.seed_index))
        .collect();
    seeds.sort_by_key(|s| (s.master_seed, s.cell, s.seed_index));
    seeds.dedup();
    let (rows, traces) = results.into_iter().unzip();
    SweepOutcome {
        rows,
        traces,
        seeds,
    }
}

pub fn run_trainability_sweep(spec: &SweepSpec, keep_traces: bool) -> SweepOutcome {
    run_cells(&spec.cells(), keep_traces)
}

/// Noise sweep grid: every cell runs once noiseless and once at `noise_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSweepSpec {
    pub base: ExperimentConfig,
    pub n_qubits: Vec<usize>,
    pub repetitions: Vec<Repetitions>,
    /// Noisy depolarizing probability paired with `p = 0`.
    pub noise_p: f64,
    pub methods: Vec<Method>,
    pub seeds: u64,
}

impl Default for NoiseSweepSpec {
    fn default() -> Self {
        Self {
            base: ExperimentConfig::default(),
            n_qubits: vec![5],
            repetitions: vec![
                Repetitions::Shots(5_000),
                Repetitions::Shots(10_000),
                Repetitions::Shots(50_000),
                Repetitions::Shots(100_000),
            ],
            noise_p: 0.01,
            methods: vec![Method::Pg],
            seeds: 10,
        }
    }
}

impl NoiseSweepSpec {
    pub fn from_json(text: &str) -> ExpResult<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| ExpError::ConfigInvalid(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> ExpResult<Self> {
        Self::from_json(&crate::config::read_config_text(path)?)
    }

    pub fn validate(&self) -> ExpResult<()> {
        self.as_sweep().validate()
    }

    /// The equivalent plain sweep over `p ∈ {0, noise_p}`.
    pub fn as_sweep(&self) -> SweepSpec {
        SweepSpec {
            base: self.base.clone(),
            n_qubits: self.n_qubits.clone(),
            repetitions: self.repetitions.clone(),
            noise_p: vec![0.0, self.noise_p],
            methods: self.methods.clone(),
            seeds: self.seeds,
            equal_budget: false,
        }
    }
}

/// Fluctuation of `J_∞` with noise relative to without, for one
/// `(n, method, repetitions)` group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRatioRow {
    pub n_qubits: usize,
    pub method: Method,
    pub repetitions: String,
    pub noise_p: f64,
    /// Seed-to-seed standard deviation of `J_∞`, noisy over noiseless.
    pub seed_ratio: Option<f64>,
    /// Mean within-run `J_∞` std over the asymptotic window, noisy over
    /// noiseless.
    pub within_ratio: Option<f64>,
    /// Seeds that succeeded in both arms.
    pub seeds: usize,
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if num == den {
        Some(1.0)
    } else if den > 0.0 && num.is_finite() {
        Some(num / den)
    } else {
        None
    }
}

/// Pairs noisy rows with noiseless rows of the same `(n, method,
/// repetitions, seed)` and reduces each group to its two ratios. Groups are
/// ordered by `n`, method and then increasing shot count.
pub fn variance_ratios(rows: &[SweepRow], noise_p: f64) -> Vec<VarianceRatioRow> {
    type Key = (usize, Method, Repetitions);
    let mut groups: BTreeMap<Key, BTreeMap<u64, [Option<(f64, f64)>; 2]>> = BTreeMap::new();
    for r in rows {
        let (Some(j), Some(s)) = (r.j_inf, r.j_inf_std) else {
            continue;
        };
        let reps = r
            .repetitions
            .parse()
            .map_or(Repetitions::Exact, Repetitions::Shots);
        let slot = groups
            .entry((r.n_qubits, r.method, reps))
            .or_default()
            .entry(r.seed)
            .or_default();
        // With `noise_p == 0` both arms are the same rows.
        if r.noise_p == 0.0 {
            slot[0] = Some((j, s));
        }
        if r.noise_p == noise_p {
            slot[1] = Some((j, s));
        }
    }
    groups
        .into_iter()
        .map(|((n, method, reps), seeds)| {
            let paired: Vec<((f64, f64), (f64, f64))> = seeds
                .into_values()
                .filter_map(|[a, b]| Some((a?, b?)))
                .collect();
            let clean_j: Vec<f64> = paired.iter().map(|p| p.0 .0).collect();
            let noisy_j: Vec<f64> = paired.iter().map(|p| p.1 .0).collect();
            let mean = |xs: Vec<f64>| xs.iter().sum::<f64>() / xs.len().max(1) as f64;
            let clean_w = mean(paired.iter().map(|p| p.0 .1).collect());
            let noisy_w = mean(paired.iter().map(|p| p.1 .1).collect());
            let usable = !paired.is_empty();
            VarianceRatioRow {
                n_qubits: n,
                method,
                repetitions: match reps {
                    Repetitions::Exact => "exact".into(),
                    Repetitions::Shots(s) => s.to_string(),
                },
                noise_p,
                seed_ratio: usable
                    .then(|| ratio(sample_std(&noisy_j), sample_std(&clean_j)))
                    .flatten(),
                within_ratio: usable.then(|| ratio(noisy_w, clean_w)).flatten(),
                seeds: paired.len(),
            }
        })
        .collect()
}
