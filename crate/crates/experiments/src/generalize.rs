//! Train on nested training sets of increasing size, then score the frozen
//! policy mean on held-out state families.

use rayon::prelude::*;
use rlcompile_core::fidelity::{
    generate_test_states, InitialStateSet, StateSetKind, DEFAULT_MEMORY_BUDGET,
};
use rlcompile_core::rng::{derived_stream, label_key};
use rlcompile_core::Real;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Precision};
use crate::error::{ExpError, ExpResult};
use crate::instance::{CellSeeds, Instance};
use crate::trace::Method;
use crate::train::train;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneralizeSpec {
    pub base: ExperimentConfig,
    /// Training-set sizes, strictly ascending.
    pub sizes: Vec<usize>,
    pub seeds: u64,
    /// States per random test family.
    pub test_size: usize,
}

impl Default for GeneralizeSpec {
    fn default() -> Self {
        Self {
            base: ExperimentConfig {
                n_qubits: 6,
                ..ExperimentConfig::default()
            },
            sizes: vec![2, 8, 32],
            seeds: 10,
            test_size: 500,
        }
    }
}

impl GeneralizeSpec {
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
        self.base.validate()?;
        if self.sizes.first() == Some(&0) || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExpError::ConfigInvalid(
                "sizes must be positive and strictly ascending".into(),
            ));
        }
        if self.test_size == 0 {
            return Err(ExpError::ConfigInvalid(
                "test_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// State family a generalization row is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalSet {
    Train,
    Zero,
    LocalXz,
    GlobalRandom,
}

impl EvalSet {
    pub const ALL: [EvalSet; 4] = [
        EvalSet::Train,
        EvalSet::Zero,
        EvalSet::LocalXz,
        EvalSet::GlobalRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EvalSet::Train => "train",
            EvalSet::Zero => "zero",
            EvalSet::LocalXz => "local_xz",
            EvalSet::GlobalRandom => "global_random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizeRow {
    pub n_qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub train_size: usize,
    pub set: EvalSet,
    pub states: usize,
    /// Mean noiseless fidelity of the frozen policy mean on the set.
    pub fidelity: Option<f64>,
    /// Sample standard deviation of the per-state fidelities.
    pub std: Option<f64>,
    /// Standard error of `fidelity`.
    pub stderr: Option<f64>,
    /// Training-run `J_∞`, repeated on every row of the same run.
    pub j_inf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct GeneralizeOutcome {
    pub rows: Vec<GeneralizeRow>,
    pub seeds: Vec<CellSeeds>,
}

struct TestSets<T: Real> {
    zero: InitialStateSet<T>,
    local_xz: InitialStateSet<T>,
    global: InitialStateSet<T>,
}

impl<T: Real> TestSets<T> {
    /// Test sets descend from the cell seed, so every training size of a seed
    /// is scored on the same states.
    fn new(n: usize, count: usize, seeds: &CellSeeds) -> ExpResult<Self> {
        let draw = |kind, name: &str| {
            generate_test_states(
                n,
                kind,
                count,
                DEFAULT_MEMORY_BUDGET,
                &mut derived_stream(seeds.cell, &[label_key(name)]),
            )
        };
        Ok(Self {
            zero: draw(StateSetKind::TestZero, "test-zero")?,
            local_xz: draw(StateSetKind::TestLocalXz, "test-local-xz")?,
            global: draw(StateSetKind::TestGlobalRandom, "test-global-random")?,
        })
    }
}

/// Runs one `(seed, size)` job and returns its four rows.
fn run_job<T: Real>(
    spec: &GeneralizeSpec,
    seed_index: u64,
    size: usize,
) -> ExpResult<Vec<(EvalSet, usize, f64, f64, f64)>> {
    let config = &spec.base;
    let instance = Instance::<T>::with_training_size(config, seed_index, size)?;
    let tests = TestSets::<T>::new(config.n_qubits, spec.test_size, &instance.seeds)?;
    let trace = train(config, &instance, Method::Pg, None)?;
    let theta: Vec<T> = trace.theta_star.iter().map(|&v| T::of(v)).collect();
    EvalSet::ALL
        .iter()
        .map(|&set| {
            let states = match set {
                EvalSet::Train => &instance.train_states,
                EvalSet::Zero => &tests.zero,
                EvalSet::LocalXz => &tests.local_xz,
                EvalSet::GlobalRandom => &tests.global,
            };
            let est = instance
                .exact_evaluator(states)?
                .evaluate_params(&theta, 0)?;
            Ok((set, states.len(), est.value, est.std(), trace.j_inf))
        })
        .collect()
}

/// One PG run per `(seed, size)`, concurrently, rows in `(seed, size, set)`
/// order.
pub fn run_generalization(spec: &GeneralizeSpec) -> GeneralizeOutcome {
    let jobs: Vec<(u64, usize)> = (0..spec.seeds)
        .flat_map(|s| spec.sizes.iter().map(move |&m| (s, m)))
        .collect();
    let config = &spec.base;
    let rows = jobs
        .par_iter()
        .map(|&(seed, size)| {
            let result = match config.precision {
                Precision::F64 => run_job::<f64>(spec, seed, size),
                Precision::F32 => run_job::<f32>(spec, seed, size),
            };
            let base = |set, states| GeneralizeRow {
                n_qubits: config.n_qubits,
                depth: config.depth(),
                seed,
                train_size: size,
                set,
                states,
                fidelity: None,
                std: None,
                stderr: None,
                j_inf: None,
                error: None,
            };
            match result {
                Ok(scores) => scores
                    .into_iter()
                    .map(|(set, states, f, s, j)| GeneralizeRow {
                        fidelity: Some(f),
                        std: Some(s),
                        stderr: Some(s / (states as f64).sqrt()),
                        j_inf: Some(j),
                        ..base(set, states)
                    })
                    .collect(),
                Err(e) => {
                    log::warn!("generalization seed {seed} size {size} failed: {e}");
                    EvalSet::ALL
                        .iter()
                        .map(|&set| GeneralizeRow {
                            error: Some(e.to_string()),
                            ..base(set, 0)
                        })
                        .collect::<Vec<_>>()
                }
            }
        })
        .collect::<Vec<Vec<GeneralizeRow>>>()
        .into_iter()
        .flatten()
        .collect();
    let seeds = (0..spec.seeds)
        .map(|s| CellSeeds::new(config.master_seed, config.n_qubits, s))
        .collect();
    GeneralizeOutcome { rows, seeds }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_must_ascend() {
        let mut spec = GeneralizeSpec::default();
        spec.validate().unwrap();
        spec.sizes = vec![4, 4];
        assert!(spec.validate().is_err());
        spec.sizes = vec![0, 4];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn small_run_scores_every_set() {
        let spec = GeneralizeSpec {
            base: ExperimentConfig {
                n_qubits: 2,
                iterations: 5,
                ..ExperimentConfig::default()
            },
            sizes: vec![1, 3],
            seeds: 1,
            test_size: 4,
        };
        let out = run_generalization(&spec);
        assert_eq!(out.rows.len(), 8);
        for r in &out.rows {
            assert!(r.error.is_none());
            let f = r.fidelity.unwrap();
            assert!((0.0..=1.0).contains(&f));
        }
        assert_eq!(out.rows[1].set, EvalSet::Zero);
        assert_eq!(out.rows[1].states, 1);
        assert_eq!(out.rows[2].states, 4);
    }
}
