use rlcompile_core::ansatz::{random_target, AnsatzSpec, ParamVector, TargetUnitary};
use rlcompile_core::fidelity::{generate_training_states, FidelityEvaluator, InitialStateSet};
use rlcompile_core::rng::{derive_seed, derived_stream, label_key};
use rlcompile_core::sim::NoiseModel;
use rlcompile_core::Real;
use serde::Serialize;

use crate::config::{ExperimentConfig, InitMode};
use crate::error::ExpResult;

/// Seeds for one `(n_qubits, seed index)` cell. Everything random in a run
/// descends from these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellSeeds {
    pub master_seed: u64,
    pub seed_index: u64,
    pub cell: u64,
    pub target: u64,
    pub train_states: u64,
    pub init: u64,
}

impl CellSeeds {
    pub fn new(master_seed: u64, n_qubits: usize, seed_index: u64) -> Self {
        let cell = derive_seed(master_seed, &[n_qubits as u64, seed_index]);
        let sub = |name: &str| derive_seed(cell, &[label_key(name)]);
        Self {
            master_seed,
            seed_index,
            cell,
            target: sub("target"),
            train_states: sub("train-states"),
            init: sub("init"),
        }
    }

    /// Stream seed for one run in this cell, keyed on a run label.
    pub fn run(&self, label: &str) -> u64 {
        derive_seed(self.cell, &[label_key("run"), label_key(label)])
    }
}

/// Target, training set and starting angles shared by every method run in a
/// cell.
pub struct Instance<T: Real> {
    pub seeds: CellSeeds,
    pub spec: AnsatzSpec,
    pub target: TargetUnitary<T>,
    pub train_states: InitialStateSet<T>,
    pub init: Vec<T>,
}

impl<T: Real> Instance<T> {
    pub fn new(config: &ExperimentConfig, seed_index: u64) -> ExpResult<Self> {
        Self::with_training_size(config, seed_index, config.m_train())
    }

    /// As [`Instance::new`] with an explicit training-set size. Sets of
    /// different sizes in the same cell are prefixes of one another.
    pub fn with_training_size(
        config: &ExperimentConfig,
        seed_index: u64,
        m: usize,
    ) -> ExpResult<Self> {
        let seeds = CellSeeds::new(config.master_seed, config.n_qubits, seed_index);
        let spec = config.ansatz()?;
        let target = random_target(&spec, &mut derived_stream(seeds.target, &[]))?;
        let train_states = generate_training_states(
            config.n_qubits,
            m,
            &mut derived_stream(seeds.train_states, &[]),
        )?;
        let init = match config.init {
            InitMode::Random => {
                ParamVector::uniform(spec.param_count(), &mut derived_stream(seeds.init, &[])).0
            }
            InitMode::Zero => vec![T::zero(); spec.param_count()],
            InitMode::Target => target.hidden_params.0.clone(),
        };
        Ok(Self {
            seeds,
            spec,
            target,
            train_states,
            init,
        })
    }

    /// Evaluator on the training set with the configured readout and noise.
    pub fn evaluator(&self, config: &ExperimentConfig) -> ExpResult<FidelityEvaluator<T>> {
        let noise = if config.noise_p > 0.0 {
            Some(NoiseModel::depolarizing(config.noise_p)?)
        } else {
            None
        };
        Ok(FidelityEvaluator::new(
            self.target.clone(),
            &self.train_states,
            config.eval_mode(),
            noise,
        )?)
    }

    /// Noiseless exact evaluator on an arbitrary state set.
    pub fn exact_evaluator(&self, states: &InitialStateSet<T>) -> ExpResult<FidelityEvaluator<T>> {
        Ok(FidelityEvaluator::new(
            self.target.clone(),
            states,
            rlcompile_core::fidelity::EvalMode::Exact,
            None,
        )?)
    }
}
