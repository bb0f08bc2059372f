//! Run configuration. Deserialized from JSON with every field optional;
//! unknown keys are rejected.

use std::path::{Path, PathBuf};

use rlcompile_core::ansatz::{brick_chain, preset_depth, AnsatzSpec};
use rlcompile_core::fidelity::{default_training_size, EvalMode};
use rlcompile_core::optim::{DfoOptions, RmsPropConfig};
use rlcompile_core::policy::CovarianceSchedule;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, ExpResult};

/// Largest register the presets accept in exact mode and in shot mode.
pub const MAX_QUBITS_EXACT: usize = 12;
pub const MAX_QUBITS_SHOTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    #[default]
    F64,
    F32,
}

/// Starting mean of the policy (and starting point of the DFO methods).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Uniform on `[0, 2π)` per angle, drawn from the cell's own stream.
    #[default]
    Random,
    /// All angles zero, so `V` starts as the identity.
    Zero,
    /// The hidden target angles themselves.
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub sigma_i: f64,
    pub sigma_f: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            sigma_i: 1e-2,
            sigma_f: 1e-5,
        }
    }
}

/// Derivative-free settings. The evaluation budget and seed are supplied per
/// run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DfoConfig {
    pub nelder_mead_budget: u64,
    pub powell_budget: u64,
    pub initial_simplex_scale: f64,
    pub line_bracket: f64,
    pub line_tol: f64,
    pub ftol: f64,
    pub xtol: f64,
    pub restarts: bool,
}

impl Default for DfoConfig {
    fn default() -> Self {
        let d = DfoOptions::default();
        Self {
            nelder_mead_budget: 10_000,
            powell_budget: 50_000,
            initial_simplex_scale: d.initial_simplex_scale,
            line_bracket: d.line_bracket,
            line_tol: d.line_tol,
            ftol: d.ftol,
            xtol: d.xtol,
            restarts: d.restarts,
        }
    }
}

impl DfoConfig {
    pub fn options(&self, budget: u64, seed: u64) -> DfoOptions {
        DfoOptions {
            max_iters: budget,
            initial_simplex_scale: self.initial_simplex_scale,
            line_bracket: self.line_bracket,
            line_tol: self.line_tol,
            ftol: self.ftol,
            xtol: self.xtol,
            restarts: self.restarts,
            restart_span: std::f64::consts::TAU,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    /// Ansatz depth; `None` picks the preset for `n_qubits`.
    pub depth: Option<usize>,
    /// Explicit coupling pairs; `None` is the brick-ordered chain.
    pub connectivity: Option<Vec<[usize; 2]>>,
    /// Training-set size; `None` is `max(15n, n²)`.
    pub m_train: Option<usize>,
    pub rollouts: usize,
    /// Policy-gradient iterations T.
    pub iterations: u64,
    /// Measurement shots per state and rollout; `None` is exact mode.
    pub shots: Option<u64>,
    /// Resample noise for every shot instead of once per state and rollout.
    pub faults_per_shot: bool,
    /// Depolarizing probability per gate and qubit.
    pub noise_p: f64,
    pub schedule: ScheduleConfig,
    pub rmsprop: RmsPropConfig,
    /// Also ascend the covariance with its own RMSprop state.
    pub learn_sigma: bool,
    /// Reward each rollout on one random training state instead of all.
    pub sample_one_state: bool,
    pub init: InitMode,
    pub dfo: DfoConfig,
    pub precision: Precision,
    /// Fill the wall-clock columns of CSV outputs.
    pub timing: bool,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_qubits: 5,
            depth: None,
            connectivity: None,
            m_train: None,
            rollouts: 20,
            iterations: 2000,
            shots: None,
            faults_per_shot: false,
            noise_p: 0.0,
            schedule: ScheduleConfig::default(),
            rmsprop: RmsPropConfig::default(),
            learn_sigma: false,
            sample_one_state: false,
            init: InitMode::default(),
            dfo: DfoConfig::default(),
            precision: Precision::default(),
            timing: false,
            master_seed: 0,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> ExpResult<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| ExpError::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> ExpResult<Self> {
        Self::from_json(&read_config_text(path)?)
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or_else(|| preset_depth(self.n_qubits))
    }

    pub fn m_train(&self) -> usize {
        self.m_train
            .unwrap_or_else(|| default_training_size(self.n_qubits))
    }

    pub fn ansatz(&self) -> ExpResult<AnsatzSpec> {
        let pairs = self
            .connectivity
            .clone()
            .unwrap_or_else(|| brick_chain(self.n_qubits));
        Ok(AnsatzSpec::new(self.n_qubits, self.depth(), pairs)?)
    }

    pub fn eval_mode(&self) -> EvalMode {
        match self.shots {
            None => EvalMode::Exact,
            Some(shots) => EvalMode::Shots {
                shots,
                faults_per_shot: self.faults_per_shot,
            },
        }
    }

    pub fn covariance_schedule(&self) -> ExpResult<CovarianceSchedule> {
        Ok(CovarianceSchedule::new(
            self.schedule.sigma_i,
            self.schedule.sigma_f,
            self.iterations.max(1),
        )?)
    }

    /// `"exact"` or the shot count, as written to the repetitions column.
    pub fn repetitions_label(&self) -> String {
        self.shots
            .map_or_else(|| "exact".to_string(), |s| s.to_string())
    }

    pub fn validate(&self) -> ExpResult<()> {
        let bad = |msg: String| Err(ExpError::ConfigInvalid(msg));
        if self.n_qubits == 0 {
            return bad("n_qubits must be at least 1".into());
        }
        let cap = if self.shots.is_some() {
            MAX_QUBITS_SHOTS
        } else {
            MAX_QUBITS_EXACT
        };
        if self.n_qubits > cap {
            return bad(format!(
                "n_qubits = {} exceeds the desk-scale cap of {cap} for this mode",
                self.n_qubits
            ));
        }
        if self.depth == Some(0) {
            return bad("depth must be at least 1".into());
        }
        if self.m_train == Some(0) {
            return bad("m_train must be at least 1".into());
        }
        if self.rollouts < 2 {
            return bad("rollouts must be at least 2".into());
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.shots == Some(0) {
            return bad("shots must be at least 1 (omit for exact mode)".into());
        }
        if !(0.0..=1.0).contains(&self.noise_p) {
            return bad(format!("noise_p must lie in [0, 1], got {}", self.noise_p));
        }
        if self.dfo.nelder_mead_budget == 0 || self.dfo.powell_budget == 0 {
            return bad("DFO budgets must be at least 1".into());
        }
        let invalid = |e: ExpError| ExpError::ConfigInvalid(e.to_string());
        self.ansatz().map_err(invalid)?;
        self.covariance_schedule().map_err(invalid)?;
        self.rmsprop
            .validate()
            .and_then(|_| self.dfo.options(1, 0).validate())
            .map_err(|e| ExpError::ConfigInvalid(e.to_string()))?;
        Ok(())
    }
}

pub(crate) fn read_config_text(path: &Path) -> ExpResult<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ExpError::ConfigNotFound(path.to_path_buf()),
        _ => ExpError::ConfigInvalid(format!("{}: {e}", path.display())),
    })
}
