//! Policy-gradient and derivative-free training loops on one instance.

use std::cell::{Cell, RefCell};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use rlcompile_core::fidelity::{rollout_seed, FidelityEvaluator};
use rlcompile_core::optim::{nelder_mead, powell, RmsPropState};
use rlcompile_core::policy::{estimate_policy_gradient, GaussianPolicy};
use rlcompile_core::rng::{derive_seed, derived_stream, label_key};
use rlcompile_core::Real;

use crate::config::{ExperimentConfig, Precision};
use crate::error::{ExpError, ExpResult};
use crate::instance::Instance;
use crate::trace::{Method, TraceRow, TrainingTrace};

/// Run label keyed on everything that changes the objective, so differently
/// configured runs in one cell draw independent streams.
pub fn run_label(config: &ExperimentConfig, method: Method) -> String {
    format!("{method}|{}|{}", config.repetitions_label(), config.noise_p)
}

/// Trains with the configured method. `budget` overrides the DFO evaluation
/// budget and is ignored for PG.
pub fn train<T: Real>(
    config: &ExperimentConfig,
    instance: &Instance<T>,
    method: Method,
    budget: Option<u64>,
) -> ExpResult<TrainingTrace> {
    let seed = instance.seeds.run(&run_label(config, method));
    match method {
        Method::Pg => train_pg(config, instance, seed),
        Method::NelderMead | Method::Powell => {
            let budget = budget.unwrap_or(match method {
                Method::NelderMead => config.dfo.nelder_mead_budget,
                _ => config.dfo.powell_budget,
            });
            train_dfo(config, instance, method, budget, seed)
        }
    }
}

/// Builds the cell instance at the configured precision and trains on it.
pub fn run_method(
    config: &ExperimentConfig,
    seed_index: u64,
    method: Method,
    budget: Option<u64>,
) -> ExpResult<TrainingTrace> {
    match config.precision {
        Precision::F64 => train(
            config,
            &Instance::<f64>::new(config, seed_index)?,
            method,
            budget,
        ),
        Precision::F32 => train(
            config,
            &Instance::<f32>::new(config, seed_index)?,
            method,
            budget,
        ),
    }
}

fn empty_trace(config: &ExperimentConfig, method: Method, seed_index: u64) -> TrainingTrace {
    TrainingTrace {
        method,
        n_qubits: config.n_qubits,
        depth: config.depth(),
        repetitions: config.repetitions_label(),
        noise_p: config.noise_p,
        seed_index,
        rows: Vec::new(),
        j_inf: f64::NAN,
        j_inf_std: f64::NAN,
        theta_star: Vec::new(),
        theta_star_fidelity: f64::NAN,
        iters_run: 0,
        evals_run: 0,
        wallclock_s: 0.0,
        flags: Vec::new(),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    // Clamped away from zero so every recorded time is positive.
    (start.elapsed().as_secs_f64() * 1e3).max(1e-6)
}

fn reward<T: Real>(
    config: &ExperimentConfig,
    evaluator: &FidelityEvaluator<T>,
    theta: &[T],
    seed: u64,
) -> ExpResult<f64> {
    let r = if config.sample_one_state {
        let idx = derived_stream(seed, &[label_key("state")]).random_range(0..evaluator.len());
        evaluator.evaluate_member(&evaluator.v_dagger(theta)?, idx, seed)?
    } else {
        evaluator.evaluate_params(theta, seed)?.value
    };
    Ok(r)
}

/// REINFORCE with the batch-mean baseline and RMSprop on the policy mean.
///
/// Iteration `t` (1-based) samples at `Σ(t − 1)`, so the first batch uses
/// `Σ_i` and the last uses the value just before `Σ_f`. Rollout rewards are
/// evaluated in parallel and reduced in rollout order.
pub fn train_pg<T: Real>(
    config: &ExperimentConfig,
    instance: &Instance<T>,
    seed: u64,
) -> ExpResult<TrainingTrace> {
    let start = Instant::now();
    let evaluator = instance.evaluator(config)?;
    let schedule = config.covariance_schedule()?;
    let d = instance.spec.param_count();
    let mut policy = GaussianPolicy::isotropic(instance.init.clone(), T::of(schedule.sigma_i))?;
    let mut opt = RmsPropState::<T>::new(d, config.rmsprop)?;
    let mut sigma_opt = RmsPropState::<T>::new(d, config.rmsprop)?;
    let mut trace = empty_trace(config, Method::Pg, instance.seeds.seed_index);
    let mut best = f64::NEG_INFINITY;
    let mut degenerate_count = 0u64;
    let n = config.rollouts as u64;

    for t in 1..=config.iterations {
        if !config.learn_sigma {
            policy.set_isotropic_sigma(T::of(schedule.at(t - 1)))?;
        }
        let mut sampler = derived_stream(seed, &[t, label_key("policy")]);
        let samples: Vec<Vec<T>> = (0..n).map(|_| policy.sample(&mut sampler)).collect();
        let rewards = samples
            .par_iter()
            .enumerate()
            .map(|(g, theta)| reward(config, &evaluator, theta, rollout_seed(seed, t, g as u64)))
            .collect::<ExpResult<Vec<f64>>>()?;
        if let Some(g) = rewards.iter().position(|r| !r.is_finite()) {
            return Err(ExpError::Runtime(format!(
                "non-finite reward at iteration {t}, rollout {g}"
            )));
        }
        let batch = estimate_policy_gradient(&policy, samples, rewards)?;
        opt.step(policy.mu_mut(), &batch.grad_mu)?;
        if config.learn_sigma {
            let mut sigma = policy.sigma().to_vec();
            sigma_opt.step(&mut sigma, &batch.grad_sigma)?;
            let floor = T::of(schedule.sigma_f);
            policy.set_sigma(sigma.into_iter().map(|s| s.max(floor)).collect())?;
        }

        let mean = batch.rewards.iter().sum::<f64>() / n as f64;
        let std = (batch
            .rewards
            .iter()
            .map(|r| (r - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64)
            .sqrt();
        best = best.max(mean);
        degenerate_count += batch.degenerate as u64;
        let grad_norm = batch
            .grad_mu
            .iter()
            .map(|g| g.as_f64().powi(2))
            .sum::<f64>()
            .sqrt();
        trace.rows.push(TraceRow {
            iteration: t,
            evals: t * n,
            reward_mean: mean,
            reward_std: Some(std),
            best,
            sigma: Some(batch_sigma(&policy)),
            baseline: Some(batch.baseline),
            grad_norm: Some(grad_norm),
            degenerate: batch.degenerate,
            wall_ms: elapsed_ms(start),
        });
    }

    if degenerate_count > 0 {
        trace
            .flags
            .push(format!("zero_gradient_batches={degenerate_count}"));
    }
    trace.theta_star = policy.mu().iter().map(|v| v.as_f64()).collect();
    trace.theta_star_fidelity = instance
        .exact_evaluator(&instance.train_states)?
        .evaluate_params(policy.mu(), 0)?
        .value;
    trace.finish_stats();
    trace.wallclock_s = elapsed_ms(start) / 1e3;
    Ok(trace)
}

fn batch_sigma<T: Real>(policy: &GaussianPolicy<T>) -> f64 {
    let s = policy.sigma();
    s.iter().map(|v| v.as_f64()).sum::<f64>() / s.len() as f64
}

/// Nelder-Mead or Powell on the raw angles, one trace row per evaluation.
pub fn train_dfo<T: Real>(
    config: &ExperimentConfig,
    instance: &Instance<T>,
    method: Method,
    budget: u64,
    seed: u64,
) -> ExpResult<TrainingTrace> {
    let start = Instant::now();
    let evaluator = instance.evaluator(config)?;
    let x0: Vec<f64> = instance.init.iter().map(|v| v.as_f64()).collect();
    let rows = RefCell::new(Vec::<TraceRow>::new());
    let failure = RefCell::new(None::<ExpError>);
    let count = Cell::new(0u64);
    let objective = |x: &[f64]| -> f64 {
        let e = count.get() + 1;
        count.set(e);
        let theta: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
        let value = match reward(config, &evaluator, &theta, derive_seed(seed, &[e])) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => {
                failure
                    .borrow_mut()
                    .get_or_insert(ExpError::Runtime(format!(
                        "non-finite reward at evaluation {e}"
                    )));
                f64::NAN
            }
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        };
        let mut rows = rows.borrow_mut();
        let best = rows.last().map_or(value, |r: &TraceRow| r.best.max(value));
        rows.push(TraceRow {
            iteration: e,
            evals: e,
            reward_mean: value,
            reward_std: None,
            best,
            sigma: None,
            baseline: None,
            grad_norm: None,
            degenerate: false,
            wall_ms: elapsed_ms(start),
        });
        value
    };
    let opts = config
        .dfo
        .options(budget, derive_seed(seed, &[label_key("restarts")]));
    let result = match method {
        Method::NelderMead => nelder_mead(objective, &x0, &opts)?,
        Method::Powell => powell(objective, &x0, &opts)?,
        Method::Pg => unreachable!("policy gradient is not a DFO method"),
    };
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let mut trace = empty_trace(config, method, instance.seeds.seed_index);
    trace.rows = rows.into_inner();
    trace.flags = dfo_flags(&result, &trace.rows);
    let theta: Vec<T> = result.x.iter().map(|&v| T::of(v)).collect();
    trace.theta_star = result.x;
    trace.theta_star_fidelity = instance
        .exact_evaluator(&instance.train_states)?
        .evaluate_params(&theta, 0)?
        .value;
    trace.finish_stats();
    trace.wallclock_s = elapsed_ms(start) / 1e3;
    Ok(trace)
}

fn dfo_flags(result: &rlcompile_core::optim::DfoResult, rows: &[TraceRow]) -> Vec<String> {
    let mut flags = Vec::new();
    if !result.converged {
        flags.push("budget_exhausted".to_string());
    }
    if result.restarts > 0 {
        flags.push(format!("restarts={}", result.restarts));
    }
    if rows
        .windows(2)
        .all(|w| w[0].reward_mean == w[1].reward_mean)
    {
        flags.push("flat_objective".to_string());
    }
    flags
}
