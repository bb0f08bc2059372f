use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derived_stream, label_key};

/// Settings shared by the derivative-free optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DfoOptions {
    /// Budget in objective evaluations.
    pub max_iters: u64,
    /// Edge length of the initial Nelder-Mead simplex.
    pub initial_simplex_scale: f64,
    /// First trial step of Powell's line-search bracket.
    pub line_bracket: f64,
    /// Relative tolerance of Brent's line minimizer.
    pub line_tol: f64,
    /// Convergence tolerance on objective values.
    pub ftol: f64,
    /// Convergence tolerance on simplex size (Nelder-Mead only).
    pub xtol: f64,
    /// Restart from a random point near the best one after each
    /// convergence, until the budget is spent.
    pub restarts: bool,
    /// Width of the box, centred on the best point, that restart points are
    /// drawn from.
    pub restart_span: f64,
    /// Seed for restart points.
    pub seed: u64,
}

impl Default for DfoOptions {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            initial_simplex_scale: 0.25,
            line_bracket: 1.0,
            line_tol: 1e-6,
            ftol: 1e-8,
            xtol: 1e-6,
            restarts: false,
            restart_span: std::f64::consts::TAU,
            seed: 0,
        }
    }
}

impl DfoOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument(
                "max_iters must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("initial_simplex_scale", self.initial_simplex_scale),
            ("line_bracket", self.line_bracket),
            ("line_tol", self.line_tol),
            ("restart_span", self.restart_span),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [("ftol", self.ftol), ("xtol", self.xtol)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One objective evaluation as seen by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DfoEvaluation {
    /// 1-based evaluation index.
    pub eval: u64,
    pub value: f64,
    /// Best value over evaluations `1..=eval`.
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfoResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
    /// Sweeps (Powell) or simplex steps (Nelder-Mead), over all restarts.
    pub iterations: u64,
    /// Number of restarts taken.
    pub restarts: u64,
    /// Whether the last run stopped on tolerance rather than budget.
    pub converged: bool,
    pub trace: Vec<DfoEvaluation>,
}

/// Budgeted, best-tracking wrapper around a maximized objective. Internally
/// the optimizers minimize `−f`.
pub(super) struct Tracker<F> {
    objective: F,
    budget: u64,
    best_x: Vec<f64>,
    best_value: f64,
    trace: Vec<DfoEvaluation>,
}

/// Marker for an exhausted evaluation budget.
pub(super) struct Exhausted;

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    pub(super) fn new(objective: F, x0: &[f64], opts: &DfoOptions) -> Result<Self> {
        opts.validate()?;
        if x0.is_empty() {
            return Err(Error::InvalidArgument("x0 must be non-empty".into()));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("x0"));
        }
        Ok(Self {
            objective,
            budget: opts.max_iters,
            best_x: x0.to_vec(),
            best_value: f64::NEG_INFINITY,
            trace: Vec::new(),
        })
    }

    /// `−f(x)`, or [`Exhausted`] once the budget is spent.
    pub(super) fn cost(&mut self, x: &[f64]) -> std::result::Result<f64, Exhausted> {
        if self.trace.len() as u64 >= self.budget {
            return Err(Exhausted);
        }
        let mut value = (self.objective)(x);
        if value.is_nan() {
            value = f64::NEG_INFINITY;
        }
        if value > self.best_value {
            self.best_value = value;
            self.best_x.copy_from_slice(x);
        }
        self.trace.push(DfoEvaluation {
            eval: self.trace.len() as u64 + 1,
            value,
            best: self.best_value,
        });
        Ok(-value)
    }

    fn exhausted(&self) -> bool {
        self.trace.len() as u64 >= self.budget
    }
}

/// Runs `method` from `x0`, then from restart points while allowed.
pub(super) fn drive<F, M>(
    objective: F,
    x0: &[f64],
    opts: &DfoOptions,
    mut method: M,
) -> Result<DfoResult>
where
    F: FnMut(&[f64]) -> f64,
    M: FnMut(
        &mut Tracker<F>,
        &[f64],
        &DfoOptions,
        &mut u64,
    ) -> std::result::Result<bool, Exhausted>,
{
    let mut tracker = Tracker::new(objective, x0, opts)?;
    let mut rng = derived_stream(opts.seed, &[label_key("dfo-restart")]);
    let mut iterations = 0;
    let mut restarts = 0;
    let mut start = x0.to_vec();
    let converged = loop {
        let converged = method(&mut tracker, &start, opts, &mut iterations).unwrap_or(false);
        if !(converged && opts.restarts) || tracker.exhausted() {
            break converged;
        }
        restarts += 1;
        let half = 0.5 * opts.restart_span;
        start = tracker
            .best_x
            .iter()
            .map(|b| b + rng.random_range(-half..half))
            .collect();
    };
    Ok(DfoResult {
        x: tracker.best_x,
        value: tracker.best_value,
        evaluations: tracker.trace.len() as u64,
        iterations,
        restarts,
        converged,
        trace: tracker.trace,
    })
}
