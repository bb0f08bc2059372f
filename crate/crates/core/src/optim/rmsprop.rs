use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// RMSprop accumulator and constants. Updates ascend: the step is added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsPropState<T> {
    pub sigma_g: Vec<T>,
    pub gamma: f64,
    pub eta: f64,
    pub epsilon: f64,
}

/// Constants only; the accumulator is sized on first use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RmsPropConfig {
    pub gamma: f64,
    pub eta: f64,
    pub epsilon: f64,
}

impl Default for RmsPropConfig {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            eta: 2.5e-3,
            epsilon: 1e-8,
        }
    }
}

impl RmsPropConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rmsprop gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rmsprop eta must be positive, got {}",
                self.eta
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rmsprop epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

impl<T: Real> RmsPropState<T> {
    pub fn new(dim: usize, config: RmsPropConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            sigma_g: vec![T::zero(); dim],
            gamma: config.gamma,
            eta: config.eta,
            epsilon: config.epsilon,
        })
    }

    pub fn config(&self) -> RmsPropConfig {
        RmsPropConfig {
            gamma: self.gamma,
            eta: self.eta,
            epsilon: self.epsilon,
        }
    }

    /// `σ_g ← γσ_g + (1−γ)g²`, then `params += η·g/√(σ_g + ε)`.
    ///
    /// Nothing is modified when the gradient has a non-finite entry.
    pub fn step(&mut self, params: &mut [T], grad: &[T]) -> Result<()> {
        for len in [params.len(), grad.len()] {
            if len != self.sigma_g.len() {
                return Err(Error::LengthMismatch {
                    expected: self.sigma_g.len(),
                    got: len,
                });
            }
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        let gamma = T::of(self.gamma);
        let keep = T::of(1.0 - self.gamma);
        let eta = T::of(self.eta);
        let eps = T::of(self.epsilon);
        for ((p, s), &g) in params.iter_mut().zip(&mut self.sigma_g).zip(grad) {
            *s = gamma * *s + keep * g * g;
            let denom = (*s + eps).sqrt();
            if denom > T::zero() {
                *p += eta * g / denom;
            }
        }
        Ok(())
    }
}

/// Functional form of [`RmsPropState::step`].
pub fn rmsprop_step<T: Real>(
    mut state: RmsPropState<T>,
    mut params: Vec<T>,
    grad: &[T],
) -> Result<(Vec<T>, RmsPropState<T>)> {
    state.step(&mut params, grad)?;
    Ok((params, state))
}
