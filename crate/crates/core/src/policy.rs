//! Diagonal Gaussian policy over circuit angles and its REINFORCE gradient.
//!
//! The log-density is the standard one,
//! `log π(x) = −½ Σ_j [ln(2πσ_j) + (x_j − μ_j)²/σ_j]`, so
//! `∂/∂μ_j = (x_j − μ_j)/σ_j` and
//! `∂/∂σ_j = −(1/(2σ_j))·(1 − (x_j − μ_j)²/σ_j)`.

use log::warn;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `N(μ, diag(σ))` over angle vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolicy<T> {
    mu: Vec<T>,
    sigma: Vec<T>,
}

impl<T: Real> GaussianPolicy<T> {
    pub fn new(mu: Vec<T>, sigma: Vec<T>) -> Result<Self> {
        if mu.len() != sigma.len() {
            return Err(Error::LengthMismatch {
                expected: mu.len(),
                got: sigma.len(),
            });
        }
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite("mu"));
        }
        if sigma.iter().any(|s| !(s.is_finite() && *s > T::zero())) {
            return Err(Error::InvalidArgument(
                "sigma entries must be finite and positive".into(),
            ));
        }
        Ok(Self { mu, sigma })
    }

    /// Isotropic covariance `σ·I`.
    pub fn isotropic(mu: Vec<T>, sigma: T) -> Result<Self> {
        let d = mu.len();
        Self::new(mu, vec![sigma; d])
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    /// Mutable mean, for optimizer updates. Finiteness is the caller's job.
    pub fn mu_mut(&mut self) -> &mut [T] {
        &mut self.mu
    }

    pub fn set_sigma(&mut self, sigma: Vec<T>) -> Result<()> {
        *self = Self::new(std::mem::take(&mut self.mu), sigma)?;
        Ok(())
    }

    pub fn set_isotropic_sigma(&mut self, sigma: T) -> Result<()> {
        self.set_sigma(vec![sigma; self.dim()])
    }

    /// `θ_j = μ_j + √σ_j · z_j`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        self.mu
            .iter()
            .zip(&self.sigma)
            .map(|(&m, &s)| {
                let z: f64 = rng.sample(StandardNormal);
                m + s.sqrt() * T::of(z)
            })
            .collect()
    }

    pub fn log_density(&self, x: &[T]) -> Result<T> {
        self.check(x)?;
        let two_pi = T::PI() + T::PI();
        let half = T::of(0.5);
        Ok(self
            .mu
            .iter()
            .zip(&self.sigma)
            .zip(x)
            .map(|((&m, &s), &x)| -half * ((two_pi * s).ln() + (x - m) * (x - m) / s))
            .sum())
    }

    pub fn log_grad_mu(&self, x: &[T]) -> Result<Vec<T>> {
        self.check(x)?;
        Ok(self
            .mu
            .iter()
            .zip(&self.sigma)
            .zip(x)
            .map(|((&m, &s), &x)| (x - m) / s)
            .collect())
    }

    pub fn log_grad_sigma(&self, x: &[T]) -> Result<Vec<T>> {
        self.check(x)?;
        let half = T::of(0.5);
        Ok(self
            .mu
            .iter()
            .zip(&self.sigma)
            .zip(x)
            .map(|((&m, &s), &x)| -half / s * (T::one() - (x - m) * (x - m) / s))
            .collect())
    }

    fn check(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// `Σ(t) = (1 − t/T)·Σ_i + (t/T)·Σ_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSchedule {
    pub sigma_i: f64,
    pub sigma_f: f64,
    pub total: u64,
}

impl Default for CovarianceSchedule {
    fn default() -> Self {
        Self {
            sigma_i: 1e-2,
            sigma_f: 1e-5,
            total: 2000,
        }
    }
}

impl CovarianceSchedule {
    pub fn new(sigma_i: f64, sigma_f: f64, total: u64) -> Result<Self> {
        let s = Self {
            sigma_i,
            sigma_f,
            total,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_f > 0.0 && self.sigma_i >= self.sigma_f && self.sigma_i.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "schedule needs sigma_i >= sigma_f > 0, got {} and {}",
                self.sigma_i, self.sigma_f
            )));
        }
        if self.total == 0 {
            return Err(Error::InvalidArgument(
                "schedule length must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Diagonal value at iteration `t`. Past the end it stays at `Σ_f`.
    pub fn at(&self, t: u64) -> f64 {
        if t > self.total {
            warn!("schedule queried at t={t} past T={}, clamping", self.total);
            return self.sigma_f;
        }
        let frac = t as f64 / self.total as f64;
        (1.0 - frac) * self.sigma_i + frac * self.sigma_f
    }
}

/// Free-function form of [`CovarianceSchedule::at`].
pub fn schedule_sigma(t: u64, schedule: &CovarianceSchedule) -> f64 {
    schedule.at(t)
}

/// One batch of rollouts with its baseline and gradient estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutBatch<T> {
    pub samples: Vec<Vec<T>>,
    pub rewards: Vec<f64>,
    pub baseline: f64,
    pub grad_mu: Vec<T>,
    pub grad_sigma: Vec<T>,
    /// Set when every reward was equal, so the gradient is exactly zero.
    pub degenerate: bool,
}

/// `(1/N) Σ_g (r_g − b) · ∇ log π(θ_g)` with `b` the batch-mean reward.
pub fn estimate_policy_gradient<T: Real>(
    policy: &GaussianPolicy<T>,
    samples: Vec<Vec<T>>,
    rewards: Vec<f64>,
) -> Result<RolloutBatch<T>> {
    if samples.len() != rewards.len() {
        return Err(Error::LengthMismatch {
            expected: samples.len(),
            got: rewards.len(),
        });
    }
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 rollouts for a baseline, got {n}"
        )));
    }
    if rewards.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("rewards"));
    }
    let baseline = rewards.iter().sum::<f64>() / n as f64;
    let d = policy.dim();
    let mut grad_mu = vec![T::zero(); d];
    let mut grad_sigma = vec![T::zero(); d];
    let degenerate = rewards.iter().all(|&r| r == rewards[0]);
    if !degenerate {
        for (x, &r) in samples.iter().zip(&rewards) {
            let adv = T::of(r - baseline);
            for (g, s) in grad_mu.iter_mut().zip(policy.log_grad_mu(x)?) {
                *g += adv * s;
            }
            for (g, s) in grad_sigma.iter_mut().zip(policy.log_grad_sigma(x)?) {
                *g += adv * s;
            }
        }
        let inv = T::of(1.0 / n as f64);
        grad_mu
            .iter_mut()
            .chain(grad_sigma.iter_mut())
            .for_each(|g| *g *= inv);
    } else {
        for x in &samples {
            policy.check(x)?;
        }
    }
    if grad_mu.iter().chain(&grad_sigma).any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("policy gradient"));
    }
    Ok(RolloutBatch {
        samples,
        rewards,
        baseline,
        grad_mu,
        grad_sigma,
        degenerate,
    })
}
