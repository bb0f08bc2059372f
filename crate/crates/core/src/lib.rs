//! Variational circuit compilation by policy gradient.
//!
//! A hidden target `U` is built from a layered RY/RZZ ansatz. A trainable
//! copy `V(θ)` is fitted so that `V(θ)†U` acts as the identity on a set of
//! product input states. The crate provides the statevector simulator, the
//! ansatz, the fidelity estimator, a Gaussian policy with its REINFORCE
//! gradient, and RMSprop plus two derivative-free optimizers.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar.

pub mod ansatz;
pub mod error;
pub mod fidelity;
pub mod optim;
pub mod policy;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Real;

pub type StateVectorF64 = sim::StateVector<f64>;
pub type StateVectorF32 = sim::StateVector<f32>;
pub type CircuitF64 = sim::Circuit<f64>;
pub type CircuitF32 = sim::Circuit<f32>;
pub type GateF64 = sim::Gate<f64>;
pub type GateF32 = sim::Gate<f32>;
pub type TargetUnitaryF64 = ansatz::TargetUnitary<f64>;
pub type TargetUnitaryF32 = ansatz::TargetUnitary<f32>;
pub type InitialStateSetF64 = fidelity::InitialStateSet<f64>;
pub type InitialStateSetF32 = fidelity::InitialStateSet<f32>;
pub type FidelityEvaluatorF64 = fidelity::FidelityEvaluator<f64>;
pub type FidelityEvaluatorF32 = fidelity::FidelityEvaluator<f32>;
pub type GaussianPolicyF64 = policy::GaussianPolicy<f64>;
pub type GaussianPolicyF32 = policy::GaussianPolicy<f32>;
pub type RmsPropStateF64 = optim::RmsPropState<f64>;
pub type RmsPropStateF32 = optim::RmsPropState<f32>;
