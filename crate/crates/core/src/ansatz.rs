//! Layered nearest-neighbour ansatz and random hidden targets.
//!
//! One layer is an RY rotation on every qubit (qubit order) followed by an
//! RZZ rotation on every connectivity pair (listed order). Parameters are
//! consumed layer by layer in exactly that order, so for a chain of `n`
//! qubits layer `l` owns indices `l·(2n−1) .. (l+1)·(2n−1)`: first the `n`
//! RY angles, then the `n−1` RZZ angles.

use std::ops::{Deref, DerefMut};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::{Circuit, Gate};

/// Shape of the variational circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
    pub connectivity: Vec<[usize; 2]>,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize, connectivity: Vec<[usize; 2]>) -> Result<Self> {
        let spec = Self {
            n_qubits,
            depth,
            connectivity,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Linear chain `0 – 1 – … – n−1` with pairs in brick order: all even
    /// pairs `(0,1), (2,3), …` then all odd pairs `(1,2), (3,4), …`.
    pub fn chain(n_qubits: usize, depth: usize) -> Result<Self> {
        Self::new(n_qubits, depth, brick_chain(n_qubits))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidArgument(
                "ansatz needs at least one qubit".into(),
            ));
        }
        if self.depth == 0 {
            return Err(Error::InvalidArgument(
                "ansatz depth must be at least 1".into(),
            ));
        }
        // Reuses the circuit's pair validation.
        Circuit::<f64>::new(self.n_qubits, self.connectivity.clone()).map(|_| ())
    }

    /// Number of angles per layer.
    pub fn params_per_layer(&self) -> usize {
        self.n_qubits + self.connectivity.len()
    }

    pub fn param_count(&self) -> usize {
        self.depth * self.params_per_layer()
    }
}

/// Number of circuit angles for `spec`.
pub fn param_count(spec: &AnsatzSpec) -> usize {
    spec.param_count()
}

/// Brick-ordered nearest-neighbour pairs of an `n`-qubit chain.
pub fn brick_chain(n_qubits: usize) -> Vec<[usize; 2]> {
    let even = (0..n_qubits.saturating_sub(1)).step_by(2);
    let odd = (1..n_qubits.saturating_sub(1)).step_by(2);
    even.chain(odd).map(|i| [i, i + 1]).collect()
}

/// Layer count used by the sweep presets: 2, 3, 4, 5 for 5, 10, 15, 20
/// qubits, otherwise `round(log2 n)` (at least 1).
pub fn preset_depth(n_qubits: usize) -> usize {
    match n_qubits {
        5 => 2,
        10 => 3,
        15 => 4,
        20 => 5,
        n => ((n.max(1) as f64).log2().round() as usize).max(1),
    }
}

/// Circuit angles in radians, in the layer order documented at module level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector<T>(pub Vec<T>);

impl<T: Real> ParamVector<T> {
    pub fn zeros(len: usize) -> Self {
        Self(vec![T::zero(); len])
    }

    /// Angles i.i.d. uniform on `[0, 2π)`.
    pub fn uniform<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        Self(
            (0..len)
                .map(|_| T::of(rng.random::<f64>() * two_pi))
                .collect(),
        )
    }

    /// Copy with every angle mapped into `[0, 2π)`.
    pub fn wrapped(&self) -> Self {
        Self(self.0.iter().map(|&t| wrap_angle(t)).collect())
    }
}

impl<T> Deref for ParamVector<T> {
    type Target = Vec<T>;
    fn deref(&self) -> &Vec<T> {
        &self.0
    }
}

impl<T> DerefMut for ParamVector<T> {
    fn deref_mut(&mut self) -> &mut Vec<T> {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for ParamVector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let w = theta % two_pi;
    let w = if w < T::zero() { w + two_pi } else { w };
    // `w + 2π` can round up to exactly 2π for tiny negative inputs.
    if w >= two_pi {
        T::zero()
    } else {
        w
    }
}

/// Builds `V(θ)` for `spec`.
pub fn build_ansatz<T: Real>(spec: &AnsatzSpec, params: &[T]) -> Result<Circuit<T>> {
    let d = spec.param_count();
    if params.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: params.len(),
        });
    }
    let mut gates = Vec::with_capacity(d);
    let mut angles = params.iter().copied();
    for _ in 0..spec.depth {
        for q in 0..spec.n_qubits {
            gates.push(Gate::Ry {
                target: q,
                theta: angles.next().unwrap(),
            });
        }
        for &[a, b] in &spec.connectivity {
            gates.push(Gate::Rzz {
                a,
                b,
                theta: angles.next().unwrap(),
            });
        }
    }
    Circuit::with_gates(spec.n_qubits, spec.connectivity.clone(), gates)
}

/// Inverse circuit: reversed order, negated angles.
pub fn adjoint<T: Real>(circuit: &Circuit<T>) -> Circuit<T> {
    circuit.adjoint()
}

/// Hidden target `U` with the angles that generated it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetUnitary<T: Real> {
    pub spec: AnsatzSpec,
    pub circuit: Circuit<T>,
    /// Generating angles; for diagnostics only, never shown to an optimizer.
    pub hidden_params: ParamVector<T>,
}

impl<T: Real> TargetUnitary<T> {
    /// Target built from explicit angles.
    pub fn from_params(spec: &AnsatzSpec, params: ParamVector<T>) -> Result<Self> {
        let circuit = build_ansatz(spec, &params)?;
        Ok(Self {
            spec: spec.clone(),
            circuit,
            hidden_params: params,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.spec.n_qubits
    }
}

/// Random target: angles i.i.d. uniform on `[0, 2π)` pushed through the ansatz,
/// so a perfect compilation `θ = hidden_params` always exists.
pub fn random_target<T: Real, R: Rng + ?Sized>(
    spec: &AnsatzSpec,
    rng: &mut R,
) -> Result<TargetUnitary<T>> {
    spec.validate()?;
    let params = ParamVector::uniform(spec.param_count(), rng);
    TargetUnitary::from_params(spec, params)
}
