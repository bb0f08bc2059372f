use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};

use super::gate::{Gate, Targets};
use super::noise::{Fault, NoiseModel};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ordered gate sequence over a fixed register and connectivity graph.
///
/// Every two-qubit gate must act on a pair listed in `connectivity`
/// (in either orientation). Serializes as
/// `{"n_qubits": n, "connectivity": [[i, j], …], "gates": [{"kind", "angle"?, "targets"}, …]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Circuit<T: Real> {
    n_qubits: usize,
    connectivity: Vec<[usize; 2]>,
    gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    /// Empty circuit. Pairs must be in range, non-degenerate and distinct.
    pub fn new(n_qubits: usize, connectivity: Vec<[usize; 2]>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument(
                "circuit needs at least one qubit".into(),
            ));
        }
        validate_pairs(n_qubits, &connectivity)?;
        Ok(Self {
            n_qubits,
            connectivity,
            gates: Vec::new(),
        })
    }

    /// Builds a circuit and validates every gate.
    pub fn with_gates(
        n_qubits: usize,
        connectivity: Vec<[usize; 2]>,
        gates: Vec<Gate<T>>,
    ) -> Result<Self> {
        let mut c = Self::new(n_qubits, connectivity)?;
        c.gates.reserve(gates.len());
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if let Targets::Two(a, b) = gate.targets() {
            if !self.is_connected(a, b) {
                return Err(Error::PairNotConnected(a, b));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn connectivity(&self) -> &[[usize; 2]] {
        &self.connectivity
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn is_connected(&self, a: usize, b: usize) -> bool {
        self.connectivity
            .iter()
            .any(|&[i, j]| (i == a && j == b) || (i == b && j == a))
    }

    /// Reversed gate order with every gate inverted.
    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            connectivity: self.connectivity.clone(),
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Appends all gates of `other`, which must share the register size.
    /// Connectivity is merged.
    pub fn extend(&mut self, other: &Circuit<T>) -> Result<()> {
        self.check_register(other.n_qubits)?;
        for &[a, b] in &other.connectivity {
            if !self.is_connected(a, b) {
                self.connectivity.push([a, b]);
            }
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Number of single-qubit fault sites a noisy run of this circuit has.
    pub fn fault_sites(&self) -> usize {
        self.gates.iter().map(|g| g.kind().arity()).sum()
    }

    /// Noiseless evolution in place.
    pub fn apply_to(&self, state: &mut StateVector<T>) -> Result<()> {
        self.check_register(state.n_qubits())?;
        self.apply_unchecked(state);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, state: &mut StateVector<T>) {
        let amps = state.amplitudes_mut();
        for g in &self.gates {
            g.apply_unchecked(amps);
        }
    }

    /// Evolution with an explicit list of Pauli faults. Faults are sorted by
    /// gate index; a fault with `after_gate = k` is applied right after gate `k`.
    pub fn apply_with_faults(&self, state: &mut StateVector<T>, faults: &[Fault]) -> Result<()> {
        self.check_register(state.n_qubits())?;
        for f in faults {
            if f.after_gate >= self.gates.len() || f.qubit >= self.n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "fault {f:?} outside circuit"
                )));
            }
        }
        debug_assert!(faults
            .windows(2)
            .all(|w| w[0].after_gate <= w[1].after_gate));
        self.apply_faults_unchecked(state, faults);
        Ok(())
    }

    pub(crate) fn apply_faults_unchecked(&self, state: &mut StateVector<T>, faults: &[Fault]) {
        let amps = state.amplitudes_mut();
        let mut next = faults.iter().peekable();
        for (k, g) in self.gates.iter().enumerate() {
            g.apply_unchecked(amps);
            while let Some(f) = next.next_if(|f| f.after_gate == k) {
                f.pauli.gate::<T>(f.qubit).apply_unchecked(amps);
            }
        }
    }

    fn check_register(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: n,
                right: self.n_qubits,
            });
        }
        Ok(())
    }
}

/// Applies `circuit` to `state`, inserting depolarizing faults drawn from `rng`
/// when a noise model is given.
pub fn apply_circuit<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    circuit: &Circuit<T>,
    noise: Option<&NoiseModel>,
    rng: &mut R,
) -> Result<()> {
    match noise {
        Some(model) if model.p() > 0.0 => {
            let faults = model.sample_faults(circuit, rng);
            circuit.apply_with_faults(state, &faults)
        }
        _ => circuit.apply_to(state),
    }
}

fn validate_pairs(n_qubits: usize, pairs: &[[usize; 2]]) -> Result<()> {
    for (k, &[a, b]) in pairs.iter().enumerate() {
        for q in [a, b] {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if a == b {
            return Err(Error::DuplicateTargets(a));
        }
        let dup = pairs[..k]
            .iter()
            .any(|&[i, j]| (i == a && j == b) || (i == b && j == a));
        if dup {
            return Err(Error::InvalidArgument(format!(
                "pair ({a}, {b}) listed twice"
            )));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct CircuitRepr<T: Real> {
    n_qubits: usize,
    connectivity: Vec<[usize; 2]>,
    gates: Vec<Gate<T>>,
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Circuit<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CircuitRepr::<T>::deserialize(deserializer)?;
        Circuit::with_gates(repr.n_qubits, repr.connectivity, repr.gates)
            .map_err(serde::de::Error::custom)
    }
}
