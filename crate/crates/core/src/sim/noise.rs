use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::gate::Pauli;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Single-qubit depolarizing noise after every gate.
///
/// `p` is the total Pauli-fault probability per qubit per gate; each of X, Y, Z
/// is drawn with probability `p/3`. Two-qubit gates get an independent fault
/// site on each of their qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    p: f64,
}

/// A Pauli inserted after gate `after_gate` on `qubit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fault {
    pub after_gate: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

impl NoiseModel {
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "depolarizing strength must be in [0, 1], got {p}"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Draws one trajectory's fault list for `circuit`, in gate order.
    ///
    /// For every gate and every qubit it touches, one uniform draw decides
    /// whether a fault fires; a second draw picks the Pauli.
    pub fn sample_faults<T: Real, R: Rng + ?Sized>(
        &self,
        circuit: &Circuit<T>,
        rng: &mut R,
    ) -> Vec<Fault> {
        let mut faults = Vec::new();
        if self.p == 0.0 {
            return faults;
        }
        for (k, g) in circuit.gates().iter().enumerate() {
            for qubit in g.targets().iter() {
                if rng.random::<f64>() < self.p {
                    let pauli = Pauli::ALL[rng.random_range(0..3)];
                    faults.push(Fault {
                        after_gate: k,
                        qubit,
                        pauli,
                    });
                }
            }
        }
        faults
    }
}
