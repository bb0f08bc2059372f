use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::kernels;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gate families supported by the simulator.
///
/// Rotations use the half-angle-free convention `R_P(θ) = exp(−i P θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RY,
    RX,
    RZZ,
    X,
    Y,
    Z,
    H,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::RY => "RY",
            GateKind::RX => "RX",
            GateKind::RZZ => "RZZ",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::RZZ => 2,
            _ => 1,
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(self, GateKind::RY | GateKind::RX | GateKind::RZZ)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single gate with its targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<T: Real> {
    Ry { target: usize, theta: T },
    Rx { target: usize, theta: T },
    Rzz { a: usize, b: usize, theta: T },
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
}

/// Pauli operator used for fault insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn gate<T: Real>(self, qubit: usize) -> Gate<T> {
        match self {
            Pauli::X => Gate::X(qubit),
            Pauli::Y => Gate::Y(qubit),
            Pauli::Z => Gate::Z(qubit),
        }
    }
}

impl<T: Real> Gate<T> {
    /// Builds a gate from its parts, enforcing arity and angle presence.
    pub fn new(kind: GateKind, angle: Option<T>, targets: &[usize]) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::TargetArity {
                kind: kind.name(),
                expected: kind.arity(),
                got: targets.len(),
            });
        }
        match (kind.is_parametric(), angle) {
            (true, None) => return Err(Error::MissingAngle(kind.name())),
            (false, Some(_)) => return Err(Error::UnexpectedAngle(kind.name())),
            _ => {}
        }
        let gate = match kind {
            GateKind::RY => Gate::Ry {
                target: targets[0],
                theta: angle.unwrap(),
            },
            GateKind::RX => Gate::Rx {
                target: targets[0],
                theta: angle.unwrap(),
            },
            GateKind::RZZ => {
                if targets[0] == targets[1] {
                    return Err(Error::DuplicateTargets(targets[0]));
                }
                Gate::Rzz {
                    a: targets[0],
                    b: targets[1],
                    theta: angle.unwrap(),
                }
            }
            GateKind::X => Gate::X(targets[0]),
            GateKind::Y => Gate::Y(targets[0]),
            GateKind::Z => Gate::Z(targets[0]),
            GateKind::H => Gate::H(targets[0]),
        };
        Ok(gate)
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Ry { .. } => GateKind::RY,
            Gate::Rx { .. } => GateKind::RX,
            Gate::Rzz { .. } => GateKind::RZZ,
            Gate::X(_) => GateKind::X,
            Gate::Y(_) => GateKind::Y,
            Gate::Z(_) => GateKind::Z,
            Gate::H(_) => GateKind::H,
        }
    }

    pub fn angle(&self) -> Option<T> {
        match *self {
            Gate::Ry { theta, .. } | Gate::Rx { theta, .. } | Gate::Rzz { theta, .. } => {
                Some(theta)
            }
            _ => None,
        }
    }

    /// Target qubits, first slot always filled; second only for RZZ.
    pub fn targets(&self) -> Targets {
        match *self {
            Gate::Ry { target, .. } | Gate::Rx { target, .. } => Targets::One(target),
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::H(q) => Targets::One(q),
            Gate::Rzz { a, b, .. } => Targets::Two(a, b),
        }
    }

    /// Inverse gate: negated angle for rotations, itself for the Paulis and H.
    pub fn adjoint(&self) -> Self {
        match *self {
            Gate::Ry { target, theta } => Gate::Ry {
                target,
                theta: -theta,
            },
            Gate::Rx { target, theta } => Gate::Rx {
                target,
                theta: -theta,
            },
            Gate::Rzz { a, b, theta } => Gate::Rzz {
                a,
                b,
                theta: -theta,
            },
            other => other,
        }
    }

    /// Checks targets against a register size and the angle for finiteness.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.targets().iter() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if let Targets::Two(a, b) = self.targets() {
            if a == b {
                return Err(Error::DuplicateTargets(a));
            }
        }
        if let Some(theta) = self.angle() {
            if !theta.is_finite() {
                return Err(Error::NonFiniteAngle(self.kind().name()));
            }
        }
        Ok(())
    }

    /// Applies the gate without validation. Callers must have validated the
    /// gate against the state's register.
    #[inline]
    pub(crate) fn apply_unchecked(&self, amps: &mut [Complex<T>]) {
        match *self {
            Gate::Ry { target, theta } => {
                let (s, c) = theta.sin_cos();
                kernels::rotation_y(amps, target, c, s);
            }
            Gate::Rx { target, theta } => {
                let (s, c) = theta.sin_cos();
                kernels::rotation_x(amps, target, c, s);
            }
            Gate::Rzz { a, b, theta } => kernels::rotation_zz(amps, a, b, theta),
            Gate::X(q) => kernels::pauli_x(amps, q),
            Gate::Y(q) => kernels::pauli_y(amps, q),
            Gate::Z(q) => kernels::pauli_z(amps, q),
            Gate::H(q) => kernels::hadamard(amps, q),
        }
    }

    /// 2×2 matrix (row-major) of a single-qubit gate, `None` for RZZ.
    pub fn matrix_1q(&self) -> Option<[Complex<T>; 4]> {
        let z = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        let m = match *self {
            Gate::Ry { theta, .. } => {
                let (s, c) = theta.sin_cos();
                [c.into(), (-s).into(), s.into(), c.into()]
            }
            Gate::Rx { theta, .. } => {
                let (s, c) = theta.sin_cos();
                [c.into(), -i * s, -i * s, c.into()]
            }
            Gate::X(_) => [z, one, one, z],
            Gate::Y(_) => [z, -i, i, z],
            Gate::Z(_) => [one, z, z, -one],
            Gate::H(_) => {
                let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                [h, h, h, -h]
            }
            Gate::Rzz { .. } => return None,
        };
        Some(m)
    }
}

impl<T: Real> StateVector<T> {
    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits())?;
        gate.apply_unchecked(self.amplitudes_mut());
        Ok(())
    }
}

/// Returns the image of `state` under `gate`.
pub fn apply_gate<T: Real>(state: &StateVector<T>, gate: &Gate<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Target list of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Targets {
    One(usize),
    Two(usize, usize),
}

impl Targets {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            Targets::One(q) => (q, None),
            Targets::Two(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GateRepr<T> {
    kind: GateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<T>,
    targets: Vec<usize>,
}

impl<T: Real + Serialize> Serialize for Gate<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GateRepr {
            kind: self.kind(),
            angle: self.angle(),
            targets: self.targets().to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for Gate<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = GateRepr::<T>::deserialize(deserializer)?;
        Gate::new(repr.kind, repr.angle, &repr.targets).map_err(serde::de::Error::custom)
    }
}
