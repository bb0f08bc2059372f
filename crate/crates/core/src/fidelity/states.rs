use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::label_key;
use crate::scalar::Real;
use crate::sim::{Gate, StateVector};

/// Default memory ceiling for explicitly stored test vectors (1 GiB).
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Training-set size `max(15n, n²)`.
pub fn default_training_size(n_qubits: usize) -> usize {
    (15 * n_qubits).max(n_qubits * n_qubits)
}

/// Product-state preparation: single-qubit gates applied to `|0…0⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct PrepCircuit<T: Real> {
    pub label: String,
    pub n_qubits: usize,
    pub gates: Vec<Gate<T>>,
}

impl<T: Real> PrepCircuit<T> {
    pub fn new(label: impl Into<String>, n_qubits: usize, gates: Vec<Gate<T>>) -> Result<Self> {
        for g in &gates {
            g.validate(n_qubits)?;
            if g.kind().arity() != 1 {
                return Err(Error::InvalidArgument(
                    "preparation circuits contain single-qubit gates only".into(),
                ));
            }
        }
        Ok(Self {
            label: label.into(),
            n_qubits,
            gates,
        })
    }

    pub fn prepare(&self) -> StateVector<T> {
        let mut s = StateVector::zero(self.n_qubits);
        for g in &self.gates {
            s.apply(g).expect("validated on construction");
        }
        s
    }

    /// Per-qubit states whose tensor product is `|k⟩`.
    pub fn local_states(&self) -> Vec<[Complex<T>; 2]> {
        let mut locals = vec![
            [
                Complex::new(T::one(), T::zero()),
                Complex::new(T::zero(), T::zero())
            ];
            self.n_qubits
        ];
        for g in &self.gates {
            let q = g.targets().to_vec()[0];
            let m = g.matrix_1q().expect("single-qubit by construction");
            locals[q] = apply_2x2(&m, &locals[q]);
        }
        locals
    }

    /// Undoes the preparation: `P† |k⟩ = |0…0⟩`.
    pub fn unprepare(&self, state: &mut StateVector<T>) -> Result<()> {
        for g in self.gates.iter().rev() {
            state.apply(&g.adjoint())?;
        }
        Ok(())
    }
}

pub(crate) fn apply_2x2<T: Real>(m: &[Complex<T>; 4], v: &[Complex<T>; 2]) -> [Complex<T>; 2] {
    [m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]]
}

/// One initial state `|k⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub enum StateMember<T: Real> {
    Prep(PrepCircuit<T>),
    Vector {
        label: String,
        state: StateVector<T>,
    },
}

impl<T: Real> StateMember<T> {
    pub fn label(&self) -> &str {
        match self {
            StateMember::Prep(p) => &p.label,
            StateMember::Vector { label, .. } => label,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            StateMember::Prep(p) => p.n_qubits,
            StateMember::Vector { state, .. } => state.n_qubits(),
        }
    }

    pub fn prepare(&self) -> StateVector<T> {
        match self {
            StateMember::Prep(p) => p.prepare(),
            StateMember::Vector { state, .. } => state.clone(),
        }
    }

    /// Key used to derive this member's random stream.
    pub fn stream_key(&self) -> u64 {
        label_key(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSetKind {
    Training,
    TestZero,
    TestLocalXz,
    TestGlobalRandom,
}

/// Initial states over which rewards are averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct InitialStateSet<T: Real> {
    pub kind: StateSetKind,
    pub n_qubits: usize,
    pub members: Vec<StateMember<T>>,
}

impl<T: Real> InitialStateSet<T> {
    pub fn new(kind: StateSetKind, n_qubits: usize, members: Vec<StateMember<T>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("state set must not be empty".into()));
        }
        if let Some(bad) = members.iter().find(|m| m.n_qubits() != n_qubits) {
            return Err(Error::QubitMismatch {
                left: bad.n_qubits(),
                right: n_qubits,
            });
        }
        Ok(Self {
            kind,
            n_qubits,
            members,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Mean of `|⟨k_i|k_j⟩|²` over unordered pairs `i < j`; 0 for a singleton.
    pub fn mean_pairwise_overlap(&self) -> f64 {
        let states: Vec<StateVector<T>> = self.members.iter().map(|m| m.prepare()).collect();
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                total += states[i].overlap_probability(&states[j]).unwrap().as_f64();
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            total / pairs as f64
        }
    }
}

/// Local operation applied to one qubit of `|0⟩` when building training states.
#[derive(Debug, Clone, Copy, PartialEq)]
enum LocalOp {
    I,
    X,
    Y,
    Z,
    H,
    Rx(f64),
    Ry(f64),
}

impl LocalOp {
    fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        match rng.random_range(0..7) {
            0 => LocalOp::I,
            1 => LocalOp::X,
            2 => LocalOp::Y,
            3 => LocalOp::Z,
            4 => LocalOp::H,
            5 => LocalOp::Rx(rng.random::<f64>() * 2.0 * PI),
            _ => LocalOp::Ry(rng.random::<f64>() * 2.0 * PI),
        }
    }

    fn gate<T: Real>(self, q: usize) -> Option<Gate<T>> {
        match self {
            LocalOp::I => None,
            LocalOp::X => Some(Gate::X(q)),
            LocalOp::Y => Some(Gate::Y(q)),
            LocalOp::Z => Some(Gate::Z(q)),
            LocalOp::H => Some(Gate::H(q)),
            LocalOp::Rx(phi) => Some(Gate::Rx {
                target: q,
                theta: T::of(phi),
            }),
            LocalOp::Ry(phi) => Some(Gate::Ry {
                target: q,
                theta: T::of(phi),
            }),
        }
    }

    fn label(self) -> String {
        match self {
            LocalOp::I => "I".into(),
            LocalOp::X => "X".into(),
            LocalOp::Y => "Y".into(),
            LocalOp::Z => "Z".into(),
            LocalOp::H => "H".into(),
            LocalOp::Rx(phi) => format!("RX({phi:?})"),
            LocalOp::Ry(phi) => format!("RY({phi:?})"),
        }
    }
}

/// `m` distinct training states, each a product of one random local op per
/// qubit drawn uniformly from `{I, X, Y, Z, H, RX(φ), RY(φ)}` with
/// `φ ~ U[0, 2π)`. Duplicate labels are redrawn.
pub fn generate_training_states<T: Real, R: Rng + ?Sized>(
    n_qubits: usize,
    m: usize,
    rng: &mut R,
) -> Result<InitialStateSet<T>> {
    if m == 0 || n_qubits == 0 {
        return Err(Error::InvalidArgument("need m >= 1 and n >= 1".into()));
    }
    let max_draws = 1000 * m + 1000;
    let mut seen = HashSet::with_capacity(m);
    let mut members = Vec::with_capacity(m);
    let mut draws = 0;
    while members.len() < m {
        draws += 1;
        if draws > max_draws {
            return Err(Error::InvalidArgument(format!(
                "could not draw {m} distinct training states"
            )));
        }
        let ops: Vec<LocalOp> = (0..n_qubits).map(|_| LocalOp::draw(rng)).collect();
        let label = ops
            .iter()
            .map(|op| op.label())
            .collect::<Vec<_>>()
            .join("|");
        if !seen.insert(label.clone()) {
            continue;
        }
        let gates = ops
            .iter()
            .enumerate()
            .filter_map(|(q, op)| op.gate(q))
            .collect();
        members.push(StateMember::Prep(PrepCircuit::new(label, n_qubits, gates)?));
    }
    InitialStateSet::new(StateSetKind::Training, n_qubits, members)
}

/// Test states of the requested family.
///
/// * `TestZero`: just `|0…0⟩`, whatever `count` is.
/// * `TestLocalXz`: products of `RY(φ_q)|0⟩`, i.e. random Bloch vectors in the XZ plane.
/// * `TestGlobalRandom`: real Gaussian vectors of dimension `2^n`, normalized.
///   Fails if `count · 2^n` amplitudes exceed `memory_budget` bytes.
pub fn generate_test_states<T: Real, R: Rng + ?Sized>(
    n_qubits: usize,
    kind: StateSetKind,
    count: usize,
    memory_budget: usize,
    rng: &mut R,
) -> Result<InitialStateSet<T>> {
    if count == 0 || n_qubits == 0 {
        return Err(Error::InvalidArgument("need count >= 1 and n >= 1".into()));
    }
    let members = match kind {
        StateSetKind::Training => {
            return Err(Error::InvalidArgument(
                "use generate_training_states for training sets".into(),
            ))
        }
        StateSetKind::TestZero => vec![StateMember::Prep(PrepCircuit::new(
            "zero",
            n_qubits,
            vec![],
        )?)],
        StateSetKind::TestLocalXz => (0..count)
            .map(|i| {
                let gates = (0..n_qubits)
                    .map(|q| Gate::Ry {
                        target: q,
                        theta: T::of(rng.random::<f64>() * 2.0 * PI),
                    })
                    .collect();
                PrepCircuit::new(format!("xz-{i}"), n_qubits, gates).map(StateMember::Prep)
            })
            .collect::<Result<_>>()?,
        StateSetKind::TestGlobalRandom => {
            let needed = count
                .saturating_mul(1usize << n_qubits)
                .saturating_mul(2 * std::mem::size_of::<T>());
            if needed > memory_budget {
                return Err(Error::MemoryBudget {
                    needed,
                    budget: memory_budget,
                });
            }
            (0..count)
                .map(|i| StateMember::Vector {
                    label: format!("global-{i}"),
                    state: StateVector::random_real(n_qubits, rng),
                })
                .collect()
        }
    };
    InitialStateSet::new(kind, n_qubits, members)
}
