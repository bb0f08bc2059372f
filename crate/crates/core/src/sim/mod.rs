//! Dense statevector simulation of the RY/RX/RZZ/X/Y/Z/H gate set, with
//! depolarizing noise realized as Pauli trajectories.

mod circuit;
mod compiled;
mod gate;
mod kernels;
mod measure;
mod noise;
mod state;

pub use circuit::{apply_circuit, Circuit};
pub use compiled::CompiledCircuit;
pub use gate::{apply_gate, Gate, GateKind, Pauli, Targets};
pub use measure::{sample_outcomes, sample_zero_outcome};
pub use noise::{Fault, NoiseModel};
pub use state::{overlap_probability, StateVector};
