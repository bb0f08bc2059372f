use num_complex::Complex;

use super::circuit::Circuit;
use super::gate::Gate;
use super::kernels;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
enum Op<T: Real> {
    Gate(Gate<T>),
    Diagonal(Vec<Complex<T>>),
}

/// Noiseless execution plan for a circuit, with runs of consecutive RZZ
/// gates fused into a single diagonal pass.
///
/// Worth building when the same circuit is applied to many states. Results
/// agree with [`Circuit::apply_to`] up to rounding, not bit for bit.
#[derive(Debug, Clone)]
pub struct CompiledCircuit<T: Real> {
    n_qubits: usize,
    ops: Vec<Op<T>>,
}

impl<T: Real> CompiledCircuit<T> {
    pub fn new(circuit: &Circuit<T>) -> Self {
        let n = circuit.n_qubits();
        let mut ops = Vec::new();
        let mut run: Vec<(usize, usize, T)> = Vec::new();
        for g in circuit.gates() {
            match *g {
                Gate::Rzz { a, b, theta } => run.push((a, b, theta)),
                other => {
                    flush(&mut ops, &mut run, n);
                    ops.push(Op::Gate(other));
                }
            }
        }
        flush(&mut ops, &mut run, n);
        Self { n_qubits: n, ops }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn apply_to(&self, state: &mut StateVector<T>) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: state.n_qubits(),
                right: self.n_qubits,
            });
        }
        self.apply_unchecked(state);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, state: &mut StateVector<T>) {
        let amps = state.amplitudes_mut();
        for op in &self.ops {
            match op {
                Op::Gate(g) => g.apply_unchecked(amps),
                Op::Diagonal(d) => kernels::diagonal(amps, d),
            }
        }
    }
}

fn flush<T: Real>(ops: &mut Vec<Op<T>>, run: &mut Vec<(usize, usize, T)>, n: usize) {
    match run.len() {
        0 => {}
        1 => {
            let (a, b, theta) = run[0];
            ops.push(Op::Gate(Gate::Rzz { a, b, theta }));
        }
        _ => {
            let dim = 1usize << n;
            let diag = (0..dim)
                .map(|i| {
                    // exp(−i Σ θ z_a z_b) with z = +1 on even parity
                    let phase: T = run
                        .iter()
                        .map(|&(a, b, theta)| {
                            if ((i >> a) ^ (i >> b)) & 1 == 0 {
                                theta
                            } else {
                                -theta
                            }
                        })
                        .sum();
                    let (s, c) = phase.sin_cos();
                    Complex::new(c, -s)
                })
                .collect();
            ops.push(Op::Diagonal(diag));
        }
    }
    run.clear();
}
