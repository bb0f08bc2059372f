//! Independent oracles shared by the integration tests. Each check returns
//! the measured quantity so callers choose how to assert or report it.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::seq::index::sample;
use rand::Rng;
use rlcompile_core::ansatz::{random_target, AnsatzSpec, ParamVector, TargetUnitary};
use rlcompile_core::fidelity::{
    generate_training_states, hoeffding_bound, EvalMode, FidelityEvaluator, InitialStateSet,
    PrepCircuit, StateMember, StateSetKind,
};
use rlcompile_core::policy::{estimate_policy_gradient, GaussianPolicy};
use rlcompile_core::rng::stream;
use rlcompile_core::sim::{apply_circuit, Circuit, Gate, GateKind, NoiseModel, StateVector};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn one_qubit(kind: GateKind, theta: f64) -> DMatrix<C> {
    let (s, co) = theta.sin_cos();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = match kind {
        GateKind::RY => [c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)],
        GateKind::RX => [c(co, 0.), c(0., -s), c(0., -s), c(co, 0.)],
        GateKind::X => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        GateKind::Y => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        GateKind::Z => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        GateKind::H => [c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)],
        GateKind::RZZ => unreachable!(),
    };
    DMatrix::from_row_slice(2, 2, &m)
}

/// Full-register operator; qubit `q` is bit `q` of the basis index.
pub fn embed(n: usize, q: usize, m: &DMatrix<C>) -> DMatrix<C> {
    let mut out = DMatrix::<C>::identity(1, 1);
    for k in (0..n).rev() {
        let f = if k == q {
            m.clone()
        } else {
            DMatrix::identity(2, 2)
        };
        out = out.kronecker(&f);
    }
    out
}

/// Dense matrix written from the gate definitions, not from the kernels.
pub fn gate_matrix(n: usize, g: &Gate<f64>) -> DMatrix<C> {
    match *g {
        Gate::Rzz { a, b, theta } => {
            let dim = 1 << n;
            DMatrix::from_fn(dim, dim, |i, j| {
                if i != j {
                    return c(0., 0.);
                }
                let odd = ((i >> a) ^ (i >> b)) & 1 == 1;
                let phase = if odd { theta } else { -theta };
                C::from_polar(1.0, phase)
            })
        }
        _ => {
            let q = g.targets().to_vec()[0];
            embed(n, q, &one_qubit(g.kind(), g.angle().unwrap_or(0.0)))
        }
    }
}

fn paulis(n: usize, q: usize) -> [DMatrix<C>; 3] {
    [GateKind::X, GateKind::Y, GateKind::Z].map(|k| embed(n, q, &one_qubit(k, 0.0)))
}

/// Exact channel: unitary then independent depolarizing on every target.
pub fn density_oracle(circuit: &Circuit<f64>, rho0: DMatrix<C>, p: f64) -> DMatrix<C> {
    let n = circuit.n_qubits();
    let mut rho = rho0;
    for g in circuit.gates() {
        let u = gate_matrix(n, g);
        rho = &u * rho * u.adjoint();
        for q in g.targets().iter() {
            let mut next = rho.scale(1.0 - p);
            for pm in paulis(n, q) {
                next += (&pm * &rho * pm.adjoint()).scale(p / 3.0);
            }
            rho = next;
        }
    }
    rho
}

pub fn trace_distance(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    let eig = (a - b).symmetric_eigenvalues();
    0.5 * eig.iter().map(|l| l.abs()).sum::<f64>()
}

pub fn projector(s: &StateVector<f64>) -> DMatrix<C> {
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    &v * v.adjoint()
}

/// Trace distance between the averaged trajectory state and the exact
/// channel output, starting from a random pure state.
pub fn trajectory_distance(circuit: &Circuit<f64>, p: f64, trajectories: usize, seed: u64) -> f64 {
    let n = circuit.n_qubits();
    let mut rng = stream(seed);
    let psi0 = StateVector::<f64>::random(n, &mut rng);
    let noise = NoiseModel::depolarizing(p).unwrap();
    let dim = 1 << n;
    let mut avg = DMatrix::<C>::zeros(dim, dim);
    for _ in 0..trajectories {
        let mut psi = psi0.clone();
        apply_circuit(&mut psi, circuit, Some(&noise), &mut rng).unwrap();
        avg += projector(&psi);
    }
    avg /= c(trajectories as f64, 0.0);
    let exact = density_oracle(circuit, projector(&psi0), p);
    trace_distance(&avg, &exact)
}

pub fn two_qubit_circuit() -> Circuit<f64> {
    let mut c2 = Circuit::new(2, vec![[0, 1]]).unwrap();
    c2.push(Gate::Ry {
        target: 0,
        theta: 0.7,
    })
    .unwrap();
    c2.push(Gate::Ry {
        target: 1,
        theta: -1.9,
    })
    .unwrap();
    c2.push(Gate::Rzz {
        a: 0,
        b: 1,
        theta: 0.4,
    })
    .unwrap();
    c2
}

pub fn three_qubit_circuit() -> Circuit<f64> {
    let mut c3 = Circuit::new(3, vec![[0, 1], [1, 2]]).unwrap();
    for (q, t) in [(0, 0.3), (1, 1.1), (2, -0.8)] {
        c3.push(Gate::Ry {
            target: q,
            theta: t,
        })
        .unwrap();
    }
    c3.push(Gate::Rzz {
        a: 0,
        b: 1,
        theta: 0.9,
    })
    .unwrap();
    c3.push(Gate::H(2)).unwrap();
    c3.push(Gate::Rzz {
        a: 1,
        b: 2,
        theta: -0.5,
    })
    .unwrap();
    c3.push(Gate::Rx {
        target: 1,
        theta: 2.0,
    })
    .unwrap();
    c3
}

/// Largest amplitude error of the gate kernels against dense matrices over
/// random gates and states on 4 qubits.
pub fn kernel_max_error(trials: usize, seed: u64) -> f64 {
    let mut rng = stream(seed);
    let n = 4;
    let kinds = [
        GateKind::RY,
        GateKind::RX,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
    ];
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let psi = StateVector::<f64>::random(n, &mut rng);
        let theta: f64 = rng.random_range(-7.0..7.0);
        let q = rng.random_range(0..n);
        let kind = kinds[rng.random_range(0..kinds.len())];
        let angle = kind.is_parametric().then_some(theta);
        let a = rng.random_range(0..n);
        let b = (a + 1 + rng.random_range(0..n - 1)) % n;
        for g in [
            Gate::new(kind, angle, &[q]).unwrap(),
            Gate::Rzz { a, b, theta },
        ] {
            let mut out = psi.clone();
            out.apply(&g).unwrap();
            let want = gate_matrix(n, &g) * nalgebra::DVector::from_column_slice(psi.amplitudes());
            for (x, y) in out.amplitudes().iter().zip(want.iter()) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    worst
}

fn random_layered(n: usize, layers: usize, rng: &mut impl Rng) -> Circuit<f64> {
    let pairs: Vec<[usize; 2]> = (0..n - 1).map(|q| [q, q + 1]).collect();
    let mut circ = Circuit::new(n, pairs.clone()).unwrap();
    for _ in 0..layers {
        for q in 0..n {
            circ.push(Gate::Ry {
                target: q,
                theta: rng.random_range(0.0..6.3),
            })
            .unwrap();
            if rng.random_bool(0.5) {
                circ.push(Gate::H(q)).unwrap();
            }
            if rng.random_bool(0.3) {
                circ.push(Gate::Rx {
                    target: q,
                    theta: rng.random_range(-3.0..3.0),
                })
                .unwrap();
            }
        }
        for &[a, b] in &pairs {
            circ.push(Gate::Rzz {
                a,
                b,
                theta: rng.random_range(0.0..6.3),
            })
            .unwrap();
        }
    }
    circ
}

/// Largest amplitude error of `c` then `adjoint(c)` on random 4-qubit
/// states.
pub fn adjoint_roundtrip_max_error(trials: usize, seed: u64) -> f64 {
    let mut rng = stream(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let circ = random_layered(4, 3, &mut rng);
        let psi = StateVector::<f64>::random(4, &mut rng);
        let mut out = psi.clone();
        circ.apply_to(&mut out).unwrap();
        circ.adjoint().apply_to(&mut out).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

/// Largest `|‖ψ‖² − 1|` after random 8-qubit circuits.
pub fn norm_max_drift(trials: usize, seed: u64) -> f64 {
    let mut rng = stream(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let circ = random_layered(8, 5, &mut rng);
        let mut psi = StateVector::<f64>::random(8, &mut rng);
        circ.apply_to(&mut psi).unwrap();
        worst = worst.max((psi.norm_sqr() - 1.0).abs());
    }
    worst
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Largest error of the score functions against central differences of the
/// log-density, over random policies and points.
pub fn score_fd_max_error(instances: usize, seed: u64) -> f64 {
    let mut rng = stream(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let d = rng.random_range(1..6);
        let mu: Vec<f64> = (0..d).map(|_| rng.random_range(-4.0..4.0)).collect();
        let sigma: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..2.0)).collect();
        let x: Vec<f64> = mu
            .iter()
            .zip(&sigma)
            .map(|(m, s)| m + s.sqrt() * rng.random_range(-3.0..3.0))
            .collect();
        let p = GaussianPolicy::new(mu.clone(), sigma.clone()).unwrap();
        let gm = p.log_grad_mu(&x).unwrap();
        let gs = p.log_grad_sigma(&x).unwrap();
        for j in 0..d {
            let h = 1e-5;
            let shifted = |dm: f64, ds: f64| {
                let mut m = mu.clone();
                let mut s = sigma.clone();
                m[j] += dm;
                s[j] += ds;
                GaussianPolicy::new(m, s).unwrap().log_density(&x).unwrap()
            };
            let fd_mu = (shifted(h, 0.0) - shifted(-h, 0.0)) / (2.0 * h);
            let hs = h * sigma[j];
            let fd_sigma = (shifted(0.0, hs) - shifted(0.0, -hs)) / (2.0 * hs);
            worst = worst
                .max((fd_mu - gm[j]).abs())
                .max((fd_sigma - gs[j]).abs());
        }
    }
    worst
}

/// Largest `|mean| / SE` of every score coordinate over `samples` draws from
/// the policy itself.
pub fn score_mean_max_z(samples: usize, seed: u64) -> f64 {
    let p = GaussianPolicy::new(vec![0.5, -1.0, 2.0], vec![0.01, 0.5, 2.0]).unwrap();
    let mut rng = stream(seed);
    let draws: Vec<Vec<f64>> = (0..samples).map(|_| p.sample(&mut rng)).collect();
    let mut worst: f64 = 0.0;
    for j in 0..3 {
        for grads in [
            draws
                .iter()
                .map(|x| p.log_grad_mu(x).unwrap()[j])
                .collect::<Vec<_>>(),
            draws
                .iter()
                .map(|x| p.log_grad_sigma(x).unwrap()[j])
                .collect::<Vec<_>>(),
        ] {
            let (mean, se) = mean_and_se(&grads);
            worst = worst.max(mean.abs() / se);
        }
    }
    worst
}

/// Largest change, in combined standard errors, of the batch-averaged
/// gradient when every reward is shifted by +0.5.
pub fn reward_shift_max_z(rollouts: usize, seed: u64) -> f64 {
    let p = GaussianPolicy::new(vec![0.2, 0.7], vec![0.05, 0.05]).unwrap();
    let reward = |x: &[f64]| (x[0].sin() * x[1].cos()).powi(2);
    let run = |shift: f64| -> Vec<[f64; 2]> {
        let mut rng = stream(seed);
        (0..rollouts / 20)
            .map(|_| {
                let samples: Vec<Vec<f64>> = (0..20).map(|_| p.sample(&mut rng)).collect();
                let rewards = samples.iter().map(|x| reward(x) + shift).collect();
                let g = estimate_policy_gradient(&p, samples, rewards)
                    .unwrap()
                    .grad_mu;
                [g[0], g[1]]
            })
            .collect()
    };
    let base = run(0.0);
    let shifted = run(0.5);
    (0..2)
        .map(|j| {
            let a: Vec<f64> = base.iter().map(|g| g[j]).collect();
            let b: Vec<f64> = shifted.iter().map(|g| g[j]).collect();
            let (ma, sa) = mean_and_se(&a);
            let (mb, sb) = mean_and_se(&b);
            (ma - mb).abs() / sa.hypot(sb)
        })
        .fold(0.0, f64::max)
}

/// `E_{θ~N(μ,σI)} F(θ)` exactly. `F` has frequency at most 2 in every angle,
/// so along one coordinate `E[F] = ((1+w)/2)·F(μ) + ((1−w)/2)·F(μ + π/2)`
/// with `w = exp(−2σ)`; the coordinates factor.
pub fn exact_j(f: &dyn Fn(&[f64]) -> f64, mu: &[f64], sigma: f64) -> f64 {
    let w = (-2.0 * sigma).exp();
    let mut total = 0.0;
    for mask in 0..1usize << mu.len() {
        let mut weight = 1.0;
        let mut x = mu.to_vec();
        for (j, xj) in x.iter_mut().enumerate() {
            if mask >> j & 1 == 1 {
                *xj += FRAC_PI_2;
                weight *= (1.0 - w) / 2.0;
            } else {
                weight *= (1.0 + w) / 2.0;
            }
        }
        total += weight * f(&x);
    }
    total
}

/// Per-coordinate comparison of the REINFORCE estimate with the finite
/// difference of the exact objective.
#[derive(Debug, Clone, Copy)]
pub struct GradientCheck {
    pub estimate: f64,
    pub standard_error: f64,
    pub finite_difference: f64,
}

impl GradientCheck {
    pub fn relative_error(&self) -> f64 {
        (self.estimate - self.finite_difference).abs() / self.finite_difference.abs()
    }
}

/// Monte Carlo check of [`exact_j`] itself: `|MC − exact| / SE` at a wide
/// policy on the 2-qubit instance.
pub fn exact_j_self_check_z(seed: u64) -> f64 {
    let (ev, _) = two_qubit_instance(seed);
    let f = |x: &[f64]| ev.evaluate_params(x, 0).unwrap().value;
    let mu = [0.3, 1.1, -0.4];
    let p = GaussianPolicy::isotropic(mu.to_vec(), 0.3).unwrap();
    let mut rng = stream(seed ^ 0x55);
    let mc: Vec<f64> = (0..200_000).map(|_| f(&p.sample(&mut rng))).collect();
    let (m, se) = mean_and_se(&mc);
    (m - exact_j(&f, &mu, 0.3)).abs() / se
}

fn two_qubit_instance(seed: u64) -> (FidelityEvaluator<f64>, rlcompile_core::rng::RandomStream) {
    let spec = AnsatzSpec::chain(2, 1).unwrap();
    let mut rng = stream(seed);
    let target = random_target::<f64, _>(&spec, &mut rng).unwrap();
    let states = generate_training_states(2, 8, &mut rng).unwrap();
    (
        FidelityEvaluator::new(target, &states, EvalMode::Exact, None).unwrap(),
        rng,
    )
}

/// REINFORCE on the 2-qubit depth-1 instance at `Σ = σ·I`, averaged over
/// `batches × batch` rollouts, against the finite difference of the exact
/// objective at a mean with no near-zero gradient coordinate.
pub fn reinforce_vs_finite_difference(
    seed: u64,
    sigma: f64,
    batches: usize,
    batch: usize,
) -> Vec<GradientCheck> {
    let (ev, mut rng) = two_qubit_instance(seed);
    let f = |x: &[f64]| ev.evaluate_params(x, 0).unwrap().value;
    let h = 1e-4;
    let fd = |mu: &[f64]| -> Vec<f64> {
        (0..mu.len())
            .map(|j| {
                let mut up = mu.to_vec();
                let mut dn = mu.to_vec();
                up[j] += h;
                dn[j] -= h;
                (exact_j(&f, &up, sigma) - exact_j(&f, &dn, sigma)) / (2.0 * h)
            })
            .collect()
    };
    let (mu, grad) = loop {
        let mu: Vec<f64> = ParamVector::<f64>::uniform(3, &mut rng).0;
        let g = fd(&mu);
        if g.iter().all(|v| v.abs() > 0.1) {
            break (mu, g);
        }
    };
    let policy = GaussianPolicy::isotropic(mu, sigma).unwrap();
    let mut per_batch = vec![Vec::with_capacity(batches); grad.len()];
    for _ in 0..batches {
        let samples: Vec<Vec<f64>> = (0..batch).map(|_| policy.sample(&mut rng)).collect();
        let rewards = samples.iter().map(|x| f(x)).collect();
        let g = estimate_policy_gradient(&policy, samples, rewards)
            .unwrap()
            .grad_mu;
        for (acc, v) in per_batch.iter_mut().zip(g) {
            acc.push(v);
        }
    }
    per_batch
        .iter()
        .zip(&grad)
        .map(|(est, &want)| {
            let (estimate, standard_error) = mean_and_se(est);
            GradientCheck {
                estimate,
                standard_error,
                finite_difference: want,
            }
        })
        .collect()
}

/// Preparations of the six Pauli eigenstates on qubit `q`.
pub fn pauli_eigen_preps(q: usize) -> [(&'static str, Vec<Gate<f64>>); 6] {
    [
        ("z+", vec![]),
        ("z-", vec![Gate::X(q)]),
        ("x+", vec![Gate::H(q)]),
        ("x-", vec![Gate::X(q), Gate::H(q)]),
        (
            "y-",
            vec![Gate::Rx {
                target: q,
                theta: FRAC_PI_4,
            }],
        ),
        (
            "y+",
            vec![Gate::Rx {
                target: q,
                theta: -FRAC_PI_4,
            }],
        ),
    ]
}

/// All `6^n` Pauli-eigenstate products.
pub fn pauli_product_basis(n: usize) -> InitialStateSet<f64> {
    let mut members = Vec::new();
    for mut idx in 0..6usize.pow(n as u32) {
        let mut label = Vec::new();
        let mut gates = Vec::new();
        for q in 0..n {
            let (name, g) = pauli_eigen_preps(q)[idx % 6].clone();
            idx /= 6;
            label.push(name);
            gates.extend(g);
        }
        members.push(StateMember::Prep(
            PrepCircuit::new(label.join("|"), n, gates).unwrap(),
        ));
    }
    InitialStateSet::new(StateSetKind::Training, n, members).unwrap()
}

pub fn chain_target(n: usize, depth: usize, seed: u64) -> TargetUnitary<f64> {
    random_target(&AnsatzSpec::chain(n, depth).unwrap(), &mut stream(seed)).unwrap()
}

/// Empirical rate of `|F̂_m − F| ≥ ε` for uniformly drawn size-`m` subsets
/// of the 3-qubit Pauli product basis, next to the Hoeffding bound.
#[derive(Debug, Clone, Copy)]
pub struct Coverage {
    pub m: usize,
    pub epsilon: f64,
    pub miss_rate: f64,
    pub bound: f64,
}

pub fn hoeffding_coverage(trials: usize, seed: u64) -> Vec<Coverage> {
    let n = 3;
    let target = chain_target(n, 2, seed);
    let basis = pauli_product_basis(n);
    let ev = FidelityEvaluator::new(target.clone(), &basis, EvalMode::Exact, None).unwrap();
    let theta = ParamVector::<f64>::uniform(target.spec.param_count(), &mut stream(seed + 1));
    let all = ev.evaluate_params(&theta, 0).unwrap();
    let mut rng = stream(seed + 2);
    [(10usize, 0.3), (30, 0.2), (50, 0.15), (100, 0.1)]
        .iter()
        .map(|&(m, epsilon)| {
            let misses = (0..trials)
                .filter(|_| {
                    let idx = sample(&mut rng, all.per_state.len(), m);
                    let est = idx.iter().map(|i| all.per_state[i]).sum::<f64>() / m as f64;
                    (est - all.value).abs() >= epsilon
                })
                .count();
            Coverage {
                m,
                epsilon,
                miss_rate: misses as f64 / trials as f64,
                bound: hoeffding_bound(epsilon, m as u64).unwrap(),
            }
        })
        .collect()
}
