use rand::Rng;
use serde::{Deserialize, Serialize};

use num_complex::Complex;

use super::states::{apply_2x2, InitialStateSet, StateMember};
use crate::ansatz::{build_ansatz, TargetUnitary};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derived_stream, RandomStream};
use crate::scalar::Real;
use crate::sim::{
    apply_circuit, sample_zero_outcome, Circuit, CompiledCircuit, NoiseModel, StateVector,
};

/// How a per-state reward is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Exact overlap `|⟨k|ψ⟩|²` from the simulated state.
    Exact,
    /// Invert the preparation circuit and count all-zeros outcomes over
    /// `shots` measurements. With `faults_per_shot`, every shot runs its own
    /// noise trajectory; otherwise one trajectory is shared by all shots.
    Shots { shots: u64, faults_per_shot: bool },
}

impl EvalMode {
    pub fn shots(shots: u64) -> Self {
        EvalMode::Shots {
            shots,
            faults_per_shot: false,
        }
    }
}

/// `F̂ = (1/m) Σ_k r^(k)` with its per-state terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub per_state: Vec<f64>,
    pub mode: EvalMode,
}

impl FidelityEstimate {
    fn from_rewards(per_state: Vec<f64>, mode: EvalMode) -> Self {
        let value = per_state.iter().sum::<f64>() / per_state.len() as f64;
        Self {
            value,
            per_state,
            mode,
        }
    }

    /// Sample standard deviation of the per-state rewards.
    pub fn std(&self) -> f64 {
        let n = self.per_state.len();
        if n < 2 {
            return 0.0;
        }
        let var = self
            .per_state
            .iter()
            .map(|r| (r - self.value).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        var.sqrt()
    }
}

/// Reward `|⟨k|V†U|k⟩|²` for one initial state.
///
/// With noise, `U` then `V†` run as one trajectory drawn from `rng`. The
/// preparation and its inverse are noiseless.
pub fn reward_for_state<T: Real, R: Rng + ?Sized>(
    target: &TargetUnitary<T>,
    v_dagger: &Circuit<T>,
    member: &StateMember<T>,
    mode: EvalMode,
    noise: Option<&NoiseModel>,
    rng: &mut R,
) -> Result<f64> {
    check_sizes(target, v_dagger, member.n_qubits())?;
    let k = member.prepare();
    let run = |rng: &mut R| -> Result<StateVector<T>> {
        let mut psi = k.clone();
        apply_circuit(&mut psi, &target.circuit, noise, rng)?;
        apply_circuit(&mut psi, v_dagger, noise, rng)?;
        Ok(psi)
    };
    match mode {
        EvalMode::Exact => {
            let psi = run(rng)?;
            Ok(k.overlap_probability(&psi)?.as_f64())
        }
        EvalMode::Shots {
            shots,
            faults_per_shot,
        } => {
            let StateMember::Prep(prep) = member else {
                return Err(Error::ShotsOnRawVector(member.label().to_string()));
            };
            if shots == 0 {
                return Err(Error::InvalidArgument("shots must be at least 1".into()));
            }
            let noisy = noise.is_some_and(|n| n.p() > 0.0);
            if faults_per_shot && noisy {
                let mut hits = 0u64;
                for _ in 0..shots {
                    let mut psi = run(rng)?;
                    prep.unprepare(&mut psi)?;
                    hits += sample_zero_outcome(&psi, 1, rng)? as u64;
                }
                Ok(hits as f64 / shots as f64)
            } else {
                let mut psi = run(rng)?;
                prep.unprepare(&mut psi)?;
                sample_zero_outcome(&psi, shots, rng)
            }
        }
    }
}

/// Uniform average of [`reward_for_state`] over `states`.
///
/// Each member gets its own stream derived from one seed drawn from `rng` and
/// the member label, so the result does not depend on evaluation order.
pub fn estimate_fidelity<T: Real, R: Rng + ?Sized>(
    target: &TargetUnitary<T>,
    v_dagger: &Circuit<T>,
    states: &InitialStateSet<T>,
    mode: EvalMode,
    noise: Option<&NoiseModel>,
    rng: &mut R,
) -> Result<FidelityEstimate> {
    let seed: u64 = rng.random();
    let per_state = states
        .members
        .iter()
        .map(|m| {
            let mut s = derived_stream(seed, &[m.stream_key()]);
            reward_for_state(target, v_dagger, m, mode, noise, &mut s)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FidelityEstimate::from_rewards(per_state, mode))
}

struct CachedMember<T: Real> {
    member: StateMember<T>,
    key: u64,
    k: StateVector<T>,
    /// `U|k⟩`, noiseless.
    uk: StateVector<T>,
    /// Per-qubit factors of `|k⟩` for product-state members.
    local: Option<Vec<[Complex<T>; 2]>>,
}

/// Noiseless exact-mode plan that evaluates `⟨Vk|Uk⟩` instead of
/// `⟨k|V†Uk⟩`: the leading single-qubit gates of `V` act on the product
/// factors of `|k⟩` before it is expanded.
struct ForwardPlan<T: Real> {
    prefix: Vec<(usize, [Complex<T>; 4])>,
    rest: CompiledCircuit<T>,
}

impl<T: Real> ForwardPlan<T> {
    fn new(v_dagger: &Circuit<T>) -> Result<Self> {
        let v = v_dagger.adjoint();
        let split = v
            .gates()
            .iter()
            .position(|g| g.kind().arity() != 1)
            .unwrap_or(v.len());
        let prefix = v.gates()[..split]
            .iter()
            .map(|g| {
                (
                    g.targets().to_vec()[0],
                    g.matrix_1q().expect("single-qubit"),
                )
            })
            .collect();
        let rest = Circuit::with_gates(
            v.n_qubits(),
            v.connectivity().to_vec(),
            v.gates()[split..].to_vec(),
        )?;
        Ok(Self {
            prefix,
            rest: CompiledCircuit::new(&rest),
        })
    }
}

/// Repeated-evaluation form of [`estimate_fidelity`] for one target and one
/// state set.
///
/// Caches `|k⟩` and `U|k⟩` per member and runs noiseless `V†` through a fused
/// plan. Noisy trajectories reuse the cached `U|k⟩` whenever the sampled
/// trajectory has no fault inside `U`. For a given seed the output equals
/// [`estimate_fidelity`] driven by a stream that yields that seed, up to
/// rounding from the fused noiseless plan.
pub struct FidelityEvaluator<T: Real> {
    target: TargetUnitary<T>,
    members: Vec<CachedMember<T>>,
    mode: EvalMode,
    noise: Option<NoiseModel>,
}

impl<T: Real> FidelityEvaluator<T> {
    pub fn new(
        target: TargetUnitary<T>,
        states: &InitialStateSet<T>,
        mode: EvalMode,
        noise: Option<NoiseModel>,
    ) -> Result<Self> {
        if states.n_qubits != target.n_qubits() {
            return Err(Error::QubitMismatch {
                left: states.n_qubits,
                right: target.n_qubits(),
            });
        }
        if let EvalMode::Shots { shots, .. } = mode {
            if shots == 0 {
                return Err(Error::InvalidArgument("shots must be at least 1".into()));
            }
            if let Some(raw) = states
                .members
                .iter()
                .find(|m| matches!(m, StateMember::Vector { .. }))
            {
                return Err(Error::ShotsOnRawVector(raw.label().to_string()));
            }
        }
        let plan = CompiledCircuit::new(&target.circuit);
        let members = states
            .members
            .iter()
            .map(|m| {
                let k = m.prepare();
                let mut uk = k.clone();
                plan.apply_unchecked(&mut uk);
                let local = match m {
                    StateMember::Prep(p) => Some(p.local_states()),
                    StateMember::Vector { .. } => None,
                };
                CachedMember {
                    member: m.clone(),
                    key: m.stream_key(),
                    k,
                    uk,
                    local,
                }
            })
            .collect();
        let noise = noise.filter(|n| n.p() > 0.0);
        Ok(Self {
            target,
            members,
            mode,
            noise,
        })
    }

    pub fn target(&self) -> &TargetUnitary<T> {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn noise(&self) -> Option<&NoiseModel> {
        self.noise.as_ref()
    }

    /// `V(θ)†` for the target's ansatz.
    pub fn v_dagger(&self, params: &[T]) -> Result<Circuit<T>> {
        Ok(build_ansatz(&self.target.spec, params)?.adjoint())
    }

    /// F̂ at angles `params`.
    pub fn evaluate_params(&self, params: &[T], seed: u64) -> Result<FidelityEstimate> {
        self.evaluate(&self.v_dagger(params)?, seed)
    }

    /// F̂ for an explicit `V†`.
    pub fn evaluate(&self, v_dagger: &Circuit<T>, seed: u64) -> Result<FidelityEstimate> {
        check_sizes(&self.target, v_dagger, self.target.n_qubits())?;
        let mut scratch = StateVector::zero(self.target.n_qubits());
        if self.forward_applicable() {
            let plan = ForwardPlan::new(v_dagger)?;
            let mut local = Vec::with_capacity(self.target.n_qubits());
            let per_state = self
                .members
                .iter()
                .map(|m| self.forward_reward(m, &plan, &mut local, &mut scratch))
                .collect::<Result<Vec<_>>>()?;
            return Ok(FidelityEstimate::from_rewards(per_state, self.mode));
        }
        let plan = self.noise.is_none().then(|| CompiledCircuit::new(v_dagger));
        let per_state = self
            .members
            .iter()
            .map(|m| self.member_reward(m, v_dagger, plan.as_ref(), seed, &mut scratch))
            .collect::<Result<Vec<_>>>()?;
        Ok(FidelityEstimate::from_rewards(per_state, self.mode))
    }

    /// Reward of member `index` alone.
    pub fn evaluate_member(&self, v_dagger: &Circuit<T>, index: usize, seed: u64) -> Result<f64> {
        check_sizes(&self.target, v_dagger, self.target.n_qubits())?;
        let m = self.members.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "member {index} out of range ({})",
                self.members.len()
            ))
        })?;
        let plan = self.noise.is_none().then(|| CompiledCircuit::new(v_dagger));
        let mut scratch = StateVector::zero(self.target.n_qubits());
        self.member_reward(m, v_dagger, plan.as_ref(), seed, &mut scratch)
    }

    fn forward_applicable(&self) -> bool {
        self.noise.is_none()
            && self.mode == EvalMode::Exact
            && self.members.iter().all(|m| m.local.is_some())
    }

    fn forward_reward(
        &self,
        m: &CachedMember<T>,
        plan: &ForwardPlan<T>,
        local: &mut Vec<[Complex<T>; 2]>,
        scratch: &mut StateVector<T>,
    ) -> Result<f64> {
        local.clear();
        local.extend_from_slice(m.local.as_ref().expect("checked by caller"));
        for (q, mat) in &plan.prefix {
            local[*q] = apply_2x2(mat, &local[*q]);
        }
        scratch.fill_product(local);
        plan.rest.apply_unchecked(scratch);
        Ok(scratch.overlap_probability(&m.uk)?.as_f64())
    }

    fn member_reward(
        &self,
        m: &CachedMember<T>,
        v_dagger: &Circuit<T>,
        plan: Option<&CompiledCircuit<T>>,
        seed: u64,
        scratch: &mut StateVector<T>,
    ) -> Result<f64> {
        let mut rng = derived_stream(seed, &[m.key]);
        match self.mode {
            EvalMode::Exact => {
                self.trajectory(m, v_dagger, plan, &mut rng, scratch);
                Ok(m.k.overlap_probability(scratch)?.as_f64())
            }
            EvalMode::Shots {
                shots,
                faults_per_shot,
            } => {
                let StateMember::Prep(prep) = &m.member else {
                    unreachable!("rejected in constructor")
                };
                if faults_per_shot && self.noise.is_some() {
                    let mut hits = 0u64;
                    for _ in 0..shots {
                        self.trajectory(m, v_dagger, plan, &mut rng, scratch);
                        prep.unprepare(scratch)?;
                        hits += sample_zero_outcome(scratch, 1, &mut rng)? as u64;
                    }
                    Ok(hits as f64 / shots as f64)
                } else {
                    self.trajectory(m, v_dagger, plan, &mut rng, scratch);
                    prep.unprepare(scratch)?;
                    sample_zero_outcome(scratch, shots, &mut rng)
                }
            }
        }
    }

    /// Writes `V† U |k⟩` (one noise trajectory if noisy) into `out`.
    fn trajectory(
        &self,
        m: &CachedMember<T>,
        v_dagger: &Circuit<T>,
        plan: Option<&CompiledCircuit<T>>,
        rng: &mut RandomStream,
        out: &mut StateVector<T>,
    ) {
        match (&self.noise, plan) {
            (None, Some(plan)) => {
                out.clone_from(&m.uk);
                plan.apply_unchecked(out);
            }
            (None, None) => {
                out.clone_from(&m.uk);
                v_dagger.apply_unchecked(out);
            }
            (Some(noise), _) => {
                let u_faults = noise.sample_faults(&self.target.circuit, rng);
                if u_faults.is_empty() {
                    out.clone_from(&m.uk);
                } else {
                    out.clone_from(&m.k);
                    self.target.circuit.apply_faults_unchecked(out, &u_faults);
                }
                let v_faults = noise.sample_faults(v_dagger, rng);
                v_dagger.apply_faults_unchecked(out, &v_faults);
            }
        }
    }
}

/// Seed for rollout `index` of iteration `iteration` under `master`.
pub fn rollout_seed(master: u64, iteration: u64, index: u64) -> u64 {
    derive_seed(master, &[iteration, index])
}

fn check_sizes<T: Real>(target: &TargetUnitary<T>, v_dagger: &Circuit<T>, n: usize) -> Result<()> {
    for other in [v_dagger.n_qubits(), n] {
        if other != target.n_qubits() {
            return Err(Error::QubitMismatch {
                left: other,
                right: target.n_qubits(),
            });
        }
    }
    Ok(())
}
