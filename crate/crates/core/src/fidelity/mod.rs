//! Initial-state sets, per-state rewards `|⟨k|V†U|k⟩|²`, the averaged
//! estimator F̂ and the Hoeffding sizing rule for the number of states.

mod hoeffding;
mod reward;
mod states;

pub use hoeffding::{hoeffding_bound, hoeffding_required_m};
pub use reward::{
    estimate_fidelity, reward_for_state, rollout_seed, EvalMode, FidelityEstimate,
    FidelityEvaluator,
};
pub use states::{
    default_training_size, generate_test_states, generate_training_states, InitialStateSet,
    PrepCircuit, StateMember, StateSetKind, DEFAULT_MEMORY_BUDGET,
};
