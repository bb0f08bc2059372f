//! RMSprop for the policy mean and derivative-free baselines acting directly
//! on the angle vector. All optimizers here maximize.

mod dfo;
mod nelder_mead;
mod powell;
mod rmsprop;

pub use dfo::{DfoEvaluation, DfoOptions, DfoResult};
pub use nelder_mead::nelder_mead;
pub use powell::powell;
pub use rmsprop::{rmsprop_step, RmsPropConfig, RmsPropState};
