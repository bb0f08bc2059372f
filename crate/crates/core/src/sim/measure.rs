use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Binomial, Distribution};

use super::state::{clamp_unit, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fraction of `shots` computational-basis measurements that return all zeros.
///
/// The all-zeros count of `shots` independent measurements is binomial with
/// success probability `|⟨0…0|ψ⟩|²`, and is drawn as such.
pub fn sample_zero_outcome<T: Real, R: Rng + ?Sized>(
    state: &StateVector<T>,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let p0 = clamp_unit(state.amplitudes()[0].norm_sqr()).as_f64();
    let hits = Binomial::new(shots, p0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng);
    Ok(hits as f64 / shots as f64)
}

/// Draws `shots` basis-state indices from `|amplitude|²`.
pub fn sample_outcomes<T: Real, R: Rng + ?Sized>(
    state: &StateVector<T>,
    shots: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let weights: Vec<f64> = state
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr().as_f64())
        .collect();
    let dist =
        WeightedAliasIndex::new(weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((0..shots).map(|_| dist.sample(rng)).collect())
}
