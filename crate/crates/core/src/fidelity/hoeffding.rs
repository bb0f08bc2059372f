use crate::error::{Error, Result};

/// Tail bound `2·exp(−2ε²m)` on `P(|F̂ − F| ≥ ε)` for `m` samples in `[0, 1]`.
pub fn hoeffding_bound(epsilon: f64, m: u64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(2.0 * (-2.0 * epsilon * epsilon * m as f64).exp())
}

/// Smallest `m` with `2·exp(−2ε²m) ≤ δ`, i.e. `⌈ln(2/δ) / (2ε²)⌉`.
pub fn hoeffding_required_m(epsilon: f64, delta: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let m = ((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil() as u64;
    // Guard against the ceiling landing one short through rounding.
    Ok(if hoeffding_bound(epsilon, m)? > delta {
        m + 1
    } else {
        m
    })
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let b = hoeffding_bound(0.1, 500).unwrap();
        assert!((b - 2.0 * (-10.0f64).exp()).abs() < 1e-18);
        assert!((b - 9.0800e-5).abs() < 1e-8);
        assert_eq!(hoeffding_required_m(0.05, 0.01).unwrap(), 1060);
        assert_eq!(hoeffding_required_m(0.1, 1e-4).unwrap(), 496);
    }

    #[test]
    fn result_is_minimal() {
        for &(eps, delta) in &[(0.05, 0.01), (0.1, 1e-4), (0.2, 0.5), (0.01, 0.05)] {
            let m = hoeffding_required_m(eps, delta).unwrap();
            assert!(hoeffding_bound(eps, m).unwrap() <= delta);
            assert!(hoeffding_bound(eps, m - 1).unwrap() > delta);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(hoeffding_required_m(0.1, 2.0).is_err());
        assert!(hoeffding_required_m(0.1, 0.0).is_err());
        assert!(hoeffding_required_m(0.0, 0.1).is_err());
        assert!(hoeffding_required_m(1.0, 0.1).is_err());
        assert!(hoeffding_bound(f64::NAN, 3).is_err());
    }
}
