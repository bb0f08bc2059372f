use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense amplitude vector over `n_qubits` qubits.
///
/// Basis index bit `q` is the computational value of qubit `q` (qubit 0 is the
/// least significant bit), so `|1⟩ ⊗ |0⟩` on two qubits is index 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    ///
    /// Panics if `index >= 2^n_qubits` or `n_qubits == 0`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits >= 1, "need at least one qubit");
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[index] = Complex::new(T::one(), T::zero());
        Self { n_qubits, amps }
    }

    /// Wraps raw amplitudes. The length must be a power of two, and the vector
    /// must be normalized to within `1e-6` (use [`StateVector::normalized`]
    /// for unnormalized input).
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let state = Self { n_qubits, amps };
        let norm = state.norm_sqr().as_f64();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "amplitudes must be normalized, squared norm is {norm}"
            )));
        }
        Ok(state)
    }

    /// Wraps raw amplitudes and rescales them to unit norm.
    pub fn normalized(mut amps: Vec<Complex<T>>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: T = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero vector".into(),
            ));
        }
        let inv = T::one() / norm;
        for a in &mut amps {
            *a *= inv;
        }
        Ok(Self { n_qubits, amps })
    }

    /// Product state `⊗_q locals[q]`, qubit `q` being bit `q`. Each local
    /// state must be normalized.
    pub fn product(locals: &[[Complex<T>; 2]]) -> Result<Self> {
        if locals.is_empty() {
            return Err(Error::InvalidArgument("product of zero qubits".into()));
        }
        for l in locals {
            let norm = (l[0].norm_sqr() + l[1].norm_sqr()).as_f64();
            if (norm - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "local state has norm² {norm}"
                )));
            }
        }
        let mut s = Self::zero(locals.len());
        s.fill_product(locals);
        Ok(s)
    }

    /// Overwrites the amplitudes with `⊗_q locals[q]`; sizes must agree.
    pub(crate) fn fill_product(&mut self, locals: &[[Complex<T>; 2]]) {
        debug_assert_eq!(locals.len(), self.n_qubits);
        self.amps[0] = Complex::new(T::one(), T::zero());
        for (q, l) in locals.iter().enumerate() {
            let half = 1usize << q;
            let (lo, hi) = self.amps[..half << 1].split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                *b = *a * l[1];
                *a *= l[0];
            }
        }
    }

    /// Random real unit vector with i.i.d. standard normal entries before
    /// normalization.
    pub fn random_real<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_qubits;
        let amps = (0..dim)
            .map(|_| {
                let x: f64 = StandardNormal.sample(rng);
                Complex::new(T::of(x), T::zero())
            })
            .collect();
        Self::normalized(amps).expect("gaussian vector is nonzero almost surely")
    }

    /// Random state with i.i.d. complex normal entries, normalized.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_qubits;
        let amps = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(T::of(re), T::of(im))
            })
            .collect();
        Self::normalized(amps).expect("gaussian vector is nonzero almost surely")
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[inline]
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same_size(other)?;
        Ok(inner_unchecked(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`, clamped to `[0, 1]` against rounding.
    pub fn overlap_probability(&self, other: &Self) -> Result<T> {
        let ip = self.inner(other)?;
        Ok(clamp_unit(ip.norm_sqr()))
    }

    /// True when every amplitude is within `tol` of `other`'s.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n_qubits == other.n_qubits
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| (*a - *b).norm().as_f64() <= tol)
    }

    /// True when all imaginary parts are exactly zero.
    pub fn is_real(&self) -> bool {
        self.amps.iter().all(|a| a.im == T::zero())
    }

    pub(crate) fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }
}

/// Probability `|⟨a|b⟩|²` between two equal-size states.
pub fn overlap_probability<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    a.overlap_probability(b)
}

#[inline]
pub(crate) fn inner_unchecked<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    // conj(x) * y, with four independent partial sums per component.
    const LANES: usize = 4;
    let mut re = [T::zero(); LANES];
    let mut im = [T::zero(); LANES];
    let mut ca = a.chunks_exact(LANES);
    let mut cb = b.chunks_exact(LANES);
    for (xs, ys) in (&mut ca).zip(&mut cb) {
        for l in 0..LANES {
            let (x, y) = (xs[l], ys[l]);
            re[l] += x.re * y.re + x.im * y.im;
            im[l] += x.re * y.im - x.im * y.re;
        }
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        re[0] += x.re * y.re + x.im * y.im;
        im[0] += x.re * y.im - x.im * y.re;
    }
    Complex::new(
        (re[0] + re[1]) + (re[2] + re[3]),
        (im[0] + im[1]) + (im[2] + im[3]),
    )
}

#[inline]
pub(crate) fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn basis_overlaps() {
        let z = StateVector::<f64>::basis(1, 0);
        let o = StateVector::<f64>::basis(1, 1);
        assert_eq!(z.overlap_probability(&z).unwrap(), 1.0);
        assert_eq!(z.overlap_probability(&o).unwrap(), 0.0);
    }

    #[test]
    fn random_states_are_normalized() {
        let mut rng = stream(3);
        let s = StateVector::<f64>::random(6, &mut rng);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        let r = StateVector::<f64>::random_real(6, &mut rng);
        assert!(r.is_real());
        assert!((r.overlap_probability(&r).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let a = StateVector::<f64>::zero(2);
        let b = StateVector::<f64>::zero(3);
        assert_eq!(
            a.overlap_probability(&b),
            Err(Error::QubitMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn from_amplitudes_validates() {
        let bad = vec![Complex::new(1.0, 0.0); 3];
        assert!(StateVector::<f64>::from_amplitudes(bad).is_err());
        let unnorm = vec![Complex::new(1.0, 0.0); 4];
        assert!(StateVector::<f64>::from_amplitudes(unnorm.clone()).is_err());
        let s = StateVector::<f64>::normalized(unnorm).unwrap();
        assert!((s.amplitudes()[2].re - 0.5).abs() < 1e-15);
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct StateRepr<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real + serde::Serialize> serde::Serialize for StateVector<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("StateVector", 2)?;
        st.serialize_field("n_qubits", &self.n_qubits)?;
        st.serialize_field("amplitudes", &self.amps)?;
        st.end()
    }
}

impl<'de, T: Real + serde::Deserialize<'de>> serde::Deserialize<'de> for StateVector<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = StateRepr::<T>::deserialize(d)?;
        let state =
            StateVector::from_amplitudes(repr.amplitudes).map_err(serde::de::Error::custom)?;
        if state.n_qubits != repr.n_qubits {
            return Err(serde::de::Error::custom(
                "n_qubits does not match amplitude count",
            ));
        }
        Ok(state)
    }
}
