//! In-place amplitude kernels, one per gate family.
//!
//! Single-qubit kernels walk blocks of `2^(q+1)` amplitudes and update the
//! `(i, i + 2^q)` pairs; RZZ and fused diagonals are a single pass with a
//! per-index phase.

use num_complex::Complex;

use crate::scalar::Real;

#[inline]
fn pairs<T: Real>(
    amps: &mut [Complex<T>],
    q: usize,
    mut f: impl FnMut(&mut Complex<T>, &mut Complex<T>),
) {
    let stride = 1usize << q;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    }
}

/// `[[c, −s], [s, c]]`. The matrix is real, so it acts on real and
/// imaginary parts alike and runs over the flat `[re, im, …]` view.
#[inline]
pub fn rotation_y<T: Real>(amps: &mut [Complex<T>], q: usize, c: T, s: T) {
    let flat: &mut [T] = bytemuck::cast_slice_mut(amps);
    let half = 2usize << q;
    for block in flat.chunks_exact_mut(half << 1) {
        let (lo, hi) = block.split_at_mut(half);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            let (a, b) = (*x, *y);
            *x = c * a - s * b;
            *y = s * a + c * b;
        }
    }
}

/// `[[c, −is], [−is, c]]`.
#[inline]
pub fn rotation_x<T: Real>(amps: &mut [Complex<T>], q: usize, c: T, s: T) {
    pairs(amps, q, |a, b| {
        let (x, y) = (*a, *b);
        a.re = c * x.re + s * y.im;
        a.im = c * x.im - s * y.re;
        b.re = s * x.im + c * y.re;
        b.im = c * y.im - s * x.re;
    });
}

#[inline]
pub fn pauli_x<T: Real>(amps: &mut [Complex<T>], q: usize) {
    pairs(amps, q, std::mem::swap);
}

/// `[[0, −i], [i, 0]]`.
#[inline]
pub fn pauli_y<T: Real>(amps: &mut [Complex<T>], q: usize) {
    pairs(amps, q, |a, b| {
        let (x, y) = (*a, *b);
        *a = Complex::new(y.im, -y.re);
        *b = Complex::new(-x.im, x.re);
    });
}

#[inline]
pub fn pauli_z<T: Real>(amps: &mut [Complex<T>], q: usize) {
    pairs(amps, q, |_, b| *b = -*b);
}

#[inline]
pub fn hadamard<T: Real>(amps: &mut [Complex<T>], q: usize) {
    let h = T::FRAC_1_SQRT_2();
    pairs(amps, q, |a, b| {
        let (x, y) = (*a, *b);
        *a = (x + y) * h;
        *b = (x - y) * h;
    });
}

/// `exp(−iθ Z_a Z_b)`: phase `e^{−iθ}` on even parity, `e^{+iθ}` on odd.
#[inline]
pub fn rotation_zz<T: Real>(amps: &mut [Complex<T>], a: usize, b: usize, theta: T) {
    let (s, c) = theta.sin_cos();
    let even = Complex::new(c, -s);
    let odd = Complex::new(c, s);
    for (i, amp) in amps.iter_mut().enumerate() {
        let parity = ((i >> a) ^ (i >> b)) & 1;
        *amp *= if parity == 0 { even } else { odd };
    }
}

/// Elementwise multiply by a precomputed diagonal.
#[inline]
pub fn diagonal<T: Real>(amps: &mut [Complex<T>], diag: &[Complex<T>]) {
    for (amp, d) in amps.iter_mut().zip(diag) {
        *amp *= *d;
    }
}
