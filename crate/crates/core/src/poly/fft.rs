//! Radix-2 transforms over a generic [`Real`] backend.
//!
//! `rustfft` only covers `f32`/`f64`, and the extended-precision tier needs the
//! same transform, so a small iterative implementation lives here.

use super::cplx::zero;
use super::scalar::Real;
use super::Cplx;

/// In-place DFT of a power-of-two length buffer.
///
/// Forward uses `exp(-2πi jk/n)`; the inverse includes the `1/n` factor.
pub(crate) fn fft<T: Real>(a: &mut [Cplx<T>], inverse: bool) {
    let n = a.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            a.swap(i, j);
        }
    }
    let sign = if inverse { 1 } else { -1 };
    let table = T::unit_powers(sign, n as u64, n / 2);
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = table[k * stride];
                let u = a[start + k];
                let v = a[start + k + half] * w;
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
    if inverse {
        let scale = T::one() / T::from_usize(n);
        for x in a.iter_mut() {
            *x *= scale;
        }
    }
}

/// Coefficients of `a * b` via zero-padded transforms.
pub(crate) fn convolve<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa = vec![zero::<T>(); n];
    let mut fb = vec![zero::<T>(); n];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    fft(&mut fa, false);
    fft(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    fft(&mut fa, true);
    fa.truncate(out_len);
    fa
}

pub(crate) fn naive_convolve<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let mut out = vec![zero::<T>(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * *y;
        }
    }
    out
}
