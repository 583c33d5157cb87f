use num_traits::Zero;

use super::cplx::{self, zero};
use super::scalar::Real;
use super::Cplx;

/// Least-squares `q` minimising `‖conv(den, q) − num‖₂`, with
/// `len(q) = len(num) − len(den) + 1`.
///
/// The convolution matrix has lower bandwidth `dd = len(den) − 1`; Householder
/// reflections confined to `dd + 1` rows keep the triangular factor inside an
/// upper band of the same width, so the cost is `O(len(q)·dd²)`.
pub(crate) fn convolution_lstsq<T: Real>(den: &[Cplx<T>], num: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let dd = den.len() - 1;
    let rows = num.len();
    let cols = rows - dd;
    let width = 2 * dd + 1;
    // entry (r, c) lives at band[c][r + dd - c] for |r - c| <= dd
    let mut band: Vec<Vec<Cplx<T>>> = (0..cols)
        .map(|_| {
            let mut v = vec![zero::<T>(); width];
            v[dd..].copy_from_slice(den);
            v
        })
        .collect();
    let mut rhs = num.to_vec();
    let mut v = vec![zero::<T>(); dd + 1];

    for j in 0..cols {
        let len = (rows - j).min(dd + 1);
        let mut norm2 = T::zero();
        for k in 0..len {
            let x = band[j][dd + k];
            v[k] = x;
            norm2 += x.norm_sqr();
        }
        if norm2.is_zero() {
            continue;
        }
        let norm = norm2.sqrt();
        let x0 = v[0];
        let m0 = cplx::modulus(x0);
        let phase = if m0.is_zero() { cplx::one() } else { x0 / m0 };
        let alpha = -(phase * norm);
        v[0] -= alpha;
        let vnorm2 = v[..len].iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if vnorm2.is_zero() {
            continue;
        }
        let two = T::from_f64(2.0) / vnorm2;
        let last = (j + dd).min(cols - 1);
        for (c, col) in band.iter_mut().enumerate().take(last + 1).skip(j) {
            // rows j..j+len of column c
            let off = j + dd - c;
            let mut s = zero::<T>();
            for k in 0..len {
                s += v[k].conj() * col[off + k];
            }
            let f = s * two;
            for k in 0..len {
                col[off + k] -= v[k] * f;
            }
        }
        let mut s = zero::<T>();
        for k in 0..len {
            s += v[k].conj() * rhs[j + k];
        }
        let f = s * two;
        for k in 0..len {
            rhs[j + k] -= v[k] * f;
        }
    }

    let mut q = vec![zero::<T>(); cols];
    for j in (0..cols).rev() {
        let mut s = rhs[j];
        for c in j + 1..=(j + dd).min(cols - 1) {
            s -= band[c][j + dd - c] * q[c];
        }
        let diag = band[j][dd];
        q[j] = if diag.is_zero() { zero() } else { s / diag };
    }
    q
}
