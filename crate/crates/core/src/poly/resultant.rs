use num_traits::Zero;

use super::cplx::{self, mag, zero};
use super::scalar::Real;
use super::univariate::Poly;
use super::Cplx;
use crate::error::{Error, Result};

/// Determinant of the Sylvester matrix of two coefficient vectors
/// (ascending), taken at their formal degrees `len - 1`.
///
/// Gaussian elimination with partial pivoting. With `a` of degree `m` and
/// `b` of degree `n` this equals `lc(a)^n · Π b(roots of a)` when the leading
/// coefficients are nonzero.
pub(crate) fn sylvester<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Cplx<T> {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return cplx::one();
    }
    let mut mat = vec![vec![zero::<T>(); size]; size];
    for r in 0..n {
        for (k, coef) in a.iter().rev().enumerate() {
            mat[r][r + k] = *coef;
        }
    }
    for r in 0..m {
        for (k, coef) in b.iter().rev().enumerate() {
            mat[n + r][r + k] = *coef;
        }
    }
    determinant(mat)
}

fn determinant<T: Real>(mut mat: Vec<Vec<Cplx<T>>>) -> Cplx<T> {
    let size = mat.len();
    let mut det = cplx::one::<T>();
    for col in 0..size {
        let pivot =
            (col..size).max_by(|&i, &j| mag(mat[i][col]).total_cmp(&mag(mat[j][col]))).expect("non-empty range");
        if mat[pivot][col].is_zero() {
            return zero();
        }
        if pivot != col {
            mat.swap(pivot, col);
            det = -det;
        }
        let p = mat[col][col];
        det *= p;
        for row in col + 1..size {
            let factor = mat[row][col] / p;
            if factor.is_zero() {
                continue;
            }
            let (top, rest) = mat.split_at_mut(row);
            for (dst, src) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= factor * *src;
            }
        }
    }
    det
}

/// Resultant of two nonzero polynomials at their actual degrees.
pub fn resultant<T: Real>(p: &Poly<T>, q: &Poly<T>) -> Result<Cplx<T>> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::InvalidArgument("resultant of the zero polynomial".into()));
    }
    let r = sylvester(p.coeffs(), q.coeffs());
    if !cplx::is_finite(r) {
        return Err(Error::Overflow("resultant"));
    }
    Ok(r)
}
