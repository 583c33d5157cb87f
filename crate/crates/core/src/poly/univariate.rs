use num_complex::Complex;
use num_traits::Zero;

use super::cplx::{self, lift, lower, zero};
use super::ext::{two_prod, two_sum};
use super::scalar::Real;
use super::{fft, Cplx};
use crate::error::{Error, Result};

/// Dense univariate polynomial, coefficients ascending by power.
///
/// Trailing zero coefficients are trimmed on construction, so the zero
/// polynomial is the empty sequence and has no degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T: Real = f64> {
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(mut coeffs: Vec<Cplx<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_f64(coeffs: &[Cplx<f64>]) -> Self {
        Self::new(coeffs.iter().map(|c| lift(*c)).collect())
    }

    /// Real coefficients, ascending.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| cplx::real(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Cplx<T>]) -> Self {
        let mut c = vec![cplx::one::<T>()];
        for r in roots {
            let mut next = vec![zero::<T>(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += *a;
                next[i] -= *a * *r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Cplx<T>> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, z: Cplx<T>) -> Cplx<T> {
        let mut acc = zero::<T>();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + *c;
        }
        acc
    }

    /// Accurate evaluation: compensated in double precision.
    pub fn eval_accurate(&self, z: Cplx<T>) -> Cplx<T> {
        T::horner(&self.coeffs, z)
    }

    /// `(p(z), p'(z))` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
        let mut p = zero::<T>();
        let mut dp = zero::<T>();
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + *c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| *c * T::from_usize(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let c = if self.coeffs.len().min(other.coeffs.len()) > 32 {
            fft::convolve(&self.coeffs, &other.coeffs)
        } else {
            fft::naive_convolve(&self.coeffs, &other.coeffs)
        };
        if !c.iter().all(|z| cplx::is_finite(*z)) {
            return Err(Error::Overflow("polynomial product"));
        }
        Ok(Self::new(c))
    }

    /// Largest coefficient magnitude.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| cplx::mag(*c)).fold(0.0, f64::max)
    }

    pub fn cast<U: Real>(&self) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(|c| lift(lower(*c))).collect())
    }
}

impl Poly<f64> {
    /// Horner evaluation with error-free transformations.
    pub fn eval_compensated(&self, z: Cplx<f64>) -> Result<Cplx<f64>> {
        let v = compensated_horner(&self.coeffs, z);
        if cplx::is_finite(v) {
            Ok(v)
        } else {
            Err(Error::Overflow("polynomial evaluation"))
        }
    }
}

#[inline]
fn two_sum_c(a: Cplx<f64>, b: Cplx<f64>) -> (Cplx<f64>, Cplx<f64>) {
    let (sr, er) = two_sum(a.re, b.re);
    let (si, ei) = two_sum(a.im, b.im);
    (Complex::new(sr, si), Complex::new(er, ei))
}

/// `a*b = p + e + f` exactly (barring underflow).
#[inline]
fn two_prod_c(a: Cplx<f64>, b: Cplx<f64>) -> (Cplx<f64>, Cplx<f64>, Cplx<f64>) {
    let (z1, h1) = two_prod(a.re, b.re);
    let (z2, h2) = two_prod(a.im, b.im);
    let (z3, h3) = two_prod(a.re, b.im);
    let (z4, h4) = two_prod(a.im, b.re);
    let (z5, h5) = two_sum(z1, -z2);
    let (z6, h6) = two_sum(z3, z4);
    (Complex::new(z5, z6), Complex::new(h1 - h2, h3 + h4), Complex::new(h5, h6))
}

pub(crate) fn compensated_horner(coeffs: &[Cplx<f64>], z: Cplx<f64>) -> Cplx<f64> {
    let Some((last, rest)) = coeffs.split_last() else {
        return Complex::new(0.0, 0.0);
    };
    let mut s = *last;
    let mut c = Complex::new(0.0, 0.0);
    for a in rest.iter().rev() {
        let (p, pi, sigma) = two_prod_c(s, z);
        let (ns, beta) = two_sum_c(p, *a);
        s = ns;
        c = c * z + (pi + sigma + beta);
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ExtFloat;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn trims_to_zero_polynomial() {
        let p = Poly::<f64>::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert_eq!(Poly::<f64>::from_real(&[1.0, 2.0, 0.0]).degree(), Some(1));
    }

    #[test]
    fn constant_evaluates_to_itself() {
        let p = Poly::from_real(&[1.0]);
        assert_eq!(p.eval_compensated(c(3.5, -2.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn root_evaluates_to_zero() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.eval_compensated(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn compensated_beats_plain_horner() {
        // exact value 1e16 + 2 is representable; plain Horner loses the 2
        let p = Poly::from_real(&[1.0, 1e16, 1.0]);
        let z = c(1.0, 0.0);
        assert_eq!(p.eval(z).re, 1e16);
        let v = p.eval_compensated(z).unwrap();
        assert_eq!(v.re, 1e16 + 2.0);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn compensated_matches_extended_on_ill_conditioned_input() {
        // (z - 1)^7 expanded, evaluated near the root
        let roots = vec![c(1.0, 0.0); 7];
        let p = Poly::from_roots(&roots);
        let z = c(1.01, 1e-3);
        let hi: Poly<ExtFloat> = p.cast();
        let want = lower(hi.eval(lift(z)));
        let got = p.eval_compensated(z).unwrap();
        assert!((got - want).norm() <= 1e-14 * want.norm(), "{got} vs {want}");
        let plain = p.eval(z);
        assert!((plain - want).norm() > (got - want).norm());
    }

    #[test]
    fn derivative_pass_agrees_with_derivative_poly() {
        let p = Poly::from_f64(&[c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, 0.0)]);
        let z = c(0.3, -0.7);
        let (_, dp) = p.eval_with_derivative(z);
        assert!((dp - p.derivative().eval(z)).norm() < 1e-14);
    }
}
