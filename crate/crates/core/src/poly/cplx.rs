use num_complex::Complex;
use num_traits::{One, Zero};

use super::scalar::Real;

/// Complex scalar over a [`Real`] backend.
pub type Cplx<T = f64> = Complex<T>;

#[inline]
pub fn lift<T: Real>(z: Cplx<f64>) -> Cplx<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

#[inline]
pub fn lower<T: Real>(z: Cplx<T>) -> Cplx<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[inline]
/// Exact widening to extended precision.
pub fn widen<T: Real>(z: Cplx<T>) -> Cplx<super::ExtFloat> {
    Complex::new(z.re.to_ext(), z.im.to_ext())
}

pub fn is_finite<T: Real>(z: Cplx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Magnitude computed in double precision; used for every tolerance test.
#[inline]
pub fn mag<T: Real>(z: Cplx<T>) -> f64 {
    lower(z).norm()
}

/// Magnitude at working precision, scaled against overflow.
pub fn modulus<T: Real>(z: Cplx<T>) -> T {
    let a = z.re.abs();
    let b = z.im.abs();
    let m = if a > b { a } else { b };
    if m.is_zero() {
        return T::zero();
    }
    let x = a / m;
    let y = b / m;
    m * (x * x + y * y).sqrt()
}

pub fn powu<T: Real>(z: Cplx<T>, mut k: u64) -> Cplx<T> {
    let mut base = z;
    let mut acc = Cplx::<T>::one();
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        k >>= 1;
    }
    acc
}

#[inline]
pub fn real<T: Real>(x: f64) -> Cplx<T> {
    Complex::new(T::from_f64(x), T::zero())
}

#[inline]
pub fn zero<T: Real>() -> Cplx<T> {
    Cplx::<T>::zero()
}

#[inline]
pub fn one<T: Real>() -> Cplx<T> {
    Cplx::<T>::one()
}
