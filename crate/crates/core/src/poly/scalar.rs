use std::fmt;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, RemAssign, SubAssign};

use num_complex::Complex;
use num_traits::Num;

use super::Cplx;

/// Arithmetic tier used for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    /// IEEE binary64, 53-bit significand.
    Double,
    /// Triple-double arithmetic, at least 150 bits.
    Extended,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => f64::MANTISSA_DIGITS,
            Precision::Extended => super::ext::ExtFloat::MANTISSA_BITS,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision tier `{other}` (expected double or extended)")),
        }
    }
}

/// Real scalar backing a complex coefficient type.
///
/// Implemented for `f64` and [`ExtFloat`](super::ExtFloat). All numeric kernels in
/// this crate are generic over it so that a failed double-precision computation
/// can be repeated verbatim at extended precision.
pub trait Real:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + fmt::Display
    + Default
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + 'static
{
    const PRECISION: Precision;
    /// Unit roundoff of the arithmetic, as an `f64`.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Exact widening to the extended backend.
    fn to_ext(self) -> super::ExtFloat;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn is_finite(self) -> bool;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    /// `exp(2πi·step·k/modulus)` for `k = 0..count`.
    fn unit_powers(step: i64, modulus: u64, count: usize) -> Vec<Cplx<Self>> {
        let root = Self::root_of_unity(step, modulus);
        let mut out = Vec::with_capacity(count);
        let mut w = Cplx::new(Self::one(), Self::zero());
        for _ in 0..count {
            out.push(w);
            w *= root;
        }
        out
    }

    /// `exp(2πi·k/m)` accurate to the working precision.
    fn root_of_unity(k: i64, m: u64) -> Cplx<Self> {
        let m_i = m as i64;
        let k = k.rem_euclid(m_i);
        let theta = std::f64::consts::TAU * (k as f64) / (m as f64);
        let (s, c) = theta.sin_cos();
        let mut z = Cplx::new(Self::from_f64(c), Self::from_f64(s));
        if Self::EPSILON < f64::EPSILON {
            // Newton on z^m = 1 from the double-precision seed.
            let mf = Self::from_f64(m as f64);
            for _ in 0..3 {
                let zm = super::cplx::powu(z, m);
                let one = Cplx::new(Self::one(), Self::zero());
                z *= one - (zm - one) / (zm * mf);
            }
        }
        z
    }

    /// Polynomial evaluation with coefficients ascending by power.
    ///
    /// The double-precision implementation is compensated; the extended one is
    /// plain Horner, which is already far below double rounding.
    fn horner(coeffs: &[Cplx<Self>], z: Cplx<Self>) -> Cplx<Self> {
        let mut acc = Cplx::new(Self::zero(), Self::zero());
        for c in coeffs.iter().rev() {
            acc = acc * z + *c;
        }
        acc
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Double;
    const EPSILON: f64 = f64::EPSILON / 2.0;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_ext(self) -> super::ExtFloat {
        super::ExtFloat::from_f64(self)
    }

    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn unit_powers(step: i64, modulus: u64, count: usize) -> Vec<Cplx<f64>> {
        let m = modulus as i128;
        (0..count)
            .map(|k| {
                let r = ((step as i128) * (k as i128)).rem_euclid(m);
                let theta = std::f64::consts::TAU * (r as f64) / (modulus as f64);
                let (s, c) = theta.sin_cos();
                Complex::new(c, s)
            })
            .collect()
    }

    fn horner(coeffs: &[Cplx<f64>], z: Cplx<f64>) -> Cplx<f64> {
        super::univariate::compensated_horner(coeffs, z)
    }
}
