//! Triple-double floating point.
//!
//! A value is the unevaluated sum of three doubles of decreasing magnitude.
//! Every operation builds the exact (or nearly exact) list of partial terms
//! with error-free transformations and then distils it back to three
//! components, so the relative error of each operation is a small multiple of
//! `2^-150`. Exponent range is that of `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};

use super::scalar::{Precision, Real};

#[derive(Clone, Copy, Default)]
pub struct ExtFloat([f64; 3]);

#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    #[cfg(target_feature = "fma")]
    {
        (p, a.mul_add(b, -p))
    }
    #[cfg(not(target_feature = "fma"))]
    {
        let (ah, al) = split(a);
        let (bh, bl) = split(b);
        let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
        (p, e)
    }
}

/// One sweep of error-free additions from the tail; `t[0]` ends up holding
/// an approximation of the total and the exact sum is preserved.
#[inline]
fn sweep(t: &mut [f64]) {
    for i in (1..t.len()).rev() {
        let (s, e) = two_sum(t[i - 1], t[i]);
        t[i - 1] = s;
        t[i] = e;
    }
}

fn distil(t: &mut [f64]) -> ExtFloat {
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        if k >= t.len() {
            break;
        }
        let rest = &mut t[k..];
        sweep(rest);
        sweep(rest);
        *slot = rest[0];
    }
    let (a, b) = two_sum(out[0], out[1]);
    let (b, c) = two_sum(b, out[2]);
    let (a, b) = two_sum(a, b);
    ExtFloat([a, b, c])
}

impl ExtFloat {
    pub const MANTISSA_BITS: u32 = 150;
    pub const ZERO: ExtFloat = ExtFloat([0.0; 3]);
    pub const ONE: ExtFloat = ExtFloat([1.0, 0.0, 0.0]);

    pub const fn from_f64(x: f64) -> Self {
        ExtFloat([x, 0.0, 0.0])
    }

    pub fn parts(self) -> [f64; 3] {
        self.0
    }

    /// Builds a value from three limbs; the limbs are renormalised.
    pub fn from_parts(parts: [f64; 3]) -> Self {
        let mut t = parts;
        distil(&mut t)
    }

    pub fn to_f64(self) -> f64 {
        self.0[0] + (self.0[1] + self.0[2])
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p0, e0) = two_prod(self.0[0], b);
        let (p1, e1) = two_prod(self.0[1], b);
        let p2 = self.0[2] * b;
        let mut t = [p0, p1, e0, p2, e1];
        distil(&mut t)
    }

    pub fn sqrt(self) -> Self {
        if self.0[0] <= 0.0 {
            return if self.0[0] == 0.0 { Self::ZERO } else { ExtFloat([f64::NAN; 3]) };
        }
        let mut x = ExtFloat::from_f64(self.0[0].sqrt());
        let half = ExtFloat::from_f64(0.5);
        for _ in 0..2 {
            x = (x + self / x) * half;
        }
        x
    }

    pub fn abs(self) -> Self {
        if self.0[0] < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtFloat({:e}, {:e}, {:e})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl From<f64> for ExtFloat {
    fn from(x: f64) -> Self {
        ExtFloat::from_f64(x)
    }
}

impl Neg for ExtFloat {
    type Output = Self;
    fn neg(self) -> Self {
        ExtFloat([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Add for ExtFloat {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let a = self.0;
        let b = rhs.0;
        let mut t = [a[0], b[0], a[1], b[1], a[2], b[2]];
        distil(&mut t)
    }
}

impl Sub for ExtFloat {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ExtFloat {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = self.0;
        let b = rhs.0;
        let (p00, e00) = two_prod(a[0], b[0]);
        let (p01, e01) = two_prod(a[0], b[1]);
        let (p10, e10) = two_prod(a[1], b[0]);
        let mut t = [p00, p01, p10, e00, a[0] * b[2], a[1] * b[1], a[2] * b[0], e01, e10];
        distil(&mut t)
    }
}

impl Div for ExtFloat {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let d = rhs.0[0];
        let q0 = self.0[0] / d;
        let r = self - rhs.mul_f64(q0);
        let q1 = r.0[0] / d;
        let r = r - rhs.mul_f64(q1);
        let q2 = r.0[0] / d;
        let r = r - rhs.mul_f64(q2);
        let q3 = r.0[0] / d;
        let mut t = [q0, q1, q2, q3];
        distil(&mut t)
    }
}

/// Truncated remainder; exact only while the quotient fits a double.
impl Rem for ExtFloat {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = (self / rhs).to_f64().trunc();
        self - rhs.mul_f64(q)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for ExtFloat {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl PartialEq for ExtFloat {
    fn eq(&self, other: &Self) -> bool {
        (*self - *other).0[0] == 0.0
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (*self - *other).0[0].partial_cmp(&0.0)
    }
}

impl Zero for ExtFloat {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0[0] == 0.0 && self.0[1] == 0.0 && self.0[2] == 0.0
    }
}

impl One for ExtFloat {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for ExtFloat {
    type FromStrRadixErr = std::num::ParseFloatError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            // Mirror f64, which only parses decimal here.
            return "not a number".parse::<f64>().map(ExtFloat::from_f64);
        }
        s.parse::<f64>().map(ExtFloat::from_f64)
    }
}

impl Real for ExtFloat {
    const PRECISION: Precision = Precision::Extended;
    const EPSILON: f64 = 7.006_492_321_624_085e-46; // 2^-150

    fn from_f64(x: f64) -> Self {
        ExtFloat::from_f64(x)
    }
    fn to_ext(self) -> ExtFloat {
        self
    }

    fn to_f64(self) -> f64 {
        ExtFloat::to_f64(self)
    }
    fn abs(self) -> Self {
        ExtFloat::abs(self)
    }
    fn sqrt(self) -> Self {
        ExtFloat::sqrt(self)
    }
    fn is_finite(self) -> bool {
        ExtFloat::is_finite(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn exact(x: ExtFloat) -> BigRational {
        x.0.iter()
            .map(|&p| BigRational::from_float(p).unwrap())
            .fold(BigRational::from_integer(BigInt::from(0)), |a, b| a + b)
    }

    fn rel_err(got: ExtFloat, want: &BigRational) -> f64 {
        let diff = exact(got) - want;
        let num = diff.numer().clone();
        if num == BigInt::from(0) {
            return 0.0;
        }
        let d = rat_to_f64(&diff).abs();
        let w = rat_to_f64(want).abs();
        d / w
    }

    fn rat_to_f64(r: &BigRational) -> f64 {
        // Ratio of leading bits is adequate for an error estimate.
        let n = r.numer().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
        let d = r.denom().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
        if n.is_finite() && d.is_finite() {
            n / d
        } else {
            let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
            let sign = if r.numer() < &BigInt::from(0) { -1.0 } else { 1.0 };
            sign * 2f64.powi(shift as i32)
        }
    }

    fn ext(hi: f64, mid: f64, lo: f64) -> ExtFloat {
        ExtFloat::from_parts([hi, hi * mid * 1e-17, hi * lo * 1e-34])
    }

    proptest! {
        #[test]
        fn arithmetic_matches_rationals(
            a in (-1e3f64..1e3, -1.0f64..1.0, -1.0f64..1.0),
            b in (-1e3f64..1e3, -1.0f64..1.0, -1.0f64..1.0),
        ) {
            let x = ext(a.0, a.1, a.2);
            let y = ext(b.0, b.1, b.2);
            prop_assume!(x.to_f64().abs() > 1e-3 && y.to_f64().abs() > 1e-3);
            let (ex, ey) = (exact(x), exact(y));
            let bound = 2f64.powi(-145);
            let sum = ex.clone() + ey.clone();
            if sum.numer() != &BigInt::from(0) {
                // cancellation is measured against the operands
                let scale = rat_to_f64(&ex).abs() + rat_to_f64(&ey).abs();
                let d = rat_to_f64(&(exact(x + y) - sum.clone())).abs();
                prop_assert!(d <= bound * scale, "add error {d:e}");
            }
            prop_assert!(rel_err(x * y, &(ex.clone() * ey.clone())) <= bound);
            prop_assert!(rel_err(x / y, &(ex / ey)) <= bound);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        for v in [2.0, 3.0, 0.5, 1e-10, 12345.678] {
            let x = ExtFloat::from_f64(v);
            let r = x.sqrt();
            let back = r * r;
            assert!(rel_err(back, &exact(x)) < 1e-44, "{v}");
        }
    }

    #[test]
    fn third_is_accurate_beyond_double() {
        let third = ExtFloat::ONE / ExtFloat::from_f64(3.0);
        let err = (third * ExtFloat::from_f64(3.0) - ExtFloat::ONE).to_f64().abs();
        assert!(err < 1e-44, "{err:e}");
        assert!(third.0[1] != 0.0);
    }

    #[test]
    fn ordering_and_equality() {
        let a = ExtFloat::from_f64(1.0) + ExtFloat::from_f64(1e-40);
        let b = ExtFloat::ONE;
        assert!(a > b);
        assert!(b < a);
        assert!(a != b);
        assert_eq!(a - ExtFloat::from_f64(1e-40), b);
    }
}
