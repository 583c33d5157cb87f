use num_traits::Zero;

use super::cplx::{self, lift, lower, mag, zero};
use super::scalar::Real;
use super::univariate::Poly;
use super::{banded, fft, resultant, Cplx};
use crate::error::{Error, Result};

/// Homogeneous form in `(X, Y)` of total degree `D`.
///
/// Entry `i` of the coefficient vector multiplies `X^i Y^(D-i)`, so the
/// dehomogenisation at `Y = 1` has the same coefficients ascending by power of
/// `z = X/Y`. A degree deficit of the dehomogenisation is a root at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct HomForm2<T: Real = f64> {
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> HomForm2<T> {
    /// Panics on an empty vector: a form has degree at least zero.
    pub fn new(coeffs: Vec<Cplx<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a form needs degree + 1 coefficients");
        HomForm2 { coeffs }
    }

    pub fn from_f64(coeffs: &[Cplx<f64>]) -> Self {
        Self::new(coeffs.iter().map(|c| lift(*c)).collect())
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| cplx::real(c)).collect())
    }

    /// Homogenises `p` to total degree `degree`.
    pub fn homogenize(p: &Poly<T>, degree: usize) -> Result<Self> {
        let deg = p.degree().unwrap_or(0);
        if deg > degree {
            return Err(Error::InvalidArgument(format!(
                "cannot homogenise a degree-{deg} polynomial to degree {degree}"
            )));
        }
        let mut c = vec![zero::<T>(); degree + 1];
        c[..p.coeffs().len()].copy_from_slice(p.coeffs());
        Ok(Self::new(c))
    }

    /// `X^i Y^(D-i)`.
    pub fn monomial(i: usize, degree: usize) -> Self {
        let mut c = vec![zero::<T>(); degree + 1];
        c[i] = cplx::one();
        Self::new(c)
    }

    pub fn x() -> Self {
        Self::monomial(1, 1)
    }

    pub fn y() -> Self {
        Self::monomial(0, 1)
    }

    pub fn constant(c: Cplx<T>) -> Self {
        Self::new(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cplx<T>> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| mag(*c)).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * s).collect())
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * s).collect())
    }

    /// Same form divided by its largest coefficient magnitude.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.max_norm();
        if m == 0.0 {
            return Err(Error::ZeroForm);
        }
        Ok(self.scale_real(T::one() / T::from_f64(m)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_degree(other)?;
        Ok(Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_degree(other)?;
        Ok(Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a - *b).collect()))
    }

    fn check_same_degree(&self, other: &Self) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::ShapeMismatch(format!("forms of degree {} and {}", self.degree(), other.degree())));
        }
        Ok(())
    }

    /// Value at `(x, y)` without dividing by either coordinate.
    pub fn eval(&self, x: Cplx<T>, y: Cplx<T>) -> Cplx<T> {
        let mut acc = *self.coeffs.last().expect("non-empty");
        let mut ypow = y;
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * x + *c * ypow;
            ypow *= y;
        }
        acc
    }

    /// `∂/∂X`, a form of degree `D-1` (the zero constant when `D = 0`).
    pub fn d_dx(&self) -> Self {
        if self.degree() == 0 {
            return Self::constant(zero());
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| *c * T::from_usize(i)).collect())
    }

    /// `∂/∂Y`, a form of degree `D-1`.
    pub fn d_dy(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::constant(zero());
        }
        Self::new(self.coeffs[..d].iter().enumerate().map(|(i, c)| *c * T::from_usize(d - i)).collect())
    }

    /// `F(z, 1)`, trimmed.
    pub fn dehomogenize(&self) -> Poly<T> {
        Poly::new(self.coeffs.clone())
    }

    /// Multiplicity of the projective root `(1, 0)`.
    pub fn infinity_multiplicity(&self) -> usize {
        self.coeffs.iter().rev().take_while(|c| c.is_zero()).count()
    }

    /// Product of two forms; degrees add.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroForm);
        }
        let c = if self.coeffs.len().min(other.coeffs.len()) > 24 {
            fft::convolve(&self.coeffs, &other.coeffs)
        } else {
            fft::naive_convolve(&self.coeffs, &other.coeffs)
        };
        if !c.iter().all(|z| cplx::is_finite(*z)) {
            return Err(Error::Overflow("form product"));
        }
        Ok(Self::new(c))
    }

    /// `self^k`, with `self^0 = 1`.
    pub fn pow(&self, k: usize) -> Result<Self> {
        let mut acc = Self::constant(cplx::one());
        for _ in 0..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Quotient of a numerically exact division.
    ///
    /// Solves the banded convolution system `q·den = num` in the least-squares
    /// sense by Householder reflections, which stays backward stable when the
    /// divisor is tiny on the unit circle. Fails with `NotDivisible` unless
    /// `‖num − q·den‖∞ ≤ tol·‖num‖∞`.
    pub fn exact_divide(&self, den: &Self, tol: f64) -> Result<Self> {
        if den.is_zero() || self.is_zero() {
            return Err(Error::ZeroForm);
        }
        let dn = self.degree();
        let dd = den.degree();
        if dd > dn {
            return Err(Error::NotDivisible { residual: f64::INFINITY, tol });
        }
        let q = if dd == 0 {
            let inv = cplx::one::<T>() / den.coeffs[0];
            self.scale(inv)
        } else {
            Self::new(banded::convolution_lstsq(&den.coeffs, &self.coeffs))
        };
        if !q.coeffs.iter().all(|z| cplx::is_finite(*z)) {
            return Err(Error::NotDivisible { residual: f64::INFINITY, tol });
        }
        let back = q.multiply(den)?;
        let residual =
            self.coeffs.iter().zip(back.coeffs()).map(|(a, b)| mag(*a - *b)).fold(0.0, f64::max) / self.max_norm();
        if !(residual <= tol) {
            return Err(Error::NotDivisible { residual, tol });
        }
        Ok(q)
    }

    /// Resultant of two forms taken at their formal degrees.
    ///
    /// Vanishes exactly when the forms share a projective root, including a
    /// common root at infinity.
    pub fn resultant(&self, other: &Self) -> Cplx<T> {
        resultant::sylvester(&self.coeffs, &other.coeffs)
    }

    /// `F(aX + bY, cX + dY)`.
    pub fn substitute_linear(&self, a: Cplx<T>, b: Cplx<T>, c: Cplx<T>, d: Cplx<T>) -> Result<Self> {
        let deg = self.degree();
        let l1 = Self::new(vec![b, a]);
        let l2 = Self::new(vec![d, c]);
        let p1 = powers(&l1, deg)?;
        let p2 = powers(&l2, deg)?;
        let mut out = vec![zero::<T>(); deg + 1];
        for (i, coef) in self.coeffs.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let term = p1[i].multiply(&p2[deg - i])?;
            for (o, t) in out.iter_mut().zip(term.coeffs()) {
                *o += *coef * *t;
            }
        }
        Ok(Self::new(out))
    }

    pub fn cast<U: Real>(&self) -> HomForm2<U> {
        HomForm2::new(self.coeffs.iter().map(|c| lift(lower(*c))).collect())
    }

    pub fn to_f64_coeffs(&self) -> Vec<Cplx<f64>> {
        self.coeffs.iter().map(|c| lower(*c)).collect()
    }
}

/// `[1, f, f², …, f^k]`; a zero form only appears as its zeroth power.
pub(crate) fn powers<T: Real>(f: &HomForm2<T>, k: usize) -> Result<Vec<HomForm2<T>>> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(HomForm2::constant(cplx::one()));
    for i in 1..=k {
        let next =
            if f.is_zero() { HomForm2::new(vec![zero(); f.degree() * i + 1]) } else { out[i - 1].multiply(f)? };
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type F = HomForm2<f64>;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    fn random_form(rng: &mut ChaCha8Rng, degree: usize) -> F {
        F::new((0..=degree).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
    }

    fn assert_close(a: &F, b: &F, tol: f64) {
        assert_eq!(a.degree(), b.degree());
        let scale = a.max_norm().max(b.max_norm());
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() <= tol * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn monomial_product() {
        let xy = F::x().multiply(&F::y()).unwrap();
        assert_eq!(xy.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn difference_of_squares() {
        let plus = F::from_real(&[1.0, 1.0]); // X + Y
        let minus = F::from_real(&[-1.0, 1.0]); // X - Y
        let prod = plus.multiply(&minus).unwrap();
        assert_eq!(prod, F::from_real(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_form(&mut rng, 3);
        let b = random_form(&mut rng, 4);
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab.degree(), 7);
        for _ in 0..20 {
            let x = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let y = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let want = a.eval(x, y) * b.eval(x, y);
            let got = ab.eval(x, y);
            assert!((got - want).norm() <= 1e-12 * want.norm());
        }
    }

    #[test]
    fn divide_difference_of_squares() {
        let num = F::from_real(&[-1.0, 0.0, 1.0]);
        let den = F::from_real(&[-1.0, 1.0]);
        let q = num.exact_divide(&den, 1e-12).unwrap();
        assert_close(&q, &F::from_real(&[1.0, 1.0]), 1e-14);
    }

    #[test]
    fn divide_power_cancels() {
        let s = F::from_real(&[1.0, 1.0]);
        let num = s.pow(3).unwrap();
        let q = num.exact_divide(&s, 1e-12).unwrap();
        assert_close(&q, &s.pow(2).unwrap(), 1e-14);
    }

    #[test]
    fn construct_then_divide_recovers_cubic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cubic = random_form(&mut rng, 3);
        let quad = random_form(&mut rng, 2);
        let num = cubic.multiply(&quad).unwrap();
        let q = num.exact_divide(&quad, 1e-10).unwrap();
        let resid = num.sub(&q.multiply(&quad).unwrap()).unwrap().max_norm() / num.max_norm();
        assert!(resid < 1e-10);
        assert_close(&q, &cubic, 1e-10);
    }

    #[test]
    fn divisor_with_roots_at_zero_and_infinity() {
        // XY(X - Y) divides XY(X^3 - Y^3)
        let den = F::from_real(&[0.0, -1.0, 1.0, 0.0]);
        let num = F::from_real(&[0.0, -1.0, 0.0, 0.0, 1.0, 0.0]);
        let q = num.exact_divide(&den, 1e-12).unwrap();
        assert_close(&q, &F::from_real(&[1.0, 1.0, 1.0]), 1e-13);
    }

    #[test]
    fn non_divisible_is_reported() {
        let num = F::from_real(&[1.0, 0.0, 1.0]); // X² + Y²
        let den = F::from_real(&[-1.0, 1.0]);
        match num.exact_divide(&den, 1e-10) {
            Err(Error::NotDivisible { residual, .. }) => assert!(residual > 1e-3),
            other => panic!("expected NotDivisible, got {other:?}"),
        }
    }

    #[test]
    fn zero_operands_are_rejected() {
        let z = F::from_real(&[0.0, 0.0]);
        assert_eq!(z.multiply(&F::x()), Err(Error::ZeroForm));
        assert_eq!(F::x().exact_divide(&z, 1e-9), Err(Error::ZeroForm));
    }

    #[test]
    fn partial_derivatives_satisfy_euler_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_form(&mut rng, 5);
        let (x, y) = (c(0.3, 0.1), c(-0.8, 0.4));
        let lhs = x * f.d_dx().eval(x, y) + y * f.d_dy().eval(x, y);
        let rhs = f.eval(x, y) * 5.0;
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn linear_substitution_matches_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_form(&mut rng, 4);
        let (a, b, cc, d) = (c(0.5, 0.1), c(-0.3, 0.2), c(0.9, -0.4), c(0.2, 0.7));
        let g = f.substitute_linear(a, b, cc, d).unwrap();
        let (x, y) = (c(0.4, -0.2), c(0.1, 0.6));
        let want = f.eval(a * x + b * y, cc * x + d * y);
        assert!((g.eval(x, y) - want).norm() < 1e-13);
    }

    #[test]
    fn large_degree_division_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_form(&mut rng, 300);
        let b = random_form(&mut rng, 40);
        let num = a.multiply(&b).unwrap();
        let q = num.exact_divide(&b, 1e-9).unwrap();
        assert_close(&q, &a, 1e-8);
    }

    fn arb_form(max_deg: usize) -> impl Strategy<Value = F> {
        (1..=max_deg).prop_flat_map(|d| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d + 1)
                .prop_map(|v| F::new(v.into_iter().map(|(r, i)| c(r, i)).collect()))
        })
    }

    fn rel_close(a: &F, b: &F, tol: f64) -> bool {
        let scale = a.max_norm().max(b.max_norm());
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).norm() <= tol * scale)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_is_commutative_and_associative(a in arb_form(64), b in arb_form(64), cc in arb_form(16)) {
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            prop_assert!(rel_close(&ab, &ba, 1e-12));
            let left = ab.multiply(&cc).unwrap();
            let right = a.multiply(&b.multiply(&cc).unwrap()).unwrap();
            prop_assert!(rel_close(&left, &right, 1e-12));
        }

        #[test]
        fn division_inverts_product(a in arb_form(32), b in arb_form(32)) {
            let num = a.multiply(&b).unwrap();
            let q = num.exact_divide(&b, 1e-9).unwrap();
            prop_assert!(rel_close(&q, &a, 1e-10));
        }
    }
}
