//! Rational maps of the projective line in homogeneous coordinates.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::cplx::{self, lift, lower, mag, zero};
use crate::poly::{Cplx, ExtFloat, HomForm2, Real};

/// Minimum `|Res(P, Q)|` of a normalised map.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// Largest iterate degree `d^n` the crate will expand.
pub const DEGREE_CAP: u64 = 4096;
/// Default projective equality tolerance.
pub const PROJ_TOL: f64 = 1e-9;
/// Both image coordinates below this magnitude means an indeterminate point.
const INDETERMINATE: f64 = 1e-14;

/// A point of P¹ with its larger coordinate scaled to exactly one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint<T: Real = f64> {
    x: Cplx<T>,
    y: Cplx<T>,
}

impl<T: Real> ProjPoint<T> {
    pub fn new(x: Cplx<T>, y: Cplx<T>) -> Result<Self> {
        let (mx, my) = (mag(x), mag(y));
        if !(mx.is_finite() && my.is_finite()) {
            return Err(Error::Overflow("projective point"));
        }
        if mx == 0.0 && my == 0.0 {
            return Err(Error::IndeterminatePoint);
        }
        Ok(if my >= mx { ProjPoint { x: x / y, y: cplx::one() } } else { ProjPoint { x: cplx::one(), y: y / x } })
    }

    pub fn from_affine(z: Cplx<T>) -> Self {
        if mag(z) <= 1.0 {
            ProjPoint { x: z, y: cplx::one() }
        } else {
            ProjPoint { x: cplx::one(), y: cplx::one::<T>() / z }
        }
    }

    pub fn infinity() -> Self {
        ProjPoint { x: cplx::one(), y: zero() }
    }

    pub fn x(&self) -> Cplx<T> {
        self.x
    }

    pub fn y(&self) -> Cplx<T> {
        self.y
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    /// `x/y`, or `None` at infinity.
    pub fn affine(&self) -> Option<Cplx<T>> {
        if self.y.is_zero() {
            None
        } else {
            Some(self.x / self.y)
        }
    }

    /// True when the affine chart `z = x/y` is the well-conditioned one here.
    pub fn in_affine_chart(&self) -> bool {
        mag(self.y) >= mag(self.x)
    }

    /// `|x_p y_q − x_q y_p|` for normalised representatives.
    pub fn distance(&self, other: &Self) -> f64 {
        mag(self.x * other.y - other.x * self.y)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn cast<U: Real>(&self) -> ProjPoint<U> {
        ProjPoint { x: lift(lower(self.x)), y: lift(lower(self.y)) }
    }
}

/// An invertible 2×2 matrix acting by `(X, Y) ↦ (aX + bY, cX + dY)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius<T: Real = f64> {
    a: Cplx<T>,
    b: Cplx<T>,
    c: Cplx<T>,
    d: Cplx<T>,
}

impl<T: Real> Moebius<T> {
    /// Normalises the largest entry to unit magnitude and rejects
    /// `|ad − bc|` below [`DEGENERACY_THRESHOLD`].
    pub fn new(a: Cplx<T>, b: Cplx<T>, c: Cplx<T>, d: Cplx<T>) -> Result<Self> {
        let m = [a, b, c, d].iter().map(|z| mag(*z)).fold(0.0, f64::max);
        if m == 0.0 || !m.is_finite() {
            return Err(Error::Degenerate("zero or non-finite Möbius matrix".into()));
        }
        let s = T::one() / T::from_f64(m);
        let (a, b, c, d) = (a * s, b * s, c * s, d * s);
        let det = mag(a * d - b * c);
        if det < DEGENERACY_THRESHOLD {
            return Err(Error::Degenerate(format!("Möbius determinant {det:.3e}")));
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn identity() -> Self {
        Moebius { a: cplx::one(), b: zero(), c: zero(), d: cplx::one() }
    }

    /// `z ↦ 1/z`.
    pub fn inversion() -> Self {
        Moebius { a: zero(), b: cplx::one(), c: cplx::one(), d: zero() }
    }

    pub fn entries(&self) -> [Cplx<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn inverse(&self) -> Self {
        // adjugate; scaling is irrelevant projectively
        Moebius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, p: &ProjPoint<T>) -> Result<ProjPoint<T>> {
        ProjPoint::new(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)
    }

    pub fn cast<U: Real>(&self) -> Moebius<U> {
        Moebius { a: lift(lower(self.a)), b: lift(lower(self.b)), c: lift(lower(self.c)), d: lift(lower(self.d)) }
    }
}

/// A degree-`d` endomorphism `[P : Q]` of P¹.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap<T: Real = f64> {
    num: HomForm2<T>,
    den: HomForm2<T>,
}

impl<T: Real> RationalMap<T> {
    /// Normalises `max |coeff|` over both forms to one and checks the
    /// homogeneous resultant against [`DEGENERACY_THRESHOLD`].
    pub fn new(num: HomForm2<T>, den: HomForm2<T>) -> Result<Self> {
        Self::with_threshold(num, den, DEGENERACY_THRESHOLD)
    }

    pub fn with_threshold(num: HomForm2<T>, den: HomForm2<T>, threshold: f64) -> Result<Self> {
        let map = Self::normalized_unchecked(num, den)?;
        let res = mag(map.resultant());
        if !(res >= threshold) {
            return Err(Error::Degenerate(format!("resultant magnitude {res:.3e} below threshold {threshold:.1e}")));
        }
        Ok(map)
    }

    fn normalized_unchecked(num: HomForm2<T>, den: HomForm2<T>) -> Result<Self> {
        if num.degree() != den.degree() {
            return Err(Error::ShapeMismatch(format!(
                "numerator degree {} differs from denominator degree {}",
                num.degree(),
                den.degree()
            )));
        }
        if num.degree() < 2 {
            return Err(Error::InvalidArgument(format!("map degree must be at least 2, got {}", num.degree())));
        }
        let m = num.max_norm().max(den.max_norm());
        if !m.is_finite() {
            return Err(Error::Overflow("map coefficients"));
        }
        if m == 0.0 {
            return Err(Error::Degenerate("both forms vanish".into()));
        }
        let s = T::one() / T::from_f64(m);
        Ok(RationalMap { num: num.scale_real(s), den: den.scale_real(s) })
    }

    /// `z ↦ num(z)/den(z)` from affine coefficients (ascending), homogenised
    /// to `degree`.
    pub fn from_affine(num: &[Cplx<f64>], den: &[Cplx<f64>], degree: usize) -> Result<Self> {
        let pad = |c: &[Cplx<f64>]| -> Result<HomForm2<T>> {
            if c.len() > degree + 1 {
                return Err(Error::ShapeMismatch(format!("{} coefficients exceed degree {degree}", c.len())));
            }
            let mut v: Vec<Cplx<T>> = c.iter().map(|z| lift(*z)).collect();
            v.resize(degree + 1, zero());
            Ok(HomForm2::new(v))
        };
        Self::new(pad(num)?, pad(den)?)
    }

    pub fn degree(&self) -> usize {
        self.num.degree()
    }

    pub fn numerator(&self) -> &HomForm2<T> {
        &self.num
    }

    pub fn denominator(&self) -> &HomForm2<T> {
        &self.den
    }

    pub fn resultant(&self) -> Cplx<T> {
        self.num.resultant(&self.den)
    }

    /// `(P(F, G), Q(F, G))` for forms `F`, `G` of equal degree.
    pub fn compose_forms(&self, f: &HomForm2<T>, g: &HomForm2<T>) -> Result<(HomForm2<T>, HomForm2<T>)> {
        let d = self.degree();
        let gpow = crate::poly::form_powers(g, d)?;
        let horner = |p: &HomForm2<T>| -> Result<HomForm2<T>> {
            let c = p.coeffs();
            let mut acc = HomForm2::constant(c[d]);
            for i in (0..d).rev() {
                let shifted = if acc.is_zero() {
                    HomForm2::new(vec![zero(); acc.degree() + f.degree() + 1])
                } else {
                    acc.multiply(f)?
                };
                let term = gpow[d - i].scale(c[i]);
                acc = shifted.add(&term)?;
            }
            Ok(acc)
        };
        Ok((horner(&self.num)?, horner(&self.den)?))
    }

    /// Homogeneous forms `(F_n, G_n)` with `f^n = F_n/G_n`, each of degree
    /// `d^n`, renormalised jointly after every composition.
    pub fn iterate_forms(&self, n: usize) -> Result<(HomForm2<T>, HomForm2<T>)> {
        if n == 0 {
            return Err(Error::InvalidArgument("iterate count must be at least 1".into()));
        }
        check_degree_cap(self.degree(), n)?;
        let mut f = self.num.clone();
        let mut g = self.den.clone();
        for _ in 1..n {
            let (nf, ng) = self.compose_forms(&f, &g)?;
            let m = nf.max_norm().max(ng.max_norm());
            if m == 0.0 || !m.is_finite() {
                return Err(Error::Overflow("iterate forms"));
            }
            let s = T::one() / T::from_f64(m);
            f = nf.scale_real(s);
            g = ng.scale_real(s);
        }
        Ok((f, g))
    }

    /// `φ ∘ f ∘ φ⁻¹`.
    pub fn conjugate(&self, phi: &Moebius<T>) -> Result<Self> {
        let (num, den) = self.conjugate_forms(phi)?;
        Self::new(num, den)
    }

    fn conjugate_forms(&self, phi: &Moebius<T>) -> Result<(HomForm2<T>, HomForm2<T>)> {
        let inv = phi.inverse();
        let [ia, ib, ic, id] = inv.entries();
        let p1 = self.num.substitute_linear(ia, ib, ic, id)?;
        let q1 = self.den.substitute_linear(ia, ib, ic, id)?;
        let [a, b, c, d] = phi.entries();
        let num = p1.scale(a).add(&q1.scale(b))?;
        let den = p1.scale(c).add(&q1.scale(d))?;
        Ok((num, den))
    }

    pub fn apply(&self, p: &ProjPoint<T>) -> Result<ProjPoint<T>> {
        let a = self.num.eval(p.x, p.y);
        let b = self.den.eval(p.x, p.y);
        if mag(a) < INDETERMINATE && mag(b) < INDETERMINATE {
            return Err(Error::IndeterminatePoint);
        }
        ProjPoint::new(a, b)
    }

    /// Derivative of the map at `p` read in the chart chosen by `p` on the
    /// source side and in the chart chosen by `target` on the image side.
    fn local_derivative(&self, p: &ProjPoint<T>, target_affine: bool) -> Cplx<T> {
        let (x, y) = (p.x, p.y);
        let a = self.num.eval(x, y);
        let b = self.den.eval(x, y);
        let (da, db) = if p.in_affine_chart() {
            (self.num.d_dx().eval(x, y), self.den.d_dx().eval(x, y))
        } else {
            (self.num.d_dy().eval(x, y), self.den.d_dy().eval(x, y))
        };
        if target_affine {
            (da * b - a * db) / (b * b)
        } else {
            (db * a - b * da) / (a * a)
        }
    }

    /// `df^m` along a cycle of length `m`, by the chain rule through one chart
    /// per cycle point.
    pub fn multiplier_along_cycle(&self, cycle: &[ProjPoint<T>], tol: f64) -> Result<Cplx<T>> {
        if cycle.is_empty() {
            return Err(Error::InvalidArgument("empty cycle".into()));
        }
        let m = cycle.len();
        let mut lambda = cplx::one::<T>();
        for i in 0..m {
            let next = &cycle[(i + 1) % m];
            let image = self.apply(&cycle[i])?;
            let miss = image.distance(next);
            if !(miss <= tol) {
                return Err(Error::CycleBroken { step: i, miss });
            }
            lambda *= self.local_derivative(&cycle[i], next.in_affine_chart());
        }
        if !cplx::is_finite(lambda) {
            return Err(Error::Overflow("multiplier"));
        }
        Ok(lambda)
    }

    pub fn cast<U: Real>(&self) -> RationalMap<U> {
        RationalMap { num: self.num.cast(), den: self.den.cast() }
    }
}

impl RationalMap<f64> {
    /// Validated map from double-precision forms.
    pub fn make_map(num: HomForm2<f64>, den: HomForm2<f64>) -> Result<Self> {
        Self::new(num, den)
    }

    /// Conjugation with a retry at extended precision when cancellation
    /// spoils the resultant test.
    pub fn conjugate_map(&self, phi: &Moebius<f64>) -> Result<Self> {
        match self.conjugate(phi) {
            Err(Error::Degenerate(_)) => {
                let hi: RationalMap<ExtFloat> = self.cast();
                let (num, den) = hi.conjugate_forms(&phi.cast())?;
                let hi_map = RationalMap::new(num, den)?;
                Ok(hi_map.cast())
            }
            other => other,
        }
    }
}

pub(crate) fn check_degree_cap(d: usize, n: usize) -> Result<()> {
    let degree = (d as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if degree > DEGREE_CAP {
        return Err(Error::DegreeCap { degree, cap: DEGREE_CAP });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Complex::new(re, im)
    }

    fn z_squared() -> RationalMap {
        RationalMap::new(HomForm2::from_real(&[0.0, 0.0, 1.0]), HomForm2::from_real(&[1.0, 0.0, 0.0])).unwrap()
    }

    /// z² + c
    fn quadratic(cc: Cplx<f64>) -> RationalMap {
        RationalMap::from_affine(&[cc, c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)], 2).unwrap()
    }

    fn random_map(rng: &mut ChaCha8Rng, d: usize) -> RationalMap {
        loop {
            let mut draw = || -> HomForm2 {
                HomForm2::new((0..=d).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
            };
            let (p, q) = (draw(), draw());
            if let Ok(f) = RationalMap::with_threshold(p, q, 1e-6) {
                return f;
            }
        }
    }

    fn random_moebius(rng: &mut ChaCha8Rng) -> Moebius {
        loop {
            let mut e = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (a, b, cc, d) = (e(), e(), e(), e());
            if (a * d - b * cc).norm() > 0.2 {
                return Moebius::new(a, b, cc, d).unwrap();
            }
        }
    }

    #[test]
    fn monomial_map_is_valid() {
        let f = z_squared();
        assert_eq!(f.degree(), 2);
        assert!(f.resultant().norm() > 0.5);
    }

    #[test]
    fn common_factor_is_degenerate() {
        let r = RationalMap::<f64>::new(HomForm2::from_real(&[0.0, 0.0, 1.0]), HomForm2::from_real(&[0.0, 1.0, 0.0]));
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn quadratic_polynomial_resultant() {
        // Res(X² + Y², Y²) at formal degree 2 is 1 after normalisation
        let f = quadratic(c(1.0, 0.0));
        assert!((f.resultant() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn degree_one_is_rejected() {
        let r = RationalMap::new(HomForm2::<f64>::x(), HomForm2::y());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn monomial_iteration() {
        let (f, g) = z_squared().iterate_forms(3).unwrap();
        assert_eq!(f, HomForm2::monomial(8, 8));
        assert_eq!(g, HomForm2::monomial(0, 8));
    }

    #[test]
    fn first_iterate_is_the_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_map(&mut rng, 3);
        let (p, q) = f.iterate_forms(1).unwrap();
        assert_eq!(&p, f.numerator());
        assert_eq!(&q, f.denominator());
    }

    #[test]
    fn second_iterate_of_basilica_matches_expansion() {
        let f = quadratic(c(-1.0, 0.0));
        let (p, q) = f.iterate_forms(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let z = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            let w = z * z - 1.0;
            let want = w * w - 1.0;
            let got = p.eval(z, c(1.0, 0.0)) / q.eval(z, c(1.0, 0.0));
            assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0));
        }
    }

    #[test]
    fn degree_cap_is_enforced() {
        let f = z_squared();
        assert!(matches!(f.iterate_forms(13), Err(Error::DegreeCap { degree: 8192, .. })));
    }

    #[test]
    fn iterates_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_map(&mut rng, 2);
        let (f5, g5) = f.iterate_forms(5).unwrap();
        let (f2, g2) = f.iterate_forms(2).unwrap();
        let (f3, g3) = f.iterate_forms(3).unwrap();
        for _ in 0..10 {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let one = c(1.0, 0.0);
            let inner = (f3.eval(z, one), g3.eval(z, one));
            let comp = f2.eval(inner.0, inner.1) / g2.eval(inner.0, inner.1);
            let direct = f5.eval(z, one) / g5.eval(z, one);
            let p1 = ProjPoint::from_affine(comp);
            let p2 = ProjPoint::from_affine(direct);
            assert!(p1.distance(&p2) < 1e-9, "{comp} vs {direct}");
        }
    }

    #[test]
    fn identity_conjugation_is_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_map(&mut rng, 2);
        let g = f.conjugate(&Moebius::identity()).unwrap();
        for (a, b) in f.numerator().coeffs().iter().zip(g.numerator().coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn inversion_fixes_z_squared() {
        let g = z_squared().conjugate(&Moebius::inversion()).unwrap();
        assert_eq!(g, z_squared());
    }

    #[test]
    fn apply_map_examples() {
        let f = z_squared();
        let one = ProjPoint::from_affine(c(1.0, 0.0));
        assert_eq!(f.apply(&one).unwrap(), one);
        let inf = ProjPoint::infinity();
        assert_eq!(f.apply(&inf).unwrap(), inf);
        let b = quadratic(c(-1.0, 0.0));
        let zero_pt = ProjPoint::from_affine(c(0.0, 0.0));
        let p1 = b.apply(&zero_pt).unwrap();
        assert!(p1.approx_eq(&ProjPoint::from_affine(c(-1.0, 0.0)), 1e-15));
        assert!(b.apply(&p1).unwrap().approx_eq(&zero_pt, 1e-15));
    }

    #[test]
    fn multiplier_examples() {
        let f = z_squared();
        let m = f.multiplier_along_cycle(&[ProjPoint::from_affine(c(1.0, 0.0))], PROJ_TOL).unwrap();
        assert!((m - c(2.0, 0.0)).norm() < 1e-15);
        let m = f.multiplier_along_cycle(&[ProjPoint::infinity()], PROJ_TOL).unwrap();
        assert!(m.norm() < 1e-15);
        let b = quadratic(c(-1.0, 0.0));
        let cyc = [ProjPoint::from_affine(c(0.0, 0.0)), ProjPoint::from_affine(c(-1.0, 0.0))];
        assert!(b.multiplier_along_cycle(&cyc, PROJ_TOL).unwrap().norm() < 1e-15);
    }

    #[test]
    fn broken_cycle_is_reported() {
        let f = z_squared();
        let r = f.multiplier_along_cycle(&[ProjPoint::from_affine(c(0.5, 0.0))], PROJ_TOL);
        assert!(matches!(r, Err(Error::CycleBroken { step: 0, .. })));
    }

    #[test]
    fn multiplier_is_chart_independent_across_the_boundary() {
        // fixed point of z² + c with |z| slightly above 1 uses the inverted chart
        let cc = c(-1.3, 0.2);
        let f = quadratic(cc);
        // z = (1 + sqrt(1 - 4c))/2
        let z = (c(1.0, 0.0) + (c(1.0, 0.0) - cc * 4.0).sqrt()) / 2.0;
        assert!(z.norm() > 1.0);
        let m = f.multiplier_along_cycle(&[ProjPoint::from_affine(z)], 1e-12).unwrap();
        assert!((m - z * 2.0).norm() < 1e-12);
    }

    #[test]
    fn multiplier_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let cc = c(rng.random_range(-1.0..0.5), rng.random_range(-0.5..0.5));
            let f = quadratic(cc);
            let z = (c(1.0, 0.0) - (c(1.0, 0.0) - cc * 4.0).sqrt()) / 2.0;
            let p = ProjPoint::from_affine(z);
            let phi = random_moebius(&mut rng);
            let g = f.conjugate(&phi).unwrap();
            let q = phi.apply(&p).unwrap();
            let lf = f.multiplier_along_cycle(&[p], 1e-10).unwrap();
            let lg = g.multiplier_along_cycle(&[q], 1e-8).unwrap();
            assert!((lf - lg).norm() < 1e-8 * lf.norm().max(1.0), "{lf} vs {lg}");
        }
    }

    #[test]
    fn holomorphic_index_of_quadratic_fixed_points() {
        // finite fixed points of z² + c; ∞ has multiplier 0 and contributes 1
        let cc = c(0.3, 0.4);
        let f = quadratic(cc);
        let disc = (c(1.0, 0.0) - cc * 4.0).sqrt();
        let mut total = c(1.0, 0.0);
        for z in [(c(1.0, 0.0) + disc) / 2.0, (c(1.0, 0.0) - disc) / 2.0] {
            let l = f.multiplier_along_cycle(&[ProjPoint::from_affine(z)], 1e-12).unwrap();
            total += (c(1.0, 0.0) - l).inv();
        }
        assert!((total - c(1.0, 0.0)).norm() < 1e-12);
    }
}
