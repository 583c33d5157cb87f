//! Period forms, dynatomic forms and the counting function `ν_d(n)`.

use crate::error::{Error, Result};
use crate::poly::cplx::zero;
use crate::poly::{ExtFloat, HomForm2, Precision, Real};
use crate::ratmap::{check_degree_cap, RationalMap};

/// Möbius function.
pub fn moebius_mu(n: u64) -> i8 {
    assert!(n >= 1, "moebius_mu is defined for n >= 1");
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            small.push(k);
            if k * k != n {
                large.push(n / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `Σ_{k|n} μ(n/k)(d^k + 1)`: the number of points of formal period `n`
/// of a degree-`d` map, counted with multiplicity.
pub fn nu_count(d: u64, n: u64) -> u64 {
    assert!(d >= 2 && n >= 1, "nu_count needs d >= 2 and n >= 1");
    let total: i128 =
        divisors(n).into_iter().map(|k| i128::from(moebius_mu(n / k)) * (i128::from(d).pow(k as u32) + 1)).sum();
    u64::try_from(total).expect("nu_count is positive")
}

/// `Y·F_n − X·G_n`, whose projective roots are the solutions of `f^n(x) = x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodForm<T: Real = f64> {
    pub form: HomForm2<T>,
    pub n: usize,
}

/// Quotient of period forms whose roots are the points of formal period `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynatomicForm<T: Real = f64> {
    pub form: HomForm2<T>,
    pub n: usize,
    pub nominal_degree: usize,
}

impl<T: Real> DynatomicForm<T> {
    pub fn cast<U: Real>(&self) -> DynatomicForm<U> {
        DynatomicForm { form: self.form.cast(), n: self.n, nominal_degree: self.nominal_degree }
    }
}

/// Relative residual accepted by the dynatomic division at precision `T`.
pub fn default_division_tol<T: Real>() -> f64 {
    1e6 * T::EPSILON
}

fn period_from_iterate<T: Real>(f: &HomForm2<T>, g: &HomForm2<T>) -> Result<HomForm2<T>> {
    let deg = f.degree();
    let mut c = vec![zero::<T>(); deg + 2];
    for (i, a) in f.coeffs().iter().enumerate() {
        c[i] += *a;
    }
    for (i, b) in g.coeffs().iter().enumerate() {
        c[i + 1] -= *b;
    }
    HomForm2::new(c).normalized()
}

pub fn period_form<T: Real>(f: &RationalMap<T>, n: usize) -> Result<PeriodForm<T>> {
    let (fa, ga) = f.iterate_forms(n)?;
    Ok(PeriodForm { form: period_from_iterate(&fa, &ga)?, n })
}

/// Period forms for every divisor of `n`, sharing one pass of iteration.
pub(crate) fn period_forms_for_divisors<T: Real>(f: &RationalMap<T>, n: usize) -> Result<Vec<PeriodForm<T>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    check_degree_cap(f.degree(), n)?;
    let divs = divisors(n as u64);
    let mut out = Vec::with_capacity(divs.len());
    let mut fa = f.numerator().clone();
    let mut ga = f.denominator().clone();
    for k in 1..=n {
        if k > 1 {
            let (nf, ng) = f.compose_forms(&fa, &ga)?;
            let m = nf.max_norm().max(ng.max_norm());
            if m == 0.0 || !m.is_finite() {
                return Err(Error::Overflow("iterate forms"));
            }
            let s = T::one() / T::from_f64(m);
            fa = nf.scale_real(s);
            ga = ng.scale_real(s);
        }
        if divs.contains(&(k as u64)) {
            out.push(PeriodForm { form: period_from_iterate(&fa, &ga)?, n: k });
        }
    }
    Ok(out)
}

/// Dynatomic form from precomputed period forms of all divisors of `n`.
pub(crate) fn dynatomic_from_periods<T: Real>(
    periods: &[PeriodForm<T>],
    n: usize,
    d: usize,
    tol: f64,
) -> Result<DynatomicForm<T>> {
    let mut num: Option<HomForm2<T>> = None;
    let mut den: Option<HomForm2<T>> = None;
    for pf in periods {
        let slot = match moebius_mu((n / pf.n) as u64) {
            1 => &mut num,
            -1 => &mut den,
            _ => continue,
        };
        *slot = Some(match slot.take() {
            None => pf.form.clone(),
            Some(acc) => acc.multiply(&pf.form)?.normalized()?,
        });
    }
    let num = num.expect("mu(1) = 1 contributes the period-n form");
    let form = match den {
        None => num,
        Some(den) => num.exact_divide(&den, tol)?.normalized()?,
    };
    let nominal_degree = nu_count(d as u64, n as u64) as usize;
    debug_assert_eq!(form.degree(), nominal_degree);
    Ok(DynatomicForm { form, n, nominal_degree })
}

/// Dynatomic form at the precision of `f`, without retry.
pub fn dynatomic_form_in<T: Real>(f: &RationalMap<T>, n: usize, tol: f64) -> Result<DynatomicForm<T>> {
    let periods = period_forms_for_divisors(f, n)?;
    dynatomic_from_periods(&periods, n, f.degree(), tol)
}

/// Dynatomic form of a double-precision map. Numerical failures at double
/// precision are retried once at extended precision.
pub fn dynatomic_form(f: &RationalMap<f64>, n: usize, precision: Precision) -> Result<DynatomicForm<f64>> {
    let extended = || -> Result<DynatomicForm<f64>> {
        let hi: RationalMap<ExtFloat> = f.cast();
        Ok(dynatomic_form_in(&hi, n, default_division_tol::<ExtFloat>())?.cast())
    };
    match precision {
        Precision::Extended => extended(),
        Precision::Double => match dynatomic_form_in(f, n, default_division_tol::<f64>()) {
            Err(e) if e.is_precision_artifact() => extended(),
            other => other,
        },
    }
}
