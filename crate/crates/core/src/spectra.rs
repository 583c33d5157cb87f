//! Cycles, multiplier spectra and their symmetric-function coordinates.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::dynatomic::{default_division_tol, divisors, dynatomic_from_periods, moebius_mu, period_forms_for_divisors};
use crate::error::{Error, Result};
use crate::poly::cplx::{self, lift, lower, mag, powu};
use crate::poly::{Cplx, ExtFloat, HomForm2, Precision, Real};
use crate::ratmap::{ProjPoint, RationalMap, PROJ_TOL};
use crate::rootfind::{projective_roots_guided_in, RootCluster, RootOptions};

/// Root clusters wider than this cannot be told apart from their neighbours.
const MAX_CLUSTER_RADIUS: f64 = 1e-3;

/// Tolerances and precision tier shared by the spectrum computations.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraOptions {
    /// `Double` computes at 53 bits and retries at extended precision on a
    /// numerical failure; `Extended` goes straight to the extended tier.
    pub precision: Precision,
    pub proj_tol: f64,
    /// `|λ|` at or below this flags a superattracting cycle.
    pub superattracting_tol: f64,
    /// Cutoff on `|λ^r − 1|` for the root-of-unity clause of formal periods.
    pub unity_tol: f64,
    /// Largest root-of-unity order considered.
    pub max_root_order: usize,
    /// An image matches a root cluster when it lies within
    /// `max(proj_tol, match_factor·(r_src + r_dst))`.
    pub match_factor: f64,
    pub roots: RootOptions,
}

impl Default for SpectraOptions {
    fn default() -> Self {
        SpectraOptions {
            precision: Precision::Double,
            proj_tol: PROJ_TOL,
            superattracting_tol: 1e-9,
            unity_tol: 1e-8,
            max_root_order: 64,
            match_factor: 1e3,
            roots: RootOptions::default(),
        }
    }
}

impl SpectraOptions {
    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }
}

/// A periodic cycle found among the roots of a dynatomic form.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord<T: Real = f64> {
    pub points: Vec<ProjPoint<T>>,
    /// `df^m` along the cycle, `m` its minimal period.
    pub multiplier: Cplx<T>,
    /// Multiplicity of each point as a root of the dynatomic form.
    pub multiplicity: usize,
    pub formal_periods: BTreeSet<usize>,
}

impl<T: Real> CycleRecord<T> {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    pub fn cast<U: Real>(&self) -> CycleRecord<U> {
        CycleRecord {
            points: self.points.iter().map(ProjPoint::cast).collect(),
            multiplier: lift(lower(self.multiplier)),
            multiplicity: self.multiplicity,
            formal_periods: self.formal_periods.clone(),
        }
    }
}

/// The multiset `s_n`: `df^n` at every point of formal period `n`, with
/// multiplicity. Values are kept at the precision they were computed in.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumLayer {
    n: usize,
    values: Vec<Cplx<ExtFloat>>,
    precision: Precision,
}

impl SpectrumLayer {
    pub fn new(n: usize, multipliers: &[Cplx<f64>]) -> Self {
        SpectrumLayer { n, values: multipliers.iter().map(|z| lift(*z)).collect(), precision: Precision::Double }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn multipliers(&self) -> Vec<Cplx<f64>> {
        self.values.iter().map(|z| lower(*z)).collect()
    }

    pub fn multipliers_extended(&self) -> &[Cplx<ExtFloat>] {
        &self.values
    }

    /// Smallest multiplier magnitude, if any.
    pub fn min_modulus(&self) -> Option<f64> {
        self.values.iter().map(|z| mag(*z)).min_by(f64::total_cmp)
    }
}

/// Elementary symmetric functions `σ_1..σ_N` of a multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaVector {
    pub n: usize,
    pub values: Vec<Cplx<f64>>,
}

/// Concatenated reciprocal blocks `δ_n, …, δ_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauVector {
    pub n: usize,
    pub m: usize,
    pub blocks: Vec<SigmaVector>,
}

impl TauVector {
    pub fn segments(&self) -> impl Iterator<Item = &Cplx<f64>> {
        self.blocks.iter().flat_map(|b| b.values.iter())
    }
}

/// Dispatches a computation to the requested tier, retrying a failed double
/// precision attempt once at extended precision.
fn tiered<R>(precision: Precision, lo: impl FnOnce() -> Result<R>, hi: impl FnOnce() -> Result<R>) -> Result<R> {
    match precision {
        Precision::Extended => hi(),
        Precision::Double => match lo() {
            Err(e) if e.is_precision_artifact() => hi(),
            other => other,
        },
    }
}

/// Partial derivatives of the two forms of a map.
struct Partials<T: Real> {
    px: HomForm2<T>,
    py: HomForm2<T>,
    qx: HomForm2<T>,
    qy: HomForm2<T>,
}

impl<T: Real> Partials<T> {
    fn of(f: &RationalMap<T>) -> Self {
        let (p, q) = (f.numerator(), f.denominator());
        Partials { px: p.d_dx(), py: p.d_dy(), qx: q.d_dx(), qy: q.d_dy() }
    }
}

/// `y₀·X_m − x₀·Y_m` and its derivative in the chart coordinate `s`, where
/// `(X_m, Y_m)` is the `m`-th image of the chart point pushed pointwise
/// through `f`. The value is normalised to a chordal miss so that values at
/// different `s` compare.
fn orbit_residual<T: Real>(
    f: &RationalMap<T>,
    d: &Partials<T>,
    m: usize,
    affine: bool,
    s: Cplx<T>,
) -> Option<(Cplx<T>, Cplx<T>, f64)> {
    let (one, zero) = (cplx::one::<T>(), cplx::zero::<T>());
    let (x0, y0, dx0, dy0) = if affine { (s, one, one, zero) } else { (one, s, zero, one) };
    let (mut x, mut y, mut dx, mut dy) = (x0, y0, dx0, dy0);
    for _ in 0..m {
        let nx = f.numerator().eval(x, y);
        let ny = f.denominator().eval(x, y);
        let ndx = d.px.eval(x, y) * dx + d.py.eval(x, y) * dy;
        let ndy = d.qx.eval(x, y) * dx + d.qy.eval(x, y) * dy;
        let (a, b) = (cplx::modulus(nx), cplx::modulus(ny));
        let scale = if a > b { a } else { b };
        if scale.is_zero() || !cplx::is_finite(nx) || !cplx::is_finite(ny) {
            return None;
        }
        let inv = T::one() / scale;
        (x, y, dx, dy) = (nx * inv, ny * inv, ndx * inv, ndy * inv);
    }
    let r = y0 * x - x0 * y;
    let dr = dy0 * x + y0 * dx - dx0 * y - x0 * dy;
    let norm = mag(x0).max(mag(y0));
    Some((r, dr, mag(r) / norm))
}

/// Newton ratio of the affine dynatomic polynomial at `z`: the Möbius sum of
/// the logarithmic derivatives of the orbit residuals, inverted.
fn dynatomic_ratio<T: Real>(f: &RationalMap<T>, d: &Partials<T>, n: usize, z: Cplx<T>) -> Option<Cplx<T>> {
    let mut log_deriv = cplx::zero::<T>();
    for k in divisors(n as u64) {
        let mu = moebius_mu(n as u64 / k);
        if mu == 0 {
            continue;
        }
        let (r, dr, _) = orbit_residual(f, d, k as usize, true, z)?;
        if r.is_zero() {
            return if k as usize == n { Some(cplx::zero::<T>()) } else { None };
        }
        let t = dr / r;
        log_deriv = if mu > 0 { log_deriv + t } else { log_deriv - t };
    }
    if log_deriv.is_zero() || !cplx::is_finite(log_deriv) {
        return None;
    }
    Some(cplx::one::<T>() / log_deriv)
}

/// Newton on the pointwise orbit residual of period `m`, accepted only when
/// it lowers the residual and stays within `max_move` of the start.
fn refine_on_orbit<T: Real>(
    f: &RationalMap<T>,
    d: &Partials<T>,
    m: usize,
    p: &ProjPoint<T>,
    max_move: f64,
) -> ProjPoint<T> {
    let affine = p.in_affine_chart();
    let one = cplx::one::<T>();
    let mut s = if affine { p.x() } else { p.y() };
    let Some((mut r, mut dr, start_miss)) = orbit_residual(f, d, m, affine, s) else { return *p };
    let mut miss = start_miss;
    for _ in 0..40 {
        if r.is_zero() || dr.is_zero() {
            break;
        }
        let next = s - r / dr;
        if !cplx::is_finite(next) {
            break;
        }
        match orbit_residual(f, d, m, affine, next) {
            Some((rn, drn, mn)) if mn < miss => {
                (s, r, dr, miss) = (next, rn, drn, mn);
            }
            _ => break,
        }
    }
    let q = if affine { ProjPoint::new(s, one) } else { ProjPoint::new(one, s) };
    match q {
        Ok(q) if miss <= start_miss && q.distance(p) <= max_move => q,
        _ => *p,
    }
}

/// Formal exact periods of a point of minimal period `m` with multiplier
/// `lambda`: `{m}`, plus `m·r` when `lambda` is a primitive `r`-th root of
/// unity with `r ≥ 2`.
pub fn formal_periods_from_multiplier<T: Real>(
    m: usize,
    lambda: Cplx<T>,
    unity_tol: f64,
    max_order: usize,
) -> BTreeSet<usize> {
    let mut out = BTreeSet::from([m]);
    let mut pw = cplx::one::<T>();
    for r in 1..=max_order {
        pw *= lambda;
        if mag(pw - cplx::one::<T>()) <= unity_tol {
            if r >= 2 {
                out.insert(m * r);
            }
            break;
        }
    }
    out
}

struct Matcher<'a, T: Real> {
    centers: &'a [ProjPoint<T>],
    clusters: &'a [RootCluster<T>],
    proj_tol: f64,
    factor: f64,
}

impl<T: Real> Matcher<'_, T> {
    /// Index of the unique cluster matching `image`, the image of cluster `src`.
    fn find(&self, src: usize, image: &ProjPoint<T>) -> Result<usize> {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut second = f64::INFINITY;
        for (k, c) in self.centers.iter().enumerate() {
            let d = c.distance(image);
            if d < best.0 {
                second = best.0;
                best = (d, k);
            } else if d < second {
                second = d;
            }
        }
        let (d, k) = best;
        if k == usize::MAX {
            return Err(Error::OrbitMatchFailed("no root clusters".into()));
        }
        let tol = self.proj_tol.max(self.factor * (self.clusters[src].radius + self.clusters[k].radius));
        if d > tol {
            return Err(Error::OrbitMatchFailed(format!(
                "image of root {src} misses every root (nearest {d:.3e}, tolerance {tol:.3e})"
            )));
        }
        if second <= tol {
            return Err(Error::OrbitMatchFailed(format!("image of root {src} matches two roots within {tol:.3e}")));
        }
        Ok(k)
    }
}

/// Cycles of formal period `n` at the working precision of `f`.
pub fn assemble_cycles_in<T: Real>(f: &RationalMap<T>, n: usize, opts: &SpectraOptions) -> Result<Vec<CycleRecord<T>>> {
    let periods = period_forms_for_divisors(f, n)?;
    let dy = dynatomic_from_periods(&periods, n, f.degree(), default_division_tol::<T>())?;
    let partials = Partials::of(f);
    let ratio = |z: Cplx<T>| dynatomic_ratio(f, &partials, n, z);
    let clusters = projective_roots_guided_in(&dy.form, &opts.roots, &ratio)?;
    if let Some(c) = clusters.iter().find(|c| !(c.radius <= MAX_CLUSTER_RADIUS)) {
        return Err(Error::OrbitMatchFailed(format!(
            "root cluster of multiplicity {} has radius {:.3e}",
            c.multiplicity, c.radius
        )));
    }
    let nearest: Vec<f64> = (0..clusters.len())
        .map(|i| {
            (0..clusters.len())
                .filter(|&j| j != i)
                .map(|j| clusters[i].center.distance(&clusters[j].center))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    // a refined point may move a tenth of the way to the nearest other root
    let max_move: Vec<f64> =
        clusters.iter().zip(&nearest).map(|(c, &d)| opts.proj_tol.max(10.0 * c.radius).max(0.1 * d)).collect();
    // the coefficients of the dynatomic form carry their own error, so the
    // centers are pulled onto period-n points of f before matching
    let centers: Vec<ProjPoint<T>> =
        clusters.iter().zip(&max_move).map(|(c, &mv)| refine_on_orbit(f, &partials, n, &c.center, mv)).collect();
    let matcher =
        Matcher { centers: &centers, clusters: &clusters, proj_tol: opts.proj_tol, factor: opts.match_factor };

    let mut used = vec![false; clusters.len()];
    let mut out = Vec::new();
    for start in 0..clusters.len() {
        if used[start] {
            continue;
        }
        let mut orbit = vec![start];
        let mut miss = 0.0f64;
        loop {
            let cur = *orbit.last().expect("non-empty orbit");
            let image = f.apply(&centers[cur])?;
            let next = matcher.find(cur, &image)?;
            miss = miss.max(image.distance(&centers[next]));
            if next == start {
                break;
            }
            if orbit.contains(&next) || used[next] {
                return Err(Error::OrbitMatchFailed(format!(
                    "orbit of root {start} enters another cycle at root {next}"
                )));
            }
            orbit.push(next);
            if orbit.len() > n {
                return Err(Error::OrbitMatchFailed(format!("orbit of root {start} exceeds period {n}")));
            }
        }
        let m = orbit.len();
        if !n.is_multiple_of(m) {
            return Err(Error::OrbitMatchFailed(format!("cycle of length {m} in the period-{n} layer")));
        }
        let mult = clusters[start].multiplicity;
        if orbit.iter().any(|&k| clusters[k].multiplicity != mult) {
            return Err(Error::OrbitMatchFailed(format!("multiplicities differ along the cycle through root {start}")));
        }
        for &k in &orbit {
            used[k] = true;
        }

        let radius = orbit.iter().map(|&k| clusters[k].radius).fold(0.0, f64::max);
        let points: Vec<ProjPoint<T>> = if m == n {
            orbit.iter().map(|&k| centers[k]).collect()
        } else {
            orbit.iter().map(|&k| refine_on_orbit(f, &partials, m, &centers[k], max_move[k])).collect()
        };
        let cycle_tol = opts.proj_tol.max(2.0 * miss).max(opts.match_factor * 2.0 * radius);
        let multiplier = f.multiplier_along_cycle(&points, cycle_tol)?;
        let formal_periods = formal_periods_from_multiplier(m, multiplier, opts.unity_tol, opts.max_root_order);
        out.push(CycleRecord { points, multiplier, multiplicity: mult, formal_periods });
    }
    Ok(out)
}

/// Cycles of formal period `n`, following the precision policy of `opts`.
pub fn assemble_cycles(f: &RationalMap<f64>, n: usize, opts: &SpectraOptions) -> Result<Vec<CycleRecord<f64>>> {
    tiered(
        opts.precision,
        || assemble_cycles_in(f, n, opts),
        || Ok(assemble_cycles_in(&f.cast::<ExtFloat>(), n, opts)?.iter().map(CycleRecord::cast).collect()),
    )
}

/// Formal exact periods of `x`, whose minimal period is searched up to `cap`.
pub fn formal_exact_periods(
    f: &RationalMap<f64>,
    x: &ProjPoint<f64>,
    cap: usize,
    opts: &SpectraOptions,
) -> Result<BTreeSet<usize>> {
    let mut orbit = vec![*x];
    let mut cur = *x;
    for _ in 0..cap {
        cur = f.apply(&cur)?;
        if cur.distance(x) <= opts.proj_tol {
            let lambda = f.multiplier_along_cycle(&orbit, opts.proj_tol)?;
            return Ok(formal_periods_from_multiplier(orbit.len(), lambda, opts.unity_tol, opts.max_root_order));
        }
        orbit.push(cur);
    }
    Err(Error::NotPeriodic { cap })
}

fn layer_values<T: Real>(cycles: &[CycleRecord<T>], n: usize) -> Vec<Cplx<T>> {
    let mut values = Vec::new();
    for c in cycles {
        let m = c.period();
        let v = powu(c.multiplier, (n / m) as u64);
        values.extend(std::iter::repeat_n(v, m * c.multiplicity));
    }
    values.sort_by(|a, b| {
        let (a, b) = (lower(*a), lower(*b));
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    values
}

fn layer_in<T: Real>(f: &RationalMap<T>, n: usize, opts: &SpectraOptions) -> Result<SpectrumLayer> {
    let cycles = assemble_cycles_in(f, n, opts)?;
    let values = layer_values(&cycles, n);
    let expected = crate::dynatomic::nu_count(f.degree() as u64, n as u64) as usize;
    if values.len() != expected {
        return Err(Error::OrbitMatchFailed(format!("layer {n} has {} values, expected {expected}", values.len())));
    }
    Ok(SpectrumLayer { n, values: values.into_iter().map(cplx::widen).collect(), precision: T::PRECISION })
}

/// The multiplier spectrum `s_n(f)`.
pub fn spectrum_layer(f: &RationalMap<f64>, n: usize, opts: &SpectraOptions) -> Result<SpectrumLayer> {
    tiered(opts.precision, || layer_in(f, n, opts), || layer_in(&f.cast::<ExtFloat>(), n, opts))
}

fn elementary_symmetric(values: &[Cplx<ExtFloat>]) -> Vec<Cplx<f64>> {
    // coefficients of Π(T + λ_i), lowest σ first
    let mut sigma = vec![Complex::<ExtFloat>::one()];
    for v in values {
        sigma.push(Complex::zero());
        for k in (1..sigma.len()).rev() {
            let prev = sigma[k - 1];
            sigma[k] += prev * v;
        }
    }
    sigma[1..].iter().map(|z| lower(*z)).collect()
}

pub fn sigma_coords(layer: &SpectrumLayer) -> SigmaVector {
    SigmaVector { n: layer.n, values: elementary_symmetric(&layer.values) }
}

/// `σ` of the reciprocals of a layer; `Superattracting` when some multiplier
/// has modulus at most `tol`.
pub fn reciprocal_sigma(layer: &SpectrumLayer, tol: f64) -> Result<SigmaVector> {
    if layer.min_modulus().is_some_and(|m| m <= tol) {
        return Err(Error::Superattracting { period: layer.n });
    }
    let inv: Vec<Cplx<ExtFloat>> = layer.values.iter().map(|z| Complex::<ExtFloat>::one() / z).collect();
    Ok(SigmaVector { n: layer.n, values: elementary_symmetric(&inv) })
}

/// `(σ(s_n), …, σ(s_m))`.
pub fn rho_vector(f: &RationalMap<f64>, n: usize, m: usize, opts: &SpectraOptions) -> Result<Vec<SigmaVector>> {
    check_window(n, m)?;
    (n..=m).map(|j| Ok(sigma_coords(&spectrum_layer(f, j, opts)?))).collect()
}

fn check_window(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > m {
        return Err(Error::InvalidArgument(format!("period window ({n}, {m}) needs 1 <= n <= m")));
    }
    Ok(())
}

/// First period `j ∈ [n, m]` whose layer has a multiplier of modulus at most
/// the superattracting tolerance.
pub fn first_superattracting_period(
    f: &RationalMap<f64>,
    n: usize,
    m: usize,
    opts: &SpectraOptions,
) -> Result<Option<usize>> {
    check_window(n, m)?;
    for j in n..=m {
        let layer = spectrum_layer(f, j, opts)?;
        if layer.min_modulus().is_some_and(|x| x <= opts.superattracting_tol) {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

pub fn superattracting_in_range(f: &RationalMap<f64>, n: usize, m: usize, opts: &SpectraOptions) -> Result<bool> {
    Ok(first_superattracting_period(f, n, m, opts)?.is_some())
}

/// `δ_n(f)`: symmetric functions of the reciprocal multipliers.
pub fn delta_layer(f: &RationalMap<f64>, n: usize, opts: &SpectraOptions) -> Result<SigmaVector> {
    reciprocal_sigma(&spectrum_layer(f, n, opts)?, opts.superattracting_tol)
}

/// `τ_{n,m}(f) = (δ_n(f), …, δ_m(f))`.
pub fn tau_vector(f: &RationalMap<f64>, n: usize, m: usize, opts: &SpectraOptions) -> Result<TauVector> {
    check_window(n, m)?;
    let blocks = (n..=m).map(|j| delta_layer(f, j, opts)).collect::<Result<Vec<_>>>()?;
    Ok(TauVector { n, m, blocks })
}

/// `max |a_i − b_i| / (1 + |a_i| + |b_i|)` over matching blocks.
pub fn sigma_distance(a: &[SigmaVector], b: &[SigmaVector]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("{} blocks against {}", a.len(), b.len())));
    }
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        if x.n != y.n || x.values.len() != y.values.len() {
            return Err(Error::ShapeMismatch(format!(
                "block (n={}, len={}) against (n={}, len={})",
                x.n,
                x.values.len(),
                y.n,
                y.values.len()
            )));
        }
        for (u, v) in x.values.iter().zip(&y.values) {
            worst = worst.max((u - v).norm() / (1.0 + (u.norm() + v.norm())));
        }
    }
    Ok(worst)
}

pub fn spectra_distance(a: &TauVector, b: &TauVector) -> Result<f64> {
    if (a.n, a.m) != (b.n, b.m) {
        return Err(Error::ShapeMismatch(format!("window ({}, {}) against ({}, {})", a.n, a.m, b.n, b.m)));
    }
    sigma_distance(&a.blocks, &b.blocks)
}
