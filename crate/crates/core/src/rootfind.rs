//! Simultaneous root finding for univariate polynomials and homogeneous forms.
//!
//! Aberth iteration from a perturbed golden-angle circle, Newton polishing of
//! isolated roots, Weierstrass inclusion radii and cluster merging. Points of
//! modulus above one are handled in the inverted chart `w = 1/z`.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::cplx::{lift, mag};
use crate::poly::{Cplx, ExtFloat, HomForm2, Poly, Precision, Real};
use crate::ratmap::ProjPoint;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

#[derive(Debug, Clone, PartialEq)]
pub struct RootOptions {
    /// Approximations closer than this multiple of their inclusion radius
    /// are merged into one cluster.
    pub merge_factor: f64,
    /// Iteration budget; `None` picks 200 at double and 500 at extended.
    pub max_iterations: Option<usize>,
    pub seed: u64,
    pub polish: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { merge_factor: 10.0, max_iterations: None, seed: 0x5eed, polish: true }
    }
}

/// A group of root approximations standing for one root of the given
/// multiplicity. `radius` is in the projective distance of [`ProjPoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootCluster<T: Real = f64> {
    pub center: ProjPoint<T>,
    pub multiplicity: usize,
    pub radius: f64,
    /// Relative backward error `|p(c)| / p̃(|c|)` at the center, in its chart.
    pub residual: f64,
}

impl<T: Real> RootCluster<T> {
    pub fn cast<U: Real>(&self) -> RootCluster<U> {
        RootCluster {
            center: self.center.cast(),
            multiplicity: self.multiplicity,
            radius: self.radius,
            residual: self.residual,
        }
    }
}

/// A polynomial with its reversal, evaluated in whichever chart keeps the
/// argument inside the unit disc.
struct Charted<T: Real> {
    p: Poly<T>,
    rev: Poly<T>,
    abs_p: Vec<f64>,
    abs_rev: Vec<f64>,
    m: usize,
}

struct Eval<T: Real> {
    /// Value in the chart.
    value: Cplx<T>,
    /// `p̃(|·|)` in the chart.
    bound: f64,
    /// Newton ratio `p/p'` in the `z` coordinate.
    ratio: Cplx<T>,
}

fn abs_horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

impl<T: Real> Charted<T> {
    fn new(p: Poly<T>) -> Self {
        let mut rc = p.coeffs().to_vec();
        rc.reverse();
        let rev = Poly::new(rc);
        let abs_p = p.coeffs().iter().map(|c| mag(*c)).collect();
        let abs_rev = rev.coeffs().iter().map(|c| mag(*c)).collect();
        let m = p.degree().unwrap_or(0);
        Charted { p, rev, abs_p, abs_rev, m }
    }

    fn eval(&self, z: Cplx<T>, accurate: bool) -> Eval<T> {
        if mag(z) <= 1.0 {
            let (v, dv) = self.p.eval_with_derivative(z);
            let value = if accurate { self.p.eval_accurate(z) } else { v };
            Eval { value, bound: abs_horner(&self.abs_p, mag(z)), ratio: v / dv }
        } else {
            let w = Complex::<T>::one() / z;
            let (r, dr) = self.rev.eval_with_derivative(w);
            let value = if accurate { self.rev.eval_accurate(w) } else { r };
            let m = T::from_usize(self.m);
            Eval { value, bound: abs_horner(&self.abs_rev, mag(w)), ratio: z * r / (r * m - w * dr) }
        }
    }
}

fn budget<T: Real>(opts: &RootOptions) -> usize {
    opts.max_iterations.unwrap_or(match T::PRECISION {
        Precision::Double => 200,
        Precision::Extended => 500,
    })
}

fn initial_points<T: Real>(p: &Poly<T>, rng: &mut ChaCha8Rng) -> Vec<Cplx<T>> {
    let m = p.degree().unwrap_or(0);
    let c = p.coeffs();
    let ratio = mag(c[0]) / mag(c[m]);
    let r0 = if ratio.is_finite() && ratio > 0.0 { ratio.powf(1.0 / m as f64) } else { 1.0 };
    (0..m)
        .map(|k| {
            let r = r0 * (1.0 + 1e-3 * rng.random_range(-1.0..1.0));
            let theta = k as f64 * GOLDEN_ANGLE + 1e-3 * rng.random_range(-1.0..1.0);
            lift(Complex::from_polar(r, theta))
        })
        .collect()
}

/// Aberth iteration; returns the approximations or `NoConvergence`.
fn aberth<T: Real>(ch: &Charted<T>, opts: &RootOptions) -> Result<Vec<Cplx<T>>> {
    let max_iter = budget::<T>(opts);
    match aberth_raw(ch, opts) {
        (zs, true) => Ok(zs),
        (_, false) => Err(Error::NoConvergence { iterations: max_iter }),
    }
}

/// Aberth iteration returning its last approximations and whether every
/// point met the backward-error stop.
fn aberth_raw<T: Real>(ch: &Charted<T>, opts: &RootOptions) -> (Vec<Cplx<T>>, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut zs = initial_points(&ch.p, &mut rng);
    let m = zs.len();
    let mut done = vec![false; m];
    let stop = 4.0 * m as f64 * T::EPSILON;
    let max_iter = budget::<T>(opts);
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let z = zs[i];
            let e = ch.eval(z, false);
            if mag(e.value) <= stop * e.bound {
                done[i] = true;
                continue;
            }
            all = false;
            let mut s = Complex::<T>::zero();
            for (j, zj) in zs.iter().enumerate() {
                let diff = z - zj;
                if j != i && !diff.is_zero() {
                    s += Complex::<T>::one() / diff;
                }
            }
            let corr = e.ratio / (Complex::<T>::one() - e.ratio * s);
            let next = z - corr;
            zs[i] = if crate::poly::cplx::is_finite(next) {
                next
            } else {
                let kick = Complex::new(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3));
                z + z * lift::<T>(kick) + lift::<T>(kick)
            };
        }
        if all {
            return (zs, true);
        }
    }
    let ok = done.iter().all(|d| *d);
    (zs, ok)
}

/// Newton ratio `p/p'` of a polynomial known only pointwise: zero at an
/// exact root, `None` where it cannot be evaluated.
pub type RatioFn<'a, T> = dyn Fn(Cplx<T>) -> Option<Cplx<T>> + 'a;

/// Aberth sweeps on a pointwise Newton ratio, started from `zs`. Returns the
/// approximations with Newton-disc radii `m·|p/p'|`, each in the chart of
/// its point.
fn aberth_guided<T: Real>(mut zs: Vec<Cplx<T>>, ratio: &RatioFn<T>, opts: &RootOptions) -> (Vec<Cplx<T>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37);
    let m = zs.len();
    let mut done = vec![false; m];
    for _ in 0..budget::<T>(opts) {
        let mut all = true;
        for i in 0..m {
            if done[i] {
                continue;
            }
            all = false;
            let z = zs[i];
            let Some(q) = ratio(z) else {
                let kick = Complex::new(rng.random_range(-1e-6..1e-6), rng.random_range(-1e-6..1e-6));
                zs[i] = z + z * lift::<T>(kick) + lift::<T>(kick);
                continue;
            };
            let mut s = Complex::<T>::zero();
            for (j, zj) in zs.iter().enumerate() {
                let diff = z - zj;
                if j != i && !diff.is_zero() {
                    s += Complex::<T>::one() / diff;
                }
            }
            let corr = q / (Complex::<T>::one() - q * s);
            if !crate::poly::cplx::is_finite(corr) {
                done[i] = true;
                continue;
            }
            zs[i] = z - corr;
            if mag(corr) <= 4.0 * T::EPSILON * mag(z).max(1.0) {
                done[i] = true;
            }
        }
        if all {
            break;
        }
    }
    let radii = zs
        .iter()
        .map(|&z| {
            let r = match ratio(z) {
                Some(q) if crate::poly::cplx::is_finite(q) => m as f64 * mag(q),
                _ => f64::INFINITY,
            };
            let r = r.max(4.0 * T::EPSILON * mag(z).max(1.0));
            if in_affine_chart(z) {
                r
            } else {
                r / mag(z).powi(2)
            }
        })
        .collect();
    (zs, radii)
}

fn in_affine_chart<T: Real>(z: Cplx<T>) -> bool {
    mag(z) <= 1.0
}

/// Weierstrass inclusion radii, each measured in the chart of its point.
fn inclusion_radii<T: Real>(ch: &Charted<T>, zs: &[Cplx<T>]) -> Vec<f64> {
    let m = zs.len();
    let ln_lead = mag(ch.p.leading().expect("nonzero")).ln();
    let ln_tail = mag(ch.p.coeffs()[0]).ln();
    // error bound of the accurate evaluation: compensated Horner at double,
    // plain Horner at extended
    let gamma = 4.0 * m as f64 * T::EPSILON;
    let slack = match T::PRECISION {
        Precision::Double => gamma * gamma,
        Precision::Extended => gamma,
    };
    let ln_abs: Vec<f64> = zs.iter().map(|z| mag(*z).ln()).collect();
    (0..m)
        .map(|i| {
            let e = ch.eval(zs[i], true);
            let num = mag(e.value) * (1.0 + T::EPSILON) + slack * e.bound;
            let mut ln_den = 0.0;
            let affine = in_affine_chart(zs[i]);
            for j in 0..m {
                if j == i {
                    continue;
                }
                let d = mag(zs[i] - zs[j]);
                if d == 0.0 {
                    continue;
                }
                ln_den += d.ln();
                if !affine {
                    // w_i − w_j = (z_j − z_i)/(z_i z_j)
                    ln_den -= ln_abs[i] + ln_abs[j];
                }
            }
            ln_den += if affine { ln_lead } else { ln_tail };
            let r = ((m as f64).ln() + num.ln() - ln_den).exp();
            if r.is_nan() {
                f64::INFINITY
            } else {
                r
            }
        })
        .collect()
}

fn proj<T: Real>(z: Cplx<T>) -> ProjPoint<T> {
    ProjPoint::from_affine(z)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut k = i;
        while self.0[k] != r {
            let next = self.0[k];
            self.0[k] = r;
            k = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// Member indices of each cluster, in order of first member.
fn group<T: Real>(zs: &[Cplx<T>], radii: &[f64], factor: f64) -> Vec<Vec<usize>> {
    let m = zs.len();
    let pts: Vec<ProjPoint<T>> = zs.iter().map(|z| proj(*z)).collect();
    let mut uf = UnionFind((0..m).collect());
    for i in 0..m {
        for j in i + 1..m {
            if pts[i].distance(&pts[j]) <= factor * radii[i].max(radii[j]) {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; m];
    for i in 0..m {
        let r = uf.find(i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn summarize<T: Real>(ch: &Charted<T>, zs: &[Cplx<T>], radii: &[f64], members: &[usize]) -> RootCluster<T> {
    let first = zs[members[0]];
    let center = if members.len() == 1 {
        first
    } else {
        // average in the chart of the first member
        let k = T::from_usize(members.len());
        if in_affine_chart(first) {
            members.iter().fold(Complex::<T>::zero(), |a, &i| a + zs[i]) / k
        } else {
            let w = members.iter().fold(Complex::<T>::zero(), |a, &i| a + Complex::<T>::one() / zs[i]) / k;
            Complex::<T>::one() / w
        }
    };
    let c = proj(center);
    let radius = members.iter().map(|&i| c.distance(&proj(zs[i])) + radii[i]).fold(0.0, f64::max);
    let e = ch.eval(center, true);
    let residual = if e.bound > 0.0 { mag(e.value) / e.bound } else { 0.0 };
    RootCluster { center: c, multiplicity: members.len(), radius, residual }
}

/// Merges clusters until every pair satisfies `radius < separation / 3`.
fn enforce_separation<T: Real>(
    mut clusters: Vec<(Vec<usize>, RootCluster<T>)>,
    ch: &Charted<T>,
    zs: &[Cplx<T>],
    radii: &[f64],
) -> Vec<RootCluster<T>> {
    loop {
        let mut hit = None;
        'outer: for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let sep = clusters[a].1.center.distance(&clusters[b].1.center);
                if 3.0 * clusters[a].1.radius.max(clusters[b].1.radius) >= sep {
                    hit = Some((a, b));
                    break 'outer;
                }
            }
        }
        let Some((a, b)) = hit else { break };
        let (mb, _) = clusters.remove(b);
        let mut members = std::mem::take(&mut clusters[a].0);
        members.extend(mb);
        members.sort_unstable();
        let summary = summarize(ch, zs, radii, &members);
        clusters[a] = (members, summary);
    }
    clusters.into_iter().map(|(_, c)| c).collect()
}

/// Newton refinement of an isolated root, accepted only while the accurate
/// residual decreases.
fn polish<T: Real>(ch: &Charted<T>, z: Cplx<T>) -> Cplx<T> {
    let backward = |e: &Eval<T>| mag(e.value) / e.bound.max(f64::MIN_POSITIVE);
    let mut best = z;
    let mut best_res = backward(&ch.eval(z, true));
    for _ in 0..4 {
        let plain = ch.eval(best, false);
        let acc = ch.eval(best, true);
        if plain.value.is_zero() || acc.value.is_zero() {
            break;
        }
        let cand = best - plain.ratio * (acc.value / plain.value);
        if !crate::poly::cplx::is_finite(cand) {
            break;
        }
        let res = backward(&ch.eval(cand, true));
        if res < best_res {
            best = cand;
            best_res = res;
        } else {
            break;
        }
    }
    best
}

fn solve_stripped<T: Real>(p: Poly<T>, opts: &RootOptions) -> Result<Vec<RootCluster<T>>> {
    let m = p.degree().unwrap_or(0);
    if m == 0 {
        return Ok(Vec::new());
    }
    let ch = Charted::new(p);
    let mut zs = if m == 1 {
        let c = ch.p.coeffs();
        vec![-c[0] / c[1]]
    } else {
        aberth(&ch, opts)?
    };
    let mut radii = inclusion_radii(&ch, &zs);
    let mut groups = group(&zs, &radii, opts.merge_factor);
    if opts.polish {
        let mut moved = false;
        for g in &groups {
            if g.len() == 1 {
                let z = polish(&ch, zs[g[0]]);
                moved |= z != zs[g[0]];
                zs[g[0]] = z;
            }
        }
        if moved {
            radii = inclusion_radii(&ch, &zs);
            groups = group(&zs, &radii, opts.merge_factor);
        }
    }
    let clusters = groups
        .into_iter()
        .map(|g| {
            let s = summarize(&ch, &zs, &radii, &g);
            (g, s)
        })
        .collect();
    Ok(enforce_separation(clusters, &ch, &zs, &radii))
}

/// Roots of a univariate polynomial at the precision of its coefficients.
pub fn roots_univariate_in<T: Real>(p: &Poly<T>, opts: &RootOptions) -> Result<Vec<RootCluster<T>>> {
    let Some(deg) = p.degree() else {
        return Err(Error::InvalidArgument("roots of the zero polynomial".into()));
    };
    if deg == 0 {
        return Err(Error::InvalidArgument("roots of a constant polynomial".into()));
    }
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let stripped = Poly::new(p.coeffs()[zeros..].to_vec());
    let mut out = Vec::new();
    if zeros > 0 {
        out.push(RootCluster {
            center: ProjPoint::from_affine(Complex::zero()),
            multiplicity: zeros,
            radius: 0.0,
            residual: 0.0,
        });
    }
    out.extend(solve_stripped(stripped, opts)?);
    Ok(out)
}

/// Projective roots of a homogeneous form: the affine roots of `F(z, 1)` plus
/// infinity with multiplicity equal to the degree deficit.
pub fn projective_roots_in<T: Real>(f: &HomForm2<T>, opts: &RootOptions) -> Result<Vec<RootCluster<T>>> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    if f.degree() == 0 {
        return Err(Error::InvalidArgument("roots of a constant form".into()));
    }
    let affine = f.dehomogenize();
    let deficit = f.infinity_multiplicity();
    let mut out = if affine.degree().unwrap_or(0) > 0 { roots_univariate_in(&affine, opts)? } else { Vec::new() };
    if deficit > 0 {
        out.push(RootCluster { center: ProjPoint::infinity(), multiplicity: deficit, radius: 0.0, residual: 0.0 });
    }
    Ok(out)
}

/// Cluster radius above which the coefficient-based solve is not trusted
/// when a pointwise ratio is available.
const GUIDED_FALLBACK_RADIUS: f64 = 1e-6;

/// Projective roots of `f` where the affine polynomial `f(z, 1)` can also be
/// evaluated pointwise through `ratio`. The coefficient-based solve is used
/// when it converges to tight clusters; otherwise its approximations seed
/// Aberth sweeps on `ratio`, which does not suffer from the conditioning of
/// the coefficients.
pub fn projective_roots_guided_in<T: Real>(
    f: &HomForm2<T>,
    opts: &RootOptions,
    ratio: &RatioFn<T>,
) -> Result<Vec<RootCluster<T>>> {
    let direct = projective_roots_in(f, opts);
    if let Ok(cl) = &direct {
        if cl.iter().all(|c| c.radius <= GUIDED_FALLBACK_RADIUS) {
            return direct;
        }
    }
    let affine = f.dehomogenize();
    let deg = affine.degree().unwrap_or(0);
    if f.is_zero() || deg < 2 || affine.coeffs()[0].is_zero() {
        return direct;
    }
    let ch = Charted::new(affine);
    let (seeds, _) = aberth_raw(&ch, opts);
    let (zs, radii) = aberth_guided(seeds, ratio, opts);
    let clusters = group(&zs, &radii, opts.merge_factor)
        .into_iter()
        .map(|g| {
            let s = summarize(&ch, &zs, &radii, &g);
            (g, s)
        })
        .collect();
    let mut out = enforce_separation(clusters, &ch, &zs, &radii);
    let deficit = f.infinity_multiplicity();
    if deficit > 0 {
        out.push(RootCluster { center: ProjPoint::infinity(), multiplicity: deficit, radius: 0.0, residual: 0.0 });
    }
    Ok(out)
}

fn with_retry<F, G>(lo: F, hi: G) -> Result<Vec<RootCluster<f64>>>
where
    F: FnOnce() -> Result<Vec<RootCluster<f64>>>,
    G: FnOnce() -> Result<Vec<RootCluster<ExtFloat>>>,
{
    match lo() {
        Err(e) if e.is_precision_artifact() => Ok(hi()?.iter().map(RootCluster::cast).collect()),
        other => other,
    }
}

/// Roots of a double-precision polynomial, retried at extended precision
/// when the double-precision iteration does not converge.
pub fn roots_univariate(p: &Poly<f64>, opts: &RootOptions) -> Result<Vec<RootCluster<f64>>> {
    with_retry(|| roots_univariate_in(p, opts), || roots_univariate_in(&p.cast::<ExtFloat>(), opts))
}

/// Projective roots of a double-precision form, with the same retry.
pub fn projective_roots(f: &HomForm2<f64>, opts: &RootOptions) -> Result<Vec<RootCluster<f64>>> {
    with_retry(|| projective_roots_in(f, opts), || projective_roots_in(&f.cast::<ExtFloat>(), opts))
}
