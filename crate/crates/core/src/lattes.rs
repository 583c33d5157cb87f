//! Degree-4 flexible Lattès maps: the x-coordinate of doubling on
//! `y² = 4x³ − g2·x − g3`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{Cplx, HomForm2};
use crate::ratmap::RationalMap;

/// Smallest accepted `|g2³ − 27·g3²|`.
pub const DISCRIMINANT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassParams {
    g2: Cplx<f64>,
    g3: Cplx<f64>,
}

impl WeierstrassParams {
    pub fn new(g2: Cplx<f64>, g3: Cplx<f64>) -> Result<Self> {
        let p = WeierstrassParams { g2, g3 };
        let disc = p.discriminant().norm();
        if !(disc >= DISCRIMINANT_THRESHOLD) {
            return Err(Error::SingularCurve(disc));
        }
        Ok(p)
    }

    pub fn g2(&self) -> Cplx<f64> {
        self.g2
    }

    pub fn g3(&self) -> Cplx<f64> {
        self.g3
    }

    pub fn discriminant(&self) -> Cplx<f64> {
        self.g2 * self.g2 * self.g2 - self.g3 * self.g3 * 27.0
    }

    pub fn j_invariant(&self) -> Cplx<f64> {
        self.g2 * self.g2 * self.g2 * 1728.0 / self.discriminant()
    }
}

/// `f(x) = (x⁴ + (g2/2)x² + 2g3·x + g2²/16) / (4x³ − g2·x − g3)`.
pub fn lattes_mult2(p: &WeierstrassParams) -> Result<RationalMap> {
    let z = Complex::new(0.0, 0.0);
    let num = vec![p.g2 * p.g2 / 16.0, p.g3 * 2.0, p.g2 / 2.0, z, Complex::new(1.0, 0.0)];
    let den = vec![-p.g3, -p.g2, z, Complex::new(4.0, 0.0), z];
    RationalMap::new(HomForm2::new(num), HomForm2::new(den))
}

pub fn j_invariant(p: &WeierstrassParams) -> Cplx<f64> {
    p.j_invariant()
}

/// `k` curves with `|Δ| > 1e-6` and pairwise `|j_a − j_b| > 1e-3`,
/// deterministic in `seed`.
pub fn family_sample(k: usize, seed: u64) -> Vec<WeierstrassParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<WeierstrassParams> = Vec::with_capacity(k);
    while out.len() < k {
        let g2 = disc_point(&mut rng) * 2.0;
        let g3 = disc_point(&mut rng) * 2.0;
        let Ok(p) = WeierstrassParams::new(g2, g3) else { continue };
        if p.discriminant().norm() <= 1e-6 || lattes_mult2(&p).is_err() {
            continue;
        }
        let j = p.j_invariant();
        if out.iter().all(|q| (q.j_invariant() - j).norm() > 1e-3) {
            out.push(p);
        }
    }
    out
}

/// Uniform point of the closed unit disc.
pub(crate) fn disc_point(rng: &mut ChaCha8Rng) -> Cplx<f64> {
    loop {
        let z = Complex::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}
