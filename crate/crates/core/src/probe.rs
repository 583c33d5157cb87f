//! Sampling campaigns over random maps: invariance trials, collision probes
//! and isospectrality checks.
//!
//! Every trial draws from its own `ChaCha8` stream, selected by trial index
//! from the campaign seed, so results do not depend on scheduling.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattes::disc_point;
use crate::poly::{HomForm2, Precision};
use crate::ratmap::{check_degree_cap, Moebius, RationalMap, PROJ_TOL};
use crate::spectra::{rho_vector, sigma_distance, spectra_distance, tau_vector, SpectraOptions, TauVector};

/// Smallest `|Res|` accepted for a random map.
pub const RANDOM_MAP_RESULTANT: f64 = 1e-6;
/// Smallest `|det|` accepted for a random Möbius transformation.
pub const RANDOM_MOEBIUS_DET: f64 = 0.1;
/// Redraws allowed per trial when `τ` is undefined.
const MAX_REDRAWS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub degree: usize,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub proj_tol: f64,
    pub superattracting_tol: f64,
    /// Unrelated pairs closer than this are candidate collisions.
    pub distance_threshold: f64,
    pub precision: Precision,
    /// Copies of the first maps appended to the sample.
    pub planted_duplicates: usize,
    /// Random conjugates of the following maps appended to the sample.
    pub planted_conjugates: usize,
}

impl SampleConfig {
    pub fn new(degree: usize, n: usize, m: usize, trials: usize, seed: u64) -> Self {
        SampleConfig {
            degree,
            n,
            m,
            trials,
            seed,
            proj_tol: PROJ_TOL,
            superattracting_tol: 1e-9,
            distance_threshold: 1e-10,
            precision: Precision::Double,
            planted_duplicates: 0,
            planted_conjugates: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 2 {
            return Err(Error::InvalidArgument(format!("degree must be at least 2, got {}", self.degree)));
        }
        if self.n == 0 || self.n > self.m {
            return Err(Error::InvalidArgument(format!("period window ({}, {}) needs 1 <= n <= m", self.n, self.m)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trial count must be at least 1".into()));
        }
        if self.planted_duplicates + self.planted_conjugates > self.trials {
            return Err(Error::InvalidArgument("more planted pairs than trials".into()));
        }
        check_degree_cap(self.degree, self.m)
    }

    pub fn spectra_options(&self) -> SpectraOptions {
        SpectraOptions {
            precision: self.precision,
            proj_tol: self.proj_tol,
            superattracting_tol: self.superattracting_tol,
            ..SpectraOptions::default()
        }
    }
}

/// Generator stream `index` of the campaign seeded by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_map_with(rng: &mut ChaCha8Rng, d: usize) -> RationalMap {
    assert!(d >= 2, "random maps need degree >= 2");
    loop {
        let num = HomForm2::new((0..=d).map(|_| disc_point(rng)).collect());
        let den = HomForm2::new((0..=d).map(|_| disc_point(rng)).collect());
        if let Ok(f) = RationalMap::with_threshold(num, den, RANDOM_MAP_RESULTANT) {
            return f;
        }
    }
}

/// Degree-`d` map with coefficients uniform in the unit disc.
pub fn random_map(d: usize, seed: u64) -> RationalMap {
    random_map_with(&mut ChaCha8Rng::seed_from_u64(seed), d)
}

pub fn random_moebius_with(rng: &mut ChaCha8Rng) -> Moebius {
    loop {
        let (a, b, c, d) = (disc_point(rng), disc_point(rng), disc_point(rng), disc_point(rng));
        let max = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max > 0.0 && (a * d - b * c).norm() / (max * max) >= RANDOM_MOEBIUS_DET {
            if let Ok(m) = Moebius::new(a, b, c, d) {
                return m;
            }
        }
    }
}

pub fn random_moebius(seed: u64) -> Moebius {
    random_moebius_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `spectra_distance(τ(f), τ(φfφ⁻¹))` over the window of `cfg`.
pub fn invariance_trial(f: &RationalMap, phi: &Moebius, cfg: &SampleConfig) -> Result<f64> {
    let opts = cfg.spectra_options();
    let g = f.conjugate_map(phi)?;
    let a = tau_vector(f, cfg.n, cfg.m, &opts)?;
    let b = tau_vector(&g, cfg.n, cfg.m, &opts)?;
    spectra_distance(&a, &b)
}

/// How a sample entered the campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Random,
    Duplicate { of: usize },
    Conjugate { of: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub index: usize,
    pub provenance: Provenance,
    /// Error kinds of the draws rejected before this one.
    pub rejected: Vec<String>,
    pub map: Option<RationalMap>,
    pub tau: Option<TauVector>,
    /// Error kind when the trial produced no `τ`.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Duplicate,
    Conjugate,
    /// Unrelated maps whose `τ` values nearly coincide.
    Candidate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairFinding {
    pub a: usize,
    pub b: usize,
    pub kind: PairKind,
    pub distance: f64,
    /// Distance recomputed at extended precision, for candidates.
    pub recheck_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub config: SampleConfig,
    pub trials: Vec<TrialOutcome>,
    /// Smallest distance between unrelated samples.
    pub min_inter_distance: Option<f64>,
    /// Largest distance between planted duplicates or conjugates.
    pub max_intra_distance: Option<f64>,
    /// Planted pairs plus every unrelated pair below the threshold.
    pub findings: Vec<PairFinding>,
    pub failures: BTreeMap<String, usize>,
}

impl ProbeReport {
    /// Intra-class distances all below inter-class ones.
    pub fn separated(&self) -> bool {
        match (self.max_intra_distance, self.min_inter_distance) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    pub fn candidates(&self) -> impl Iterator<Item = &PairFinding> {
        self.findings.iter().filter(|p| p.kind == PairKind::Candidate)
    }

    /// Draws rejected because `τ` was undefined.
    pub fn superattracting_skips(&self) -> usize {
        self.failures.get("Superattracting").copied().unwrap_or(0)
    }
}

fn random_trial(cfg: &SampleConfig, index: usize) -> TrialOutcome {
    let opts = cfg.spectra_options();
    let mut rng = trial_rng(cfg.seed, index as u64);
    let mut rejected = Vec::new();
    for _ in 0..=MAX_REDRAWS {
        let f = random_map_with(&mut rng, cfg.degree);
        match tau_vector(&f, cfg.n, cfg.m, &opts) {
            Ok(tau) => {
                return TrialOutcome {
                    index,
                    provenance: Provenance::Random,
                    rejected,
                    map: Some(f),
                    tau: Some(tau),
                    error: None,
                };
            }
            Err(e) => rejected.push(e.kind().to_string()),
        }
    }
    let error = rejected.pop();
    TrialOutcome { index, provenance: Provenance::Random, rejected, map: None, tau: None, error }
}

fn planted_trial(cfg: &SampleConfig, index: usize, provenance: Provenance, base: &TrialOutcome) -> TrialOutcome {
    let opts = cfg.spectra_options();
    let mk = |map: Option<RationalMap>, r: Result<TauVector>| match r {
        Ok(tau) => TrialOutcome { index, provenance, rejected: Vec::new(), map, tau: Some(tau), error: None },
        Err(e) => {
            TrialOutcome { index, provenance, rejected: Vec::new(), map, tau: None, error: Some(e.kind().to_string()) }
        }
    };
    let Some(f) = &base.map else {
        return TrialOutcome {
            index,
            provenance,
            rejected: Vec::new(),
            map: None,
            tau: None,
            error: base.error.clone(),
        };
    };
    match provenance {
        Provenance::Duplicate { .. } => mk(Some(f.clone()), tau_vector(f, cfg.n, cfg.m, &opts)),
        Provenance::Conjugate { .. } => {
            let phi = random_moebius_with(&mut trial_rng(cfg.seed, index as u64));
            match f.conjugate_map(&phi) {
                Ok(g) => {
                    let r = tau_vector(&g, cfg.n, cfg.m, &opts);
                    mk(Some(g), r)
                }
                Err(e) => mk(None, Err(e)),
            }
        }
        Provenance::Random => unreachable!("planted trials are duplicates or conjugates"),
    }
}

fn recheck(a: &RationalMap, b: &RationalMap, cfg: &SampleConfig) -> Option<f64> {
    let opts = cfg.spectra_options().with_precision(Precision::Extended);
    let ta = tau_vector(a, cfg.n, cfg.m, &opts).ok()?;
    let tb = tau_vector(b, cfg.n, cfg.m, &opts).ok()?;
    spectra_distance(&ta, &tb).ok()
}

/// Draws `trials` random maps with defined `τ` (the last planted ones being
/// duplicates or conjugates of earlier samples) and compares all pairs.
pub fn collision_probe(cfg: &SampleConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    let planted = cfg.planted_duplicates + cfg.planted_conjugates;
    let random_count = cfg.trials - planted;
    let mut trials: Vec<TrialOutcome> = (0..random_count).into_par_iter().map(|i| random_trial(cfg, i)).collect();
    let plan: Vec<(usize, Provenance)> = (0..planted)
        .map(|k| {
            let of = k % random_count.max(1);
            let p =
                if k < cfg.planted_duplicates { Provenance::Duplicate { of } } else { Provenance::Conjugate { of } };
            (random_count + k, p)
        })
        .collect();
    let extra: Vec<TrialOutcome> = plan
        .par_iter()
        .map(|&(index, p)| {
            let of = match p {
                Provenance::Duplicate { of } | Provenance::Conjugate { of } => of,
                Provenance::Random => unreachable!(),
            };
            planted_trial(cfg, index, p, &trials[of])
        })
        .collect();
    trials.extend(extra);

    let mut failures = BTreeMap::new();
    for kind in trials.iter().flat_map(|t| t.rejected.iter().chain(&t.error)) {
        *failures.entry(kind.clone()).or_insert(0) += 1;
    }

    let related = |a: &TrialOutcome, b: &TrialOutcome| -> Option<PairKind> {
        let link = |x: &TrialOutcome, y: &TrialOutcome| match x.provenance {
            Provenance::Duplicate { of } if of == y.index => Some(PairKind::Duplicate),
            Provenance::Conjugate { of } if of == y.index => Some(PairKind::Conjugate),
            _ => None,
        };
        link(a, b).or_else(|| link(b, a))
    };

    let pairs: Vec<(usize, usize)> =
        (0..trials.len()).flat_map(|i| (i + 1..trials.len()).map(move |j| (i, j))).collect();
    let scored: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (a, b) = (trials[i].tau.as_ref()?, trials[j].tau.as_ref()?);
            spectra_distance(a, b).ok().map(|d| (i, j, d))
        })
        .collect();

    let mut min_inter: Option<f64> = None;
    let mut max_intra: Option<f64> = None;
    let mut findings = Vec::new();
    let mut to_recheck = Vec::new();
    for (i, j, d) in scored {
        match related(&trials[i], &trials[j]) {
            Some(kind) => {
                max_intra = Some(max_intra.map_or(d, |x| x.max(d)));
                findings.push(PairFinding { a: i, b: j, kind, distance: d, recheck_distance: None });
            }
            None => {
                min_inter = Some(min_inter.map_or(d, |x| x.min(d)));
                if d < cfg.distance_threshold {
                    to_recheck.push(findings.len());
                    findings.push(PairFinding {
                        a: i,
                        b: j,
                        kind: PairKind::Candidate,
                        distance: d,
                        recheck_distance: None,
                    });
                }
            }
        }
    }
    let rechecked: Vec<Option<f64>> = to_recheck
        .par_iter()
        .map(|&k| {
            let p = &findings[k];
            match (&trials[p.a].map, &trials[p.b].map) {
                (Some(a), Some(b)) => recheck(a, b, cfg),
                _ => None,
            }
        })
        .collect();
    for (k, r) in to_recheck.into_iter().zip(rechecked) {
        findings[k].recheck_distance = r;
    }

    Ok(ProbeReport {
        config: cfg.clone(),
        trials,
        min_inter_distance: min_inter,
        max_intra_distance: max_intra,
        findings,
        failures,
    })
}

/// Whether `σ(s_n)` agrees pairwise within `tol` for every `n ≤ n_max`.
pub fn isospectral_check(maps: &[RationalMap], n_max: usize, tol: f64, opts: &SpectraOptions) -> Result<bool> {
    if let Some(first) = maps.first() {
        if maps.iter().any(|f| f.degree() != first.degree()) {
            return Err(Error::ShapeMismatch("maps of different degrees".into()));
        }
    }
    let rhos = maps.par_iter().map(|f| rho_vector(f, 1, n_max, opts)).collect::<Result<Vec<_>>>()?;
    for i in 0..rhos.len() {
        for j in i + 1..rhos.len() {
            if sigma_distance(&rhos[i], &rhos[j])? > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Coefficient noise of relative size `eps` on both forms of `f`.
pub fn perturb_map(f: &RationalMap, eps: f64, seed: u64) -> Result<RationalMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |h: &HomForm2| {
        HomForm2::new(h.coeffs().iter().map(|c| c + disc_point(&mut rng) * eps).collect::<Vec<Complex<f64>>>())
    };
    let (p, q) = (jitter(f.numerator()), jitter(f.denominator()));
    RationalMap::new(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_map_is_deterministic() {
        assert_eq!(random_map(2, 11), random_map(2, 11));
        assert_ne!(random_map(2, 11), random_map(2, 12));
        assert_eq!(random_map(3, 5).degree(), 3);
    }

    #[test]
    fn random_maps_pass_the_resultant_check() {
        for s in 0..1000 {
            let f = random_map(2, s);
            assert!(f.resultant().norm() >= RANDOM_MAP_RESULTANT);
        }
    }

    #[test]
    fn trial_streams_differ() {
        use rand::Rng;
        let a: u64 = trial_rng(1, 0).random();
        let b: u64 = trial_rng(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(1, 0).random::<u64>());
    }

    #[test]
    fn config_validation() {
        assert!(SampleConfig::new(2, 1, 3, 10, 0).validate().is_ok());
        assert!(SampleConfig::new(2, 3, 1, 10, 0).validate().is_err());
        assert!(SampleConfig::new(2, 1, 3, 0, 0).validate().is_err());
        assert!(matches!(SampleConfig::new(2, 1, 13, 1, 0).validate(), Err(Error::DegreeCap { .. })));
    }
}
