use std::f64::consts::PI;

use multspec_core::probe::{random_map_with, random_moebius_with, trial_rng};
use multspec_core::spectra::*;
use multspec_core::{Cplx, Error, HomForm2, Moebius, Precision, ProjPoint, RationalMap};
use num_complex::Complex;

fn c(re: f64, im: f64) -> Cplx<f64> {
    Complex::new(re, im)
}

fn quadratic(cc: Cplx<f64>) -> RationalMap {
    RationalMap::new(HomForm2::new(vec![cc, c(0.0, 0.0), c(1.0, 0.0)]), HomForm2::from_real(&[1.0, 0.0, 0.0])).unwrap()
}

fn close(a: Cplx<f64>, b: Cplx<f64>, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

fn sorted(mut v: Vec<Cplx<f64>>) -> Vec<Cplx<f64>> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn z_squared_first_layer() {
    let opts = SpectraOptions::default();
    let layer = spectrum_layer(&quadratic(c(0.0, 0.0)), 1, &opts).unwrap();
    let got = sorted(layer.multipliers());
    let want = [0.0, 0.0, 2.0];
    assert_eq!(got.len(), 3);
    for (g, w) in got.iter().zip(want) {
        assert!(close(*g, c(w, 0.0), 1e-12), "{got:?}");
    }
    let s = sigma_coords(&layer);
    for (g, w) in s.values.iter().zip([2.0, 0.0, 0.0]) {
        assert!(close(*g, c(w, 0.0), 1e-12));
    }
}

#[test]
fn quadratic_closed_forms() {
    let opts = SpectraOptions::default();
    for cc in [c(0.3, 0.2), c(-1.4, 0.05), c(0.26, 0.0), c(-0.1, 0.9)] {
        let f = quadratic(cc);
        // fixed points z² − z + c = 0 have multipliers 2z; ∞ has 0
        let s1 = sigma_coords(&spectrum_layer(&f, 1, &opts).unwrap());
        for (g, w) in s1.values.iter().zip([c(2.0, 0.0), cc * 4.0, c(0.0, 0.0)]) {
            assert!(close(*g, w, 1e-9), "c={cc} s1={:?}", s1.values);
        }
        // the 2-cycle solves z² + z + c + 1 = 0, multiplier 4·z₁z₂
        let s2 = spectrum_layer(&f, 2, &opts).unwrap().multipliers();
        assert_eq!(s2.len(), 2);
        for v in s2 {
            assert!(close(v, cc * 4.0 + 4.0, 1e-9), "c={cc} v={v}");
        }
    }
}

#[test]
fn parabolic_witness() {
    let opts = SpectraOptions::default();
    let f = quadratic(c(-0.75, 0.0));
    let s2 = spectrum_layer(&f, 2, &opts).unwrap().multipliers();
    assert_eq!(s2.len(), 2);
    for v in s2 {
        assert!(close(v, c(1.0, 0.0), 1e-9), "{v}");
    }
    let cycles = assemble_cycles(&f, 2, &opts).unwrap();
    assert_eq!(cycles.len(), 1);
    let cyc = &cycles[0];
    assert_eq!(cyc.period(), 1);
    assert_eq!(cyc.multiplicity, 2);
    assert!(close(cyc.multiplier, c(-1.0, 0.0), 1e-9));
    assert_eq!(cyc.formal_periods.iter().copied().collect::<Vec<_>>(), vec![1, 2]);
    let x = ProjPoint::from_affine(c(-0.5, 0.0));
    assert_eq!(formal_exact_periods(&f, &x, 10, &opts).unwrap().into_iter().collect::<Vec<_>>(), vec![1, 2]);
}

#[test]
fn rotation_by_a_cube_root_of_unity() {
    let w = Complex::from_polar(1.0, 2.0 * PI / 3.0);
    let f = RationalMap::new(HomForm2::new(vec![c(0.0, 0.0), w, c(1.0, 0.0)]), HomForm2::from_real(&[1.0, 0.0, 0.0]))
        .unwrap();
    let opts = SpectraOptions::default();
    let periods = formal_exact_periods(&f, &ProjPoint::from_affine(c(0.0, 0.0)), 5, &opts).unwrap();
    assert_eq!(periods.into_iter().collect::<Vec<_>>(), vec![1, 3]);
    // 0 is a root of the third dynatomic form, so s₃ carries λ³ = 1 for it
    let s3 = spectrum_layer(&f, 3, &opts).unwrap();
    assert_eq!(s3.len(), 6);
    assert!(s3.multipliers().iter().filter(|v| close(**v, c(1.0, 0.0), 1e-6)).count() >= 1);
}

#[test]
fn formal_periods_rules() {
    let i = c(0.0, 1.0);
    let got = formal_periods_from_multiplier(2, i, 1e-8, 64);
    assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![2, 8]);
    let got = formal_periods_from_multiplier(3, c(0.5, 0.0), 1e-8, 64);
    assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![3]);
    // λ = 1 is a first root of unity and adds nothing
    let got = formal_periods_from_multiplier(1, c(1.0, 0.0), 1e-8, 64);
    assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![1]);
}

#[test]
fn not_periodic() {
    let f = quadratic(c(0.0, 0.0));
    let x = ProjPoint::from_affine(c(0.5, 0.0));
    assert!(matches!(
        formal_exact_periods(&f, &x, 20, &SpectraOptions::default()),
        Err(Error::NotPeriodic { cap: 20 })
    ));
}

#[test]
fn reciprocal_identity_on_fixed_layers() {
    let vals = [c(2.0, 1.0), c(-0.5, 0.25), c(3.0, -2.0), c(0.1, 0.7)];
    let layer = SpectrumLayer::new(1, &vals);
    let s = sigma_coords(&layer);
    let r = reciprocal_sigma(&layer, 1e-9).unwrap();
    let n = vals.len();
    let top = s.values[n - 1];
    for i in 1..n {
        let lhs = r.values[i - 1] * top;
        assert!(close(lhs, s.values[n - i - 1], 1e-12));
    }
    assert!(close(r.values[n - 1] * top, c(1.0, 0.0), 1e-12));
}

#[test]
fn superattracting_domain() {
    let opts = SpectraOptions::default();
    let z2 = quadratic(c(0.0, 0.0));
    assert!(matches!(tau_vector(&z2, 1, 1, &opts), Err(Error::Superattracting { period: 1 })));
    let basilica = quadratic(c(-1.0, 0.0));
    assert!(matches!(tau_vector(&basilica, 2, 2, &opts), Err(Error::Superattracting { period: 2 })));
    assert_eq!(first_superattracting_period(&basilica, 1, 3, &opts).unwrap(), Some(1));
    // a cubic with no critical cycle in the window
    let f = RationalMap::new(
        HomForm2::new(vec![c(0.3, 0.1), c(0.2, -0.4), c(-0.7, 0.2), c(1.0, 0.0)]),
        HomForm2::new(vec![c(1.0, 0.2), c(0.1, 0.3), c(0.4, -0.1), c(0.05, 0.0)]),
    )
    .unwrap();
    let tau = tau_vector(&f, 1, 2, &opts).unwrap();
    assert_eq!(tau.blocks.iter().map(|b| b.values.len()).collect::<Vec<_>>(), vec![4, 6]);
}

#[test]
fn distance_examples() {
    let a = [SigmaVector { n: 1, values: vec![c(1.0, 0.0)] }];
    let b = [SigmaVector { n: 1, values: vec![c(0.0, 0.0)] }];
    assert!((sigma_distance(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(sigma_distance(&a, &a).unwrap(), 0.0);
    let short = [SigmaVector { n: 1, values: vec![] }];
    assert!(matches!(sigma_distance(&a, &short), Err(Error::ShapeMismatch(_))));
    let t1 = TauVector { n: 1, m: 1, blocks: a.to_vec() };
    let t2 = TauVector { n: 1, m: 2, blocks: a.to_vec() };
    assert!(matches!(spectra_distance(&t1, &t2), Err(Error::ShapeMismatch(_))));
}

#[test]
fn conjugation_invariance_examples() {
    let opts = SpectraOptions::default();
    let f = quadratic(c(0.3, 0.2));
    let phi = Moebius::new(c(1.0, 0.5), c(-0.3, 0.2), c(0.4, 0.1), c(0.9, -0.2)).unwrap();
    let g = f.conjugate_map(&phi).unwrap();
    let a = rho_vector(&f, 1, 3, &opts).unwrap();
    let b = rho_vector(&g, 1, 3, &opts).unwrap();
    assert!(sigma_distance(&a, &b).unwrap() < 1e-8);
    // ∞ is superattracting for polynomials, so τ needs a genuinely rational map
    let h = RationalMap::new(
        HomForm2::new(vec![c(0.4, -0.3), c(0.1, 0.8), c(1.0, 0.0)]),
        HomForm2::new(vec![c(0.6, 0.2), c(-0.5, 0.1), c(0.3, 0.3)]),
    )
    .unwrap();
    let k = h.conjugate_map(&phi).unwrap();
    let ta = tau_vector(&h, 1, 3, &opts).unwrap();
    let tb = tau_vector(&k, 1, 3, &opts).unwrap();
    assert!(spectra_distance(&ta, &tb).unwrap() < 1e-8);
}

#[test]
fn holomorphic_index_theorem() {
    let f = RationalMap::new(
        HomForm2::new(vec![c(0.2, 0.1), c(-0.6, 0.3), c(0.5, 0.5), c(1.0, 0.0)]),
        HomForm2::new(vec![c(0.7, -0.2), c(0.3, 0.3), c(-0.2, 0.1), c(0.4, 0.0)]),
    )
    .unwrap();
    let layer = spectrum_layer(&f, 1, &SpectraOptions::default()).unwrap();
    let s: Cplx<f64> = layer.multipliers().iter().map(|l| c(1.0, 0.0) / (c(1.0, 0.0) - l)).sum();
    assert!((s - c(1.0, 0.0)).norm() < 1e-8, "{s}");
}

#[test]
fn extended_tier_agrees() {
    let f = quadratic(c(-0.2, 0.6));
    let lo = rho_vector(&f, 1, 3, &SpectraOptions::default()).unwrap();
    let hi = rho_vector(&f, 1, 3, &SpectraOptions::default().with_precision(Precision::Extended)).unwrap();
    assert!(sigma_distance(&lo, &hi).unwrap() < 1e-10);
}

#[test]
fn layer_cardinality_matches_nu() {
    let f = quadratic(c(0.1, -0.35));
    for n in 1..=5 {
        let layer = spectrum_layer(&f, n, &SpectraOptions::default()).unwrap();
        assert_eq!(layer.len() as u64, multspec_core::dynatomic::nu_count(2, n as u64));
    }
}

// Both maps have period-3 dynatomic forms whose expanded coefficients are too
// poorly conditioned for a coefficient-only solve.
#[test]
fn badly_conditioned_conjugates() {
    let opts = SpectraOptions::default();
    for index in [1, 109] {
        let mut rng = trial_rng(2, index);
        let f = random_map_with(&mut rng, 3);
        let g = f.conjugate_map(&random_moebius_with(&mut rng)).unwrap();
        let a = rho_vector(&f, 1, 3, &opts).unwrap();
        let b = rho_vector(&g, 1, 3, &opts).unwrap();
        let d = sigma_distance(&a, &b).unwrap();
        assert!(d < 1e-10, "trial {index}: {d:.3e}");
    }
}
