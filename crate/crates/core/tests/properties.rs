use multspec_core::dynatomic::{divisors, dynatomic_form, nu_count};
use multspec_core::probe::{random_map, random_moebius};
use multspec_core::rootfind::{projective_roots, roots_univariate, RootOptions};
use multspec_core::spectra::*;
use multspec_core::{Cplx, Error, HomForm2, Poly, Precision};
use num_complex::Complex;
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = Cplx<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex::new(a, b))
}

fn separated(roots: &[Cplx<f64>], gap: f64) -> bool {
    roots.iter().enumerate().all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() > gap))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nu_sums_to_period_point_count(d in 2u64..6, n in 1u64..12) {
        let total: u64 = divisors(n).iter().map(|&k| nu_count(d, k)).sum();
        prop_assert_eq!(total, d.pow(n as u32) + 1);
    }

    #[test]
    fn simple_roots_are_reconstructed(roots in prop::collection::vec(cplx(), 1..40)) {
        prop_assume!(separated(&roots, 0.05));
        let p = Poly::from_roots(&roots);
        let found = roots_univariate(&p, &RootOptions::default()).unwrap();
        prop_assert_eq!(found.iter().map(|c| c.multiplicity).sum::<usize>(), roots.len());
        let mut centers = Vec::new();
        for c in &found {
            centers.extend(std::iter::repeat_n(c.center.affine().unwrap(), c.multiplicity));
        }
        let rebuilt = Poly::from_roots(&centers);
        let scale = p.coeffs().iter().map(|a| a.norm()).fold(0.0, f64::max);
        let err = rebuilt.coeffs().iter().zip(p.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
        prop_assert!(err <= 1e-7, "relative coefficient error {:e}", err);
    }

    #[test]
    fn multiplicities_are_conserved(
        base in prop::collection::vec(cplx(), 1..6),
        mult in prop::collection::vec(1usize..4, 6),
        infinity in 0usize..3,
    ) {
        prop_assume!(separated(&base, 0.3));
        let mut all = Vec::new();
        for (r, &k) in base.iter().zip(&mult) {
            all.extend(std::iter::repeat_n(*r, k));
        }
        let p = Poly::from_roots(&all);
        let form = HomForm2::homogenize(&p, all.len() + infinity).unwrap();
        let found = projective_roots(&form, &RootOptions::default()).unwrap();
        prop_assert_eq!(found.iter().map(|c| c.multiplicity).sum::<usize>(), form.degree());
        if infinity > 0 {
            let inf = found.iter().find(|c| c.center.is_infinity()).expect("cluster at infinity");
            prop_assert_eq!(inf.multiplicity, infinity);
        }
    }

    #[test]
    fn reciprocal_identity(vals in prop::collection::vec(cplx(), 1..30)) {
        prop_assume!(vals.iter().all(|v| v.norm() > 1e-3));
        let layer = SpectrumLayer::new(1, &vals);
        let s = sigma_coords(&layer).values;
        let r = reciprocal_sigma(&layer, 1e-9).unwrap().values;
        let n = vals.len();
        let top = s[n - 1];
        for i in 1..=n {
            let want = if i == n { Complex::new(1.0, 0.0) } else { s[n - i - 1] };
            let got = r[i - 1] * top;
            prop_assert!((got - want).norm() <= 1e-8 * (1.0 + want.norm()), "i={} {} vs {}", i, got, want);
        }
    }

    #[test]
    fn sigma_ignores_order(mut vals in prop::collection::vec(cplx(), 1..12), seed in any::<u64>()) {
        let a = sigma_coords(&SpectrumLayer::new(2, &vals));
        let k = (seed as usize) % vals.len();
        vals.rotate_left(k);
        vals.reverse();
        let b = sigma_coords(&SpectrumLayer::new(2, &vals));
        prop_assert!(sigma_distance(&[a], &[b]).unwrap() < 1e-13);
    }

    #[test]
    fn distance_is_a_symmetric_premetric(u in prop::collection::vec(cplx(), 3), v in prop::collection::vec(cplx(), 3)) {
        let a = [SigmaVector { n: 1, values: u }];
        let b = [SigmaVector { n: 1, values: v }];
        let ab = sigma_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, sigma_distance(&b, &a).unwrap());
        prop_assert!((0.0..1.0).contains(&ab));
        prop_assert_eq!(sigma_distance(&a, &a).unwrap(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spectra_are_conjugation_invariant(map_seed in any::<u64>(), phi_seed in any::<u64>(), cubic in any::<bool>()) {
        let f = random_map(if cubic { 3 } else { 2 }, map_seed);
        let g = f.conjugate_map(&random_moebius(phi_seed));
        // a conjugate can fall below the resultant threshold
        prop_assume!(!matches!(g, Err(Error::Degenerate(_))));
        let g = g.unwrap();
        let opts = SpectraOptions::default();
        let a = rho_vector(&f, 1, 2, &opts).unwrap();
        let b = rho_vector(&g, 1, 2, &opts).unwrap();
        prop_assert!(sigma_distance(&a, &b).unwrap() < 1e-8);
    }

    #[test]
    fn dynatomic_degree_is_nu(map_seed in any::<u64>(), d in 2usize..5, n in 1usize..4) {
        let f = random_map(d, map_seed);
        let dy = dynatomic_form(&f, n, Precision::Double).unwrap();
        prop_assert_eq!(dy.form.degree() as u64, nu_count(d as u64, n as u64));
    }

    #[test]
    fn fixed_point_index_sum(map_seed in any::<u64>(), cubic in any::<bool>()) {
        let f = random_map(if cubic { 3 } else { 2 }, map_seed);
        let lambdas = spectrum_layer(&f, 1, &SpectraOptions::default()).unwrap().multipliers();
        prop_assume!(lambdas.iter().all(|l| (l - 1.0).norm() > 1e-3));
        let s: Cplx<f64> = lambdas.iter().map(|l| Complex::new(1.0, 0.0) / (Complex::new(1.0, 0.0) - l)).sum();
        prop_assert!((s - 1.0).norm() < 1e-8, "{}", s);
    }
}
