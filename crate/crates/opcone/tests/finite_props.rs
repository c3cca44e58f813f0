use opcone::finite::{self, HSElement};
use opcone::hilbert::{self, HVector, UnitalSpace};
use opcone::linalg::{self, c, CMat};
use opcone::matrix::{self, HMatrix, Kind};
use opcone::supports::MapK;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hs2_cone_is_psd(seed: u64, shift in -1.0f64..2.0) {
        let mut r = linalg::rng(seed);
        let x = HSElement::new(linalg::random_hermitian(&mut r, 2) + CMat::identity(2, 2) * c(shift)).unwrap();
        let margin = finite::hs_margin(&x);
        let lmin = linalg::lambda_min(&x.matrix);
        prop_assert!((margin - lmin).abs() <= 1e-12);
    }

    #[test]
    fn hs_coordinates_preserve_the_cone(seed: u64, n in 2usize..5, shift in 0.0f64..3.0) {
        let mut r = linalg::rng(seed);
        let sp = finite::hs_space(n);
        let x = HSElement::new(linalg::random_hermitian(&mut r, n) + CMat::identity(n, n) * c(shift)).unwrap();
        let v = finite::hs_coordinates(&sp, &x).unwrap();
        prop_assert!((hilbert::cone_margin(&v) - finite::hs_margin(&x)).abs() <= 1e-12);
        let floor = (1.0 - (n as f64 - 1.0).sqrt()) * x.tau().re;
        prop_assert!(!finite::in_hs_cone(&x, 0.0) || linalg::lambda_min(&x.matrix) >= floor - 1e-12);
    }

    #[test]
    fn kappa_route_certifies_min_elements(seed: u64, d in 2usize..6, n in 1usize..4) {
        let mut r = linalg::rng(seed);
        let k = UnitalSpace::standard(2);
        let h = UnitalSpace::standard(d);
        let mut m = CMat::zeros(d, 2);
        m[(0, 0)] = c(1.0);
        let rad: f64 = r.gen();
        let mut w: Vec<f64> = (1..d).map(|_| linalg::gauss(&mut r)).collect();
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x *= rad / wn);
        for (f, x) in w.iter().enumerate() {
            m[(f + 1, 1)] = c(*x);
        }
        let t = MapK::new(&k, &h, m).unwrap();
        let zeta = matrix::random_min_element(&k, n, &mut r);
        let (image, cert) = finite::kappa_certificate(&t, &zeta).unwrap();
        prop_assert!(cert.verify(&image, 1e-9));
        prop_assert!(image.distance(&finite::apply_map_matrix(&t, &zeta)) == 0.0);
    }

    #[test]
    fn swap_transports_cones(seed: u64, d in 2usize..9) {
        let mut r = linalg::rng(seed);
        let u = r.gen_range(1..d);
        let t = finite::swap_unitary(&UnitalSpace::standard(d), u, 0).unwrap();
        let rep = finite::cone_swap_check(&t, 100, seed);
        prop_assert!(rep.cone_failures == 0 && rep.max_failures == 0);
        prop_assert!(rep.involution_defect == 0.0 && rep.margin_drift <= 1e-12);
    }

    #[test]
    fn measure_and_prepare_maps_are_not_refuted(seed: u64, d in 2usize..5, k in 1usize..4) {
        let mut r = linalg::rng(seed);
        let sp = UnitalSpace::standard(d);
        let mut phi = vec![CMat::zeros(2, 2); d];
        for _ in 0..k {
            let s = hilbert::random_state(&sp, &mut r).vector();
            let p = linalg::random_psd(&mut r, 2);
            for (f, pf) in phi.iter_mut().enumerate() {
                *pf += &p * s.coord(f);
            }
        }
        let rep = finite::eb_check(&sp, &phi, 200, seed).unwrap();
        prop_assert!(rep.agree);
        prop_assert!(rep.verdict != Kind::NonMember);
    }
}

#[test]
fn hs3_strictness() {
    let x = HSElement::new(finite::hs3_example() + CMat::identity(3, 3)).unwrap();
    assert!(finite::in_hs_cone(&x, 1e-12));
    assert!(linalg::lambda_min(&x.matrix) < 0.0);
}

#[test]
fn non_positive_map_is_rejected() {
    let sp = UnitalSpace::standard(2);
    let phi = vec![CMat::identity(2, 2), linalg::real_matrix(2, 2, &[0.0, 3.0, 3.0, 0.0])];
    let rep = finite::eb_check(&sp, &phi, 100, 0).unwrap();
    assert_eq!(rep.verdict, Kind::NonMember);
    assert!(rep.agree);
}

#[test]
fn extension_rejects_non_unital_maps() {
    let k = UnitalSpace::standard(2);
    let t = MapK::new(&k, &k, CMat::identity(2, 2) * c(2.0)).unwrap();
    assert!(finite::extend_positive_map(&t).is_err());
    let z = HMatrix::level1(&HVector::unit(&k));
    assert!(finite::kappa_certificate(&t, &z).is_err());
}
