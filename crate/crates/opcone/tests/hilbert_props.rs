use std::sync::Arc;

use opcone::hilbert::{self, HVector, StatePoint, UnitalSpace};
use opcone::linalg::{self, c, Rng64};
use proptest::prelude::*;
use rand::Rng;

fn real_vector(sp: &Arc<UnitalSpace>, r: &mut Rng64) -> HVector {
    let v: Vec<f64> = (0..sp.dim()).map(|_| linalg::gauss(r)).collect();
    HVector::real(sp, &v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cone_meets_its_negative_only_at_zero(seed: u64, d in 1usize..7, scale in 0.0f64..1e-6) {
        let sp = UnitalSpace::standard(d);
        let mut r = linalg::rng(seed);
        let z = &real_vector(&sp, &mut r) * scale;
        let eps = 1e-9;
        if hilbert::in_cone(&z, eps) && hilbert::in_cone(&-&z, eps) {
            prop_assert!(z.norm() <= 2f64.sqrt() * eps + 1e-15);
        }
        let big = &real_vector(&sp, &mut r) * 1.0;
        prop_assume!(big.norm() > 1e-6);
        prop_assert!(!(hilbert::in_cone(&big, eps) && hilbert::in_cone(&-&big, eps)));
    }

    #[test]
    fn cone_is_cut_out_by_boundary_states(seed: u64, d in 2usize..7) {
        let sp = UnitalSpace::standard(d);
        let mut r = linalg::rng(seed);
        let z = real_vector(&sp, &mut r);
        let (z0, _) = z.decompose();
        let mut tests = vec![StatePoint::unit(&sp)];
        if z0.norm() > 0.0 {
            for sign in [1.0, -1.0] {
                let s0 = &z0 * (sign / z0.norm());
                tests.push(StatePoint::new(&s0, 1e-12).unwrap());
            }
        }
        let by_states = tests.iter().all(|s| s.eval(&z).re >= -1e-9);
        prop_assert_eq!(by_states, hilbert::in_cone(&z, 1e-9));
    }

    #[test]
    fn order_norm_sandwich(seed: u64, d in 1usize..7, complex: bool) {
        let sp = UnitalSpace::standard(d);
        let mut r = linalg::rng(seed);
        let z = if complex {
            HVector::new(&sp, linalg::random_cvec(&mut r, d).iter().copied().collect()).unwrap()
        } else {
            real_vector(&sp, &mut r)
        };
        let on = hilbert::order_norm(&z);
        prop_assert!(z.norm() / 5.0 - 1e-9 <= on && on <= 2.0 * z.norm() + 1e-9);
    }

    #[test]
    fn order_unit_ball_is_absolutely_convex_hull(seed: u64, d in 2usize..7) {
        let sp = UnitalSpace::standard(d);
        let mut r = linalg::rng(seed);
        let lambda: f64 = r.gen_range(-1.0..1.0);
        let rest = (1.0 - lambda.abs()) * r.gen_range(0.0..1.3);
        let mut b = real_vector(&sp, &mut r);
        b.axpy(-b.unit_coord(), &HVector::unit(&sp));
        let b = if b.norm() > 0.0 { &b * (rest / b.norm()) } else { b };
        let z = &(&HVector::unit(&sp) * lambda) + &b;
        let gauge = lambda.abs() + b.norm();
        let on = hilbert::order_norm(&z);
        prop_assert!((on - gauge).abs() <= 1e-12);
        prop_assume!((gauge - 1.0).abs() > 1e-12);
        prop_assert_eq!(on <= 1.0, gauge <= 1.0);
    }

    #[test]
    fn sampled_states_are_states(seed: u64, d in 1usize..6) {
        let sp = UnitalSpace::standard(d);
        for s in hilbert::sample_states(&sp, 20, seed) {
            prop_assert!(s.norm0() <= 1.0 + 1e-9);
            prop_assert!(s.eval(&HVector::unit(&sp)) == c(1.0));
        }
    }
}

#[test]
fn boundary_states_include_pure_directions() {
    let sp = UnitalSpace::standard(4);
    let pts = hilbert::boundary_states(&sp, 10, 0);
    for f in sp.non_unit() {
        for sign in [1.0, -1.0] {
            let p = StatePoint::pure(&sp, f, sign);
            assert!(pts.iter().any(|q| q.vector().distance(&p.vector()) < 1e-15));
        }
    }
}
