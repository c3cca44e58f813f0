use std::fmt::Debug;
use std::sync::Arc;

use opcone::finite::{ChannelMap, HSElement};
use opcone::function::{CompactSpace, L2Element, Measure};
use opcone::hilbert::{HVector, UnitalSpace};
use opcone::json::{self, JsonForm};
use opcone::linalg;
use opcone::matrix;
use opcone::states;
use opcone::supports;
use proptest::prelude::*;

fn round_trip<T: JsonForm + PartialEq + Debug>(x: &T, pretty: bool) -> Result<(), TestCaseError> {
    let s = json::to_string(x, pretty);
    let back: T = json::from_str(&s).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, x);
    Ok(())
}

fn space(d: usize, unit: usize) -> Arc<UnitalSpace> {
    UnitalSpace::standard(d).with_unit(unit % d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vectors_and_matrices(seed: u64, d in 1usize..6, unit in 0usize..6, n in 1usize..4, pretty: bool) {
        let mut r = linalg::rng(seed);
        let sp = space(d, unit);
        round_trip(&sp, pretty)?;
        let v = HVector::new(&sp, linalg::random_cvec(&mut r, d).iter().copied().collect()).unwrap();
        round_trip(&v, pretty)?;
        let (z, cert) = matrix::random_max_element(&sp, n, 2, &mut r);
        round_trip(&z, pretty)?;
        round_trip(&cert, pretty)?;
        round_trip(&matrix::in_min(&z, 20, seed).unwrap(), pretty)?;
        round_trip(&linalg::random_cmat(&mut r, n, n + 1), pretty)?;
    }

    #[test]
    fn maps_and_supports(seed: u64, d in 2usize..5, atoms in 2usize..6, pretty: bool) {
        let mut r = linalg::rng(seed);
        let h = UnitalSpace::standard(d);
        let t = supports::random_unital_positive_map(&h, atoms, &mut r);
        round_trip(&t, pretty)?;
        let k = supports::extract_support(&t).unwrap();
        round_trip(&k, pretty)?;
        round_trip(&supports::separate(&k).unwrap(), pretty)?;
        round_trip(&supports::random_positive_map_k(&h, &h, &mut r), pretty)?;
        round_trip(&(**k.measure()).clone(), pretty)?;
    }

    #[test]
    fn functions_and_measures(seed: u64, atoms in 1usize..6, nodes in 8usize..64, pretty: bool) {
        let mut r = linalg::rng(seed);
        let iv = CompactSpace::interval(-1.0, 1.0, nodes).unwrap();
        round_trip(&iv, pretty)?;
        let mu = Arc::new(Measure::uniform(&iv));
        round_trip(&L2Element::from_fn(&mu, |t| t * t - 0.5), pretty)?;
        let x = CompactSpace::atoms(atoms);
        let mu = Arc::new(Measure::uniform(&x));
        let vals: Vec<_> = linalg::random_cvec(&mut r, atoms).iter().copied().collect();
        round_trip(&L2Element::new(&mu, vals).unwrap(), pretty)?;
    }

    #[test]
    fn finite_and_state_values(seed: u64, d in 2usize..5, atoms in 1usize..5, pretty: bool) {
        let mut r = linalg::rng(seed);
        let h = UnitalSpace::standard(d);
        round_trip(&states::random_unital_measure(&h, atoms, &mut r), pretty)?;
        round_trip(&HSElement::new(linalg::random_hermitian(&mut r, d)).unwrap(), pretty)?;
        let phi = (0..d).map(|_| linalg::random_hermitian(&mut r, 2)).collect();
        round_trip(&ChannelMap { space: h, phi }, pretty)?;
    }
}
