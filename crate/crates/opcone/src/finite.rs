//! Finite-dimensional systems: `HSₙ`, `ℓ²(2)` inside `ℓ^∞(3)`, the swap unitary,
//! and the entanglement-breaking test for maps `H → M_m`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{self, HVector, UnitalSpace, EPS};
use crate::linalg::{self, c, CMat, C64};
use crate::matrix::{self, CertTerm, HMatrix, Kind, MaxCertificate, MembershipVerdict, Witness};
use crate::supports::MapK;

/// An element of `HSₙ`: `Mₙ` with `(x, y) = τ(xy*)` and the normalized trace `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HSElement {
    pub matrix: CMat,
}

impl HSElement {
    pub fn new(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Shape("HS elements are square matrices".into()));
        }
        Ok(HSElement { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// `τ(x) = tr(x)/n`.
    pub fn tau(&self) -> C64 {
        self.matrix.trace() / c(self.n() as f64)
    }

    /// `τ(|x|²)^{1/2}`.
    pub fn norm2(&self) -> f64 {
        (self.matrix.norm_squared() / self.n() as f64).sqrt()
    }

    /// `x₀ = x − τ(x)I`.
    pub fn zero_part(&self) -> HSElement {
        let n = self.n();
        HSElement { matrix: &self.matrix - CMat::identity(n, n) * self.tau() }
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        linalg::is_hermitian(&self.matrix, eps)
    }
}

/// `HSₙ⁺`: hermitian, `τ(x) ≥ −ε` and `‖x₀‖₂ ≤ τ(x) + ε`.
pub fn in_hs_cone(x: &HSElement, eps: f64) -> bool {
    let t = x.tau().re;
    x.is_hermitian(eps) && t >= -eps && x.zero_part().norm2() <= t + eps
}

/// `τ(x) − ‖x₀‖₂`.
pub fn hs_margin(x: &HSElement) -> f64 {
    x.tau().re - x.zero_part().norm2()
}

/// The hermitian matrix `(1/√2)[[1,0,1],[0,−1,1],[1,1,0]]`.
pub fn hs3_example() -> CMat {
    linalg::real_matrix(3, 3, &[1.0, 0.0, 1.0, 0.0, -1.0, 1.0, 1.0, 1.0, 0.0]) * c(std::f64::consts::FRAC_1_SQRT_2)
}

/// Orthonormal hermitian basis of `HSₙ` starting with `I`: scaled off-diagonal
/// symmetric and antisymmetric pairs, then traceless diagonals.
pub fn hs_basis(n: usize) -> Vec<(String, CMat)> {
    let s = (n as f64).sqrt();
    let mut out = vec![("I".to_string(), CMat::identity(n, n))];
    for i in 0..n {
        for j in i + 1..n {
            let mut a = CMat::zeros(n, n);
            a[(i, j)] = c(s / 2f64.sqrt());
            a[(j, i)] = c(s / 2f64.sqrt());
            out.push((format!("S{i}{j}"), a));
            let mut b = CMat::zeros(n, n);
            b[(i, j)] = C64::new(0.0, -s / 2f64.sqrt());
            b[(j, i)] = C64::new(0.0, s / 2f64.sqrt());
            out.push((format!("A{i}{j}"), b));
        }
    }
    for k in 1..n {
        let kf = k as f64;
        let norm = (kf * (kf + 1.0)).sqrt();
        let mut d = CMat::zeros(n, n);
        for i in 0..k {
            d[(i, i)] = c(s / norm);
        }
        d[(k, k)] = c(-kf * s / norm);
        out.push((format!("D{k}"), d));
    }
    out
}

/// `HSₙ` as a unital space in the basis of [`hs_basis`].
pub fn hs_space(n: usize) -> Arc<UnitalSpace> {
    UnitalSpace::new(hs_basis(n).into_iter().map(|(l, _)| l).collect(), 0).expect("distinct labels")
}

/// Coordinates `(x, g)_τ` of `x` in the basis of [`hs_basis`].
pub fn hs_coordinates(space: &Arc<UnitalSpace>, x: &HSElement) -> Result<HVector> {
    let n = x.n();
    if space.dim() != n * n {
        return Err(Error::SpaceMismatch("space dimension must be n²".into()));
    }
    let coords = hs_basis(n).iter().map(|(_, g)| (&x.matrix * g.adjoint()).trace() / c(n as f64)).collect();
    HVector::new(space, coords)
}

/// `κ(η₁, η₂) = (η₁, η₁ + η₂, η₁ − η₂)`.
pub fn embed_l2_into_linf(eta: [C64; 2]) -> [C64; 3] {
    [eta[0], eta[0] + eta[1], eta[0] - eta[1]]
}

/// A unital positive extension `T̃: ℓ^∞(3) → H` of `T: ℓ²(2) → H`, stored by
/// the images `T̃(θᵢ)` of the three minimal projections.
#[derive(Clone, Debug, PartialEq)]
pub struct Extension {
    pub images: [HVector; 3],
}

impl Extension {
    pub fn apply(&self, lambda: [C64; 3]) -> HVector {
        let mut out = HVector::zero(self.images[0].space());
        for (v, l) in self.images.iter().zip(lambda) {
            out.axpy(l, v);
        }
        out
    }
}

/// `T̃(θ₁) = 0`, `T̃(θ₂) = (e + w)/2`, `T̃(θ₃) = (e − w)/2` with `w = T(ε₂)`.
pub fn extend_positive_map(t: &MapK) -> Result<Extension> {
    if t.from.dim() != 2 {
        return Err(Error::Shape("source must be ℓ²(2)".into()));
    }
    let u = t.from.unit_index();
    let other = 1 - u;
    let e = HVector::unit(&t.to);
    let tu = t.apply(&HVector::basis(&t.from, u));
    let defect = tu.distance(&e);
    if defect > 1e-9 {
        return Err(Error::NotUnitalMap(defect));
    }
    let w = t.apply(&HVector::basis(&t.from, other));
    let images = [HVector::zero(&t.to), &(&e + &w) * 0.5, &(&e - &w) * 0.5];
    for (i, v) in images.iter().enumerate() {
        if !hilbert::in_cone(v, 1e-9) {
            return Err(Error::NotPositive(format!("extension sends θ{} outside the cone", i + 1)));
        }
    }
    Ok(Extension { images })
}

/// Max certificate for `T^{(n)}(ζ)` with `ζ` over `ℓ²(2)` in `min`: the matrices
/// `(Z₁, Z₁ + Z₂, Z₁ − Z₂)` of `κ^{(n)}(ζ)` are positive, and `T̃` sends each
/// `θᵢ` into the cone.
pub fn kappa_certificate(t: &MapK, zeta: &HMatrix) -> Result<(HMatrix, MaxCertificate)> {
    hilbert::check_space(&t.from, zeta.space())?;
    let ext = extend_positive_map(t)?;
    let u = t.from.unit_index();
    let z1 = linalg::hermitian_part(zeta.coefficient(u));
    let z2 = linalg::hermitian_part(zeta.coefficient(1 - u));
    let plus = &z1 + &z2;
    let minus = &z1 - &z2;
    let worst = linalg::lambda_min(&plus).min(linalg::lambda_min(&minus));
    if worst < -1e-9 {
        return Err(Error::Refuted(format!("κ image has eigenvalue {worst:.3e}")));
    }
    let terms = vec![
        CertTerm { a: linalg::psd_sqrt(&plus), s: ext.images[1].clone() },
        CertTerm { a: linalg::psd_sqrt(&minus), s: ext.images[2].clone() },
    ];
    let image = apply_map_matrix(t, zeta);
    let mut cert = MaxCertificate { terms, residual_bound: 0.0 };
    cert.residual_bound = cert.reconstruct(&t.to, zeta.n()).distance(&image);
    Ok((image, cert))
}

/// `T^{(n)}(ζ)`.
pub fn apply_map_matrix(t: &MapK, zeta: &HMatrix) -> HMatrix {
    let n = zeta.n();
    let coef = (0..t.to.dim())
        .map(|f| {
            let mut acc = CMat::zeros(n, n);
            for g in 0..t.from.dim() {
                acc += zeta.coefficient(g) * t.matrix[(f, g)];
            }
            acc
        })
        .collect();
    HMatrix::from_coefficients(&t.to, coef).expect("shape")
}

/// The unitary exchanging `u` and `e`, from `(H, u)` to `(H, e)`.
pub fn swap_unitary(space: &Arc<UnitalSpace>, u_index: usize, e_index: usize) -> Result<MapK> {
    if u_index == e_index || u_index >= space.dim() || e_index >= space.dim() {
        return Err(Error::InvalidSpace("u and e must be distinct basis vectors".into()));
    }
    let from = space.with_unit(u_index)?;
    let to = space.with_unit(e_index)?;
    let d = space.dim();
    let mut m = CMat::identity(d, d);
    m[(u_index, u_index)] = c(0.0);
    m[(e_index, e_index)] = c(0.0);
    m[(u_index, e_index)] = c(1.0);
    m[(e_index, u_index)] = c(1.0);
    MapK::new(&from, &to, m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapReport {
    pub unitary_defect: f64,
    pub involution_defect: f64,
    pub self_adjoint_defect: f64,
    /// Sampled `𝔠ᵤ` elements whose image left `𝔠ₑ`.
    pub cone_failures: usize,
    /// Largest `|margin_e(Tζ) − margin_u(ζ)|`.
    pub margin_drift: f64,
    /// Certified `max 𝔠ᵤ` samples whose transported certificate failed.
    pub max_failures: usize,
    pub samples: usize,
}

/// Checks the algebraic identities and transports sampled cone and max elements.
pub fn cone_swap_check(t: &MapK, samples: usize, seed: u64) -> SwapReport {
    let d = t.matrix.nrows();
    let id = CMat::identity(d, d);
    let unitary_defect = linalg::max_abs_diff(&(t.matrix.adjoint() * &t.matrix), &id);
    let involution_defect = linalg::max_abs_diff(&(&t.matrix * &t.matrix), &id);
    let self_adjoint_defect = linalg::max_abs_diff(&t.matrix.adjoint(), &t.matrix);
    let mut r = linalg::rng(seed);
    let mut cone_failures = 0;
    let mut margin_drift: f64 = 0.0;
    for _ in 0..samples {
        let z = hilbert::random_cone_vector(&t.from, &mut r);
        let img = t.apply(&z);
        if !hilbert::in_cone(&img, 0.0) && !hilbert::in_cone(&img, 1e-12) {
            cone_failures += 1;
        }
        margin_drift = margin_drift.max((hilbert::cone_margin(&img) - hilbert::cone_margin(&z)).abs());
    }
    let mut max_failures = 0;
    let checks = (samples / 20).max(1);
    for _ in 0..checks {
        let n = 1 + r.gen_range(0..3);
        let (z, cert) = matrix::random_max_element(&t.from, n, 3, &mut r);
        let image = apply_map_matrix(t, &z);
        let moved = cert.map_states(|s| t.apply(s));
        if !moved.verify(&image, 1e-9) {
            max_failures += 1;
        }
    }
    SwapReport {
        unitary_defect,
        involution_defect,
        self_adjoint_defect,
        cone_failures,
        margin_drift,
        max_failures,
        samples,
    }
}

/// A linear map `φ: H → M_m` given by `φ(f)` for each basis vector `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMap {
    pub space: Arc<UnitalSpace>,
    pub phi: Vec<CMat>,
}

/// Outcome of the two entanglement-breaking tests for `φ: H → M_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct EbReport {
    /// (a) `φ^{(n)}` on sampled `min 𝔠` elements: `NonMember` with a witness if some
    /// image has a negative eigenvalue, otherwise `Undecided` with the smallest
    /// eigenvalue seen (sampling cannot prove positivity).
    pub min_positive: MembershipVerdict,
    /// (b) `certify_max` on `Γ = Σ_f conj(φ(f)) ⊗ f`, which lies in `max 𝔠`
    /// exactly when `φ*` is matrix positive into `max 𝔠̄`.
    pub dual_max: MembershipVerdict,
    /// `false` when one test refutes and the other certifies.
    pub agree: bool,
    /// Overall verdict: `Member` means entanglement breaking.
    pub verdict: Kind,
}

/// Cross-validated entanglement-breaking check; `phi[f] = φ(f)` for each basis vector.
pub fn eb_check(space: &Arc<UnitalSpace>, phi: &[CMat], budget: usize, seed: u64) -> Result<EbReport> {
    if phi.len() != space.dim() {
        return Err(Error::Shape("one matrix per basis vector".into()));
    }
    let m = phi[0].nrows();
    if phi.iter().any(|p| p.nrows() != m || p.ncols() != m) {
        return Err(Error::Shape("images must be m×m".into()));
    }
    let gamma = HMatrix::from_coefficients(space, phi.iter().map(linalg::conj).collect())?;
    let dual_max = matrix::certify_max(&gamma, budget, seed)?;
    let min_positive = min_positivity(space, phi, budget, seed)?;
    let agree = !((min_positive.is_refuted() && dual_max.is_member())
        || (dual_max.is_refuted() && !min_positive.is_refuted()));
    let verdict = if min_positive.is_refuted() || dual_max.is_refuted() {
        Kind::NonMember
    } else if dual_max.is_member() {
        Kind::Member
    } else {
        Kind::Undecided
    };
    Ok(EbReport { min_positive, dual_max, agree, verdict })
}

fn apply_phi(phi: &[CMat], z: &HMatrix) -> CMat {
    let mut acc = CMat::zeros(z.n() * phi[0].nrows(), z.n() * phi[0].nrows());
    for (zf, pf) in z.coefficients().iter().zip(phi) {
        acc += linalg::kron(zf, pf);
    }
    acc
}

/// Smallest eigenvalue of `φ^{(n)}(ζ)` over states (searched exactly through the
/// level-1 margin problem) and sampled `min 𝔠` elements at levels `1..=m`.
fn min_positivity(space: &Arc<UnitalSpace>, phi: &[CMat], budget: usize, seed: u64) -> Result<MembershipVerdict> {
    let eps = EPS;
    let m = phi[0].nrows();
    let pe = linalg::hermitian_part(&phi[space.unit_index()]);
    let pf: Vec<CMat> = space.non_unit().map(|f| linalg::hermitian_part(&phi[f])).collect();
    let herm_dev = phi.iter().map(|p| linalg::max_abs_diff(p, &p.adjoint())).fold(0.0, f64::max);
    let (_, beta, _) = matrix::min_margin_search(&pe, &pf, budget, seed);
    let state_witness = |beta: &linalg::CVec| {
        let v: Vec<f64> = pf.iter().map(|p| (beta.adjoint() * p * beta)[(0, 0)].re).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut s = vec![0.0; space.dim()];
        s[space.unit_index()] = 1.0;
        for (f, vf) in space.non_unit().zip(&v) {
            if nv > 0.0 {
                s[f] = -vf / nv;
            }
        }
        HMatrix::level1(&HVector::real(space, &s).expect("shape"))
    };
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let consider = |z: HMatrix, worst: &mut f64, witness: &mut Option<HMatrix>| {
        let l = linalg::lambda_min(&linalg::hermitian_part(&apply_phi(phi, &z)));
        if l < *worst {
            *worst = l;
            *witness = Some(z);
        }
    };
    consider(state_witness(&beta), &mut worst, &mut witness);
    if herm_dev > eps {
        // φ not hermitian-preserving: some hermitian state has a non-hermitian image
        let mut r = linalg::rng(seed);
        for s in hilbert::sample_states(space, 64, r.gen()) {
            let z = HMatrix::level1(&s.vector());
            let img = apply_phi(phi, &z);
            if linalg::max_abs_diff(&img, &img.adjoint()) > eps {
                return Ok(MembershipVerdict::refuted(Witness::Dual(z), -linalg::max_abs_diff(&img, &img.adjoint())));
            }
        }
    }
    let mut r = linalg::rng(linalg::sub_seed(seed, 0xEB));
    let per_level = (budget / (2 * m)).max(8);
    for n in 1..=m {
        for k in 0..per_level {
            let z = if k % 2 == 0 {
                matrix::random_min_element(space, n, &mut r)
            } else {
                matrix::random_max_element(space, n, 2, &mut r).0
            };
            let scale = linalg::op_norm(z.unit_coefficient()).max(1e-300);
            consider(z.scale(c(1.0 / scale)), &mut worst, &mut witness);
        }
    }
    if worst < -eps {
        Ok(MembershipVerdict::refuted(Witness::Dual(witness.expect("set with worst")), worst))
    } else {
        Ok(MembershipVerdict::undecided(worst))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hs3_counterexample() {
        let x0 = hs3_example();
        let ev = linalg::eigvalsh(&x0);
        let r = 1.5f64.sqrt();
        assert!((ev[0] + r).abs() < 1e-12 && ev[1].abs() < 1e-12 && (ev[2] - r).abs() < 1e-12);
        let x = HSElement::new(&x0 + CMat::identity(3, 3)).unwrap();
        assert!(in_hs_cone(&x, 1e-9));
        assert!((linalg::lambda_min(&x.matrix) - (1.0 - r)).abs() < 1e-12);
        assert!((HSElement::new(x0).unwrap().norm2() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hs_coordinates_are_isometric() {
        let n = 3;
        let sp = hs_space(n);
        let mut r = linalg::rng(2);
        for _ in 0..20 {
            let x = HSElement::new(linalg::random_hermitian(&mut r, n) + CMat::identity(n, n) * c(1.5)).unwrap();
            let v = hs_coordinates(&sp, &x).unwrap();
            assert!((v.norm() - x.norm2()).abs() < 1e-12);
            assert!((v.coord(0) - x.tau()).norm() < 1e-12);
            assert_eq!(hilbert::in_cone(&v, 1e-12), in_hs_cone(&x, 1e-12));
        }
    }

    #[test]
    fn hs2_is_psd() {
        let mut r = linalg::rng(3);
        for _ in 0..500 {
            let x = HSElement::new(linalg::random_hermitian(&mut r, 2) + CMat::identity(2, 2) * c(0.5)).unwrap();
            assert_eq!(in_hs_cone(&x, 1e-12), linalg::lambda_min(&x.matrix) >= 0.0);
        }
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(embed_l2_into_linf([c(1.0), c(0.0)]), [c(1.0), c(1.0), c(1.0)]);
        assert_eq!(embed_l2_into_linf([c(0.0), c(1.0)]), [c(0.0), c(1.0), c(-1.0)]);
        assert_eq!(embed_l2_into_linf([c(1.0), c(0.5)]), [c(1.0), c(1.5), c(0.5)]);
    }

    #[test]
    fn identity_extension() {
        let k = UnitalSpace::standard(2);
        let ext = extend_positive_map(&MapK::identity(&k)).unwrap();
        let expected = &(&HVector::unit(&k) + &HVector::basis(&k, 1)) * 0.5;
        assert_eq!(ext.images[1], expected);
        for eta in [[c(1.0), c(0.3)], [c(2.0), c(-1.5)]] {
            let img = ext.apply(embed_l2_into_linf(eta));
            assert!(img.distance(&HVector::new(&k, eta.to_vec()).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn kappa_route_reconstructs_min_elements() {
        let k = UnitalSpace::standard(2);
        let t = MapK::identity(&k);
        let mut r = linalg::rng(4);
        for _ in 0..50 {
            let z = matrix::random_min_element(&k, 2, &mut r);
            let (img, cert) = kappa_certificate(&t, &z).unwrap();
            assert!(img.distance(&z) < 1e-14);
            assert!(cert.verify(&z, 1e-9));
        }
    }

    #[test]
    fn swap_identities() {
        let sp = UnitalSpace::standard(5);
        let t = swap_unitary(&sp, 2, 0).unwrap();
        assert_eq!(t.apply(&HVector::basis(&t.from, 0)), HVector::basis(&t.to, 2));
        assert_eq!(t.apply(&HVector::basis(&t.from, 2)), HVector::basis(&t.to, 0));
        let rep = cone_swap_check(&t, 200, 0);
        assert_eq!(rep.unitary_defect + rep.involution_defect + rep.self_adjoint_defect, 0.0);
        assert_eq!((rep.cone_failures, rep.max_failures), (0, 0));
        assert!(rep.margin_drift < 1e-12);
    }

    #[test]
    fn eb_examples() {
        let sp = UnitalSpace::standard(3);
        let m = 2;
        let mut phi = vec![CMat::zeros(m, m); 3];
        phi[0] = CMat::identity(m, m);
        let rep = eb_check(&sp, &phi, 200, 0).unwrap();
        assert_eq!(rep.verdict, Kind::Member);
        assert!(rep.agree);

        let zero = vec![CMat::zeros(m, m); 3];
        assert_eq!(eb_check(&sp, &zero, 50, 0).unwrap().verdict, Kind::Member);

        let mut bad = phi.clone();
        bad[1] = linalg::real_matrix(2, 2, &[2.0, 0.0, 0.0, -2.0]);
        let rep = eb_check(&sp, &bad, 200, 0).unwrap();
        assert_eq!(rep.verdict, Kind::NonMember);
        assert!(rep.agree && rep.min_positive.is_refuted());
    }
}
