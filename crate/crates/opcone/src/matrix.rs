//! Matrix levels `Mₙ(H)`, the matrix pairing and the quantizations of `𝔠`.
//!
//! An [`HMatrix`] is stored through its coefficient matrices
//! `Z_f = ⟨⟨ζ, f̄⟩⟩ ∈ Mₙ`, one per basis vector, so that `ζ = Σ_f Z_f ⊗ f`.
//! It is hermitian exactly when every `Z_f` is.
//!
//! Membership in `min 𝔠` and in the quantum cones is a universally quantified
//! condition, so the tests return a three-valued [`MembershipVerdict`]:
//! a refutation always carries a witness, a positive answer is given only when a
//! finite argument covers the whole condition, and everything else is
//! [`Kind::Undecided`] with the worst margin seen.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{self, check_space, HVector, UnitalSpace, EPS};
use crate::linalg::{self, c, CMat, CVec, Rng64, C64};

/// Default number of random search directions for universally quantified tests.
pub const DEFAULT_BUDGET: usize = 1000;

/// A matrix `ζ = Σ_f Z_f ⊗ f` over `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct HMatrix {
    space: Arc<UnitalSpace>,
    n: usize,
    coef: Vec<CMat>,
}

impl HMatrix {
    pub fn from_coefficients(space: &Arc<UnitalSpace>, coef: Vec<CMat>) -> Result<Self> {
        if coef.len() != space.dim() {
            return Err(Error::Shape(format!("{} coefficient matrices for dimension {}", coef.len(), space.dim())));
        }
        let n = coef[0].nrows();
        if coef.iter().any(|z| z.nrows() != n || z.ncols() != n) {
            return Err(Error::Shape("coefficient matrices must be square of equal size".into()));
        }
        if n == 0 {
            return Err(Error::Shape("level must be at least 1".into()));
        }
        Ok(HMatrix { space: space.clone(), n, coef })
    }

    /// Build from an `n×n` array of vectors.
    pub fn from_entries(space: &Arc<UnitalSpace>, entries: &[Vec<HVector>]) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|row| row.len() != n) {
            return Err(Error::Shape("entries must form a non-empty square array".into()));
        }
        let mut coef = vec![CMat::zeros(n, n); space.dim()];
        for (i, row) in entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                check_space(space, v.space())?;
                for (f, z) in coef.iter_mut().enumerate() {
                    z[(i, j)] = v.coord(f);
                }
            }
        }
        HMatrix::from_coefficients(space, coef)
    }

    pub fn level1(v: &HVector) -> Self {
        let coef = v.coords().iter().map(|&z| CMat::from_element(1, 1, z)).collect();
        HMatrix { space: v.space().clone(), n: 1, coef }
    }

    /// `a ⊗ s`, the matrix with entries `a_ij s`.
    pub fn tensor(a: &CMat, s: &HVector) -> Self {
        assert!(a.is_square(), "tensor factor must be square");
        let coef = s.coords().iter().map(|&z| a * z).collect();
        HMatrix { space: s.space().clone(), n: a.nrows(), coef }
    }

    /// `s^{⊕n}`.
    pub fn direct_power(s: &HVector, n: usize) -> Self {
        HMatrix::tensor(&CMat::identity(n, n), s)
    }

    /// `e^{⊕n}`.
    pub fn unit_power(space: &Arc<UnitalSpace>, n: usize) -> Self {
        HMatrix::direct_power(&HVector::unit(space), n)
    }

    pub fn zeros(space: &Arc<UnitalSpace>, n: usize) -> Self {
        HMatrix { space: space.clone(), n, coef: vec![CMat::zeros(n, n); space.dim()] }
    }

    pub fn space(&self) -> &Arc<UnitalSpace> {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `⟨⟨ζ, f̄⟩⟩` for basis index `f`.
    pub fn coefficient(&self, f: usize) -> &CMat {
        &self.coef[f]
    }

    pub fn coefficients(&self) -> &[CMat] {
        &self.coef
    }

    pub fn unit_coefficient(&self) -> &CMat {
        &self.coef[self.space.unit_index()]
    }

    pub fn entry(&self, i: usize, j: usize) -> HVector {
        HVector::new(&self.space, self.coef.iter().map(|z| z[(i, j)]).collect()).expect("shape")
    }

    pub fn entries(&self) -> Vec<Vec<HVector>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// `ζ* = [ζ_ji*]`.
    pub fn adjoint(&self) -> Self {
        HMatrix { space: self.space.clone(), n: self.n, coef: self.coef.iter().map(|z| z.adjoint()).collect() }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.coef.iter().map(|z| linalg::max_abs_diff(z, &z.adjoint())).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        self.hermitian_deviation() <= eps
    }

    /// `ζ₀`, the part with vanishing unit coefficient.
    pub fn zero_part(&self) -> Self {
        let mut out = self.clone();
        let u = self.space.unit_index();
        out.coef[u] = CMat::zeros(self.n, self.n);
        out
    }

    /// `a*ζa` for `a ∈ M_{n,m}`.
    pub fn compress(&self, a: &CMat) -> Self {
        assert_eq!(a.nrows(), self.n, "compression needs n rows");
        let ad = a.adjoint();
        let coef = self.coef.iter().map(|z| &ad * z * a).collect();
        HMatrix { space: self.space.clone(), n: a.ncols(), coef }
    }

    /// `β*ζβ ∈ H` for a column vector `β`.
    pub fn vector_form(&self, beta: &CVec) -> HVector {
        let coords = self.coef.iter().map(|z| (beta.adjoint() * z * beta)[(0, 0)]).collect();
        HVector::new(&self.space, coords).expect("shape")
    }

    pub fn add(&self, other: &HMatrix) -> Result<Self> {
        check_space(&self.space, &other.space)?;
        if self.n != other.n {
            return Err(Error::Shape("levels differ".into()));
        }
        let coef = self.coef.iter().zip(&other.coef).map(|(a, b)| a + b).collect();
        Ok(HMatrix { space: self.space.clone(), n: self.n, coef })
    }

    pub fn sub(&self, other: &HMatrix) -> Result<Self> {
        self.add(&other.scale(c(-1.0)))
    }

    pub fn scale(&self, a: C64) -> Self {
        HMatrix { space: self.space.clone(), n: self.n, coef: self.coef.iter().map(|z| z * a).collect() }
    }

    /// Largest entrywise coefficient difference.
    pub fn distance(&self, other: &HMatrix) -> f64 {
        self.coef.iter().zip(&other.coef).map(|(a, b)| linalg::max_abs_diff(a, b)).fold(0.0, f64::max)
    }

    /// The same coefficients read in another space of equal dimension.
    pub fn reinterpret(&self, space: &Arc<UnitalSpace>) -> Result<Self> {
        HMatrix::from_coefficients(space, self.coef.clone())
    }

    fn ensure_hermitian(&self, eps: f64) -> Result<()> {
        let d = self.hermitian_deviation();
        if d > eps.max(1e-12) {
            Err(Error::NotHermitian(d))
        } else {
            Ok(())
        }
    }
}

/// The matrix pairing `⟨⟨ζ, η̄⟩⟩ = [(ζ_ik, η_jl)]_{(i,j),(k,l)} = Σ_f Z_f ⊗ conj(Y_f)`.
///
/// Rows are indexed by `(i, j) ↦ i·m + j`.
pub fn pairing(z: &HMatrix, eta: &HMatrix) -> Result<CMat> {
    check_space(&z.space, &eta.space)?;
    let (n, m) = (z.n, eta.n);
    let mut out = CMat::zeros(n * m, n * m);
    for (a, b) in z.coef.iter().zip(&eta.coef) {
        out += linalg::kron(a, &linalg::conj(b));
    }
    Ok(out)
}

/// The scalar pairing `⟨ζ, η̄⟩ = Σ_f tr(Z_f Y_f*)` between matrices of equal level.
pub fn scalar_pairing(z: &HMatrix, eta: &HMatrix) -> Result<C64> {
    check_space(&z.space, &eta.space)?;
    if z.n != eta.n {
        return Err(Error::Shape("scalar pairing needs equal levels".into()));
    }
    Ok(z.coef.iter().zip(&eta.coef).map(|(a, b)| (a * b.adjoint()).trace()).sum())
}

/// Operator Hilbert space norm `‖ζ‖ₒ = ‖⟨⟨ζ, ζ̄⟩⟩‖^{1/2}`.
pub fn norm_o(z: &HMatrix) -> f64 {
    linalg::op_norm(&pairing(z, z).expect("same space")).sqrt()
}

/// Hilbert–Schmidt norm `‖ζ‖₂ = (Σ_f tr |Z_f|²)^{1/2}`.
pub fn norm_2(z: &HMatrix) -> f64 {
    z.coef.iter().map(|a| a.norm_squared()).sum::<f64>().sqrt()
}

/// Sampled lower bound for `‖ζ‖ₛₒ = sup |⟨ζ, η̄⟩|` over `‖η‖ₒ ≤ 1`.
///
/// The candidates are `ζ/‖ζ‖ₒ`, its hermitian and skew parts, and `samples`
/// random directions; each candidate is normalized in `‖·‖ₒ`. The first
/// candidate alone already gives `‖ζ‖₂²/‖ζ‖ₒ ≥ ‖ζ‖ₒ`.
pub fn norm_so(z: &HMatrix, samples: usize, seed: u64) -> f64 {
    let no = norm_o(z);
    if no == 0.0 {
        return 0.0;
    }
    let value = |eta: &HMatrix| {
        let k = norm_o(eta);
        if k == 0.0 {
            0.0
        } else {
            scalar_pairing(z, eta).expect("same space").norm() / k
        }
    };
    let herm = HMatrix { space: z.space.clone(), n: z.n, coef: z.coef.iter().map(linalg::hermitian_part).collect() };
    let mut best = value(z).max(value(&herm));
    let mut r = linalg::rng(seed);
    for _ in 0..samples {
        let coef = z.coef.iter().map(|_| linalg::random_cmat(&mut r, z.n, z.n)).collect();
        let eta = HMatrix { space: z.space.clone(), n: z.n, coef };
        best = best.max(value(&eta));
    }
    best
}

/// One term `(a, s)` of a max certificate, standing for `a* s^{⊕k} a = a*a ⊗ s`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertTerm {
    pub a: CMat,
    pub s: HVector,
}

/// A decomposition `ζ ≈ Σ aᵢ* sᵢ^{⊕} aᵢ` with every `sᵢ ∈ 𝔠`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxCertificate {
    pub terms: Vec<CertTerm>,
    pub residual_bound: f64,
}

impl MaxCertificate {
    pub fn reconstruct(&self, space: &Arc<UnitalSpace>, n: usize) -> HMatrix {
        let mut acc = HMatrix::zeros(space, n);
        for t in &self.terms {
            let p = t.a.adjoint() * &t.a;
            acc = acc.add(&HMatrix::tensor(&p, &t.s)).expect("certificate term shape");
        }
        acc
    }

    /// Every `s` lies in `𝔠` and the reconstruction is within `residual_bound + eps`.
    pub fn verify(&self, z: &HMatrix, eps: f64) -> bool {
        self.terms.iter().all(|t| hilbert::in_cone(&t.s, eps) && t.a.ncols() == z.n)
            && self.reconstruct(&z.space, z.n).distance(z) <= self.residual_bound + eps
    }

    /// Apply a linear map `H → K` to every `s`; the images must be checked by the caller.
    pub fn map_states(&self, f: impl Fn(&HVector) -> HVector) -> MaxCertificate {
        MaxCertificate {
            terms: self.terms.iter().map(|t| CertTerm { a: t.a.clone(), s: f(&t.s) }).collect(),
            residual_bound: self.residual_bound,
        }
    }

    fn finish(terms: Vec<CertTerm>, z: &HMatrix) -> MaxCertificate {
        let mut cert = MaxCertificate { terms, residual_bound: 0.0 };
        cert.residual_bound = cert.reconstruct(&z.space, z.n).distance(z);
        cert
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Member,
    NonMember,
    Undecided,
}

/// What a refutation points at.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A unit vector `β` with `β*ζβ ∉ 𝔠`.
    Direction(CVec),
    /// A scalar matrix `a` whose compression violates a defining inequality.
    Compression(CMat),
    /// An element `η` whose pairing with `ζ` has a negative eigenvalue.
    Dual(HMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipVerdict {
    pub kind: Kind,
    pub certificate: Option<MaxCertificate>,
    pub witness: Option<Witness>,
    /// Negative for refutations; for `Undecided`, the worst margin found.
    pub margin: f64,
    /// Search directions actually evaluated.
    pub evaluated: usize,
}

impl MembershipVerdict {
    pub fn member(margin: f64) -> Self {
        MembershipVerdict { kind: Kind::Member, certificate: None, witness: None, margin, evaluated: 0 }
    }

    pub fn refuted(witness: Witness, margin: f64) -> Self {
        MembershipVerdict { kind: Kind::NonMember, certificate: None, witness: Some(witness), margin, evaluated: 0 }
    }

    pub fn undecided(margin: f64) -> Self {
        MembershipVerdict { kind: Kind::Undecided, certificate: None, witness: None, margin, evaluated: 0 }
    }

    pub fn is_member(&self) -> bool {
        self.kind == Kind::Member
    }

    pub fn is_refuted(&self) -> bool {
        self.kind == Kind::NonMember
    }

    fn with_evaluated(mut self, k: usize) -> Self {
        self.evaluated = k;
        self
    }
}

/// Margin `(v, e) − ‖v₀‖` of `v = β*ζβ` for the real form of hermitian coefficients.
fn beta_margin(ze: &CMat, zf: &[CMat], beta: &CVec) -> (f64, Vec<f64>) {
    let q = |m: &CMat| (beta.adjoint() * m * beta)[(0, 0)].re;
    let v: Vec<f64> = zf.iter().map(q).collect();
    let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (q(ze) - n0, v)
}

/// Monotone descent: with `t = v/‖v‖`, the minimal eigenvector of `Z_e − Σ t_f Z_f`
/// never increases the margin.
fn descend(ze: &CMat, zf: &[CMat], beta: CVec, steps: usize) -> (f64, CVec) {
    let (mut best, mut v) = beta_margin(ze, zf, &beta);
    let mut beta = beta;
    for _ in 0..steps {
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv == 0.0 {
            let (lam, vec) = linalg::min_eig(ze);
            if lam < best {
                return (lam, vec);
            }
            break;
        }
        let mut m = ze.clone();
        for (zi, vi) in zf.iter().zip(&v) {
            m -= zi * c(vi / nv);
        }
        let (_, cand) = linalg::min_eig(&m);
        let (mc, vc) = beta_margin(ze, zf, &cand);
        if mc < best - 1e-15 {
            best = mc;
            beta = cand;
            v = vc;
        } else {
            break;
        }
    }
    (best, beta)
}

/// Search for the smallest margin `β*Z_eβ − ‖(β*Z_fβ)_f‖` over unit `β ∈ ℂⁿ`.
///
/// Starts from the basis vectors and `budget` random directions (sharded across
/// worker threads with deterministic sub-seeds) and refines the best starts by
/// descent. Returns the smallest margin found and its direction.
pub fn min_margin_search(ze: &CMat, zf: &[CMat], budget: usize, seed: u64) -> (f64, CVec, usize) {
    let n = ze.nrows();
    let mut starts: Vec<(f64, CVec)> = (0..n)
        .map(|i| {
            let b = CVec::from_fn(n, |k, _| if k == i { c(1.0) } else { c(0.0) });
            (beta_margin(ze, zf, &b).0, b)
        })
        .collect();
    let shards = 8usize;
    let per = budget.div_ceil(shards);
    let sampled: Vec<(f64, CVec)> = (0..shards)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut r = linalg::rng(linalg::sub_seed(seed, s as u64));
            let count = per.min(budget.saturating_sub(s * per));
            (0..count)
                .map(|_| {
                    let b = linalg::random_unit_cvec(&mut r, n);
                    (beta_margin(ze, zf, &b).0, b)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let evaluated = starts.len() + sampled.len();
    starts.extend(sampled);
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut best, mut arg) = (f64::INFINITY, starts[0].1.clone());
    for (_, b) in starts.into_iter().take(8) {
        let (m, bb) = descend(ze, zf, b, 60);
        if m < best {
            best = m;
            arg = bb;
        }
    }
    (best, arg, evaluated)
}

fn split_coefficients(z: &HMatrix) -> (CMat, Vec<CMat>) {
    let u = z.space.unit_index();
    let ze = linalg::hermitian_part(&z.coef[u]);
    let zf = z.space.non_unit().map(|f| linalg::hermitian_part(&z.coef[f])).collect();
    (ze, zf)
}

/// `λ_min(Z_e − Σ_{f≠e} |Z_f|)`, non-negative exactly when the sufficient max condition holds.
pub fn max_sufficient_margin(z: &HMatrix) -> f64 {
    let (ze, zf) = split_coefficients(z);
    let mut a = ze;
    for m in &zf {
        a -= linalg::habs(m);
    }
    linalg::lambda_min(&a)
}

/// Membership in `min 𝔠`: `β*ζβ ∈ 𝔠` for every `β ∈ ℂⁿ`.
///
/// Exact answers: level 1; all coefficients diagonal; a two-dimensional `H`
/// (where the condition is `Z_e ± Z_f ⪰ 0`); and any `ζ` meeting the sufficient
/// max condition `Σ|Z_f| ⪯ Z_e`. Otherwise a witness search decides refutation.
pub fn in_min(z: &HMatrix, budget: usize, seed: u64) -> Result<MembershipVerdict> {
    in_min_tol(z, budget, seed, EPS)
}

pub fn in_min_tol(z: &HMatrix, budget: usize, seed: u64, eps: f64) -> Result<MembershipVerdict> {
    z.ensure_hermitian(eps)?;
    let (ze, zf) = split_coefficients(z);
    let n = z.n;
    let basis = |i: usize| CVec::from_fn(n, |k, _| if k == i { c(1.0) } else { c(0.0) });
    let decide = |m: f64, beta: CVec| {
        if m < -eps {
            MembershipVerdict::refuted(Witness::Direction(beta), m)
        } else {
            MembershipVerdict::member(m)
        }
    };
    if n == 1 {
        return Ok(decide(beta_margin(&ze, &zf, &basis(0)).0, basis(0)));
    }
    let diagonal = z.coef.iter().all(|m| {
        (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() <= 1e-15))
    });
    if diagonal {
        let (m, i) = (0..n)
            .map(|i| (beta_margin(&ze, &zf, &basis(i)).0, i))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        return Ok(decide(m, basis(i)));
    }
    if zf.len() == 1 {
        let (lp, vp) = linalg::min_eig(&(&ze + &zf[0]));
        let (lm, vm) = linalg::min_eig(&(&ze - &zf[0]));
        return Ok(if lp <= lm { decide(lp, vp) } else { decide(lm, vm) });
    }
    let (best, beta, evaluated) = min_margin_search(&ze, &zf, budget, seed);
    if best < -eps {
        return Ok(MembershipVerdict::refuted(Witness::Direction(beta), best).with_evaluated(evaluated));
    }
    if max_sufficient_margin(z) >= -eps {
        return Ok(MembershipVerdict::member(best).with_evaluated(evaluated));
    }
    Ok(MembershipVerdict::undecided(best).with_evaluated(evaluated))
}

/// Certificate from the sufficient condition `Σ_{f≠e}|Z_f| ⪯ Z_e`.
///
/// Each eigenpair `(d, u)` of `Z_f` contributes `|d| uu* ⊗ (e + sign(d) f)`, and
/// the remainder `Z_e − Σ|Z_f|` contributes its square root against `e`.
fn spectral_certificate(z: &HMatrix) -> MaxCertificate {
    let sp = &z.space;
    let (ze, _) = split_coefficients(z);
    let e = HVector::unit(sp);
    let mut rem = ze;
    let mut terms = Vec::new();
    for f in sp.non_unit() {
        let zf = linalg::hermitian_part(&z.coef[f]);
        let (vals, vecs) = linalg::eigh(&zf);
        for (k, &d) in vals.iter().enumerate() {
            if d.abs() <= linalg::CLAMP {
                continue;
            }
            let w = d.abs().sqrt();
            let a = CMat::from_fn(1, vecs.nrows(), |_, j| vecs[(j, k)].conj() * w);
            let s = &e + &(&HVector::basis(sp, f) * d.signum());
            terms.push(CertTerm { a, s });
        }
        rem -= linalg::habs(&zf);
    }
    let root = linalg::psd_sqrt(&rem);
    if root.norm() > 0.0 {
        terms.push(CertTerm { a: root, s: e });
    }
    MaxCertificate::finish(terms, z)
}

/// Certificate for a two-dimensional `H`: `ζ = ½(Z_e+Z_f) ⊗ (e+f) + ½(Z_e−Z_f) ⊗ (e−f)`.
fn two_dim_certificate(z: &HMatrix) -> MaxCertificate {
    let sp = &z.space;
    let f = sp.non_unit().next().expect("two-dimensional space");
    let (ze, zf) = split_coefficients(z);
    let e = HVector::unit(sp);
    let fv = HVector::basis(sp, f);
    let plus = linalg::psd_sqrt(&((&ze + &zf[0]) * c(0.5)));
    let minus = linalg::psd_sqrt(&((&ze - &zf[0]) * c(0.5)));
    let terms = vec![CertTerm { a: plus, s: &e + &fv }, CertTerm { a: minus, s: &e - &fv }];
    MaxCertificate::finish(terms, z)
}

/// Certification in `max 𝔠`.
///
/// `Member` comes with a [`MaxCertificate`]; `NonMember` comes with a level-1
/// state `η` such that `⟨⟨ζ, η̄⟩⟩` has a negative eigenvalue.
pub fn certify_max(z: &HMatrix, budget: usize, seed: u64) -> Result<MembershipVerdict> {
    certify_max_tol(z, budget, seed, EPS)
}

pub fn certify_max_tol(z: &HMatrix, budget: usize, seed: u64, eps: f64) -> Result<MembershipVerdict> {
    z.ensure_hermitian(eps)?;
    let sp = &z.space;
    let suff = max_sufficient_margin(z);
    let mut cert = None;
    if suff >= -eps {
        cert = Some(spectral_certificate(z));
    } else if z.n == 1 {
        let v = z.entry(0, 0);
        if hilbert::cone_margin(&v) >= -eps {
            let s = HVector::real(sp, &v.re()).expect("shape");
            cert = Some(MaxCertificate { terms: vec![CertTerm { a: CMat::identity(1, 1), s }], residual_bound: 0.0 });
        }
    } else if sp.dim() == 2 {
        let (ze, zf) = split_coefficients(z);
        let m = linalg::lambda_min(&(&ze + &zf[0])).min(linalg::lambda_min(&(&ze - &zf[0])));
        if m >= -eps {
            cert = Some(two_dim_certificate(z));
        }
    }
    if let Some(cert) = cert {
        if cert.verify(z, eps.max(1e-9)) {
            let mut v = MembershipVerdict::member(suff);
            v.certificate = Some(cert);
            return Ok(v);
        }
    }
    let min = in_min_tol(z, budget, seed, eps)?;
    if let Some(Witness::Direction(beta)) = &min.witness {
        let v = z.vector_form(beta);
        let (v0, _) = v.decompose();
        let n0 = v0.norm();
        let mut s = HVector::unit(sp);
        if n0 > 0.0 {
            s.axpy(c(-1.0 / n0), &HVector::real(sp, &v0.re()).expect("shape"));
        }
        let eta = HMatrix::level1(&s);
        let lam = linalg::lambda_min(&pairing(z, &eta)?);
        if lam < -eps {
            return Ok(MembershipVerdict::refuted(Witness::Dual(eta), lam).with_evaluated(min.evaluated));
        }
    }
    Ok(MembershipVerdict::undecided(min.margin).with_evaluated(min.evaluated))
}

/// The three quantum cones of the operator-Hilbert family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantumCone {
    /// `√m ‖a*ζ₀a‖₂ ≤ τ(a*Z_e a)` for `a ∈ M_{n,m}`.
    Cl,
    /// `‖a*ζ₀a‖ₛₒ ≤ τ(a*Z_e a)`.
    Co,
    /// `‖a*ζ₀a‖₂ ≤ τ(a*Z_e a)`.
    Cu,
}

/// Margin of the defining inequality at compression `a`; for `Co` the sampled
/// `‖·‖ₛₒ` makes this an upper estimate of the true margin.
pub fn quantum_margin(z: &HMatrix, which: QuantumCone, a: &CMat, so_samples: usize, seed: u64) -> f64 {
    let x = z.compress(a);
    let m = a.ncols() as f64;
    let tau = x.unit_coefficient().trace().re;
    let x0 = x.zero_part();
    let lhs = match which {
        QuantumCone::Cl => m.sqrt() * norm_2(&x0),
        QuantumCone::Cu => norm_2(&x0),
        QuantumCone::Co => norm_so(&x0, so_samples, seed),
    };
    tau - lhs
}

/// Violation search for `𝔠ₗ`, `𝔠ₒ` or `𝔠ᵤ` over compressions `a ∈ M_{n,m}`, `m ≤ n + 2`.
///
/// `Co` and `Cu` are decided exactly at level 1 and accept any max-certified
/// input. Any refutation of `min 𝔠` refutes all three cones with a rank-one
/// compression.
pub fn in_quantum_cone(z: &HMatrix, which: QuantumCone, budget: usize, seed: u64) -> Result<MembershipVerdict> {
    let eps = EPS;
    z.ensure_hermitian(eps)?;
    let n = z.n;
    if n == 1 && which != QuantumCone::Cl {
        let v = z.entry(0, 0);
        let m = hilbert::cone_margin(&v);
        return Ok(if m < -eps {
            MembershipVerdict::refuted(Witness::Compression(CMat::identity(1, 1)), m)
        } else {
            MembershipVerdict::member(m)
        });
    }
    if which != QuantumCone::Cl && max_sufficient_margin(z) >= -eps {
        return Ok(MembershipVerdict::member(max_sufficient_margin(z)));
    }
    let min = in_min(z, budget, seed)?;
    if let Some(Witness::Direction(beta)) = &min.witness {
        let a = CMat::from_fn(n, 1, |i, _| beta[i]);
        let m = quantum_margin(z, which, &a, 16, seed);
        if m < -eps {
            return Ok(MembershipVerdict::refuted(Witness::Compression(a), m));
        }
    }
    let so_samples = 16;
    let mut r = linalg::rng(linalg::sub_seed(seed, 0xC0));
    let mut worst = f64::INFINITY;
    let mut worst_a = CMat::identity(n, n);
    let mut evaluated = 0;
    let consider = |a: CMat, r: &mut Rng64, worst: &mut f64, worst_a: &mut CMat| {
        let nf = a.norm();
        if nf == 0.0 {
            return;
        }
        let a = a / c(nf);
        let m = quantum_margin(z, which, &a, so_samples, r.gen());
        if m < *worst {
            *worst = m;
            *worst_a = a;
        }
    };
    for m in 1..=n + 2 {
        let a = CMat::from_fn(n, m, |i, j| if i == j { c(1.0) } else { c(0.0) });
        consider(a, &mut r, &mut worst, &mut worst_a);
        evaluated += 1;
    }
    for k in 0..budget {
        let m = 1 + k % (n + 2);
        let a = linalg::random_cmat(&mut r, n, m);
        consider(a, &mut r, &mut worst, &mut worst_a);
        evaluated += 1;
    }
    for _ in 0..budget / 4 {
        let step = linalg::random_cmat(&mut r, n, worst_a.ncols()) * c(0.1);
        let a = &worst_a + step;
        consider(a, &mut r, &mut worst, &mut worst_a);
        evaluated += 1;
    }
    if worst < -eps {
        return Ok(MembershipVerdict::refuted(Witness::Compression(worst_a), worst).with_evaluated(evaluated));
    }
    Ok(MembershipVerdict::undecided(worst).with_evaluated(evaluated))
}

/// `λ_min(⟨⟨ζ, η̄⟩⟩)` for a max-certified `ζ` and an `η` not refuted by the min test.
///
/// `η̄ ∈ min 𝔠̄` exactly when `η ∈ min 𝔠`, so `η̄` is passed through `η`.
pub fn duality_check(z: &HMatrix, cert: &MaxCertificate, eta: &HMatrix, seed: u64) -> Result<f64> {
    if !cert.verify(z, 1e-9) {
        return Err(Error::Uncertified("certificate does not reconstruct the input".into()));
    }
    if in_min(eta, DEFAULT_BUDGET, seed)?.is_refuted() {
        return Err(Error::Refuted("dual element is not in min".into()));
    }
    Ok(linalg::lambda_min(&pairing(z, eta)?))
}

/// `λ_min(⟨⟨ζ, η̄⟩⟩)` for two inputs that the `Co` test does not refute.
pub fn self_duality_check(z: &HMatrix, eta: &HMatrix, budget: usize, seed: u64) -> Result<f64> {
    for x in [z, eta] {
        if in_quantum_cone(x, QuantumCone::Co, budget, seed)?.is_refuted() {
            return Err(Error::Refuted("input refuted by the Co test".into()));
        }
    }
    Ok(linalg::lambda_min(&pairing(z, eta)?))
}

/// Lower estimate of `‖ζ‖_e = sup ‖⟨⟨ζ, η̄⟩⟩‖` over `η = θ + e^{⊕m}` with
/// hermitian `θ ⊥ e`, `‖θ‖ₒ ≤ 1`.
pub fn unit_ball_gauge(z: &HMatrix, samples: usize, seed: u64) -> f64 {
    let sp = &z.space;
    let n = z.n;
    let eval = |theta: &HMatrix| {
        let eta = theta.add(&HMatrix::unit_power(sp, theta.n)).expect("shape");
        linalg::op_norm(&pairing(z, &eta).expect("space"))
    };
    let normalized = |t: HMatrix| {
        let t = t.zero_part();
        let k = norm_o(&t);
        if k > 0.0 {
            Some(t.scale(c(1.0 / k)))
        } else {
            None
        }
    };
    let mut best = eval(&HMatrix::zeros(sp, 1));
    let herm = HMatrix { space: sp.clone(), n, coef: z.coef.iter().map(linalg::hermitian_part).collect() };
    let skew = HMatrix {
        space: sp.clone(),
        n,
        coef: z.coef.iter().map(|a| linalg::hermitian_part(&(a * C64::new(0.0, -1.0)))).collect(),
    };
    for cand in [herm, skew] {
        if let Some(t) = normalized(cand) {
            best = best.max(eval(&t)).max(eval(&t.scale(c(-1.0))));
        }
    }
    let mut r = linalg::rng(seed);
    for k in 0..samples {
        let m = 1 + k % (n + 1);
        let t = random_hermitian_hmatrix(sp, m, &mut r);
        if let Some(t) = normalized(t) {
            best = best.max(eval(&t));
        }
    }
    best
}

/// Random hermitian element with Gaussian coefficients.
pub fn random_hermitian_hmatrix(space: &Arc<UnitalSpace>, n: usize, r: &mut Rng64) -> HMatrix {
    let coef = (0..space.dim()).map(|_| linalg::random_hermitian(r, n)).collect();
    HMatrix { space: space.clone(), n, coef }
}

/// Random element of `max 𝔠` together with the certificate it was built from.
pub fn random_max_element(space: &Arc<UnitalSpace>, n: usize, terms: usize, r: &mut Rng64) -> (HMatrix, MaxCertificate) {
    let mut ts = Vec::new();
    for _ in 0..terms {
        let k = 1 + r.gen_range(0..n);
        let a = linalg::random_cmat(r, k, n);
        let s = hilbert::random_cone_vector(space, r);
        ts.push(CertTerm { a, s });
    }
    let cert = MaxCertificate { terms: ts, residual_bound: 0.0 };
    let z = cert.reconstruct(space, n);
    (z, cert)
}

/// Random element of `min 𝔠` built as `b*(I ⊗ e + Σ W_f ⊗ f)b` with
/// hermitian `W_f`, `Σ‖W_f‖² ≤ 1`; the inner element is in `min 𝔠` because
/// `‖Σ t_f W_f‖ ≤ ‖t‖ (Σ‖W_f‖²)^{1/2}`.
pub fn random_min_element(space: &Arc<UnitalSpace>, n: usize, r: &mut Rng64) -> HMatrix {
    let k = n + r.gen_range(0..2);
    let mut coef: Vec<CMat> = (0..space.dim()).map(|_| linalg::random_hermitian(r, k)).collect();
    let u = space.unit_index();
    coef[u] = CMat::identity(k, k);
    let total: f64 = space.non_unit().map(|f| linalg::op_norm(&coef[f]).powi(2)).sum();
    let shrink = if total > 0.0 { r.gen::<f64>().sqrt() / total.sqrt() } else { 0.0 };
    for f in space.non_unit() {
        coef[f] *= c(shrink);
    }
    let inner = HMatrix { space: space.clone(), n: k, coef };
    let b = linalg::random_cmat(r, k, n);
    inner.compress(&b)
}

/// Random element of `𝔠ₒ`: a compression of `θ + e^{⊕k}` with hermitian `θ ⊥ e`, `‖θ‖ₒ ≤ 1`.
pub fn random_co_element(space: &Arc<UnitalSpace>, n: usize, r: &mut Rng64) -> HMatrix {
    let k = n + r.gen_range(0..2);
    let t = random_hermitian_hmatrix(space, k, r).zero_part();
    let no = norm_o(&t);
    let scale = if no > 0.0 { r.gen::<f64>() / no } else { 0.0 };
    let inner = t.scale(c(scale)).add(&HMatrix::unit_power(space, k)).expect("shape");
    let b = linalg::random_cmat(r, k, n);
    inner.compress(&b)
}
