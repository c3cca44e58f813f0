//! Atomic unital measures on the state space `X = S(𝔠)`, the map
//! `ι: H → L²(X, μ)`, the conditional expectation onto `ι(H)`, and
//! factorization of positive maps through `L²(X, μ)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::function::{CompactSpace, L2Element, Measure};
use crate::hilbert::{self, HVector, StatePoint, UnitalSpace, EPS};
use crate::linalg::{self, c, Rng64, C64};
use crate::supports::MapK;

/// Least-squares residual above which `k_f` is taken to lie outside `K_μ`.
pub const FACTOR_TOL: f64 = 1e-8;

/// `μ = Σ c_t δ_t` with `c_t > 0`, `Σ c_t = 1` and `Σ c_t t₀ = 0`.
#[derive(Clone, Debug)]
pub struct UnitalMeasure {
    space: Arc<UnitalSpace>,
    atoms: Vec<StatePoint>,
    weights: Vec<f64>,
    l2: Arc<Measure>,
}

impl PartialEq for UnitalMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.atoms == other.atoms && self.weights == other.weights
    }
}

impl UnitalMeasure {
    /// Zero weights are dropped and repeated states merged.
    pub fn new(space: &Arc<UnitalSpace>, atoms: Vec<StatePoint>, weights: Vec<f64>, eps: f64) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Shape("one weight per atom".into()));
        }
        let mut pts: Vec<StatePoint> = Vec::new();
        let mut ws: Vec<f64> = Vec::new();
        for (i, (s, w)) in atoms.into_iter().zip(weights).enumerate() {
            hilbert::check_space(space, s.space())?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeAtom { atom: i, mass: w });
            }
            if w == 0.0 {
                continue;
            }
            match pts.iter().position(|p| same_state(p, &s)) {
                Some(j) => ws[j] += w,
                None => {
                    pts.push(s);
                    ws.push(w);
                }
            }
        }
        let total: f64 = ws.iter().sum();
        if (total - 1.0).abs() > eps {
            return Err(Error::NotProbability(format!("total mass {total}")));
        }
        let bary = barycenter(space, &pts, &ws);
        if bary > eps {
            return Err(Error::NotUnital(bary));
        }
        let x = CompactSpace::atoms(pts.len());
        let l2 = Arc::new(Measure::atomic(&x, ws.clone())?);
        Ok(UnitalMeasure { space: space.clone(), atoms: pts, weights: ws, l2 })
    }

    /// `δ_e`.
    pub fn dirac_unit(space: &Arc<UnitalSpace>) -> Self {
        UnitalMeasure::new(space, vec![StatePoint::unit(space)], vec![1.0], 0.0).expect("δ_e is unital")
    }

    pub fn space(&self) -> &Arc<UnitalSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[StatePoint] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The measure on the atom index set, for building `L²(X, μ)`.
    pub fn l2_measure(&self) -> &Arc<Measure> {
        &self.l2
    }

    /// `μ({s})`.
    pub fn mass_at(&self, s: &StatePoint) -> f64 {
        self.atoms.iter().zip(&self.weights).filter(|(p, _)| same_state(p, s)).map(|(_, w)| w).sum()
    }

    /// `∫ t dμ`, which is `e` for a unital measure.
    pub fn integral(&self) -> HVector {
        kappa_star(&self.space, &self.atoms.iter().cloned().zip(self.weights.iter().copied()).collect::<Vec<_>>())
    }
}

fn same_state(a: &StatePoint, b: &StatePoint) -> bool {
    a.s0_coords().iter().zip(b.s0_coords()).all(|(x, y)| (x - y).abs() <= 1e-12)
}

fn barycenter(space: &Arc<UnitalSpace>, pts: &[StatePoint], ws: &[f64]) -> f64 {
    let mut b = vec![0.0; space.dim()];
    for (p, w) in pts.iter().zip(ws) {
        for (bi, x) in b.iter_mut().zip(p.s0_coords()) {
            *bi += w * x;
        }
    }
    b.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Builds `Σ c_t δ_t` after checking `Σ c_t = 1` and `Σ c_t t₀ = 0` within `eps`.
pub fn make_unital_measure(
    space: &Arc<UnitalSpace>,
    points: Vec<StatePoint>,
    weights: Vec<f64>,
    eps: f64,
) -> Result<UnitalMeasure> {
    UnitalMeasure::new(space, points, weights, eps)
}

/// `½δ_s + ½δ_{s−}` with `s− = e − s₀`.
pub fn mu_s(s: &StatePoint) -> Result<UnitalMeasure> {
    if s.norm0() == 0.0 {
        return Err(Error::NotState("μ_s needs s₀ ≠ 0".into()));
    }
    let neg: Vec<f64> = s.s0_coords().iter().map(|x| -x).collect();
    let opposite = StatePoint::from_real(s.space(), &neg, 0.0)?;
    UnitalMeasure::new(s.space(), vec![s.clone(), opposite], vec![0.5, 0.5], 0.0)
}

/// `atoms` random states with random weights, balanced by one extra pure state
/// opposite to their barycenter.
pub fn random_unital_measure(space: &Arc<UnitalSpace>, atoms: usize, r: &mut Rng64) -> UnitalMeasure {
    if space.dim() == 1 || atoms == 0 {
        return UnitalMeasure::dirac_unit(space);
    }
    let mut pts: Vec<StatePoint> = (0..atoms).map(|_| hilbert::random_state(space, r)).collect();
    let mut ws: Vec<f64> = (0..atoms).map(|_| r.gen_range(0.05..1.0)).collect();
    let mut b = vec![0.0; space.dim()];
    for (p, w) in pts.iter().zip(&ws) {
        for (bi, x) in b.iter_mut().zip(p.s0_coords()) {
            *bi += w * x;
        }
    }
    let bn = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if bn > 0.0 {
        let opp: Vec<f64> = b.iter().map(|x| -x / bn).collect();
        pts.push(StatePoint::from_real(space, &opp, 1e-12).expect("unit vector"));
        ws.push(bn);
    }
    let total: f64 = ws.iter().sum();
    ws.iter_mut().for_each(|w| *w /= total);
    UnitalMeasure::new(space, pts, ws, 1e-9).expect("balanced by construction")
}

/// `κ*(Σ c_t δ_t) = Σ c_t t`.
pub fn kappa_star(space: &Arc<UnitalSpace>, charge: &[(StatePoint, f64)]) -> HVector {
    let mut v = vec![0.0; space.dim()];
    for (t, w) in charge {
        for (vi, x) in v.iter_mut().zip(t.vector_coords()) {
            *vi += w * x;
        }
    }
    HVector::real(space, &v).expect("shape")
}

/// `μ = c_s δ_s + c_e δ_e + ν` with `κ*(ν) = 0`, for a real atomic charge.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeDecomposition {
    pub s: StatePoint,
    pub c_s: f64,
    pub c_e: f64,
    /// `‖κ*(μ − c_s δ_s − c_e δ_e)‖`.
    pub residual: f64,
}

pub fn decompose_charge(space: &Arc<UnitalSpace>, charge: &[(StatePoint, f64)]) -> ChargeDecomposition {
    let eta = kappa_star(space, charge);
    let (eta0, r) = eta.decompose();
    let n0 = eta0.norm();
    let s = if n0 > 0.0 {
        let dir: Vec<f64> = eta0.re().iter().map(|x| x / n0).collect();
        StatePoint::from_real(space, &dir, 1e-9).expect("unit direction")
    } else {
        StatePoint::unit(space)
    };
    let (c_s, c_e) = (n0, r.re - n0);
    let mut rest = charge.to_vec();
    rest.push((s.clone(), -c_s));
    rest.push((StatePoint::unit(space), -c_e));
    let residual = kappa_star(space, &rest).norm();
    ChargeDecomposition { s, c_s, c_e, residual }
}

/// `ζ(t) = ⟨ζ, t⟩` at each state.
pub fn canonical_rep(z: &HVector, states: &[StatePoint]) -> Vec<C64> {
    states.iter().map(|t| t.eval(z)).collect()
}

/// `max |ζ(t)|` over the boundary sample and `e ± ζ₀/‖ζ₀‖`; for hermitian `ζ` this
/// approaches the order norm.
pub fn sampled_sup(z: &HVector, count: usize, seed: u64) -> f64 {
    let space = z.space();
    let mut states = hilbert::boundary_states(space, count, seed);
    let (z0, _) = z.decompose();
    let re = z0.re();
    let n = re.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for sign in [1.0, -1.0] {
            let d: Vec<f64> = re.iter().map(|x| sign * x / n).collect();
            states.push(StatePoint::from_real(space, &d, 1e-9).expect("unit direction"));
        }
    }
    canonical_rep(z, &states).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `ι(ζ) = ζ(·)` on the atoms of `μ`.
pub fn iota(z: &HVector, mu: &UnitalMeasure) -> Result<L2Element> {
    hilbert::check_space(&mu.space, z.space())?;
    L2Element::new(mu.l2_measure(), canonical_rep(z, &mu.atoms))
}

/// `ι*(η) = ∫ η(t) t dμ`.
pub fn iota_star(eta: &L2Element, mu: &UnitalMeasure) -> Result<HVector> {
    if eta.measure().as_ref() != mu.l2_measure().as_ref() {
        return Err(Error::SpaceMismatch("η lives on another measure".into()));
    }
    let mut v = vec![c(0.0); mu.space.dim()];
    for ((t, w), y) in mu.atoms.iter().zip(&mu.weights).zip(eta.values()) {
        for (vi, x) in v.iter_mut().zip(t.vector_coords()) {
            *vi += y * (w * x);
        }
    }
    HVector::new(&mu.space, v)
}

/// `‖ι‖₂ = (Σ_f ‖ι(f)‖₂²)^{1/2}`.
pub fn iota_hs_norm(mu: &UnitalMeasure) -> f64 {
    let mut s = 0.0;
    for (t, w) in mu.atoms.iter().zip(&mu.weights) {
        s += w * t.vector_coords().iter().map(|x| x * x).sum::<f64>();
    }
    s.sqrt()
}

/// The orthogonal projection `P` of `L²(X, μ)` onto `ι(H)`.
///
/// Stored in whitened coordinates `y_t = c_t^{1/2} η(t)`, where the inner product
/// is the standard one. The basis is Gram–Schmidt of `u, ι(f₁), ι(f₂), …` in the
/// order of the basis of `H`; other orders give other bases of the same image.
#[derive(Clone, Debug)]
pub struct ConditionalExpectation {
    sqrt_w: Vec<f64>,
    q: DMatrix<f64>,
    mu: Arc<Measure>,
}

impl ConditionalExpectation {
    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    /// `P` in whitened coordinates.
    pub fn whitened(&self) -> DMatrix<f64> {
        &self.q * self.q.transpose()
    }

    /// Orthonormal basis `χ₀ = u, χ₁, …` of `im P` as functions.
    pub fn basis(&self) -> Vec<L2Element> {
        (0..self.rank())
            .map(|j| {
                let v: Vec<f64> = (0..self.q.nrows()).map(|t| self.q[(t, j)] / self.sqrt_w[t]).collect();
                L2Element::real(&self.mu, &v).expect("shape")
            })
            .collect()
    }

    pub fn apply(&self, eta: &L2Element) -> Result<L2Element> {
        if eta.measure().as_ref() != self.mu.as_ref() {
            return Err(Error::SpaceMismatch("η lives on another measure".into()));
        }
        let k = self.sqrt_w.len();
        let y_re = DVector::from_fn(k, |t, _| eta.values()[t].re * self.sqrt_w[t]);
        let y_im = DVector::from_fn(k, |t, _| eta.values()[t].im * self.sqrt_w[t]);
        let p = self.whitened();
        let (a, b) = (&p * y_re, &p * y_im);
        let v = (0..k).map(|t| C64::new(a[t], b[t]) / self.sqrt_w[t]).collect();
        L2Element::new(&self.mu, v)
    }

    /// `max |P² − P|`.
    pub fn idempotence_defect(&self) -> f64 {
        let p = self.whitened();
        (&p * &p - &p).amax()
    }

    /// `max |P* − P|` for the `L²(μ)` inner product.
    pub fn self_adjoint_defect(&self) -> f64 {
        let p = self.whitened();
        (p.transpose() - &p).amax()
    }
}

pub fn conditional_expectation(mu: &UnitalMeasure) -> ConditionalExpectation {
    let k = mu.len();
    let sqrt_w: Vec<f64> = mu.weights.iter().map(|w| w.sqrt()).collect();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut candidates = vec![DVector::from_fn(k, |t, _| sqrt_w[t])];
    for f in mu.space.non_unit() {
        candidates.push(DVector::from_fn(k, |t, _| sqrt_w[t] * mu.atoms[t].s0_coords()[f]));
    }
    for mut v in candidates {
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &cols {
                let d = q.dot(&v);
                v.axpy(-d, q, 1.0);
            }
        }
        let n = v.norm();
        if n > 1e-10 * n0.max(1.0) {
            cols.push(v / n);
        }
    }
    let q = DMatrix::from_columns(&cols);
    ConditionalExpectation { sqrt_w, q, mu: mu.l2_measure().clone() }
}

/// The chain `μ(s)^{1/2}‖s₀‖² ≤ ‖s₀(·)‖₂ ≤ ‖s₀‖ ≤ ‖s₀′‖₂ ≤ (μ(s)⁻¹ − 1)^{1/2}` at an atom.
#[derive(Clone, Debug, PartialEq)]
pub struct MassChain {
    pub mass: f64,
    pub lower: f64,
    pub s0_fn_norm: f64,
    pub s0_norm: f64,
    pub s0_prime_norm: f64,
    pub upper: f64,
    /// `(1 + ‖s₀‖²)⁻¹`.
    pub mass_bound: f64,
}

impl MassChain {
    pub fn links(&self) -> [f64; 5] {
        [self.lower, self.s0_fn_norm, self.s0_norm, self.s0_prime_norm, self.upper]
    }

    pub fn holds(&self, eps: f64) -> bool {
        self.links().windows(2).all(|w| w[0] <= w[1] + eps) && self.mass <= self.mass_bound + eps
    }
}

/// Evaluates every link of the chain at atom `atom`; `s′ = μ(s)⁻¹[s]` and
/// `s₀′ = P s′ − u`.
pub fn mass_bounds(mu: &UnitalMeasure, atom: usize) -> Result<MassChain> {
    let s = mu.atoms.get(atom).ok_or(Error::NotAnAtom(atom))?;
    let mass = mu.weights[atom];
    let s0 = s.s0();
    let s0_norm = s0.norm();
    let s0_fn_norm = iota(&s0, mu)?.norm();
    let ce = conditional_expectation(mu);
    let prime = L2Element::indicator(mu.l2_measure(), &[atom]).scale(c(1.0 / mass));
    let s0_prime = ce.apply(&prime)?.add(&L2Element::unit(mu.l2_measure()).scale(c(-1.0)))?;
    Ok(MassChain {
        mass,
        lower: mass.sqrt() * s0_norm * s0_norm,
        s0_fn_norm,
        s0_norm,
        s0_prime_norm: s0_prime.norm(),
        upper: (1.0 / mass - 1.0).max(0.0).sqrt(),
        mass_bound: 1.0 / (1.0 + s0_norm * s0_norm),
    })
}

/// Outcome of [`concentration_feasible`].
#[derive(Clone, Debug)]
pub struct Concentration {
    pub feasible: bool,
    /// `‖Σ m·s₀‖`.
    pub lhs: f64,
    /// `1 − Σ m`.
    pub rhs: f64,
    /// `Σ m δ_s + ν` when feasible.
    pub measure: Option<UnitalMeasure>,
}

/// Decides whether a unital measure dominates the masses `m` at the given states,
/// and builds one: `ν = r δ_t` with `r = 1 − Σm` and `t₀ = −Σ m·s₀ / r`, which
/// realizes `η = −Σ m·s₀ + r e ∈ 𝔠`.
pub fn concentration_feasible(space: &Arc<UnitalSpace>, points: &[(StatePoint, f64)], eps: f64) -> Result<Concentration> {
    let mut b = vec![0.0; space.dim()];
    let mut total = 0.0;
    for (i, (s, m)) in points.iter().enumerate() {
        hilbert::check_space(space, s.space())?;
        if !m.is_finite() || *m < 0.0 {
            return Err(Error::NegativeAtom { atom: i, mass: *m });
        }
        total += m;
        for (bi, x) in b.iter_mut().zip(s.s0_coords()) {
            *bi += m * x;
        }
    }
    let lhs = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rhs = 1.0 - total;
    if lhs > rhs + eps {
        return Ok(Concentration { feasible: false, lhs, rhs, measure: None });
    }
    let mut atoms: Vec<StatePoint> = points.iter().map(|p| p.0.clone()).collect();
    let mut weights: Vec<f64> = points.iter().map(|p| p.1).collect();
    if rhs > eps {
        let scale = 1.0 / rhs.max(lhs);
        let t0: Vec<f64> = b.iter().map(|x| -x * scale).collect();
        atoms.push(StatePoint::from_real(space, &t0, 1e-9)?);
        weights.push(rhs);
    }
    let measure = UnitalMeasure::new(space, atoms, weights, eps.max(1e-9))?;
    Ok(Concentration { feasible: true, lhs, rhs, measure: Some(measure) })
}

/// A factorization `T = S∘ι` through `L²(X, μ)`.
#[derive(Clone, Debug)]
pub struct L2Factorization {
    /// `S` as a `dim H × atoms` matrix acting on function values.
    pub s: DMatrix<f64>,
    /// Coefficients of each `k_f` in the spanning family `σ_χ = ι*(χ)`.
    pub alpha: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// `max |S ι − T|` on the basis of `K`.
    pub composition_defect: f64,
    /// `‖S(u) − e‖`.
    pub unital_defect: f64,
    pub rank: usize,
    /// Largest `|σ − 1|` over nonzero singular values of `ι` on `K_h^u`; zero
    /// when `ι(ball K_h^u)` fills `ball im(P)_h^u`.
    pub exactness_defect: f64,
    /// Smallest sampled cone margin of `S(u + θ₀)` over unit `θ₀ ∈ im(P)_h^u`.
    pub positivity_margin: f64,
}

impl L2Factorization {
    pub fn is_exact(&self) -> bool {
        self.exactness_defect <= 1e-9
    }
}

#[derive(Clone, Debug)]
pub enum FactorizationOutcome {
    Factored(L2Factorization),
    /// `k_f` is not in `K_μ`.
    NotFactorable { f: usize, residual: f64 },
}

/// Solves `k_f = Σ α_χ σ_χ` by least squares for every `f` and sets
/// `S θ = Σ_f (θ, m_f) f` with `m_f = Σ α_χ χ`.
pub fn l2_factorize(t: &MapK, mu: &UnitalMeasure, samples: usize, seed: u64) -> Result<FactorizationOutcome> {
    hilbert::check_space(&t.from, &mu.space)?;
    let (dk, dh, k) = (t.from.dim(), t.to.dim(), mu.len());
    let mut ks = Vec::with_capacity(dh);
    for f in 0..dh {
        let row: Vec<C64> = (0..dk).map(|g| t.matrix[(f, g)].conj()).collect();
        let im = row.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if im > EPS {
            return Err(Error::NotHermitian(im));
        }
        ks.push(DVector::from_iterator(dk, row.iter().map(|z| z.re)));
    }
    let ce = conditional_expectation(mu);
    let basis = ce.basis();
    let sigma_cols: Vec<DVector<f64>> = basis
        .iter()
        .map(|chi| {
            let v = iota_star(chi, mu).expect("same measure");
            DVector::from_iterator(dk, v.coords().iter().map(|z| z.re))
        })
        .collect();
    let sigma = DMatrix::from_columns(&sigma_cols);
    let svd = sigma.clone().svd(true, true);
    let mut alpha = Vec::with_capacity(dh);
    let mut residuals = Vec::with_capacity(dh);
    for (f, kf) in ks.iter().enumerate() {
        let a = svd.solve(kf, 1e-12).map_err(|e| Error::Shape(e.to_string()))?;
        let res = (&sigma * &a - kf).norm();
        if res > FACTOR_TOL {
            return Ok(FactorizationOutcome::NotFactorable { f, residual: res });
        }
        residuals.push(res);
        alpha.push(a.iter().copied().collect::<Vec<f64>>());
    }
    let chi: Vec<Vec<f64>> = basis.iter().map(|b| b.values().iter().map(|z| z.re).collect()).collect();
    let s = DMatrix::from_fn(dh, k, |f, tt| {
        let m: f64 = alpha[f].iter().zip(&chi).map(|(a, x)| a * x[tt]).sum();
        mu.weights[tt] * m
    });
    let iota_m = DMatrix::from_fn(k, dk, |tt, g| mu.atoms[tt].vector_coords()[g]);
    let comp = &s * &iota_m;
    let mut composition_defect: f64 = 0.0;
    for f in 0..dh {
        for g in 0..dk {
            composition_defect = composition_defect.max((C64::new(comp[(f, g)], 0.0) - t.matrix[(f, g)]).norm());
        }
    }
    let su = &s * DVector::from_element(k, 1.0);
    let e = t.to.unit_index();
    let unital_defect = (0..dh).map(|f| (su[f] - if f == e { 1.0 } else { 0.0 }).powi(2)).sum::<f64>().sqrt();

    let nonunit: Vec<usize> = t.from.non_unit().collect();
    let whitened = DMatrix::from_fn(k, nonunit.len(), |tt, j| mu.weights[tt].sqrt() * mu.atoms[tt].s0_coords()[nonunit[j]]);
    let exactness_defect = if nonunit.is_empty() {
        0.0
    } else {
        whitened.singular_values().iter().filter(|&&x| x > 1e-10).map(|x| (x - 1.0).abs()).fold(0.0, f64::max)
    };

    let mut r = linalg::rng(seed);
    let mut positivity_margin = f64::INFINITY;
    let img_e = HVector::unit(&t.to);
    for j in 0..samples.max(nonunit.len()) {
        let mut z0 = vec![0.0; dk];
        if j < nonunit.len() {
            z0[nonunit[j]] = 1.0;
        } else {
            for &g in &nonunit {
                z0[g] = linalg::gauss(&mut r);
            }
        }
        let z = HVector::real(&t.from, &z0)?;
        let n = iota(&z, mu)?.norm();
        if n <= 1e-12 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let img = &img_e + &(&t.apply(&z) * (sign / n));
            positivity_margin = positivity_margin.min(hilbert::cone_margin(&img));
        }
    }
    if !positivity_margin.is_finite() {
        positivity_margin = hilbert::cone_margin(&img_e);
    }
    Ok(FactorizationOutcome::Factored(L2Factorization {
        s,
        alpha,
        residuals,
        composition_defect,
        unital_defect,
        rank: ce.rank(),
        exactness_defect,
        positivity_margin,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn unit_and_pure_values() {
        let sp = UnitalSpace::standard(3);
        let st = vec![StatePoint::pure(&sp, 1, 1.0), StatePoint::pure(&sp, 1, -1.0), StatePoint::unit(&sp)];
        assert_eq!(canonical_rep(&HVector::unit(&sp), &st), vec![c(1.0); 3]);
        assert_eq!(canonical_rep(&HVector::basis(&sp, 1), &st), vec![c(1.0), c(-1.0), c(0.0)]);
    }

    #[test]
    fn sampled_sup_reaches_order_norm() {
        let sp = UnitalSpace::standard(4);
        let z = HVector::real(&sp, &[0.3, -1.0, 0.5, 2.0]).unwrap();
        let exact = z.norm0() + 0.3;
        assert!(close(sampled_sup(&z, 200, 1), exact, 1e-12));
        assert!(close(hilbert::order_norm(&z), exact, 1e-9));
    }

    #[test]
    fn examples_are_unital() {
        let sp = UnitalSpace::standard(3);
        assert!(UnitalMeasure::dirac_unit(&sp).integral().distance(&HVector::unit(&sp)) == 0.0);
        let s = StatePoint::from_real(&sp, &[0.0, 0.6, 0.8], 0.0).unwrap();
        let m = mu_s(&s).unwrap();
        assert!(m.integral().distance(&HVector::unit(&sp)) < 1e-15);
        let h = 3f64.sqrt() / 2.0;
        let tri = vec![
            StatePoint::from_real(&sp, &[0.0, 1.0, 0.0], 0.0).unwrap(),
            StatePoint::from_real(&sp, &[0.0, -0.5, h], 1e-12).unwrap(),
            StatePoint::from_real(&sp, &[0.0, -0.5, -h], 1e-12).unwrap(),
        ];
        assert!(make_unital_measure(&sp, tri, vec![1.0 / 3.0; 3], 1e-12).is_ok());
        let off = vec![StatePoint::pure(&sp, 1, 1.0)];
        assert!(matches!(make_unital_measure(&sp, off, vec![1.0], 1e-9), Err(Error::NotUnital(_))));
    }

    #[test]
    fn mu_s_reduces_to_l22() {
        let sp = UnitalSpace::standard(4);
        let s = StatePoint::from_real(&sp, &[0.0, 0.0, 0.6, 0.8], 0.0).unwrap();
        let m = mu_s(&s).unwrap();
        let z = HVector::real(&sp, &[1.5, 0.2, -0.4, 0.3]).unwrap();
        let v = iota(&z, &m).unwrap();
        assert!(close(v.values()[0].re, 1.5 + (-0.4 * 0.6 + 0.3 * 0.8), 1e-15));
        assert!(close(v.values()[1].re, 1.5 - (-0.4 * 0.6 + 0.3 * 0.8), 1e-15));
        let ce = conditional_expectation(&m);
        assert_eq!(ce.rank(), 2);
        let chain = mass_bounds(&m, 0).unwrap();
        assert!(close(chain.mass, 0.5, 0.0) && close(chain.mass_bound, 0.5, 1e-15));
        assert!(chain.holds(1e-12));
    }

    #[test]
    fn adjoint_identity() {
        let sp = UnitalSpace::standard(4);
        let mut r = linalg::rng(5);
        let m = random_unital_measure(&sp, 5, &mut r);
        let z = HVector::new(&sp, linalg::random_cvec(&mut r, 4).iter().copied().collect()).unwrap();
        let y: Vec<C64> = linalg::random_cvec(&mut r, m.len()).iter().copied().collect();
        let eta = L2Element::new(m.l2_measure(), y).unwrap();
        let lhs = iota(&z, &m).unwrap().inner(&eta).unwrap();
        let rhs = z.inner(&iota_star(&eta, &m).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!(iota_star(&L2Element::unit(m.l2_measure()), &m).unwrap().distance(&HVector::unit(&sp)) < 1e-12);
        assert!(iota_hs_norm(&m) <= 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn projector_properties() {
        let sp = UnitalSpace::standard(3);
        let mut r = linalg::rng(6);
        let m = random_unital_measure(&sp, 5, &mut r);
        let ce = conditional_expectation(&m);
        assert!(ce.idempotence_defect() < 1e-12 && ce.self_adjoint_defect() < 1e-12);
        assert_eq!(ce.rank(), 3);
        let u = L2Element::unit(m.l2_measure());
        assert!(ce.apply(&u).unwrap().add(&u.scale(c(-1.0))).unwrap().norm() < 1e-12);
        let d = UnitalMeasure::dirac_unit(&sp);
        assert_eq!(conditional_expectation(&d).rank(), 1);
    }

    #[test]
    fn concentration_examples() {
        let sp = UnitalSpace::standard(3);
        let c1 = concentration_feasible(&sp, &[(StatePoint::unit(&sp), 1.0)], 1e-12).unwrap();
        assert!(c1.feasible && c1.measure.unwrap().len() == 1);
        let pair = [(StatePoint::pure(&sp, 1, 1.0), 0.5), (StatePoint::pure(&sp, 1, -1.0), 0.5)];
        assert!(concentration_feasible(&sp, &pair, 1e-12).unwrap().feasible);
        let c3 = concentration_feasible(&sp, &[(StatePoint::pure(&sp, 2, 1.0), 0.6)], 1e-12).unwrap();
        assert!(!c3.feasible && close(c3.lhs, 0.6, 1e-15) && close(c3.rhs, 0.4, 1e-15));
        let c4 = concentration_feasible(&sp, &[(StatePoint::pure(&sp, 2, 1.0), 0.3)], 1e-12).unwrap();
        let m = c4.measure.unwrap();
        assert!(m.mass_at(&StatePoint::pure(&sp, 2, 1.0)) >= 0.3);
    }

    #[test]
    fn charge_decomposition() {
        let sp = UnitalSpace::standard(3);
        let mut r = linalg::rng(7);
        let charge: Vec<(StatePoint, f64)> =
            (0..6).map(|_| (hilbert::random_state(&sp, &mut r), linalg::gauss(&mut r))).collect();
        let d = decompose_charge(&sp, &charge);
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn factorize_identity() {
        let sp = UnitalSpace::standard(3);
        let states: Vec<StatePoint> =
            sp.non_unit().flat_map(|f| [StatePoint::pure(&sp, f, 1.0), StatePoint::pure(&sp, f, -1.0)]).collect();
        let n = states.len();
        let m = make_unital_measure(&sp, states, vec![1.0 / n as f64; n], 1e-12).unwrap();
        match l2_factorize(&MapK::identity(&sp), &m, 100, 0).unwrap() {
            FactorizationOutcome::Factored(f) => {
                assert!(f.composition_defect < 1e-12 && f.unital_defect < 1e-12);
                assert!(f.residuals.iter().all(|&x| x < 1e-12));
                assert!(!f.is_exact());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn factorize_failure_and_l22() {
        let sp = UnitalSpace::standard(3);
        let s = StatePoint::pure(&sp, 1, 1.0);
        let m = mu_s(&s).unwrap();
        match l2_factorize(&MapK::identity(&sp), &m, 10, 0).unwrap() {
            FactorizationOutcome::NotFactorable { f, residual } => {
                assert_eq!(f, 2);
                assert!(close(residual, 1.0, 1e-12));
            }
            other => panic!("{other:?}"),
        }
        let k = UnitalSpace::standard(2);
        let m2 = mu_s(&StatePoint::pure(&k, 1, 1.0)).unwrap();
        match l2_factorize(&MapK::identity(&k), &m2, 50, 0).unwrap() {
            FactorizationOutcome::Factored(f) => {
                assert!(f.is_exact() && f.rank == 2 && f.composition_defect < 1e-12);
                assert!(f.positivity_margin >= -1e-12);
            }
            other => panic!("{other:?}"),
        }
    }
}
