//! Finite-dimensional unital Hilbert `*`-spaces and the cone `𝔠`.
//!
//! A [`UnitalSpace`] fixes a hermitian orthonormal basis `F` with a distinguished
//! unit `e`. Vectors are stored by their coordinates against `F`, so the
//! involution is coordinate conjugation and a vector is hermitian exactly when
//! its coordinates are real.
//!
//! The cone is `𝔠 = {ζ hermitian : ‖ζ₀‖ ≤ (ζ, e)}` where `ζ₀` is the part of `ζ`
//! orthogonal to `e`. Its states are the points `s₀ + e` with `s₀` in the unit
//! ball of the hermitian part of `e⊥`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, c, C64};

/// Default tolerance for comparisons that cannot be exact.
pub const EPS: f64 = 1e-9;

/// A finite-dimensional Hilbert `*`-space with a hermitian basis and a unit index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitalSpace {
    labels: Vec<String>,
    unit: usize,
}

impl UnitalSpace {
    pub fn new(labels: Vec<String>, unit: usize) -> Result<Arc<Self>> {
        if labels.is_empty() {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if unit >= labels.len() {
            return Err(Error::InvalidSpace(format!("unit index {unit} out of range")));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate label {l:?}")));
            }
        }
        Ok(Arc::new(UnitalSpace { labels, unit }))
    }

    /// `dim`-dimensional space with labels `e, f1, f2, …` and unit `e`.
    pub fn standard(dim: usize) -> Arc<Self> {
        assert!(dim >= 1, "dimension must be at least 1");
        let labels = (0..dim)
            .map(|i| if i == 0 { "e".to_string() } else { format!("f{i}") })
            .collect();
        Arc::new(UnitalSpace { labels, unit: 0 })
    }

    /// Same underlying Hilbert space and basis, different unit.
    pub fn with_unit(&self, unit: usize) -> Result<Arc<Self>> {
        UnitalSpace::new(self.labels.clone(), unit)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Basis indices other than the unit.
    pub fn non_unit(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&i| i != self.unit)
    }

    /// Same basis and unit, compared by value.
    pub fn same_as(&self, other: &UnitalSpace) -> bool {
        self == other
    }
}

pub(crate) fn check_space(a: &UnitalSpace, b: &UnitalSpace) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!(
            "dim {} unit {} vs dim {} unit {}",
            a.dim(),
            a.unit,
            b.dim(),
            b.unit
        )))
    }
}

/// A vector of `H` given by its coordinates `(ζ, f)` against the basis.
#[derive(Clone, PartialEq)]
pub struct HVector {
    space: Arc<UnitalSpace>,
    coords: Vec<C64>,
}

impl fmt::Debug for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HVector").field("coords", &self.coords).finish()
    }
}

impl HVector {
    pub fn new(space: &Arc<UnitalSpace>, coords: Vec<C64>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::Shape(format!("{} coordinates for dimension {}", coords.len(), space.dim())));
        }
        Ok(HVector { space: space.clone(), coords })
    }

    pub fn real(space: &Arc<UnitalSpace>, coords: &[f64]) -> Result<Self> {
        HVector::new(space, coords.iter().map(|&x| c(x)).collect())
    }

    pub fn zero(space: &Arc<UnitalSpace>) -> Self {
        HVector { space: space.clone(), coords: vec![C64::new(0.0, 0.0); space.dim()] }
    }

    pub fn basis(space: &Arc<UnitalSpace>, i: usize) -> Self {
        let mut v = HVector::zero(space);
        v.coords[i] = c(1.0);
        v
    }

    pub fn unit(space: &Arc<UnitalSpace>) -> Self {
        HVector::basis(space, space.unit)
    }

    pub fn space(&self) -> &Arc<UnitalSpace> {
        &self.space
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> C64 {
        self.coords[i]
    }

    /// Real parts of the coordinates (the hermitian part `Re ζ`).
    pub fn re(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.im).collect()
    }

    /// Inner product `(ζ, η) = Σ ζ_f η_f*`.
    pub fn inner(&self, other: &HVector) -> Result<C64> {
        check_space(&self.space, &other.space)?;
        Ok(self.coords.iter().zip(&other.coords).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The involution `ζ ↦ ζ*`.
    pub fn involute(&self) -> HVector {
        HVector { space: self.space.clone(), coords: self.coords.iter().map(|z| z.conj()).collect() }
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        self.coords.iter().all(|z| z.im.abs() <= eps)
    }

    /// `ζ = ζ₀ + λe` with `(ζ₀, e) = 0` and `λ = (ζ, e)`.
    pub fn decompose(&self) -> (HVector, C64) {
        let mut z0 = self.clone();
        let lambda = z0.coords[self.space.unit];
        z0.coords[self.space.unit] = C64::new(0.0, 0.0);
        (z0, lambda)
    }

    pub fn unit_coord(&self) -> C64 {
        self.coords[self.space.unit]
    }

    /// `‖ζ₀‖`, the norm of the part orthogonal to the unit.
    pub fn norm0(&self) -> f64 {
        self.coords
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.space.unit)
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, a: C64) -> HVector {
        HVector { space: self.space.clone(), coords: self.coords.iter().map(|z| z * a).collect() }
    }

    pub fn axpy(&mut self, a: C64, x: &HVector) {
        for (y, xv) in self.coords.iter_mut().zip(&x.coords) {
            *y += a * xv;
        }
    }

    /// The same coordinates read in another space of equal dimension.
    pub fn reinterpret(&self, space: &Arc<UnitalSpace>) -> Result<HVector> {
        HVector::new(space, self.coords.clone())
    }

    pub fn distance(&self, other: &HVector) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Add for &HVector {
    type Output = HVector;
    fn add(self, rhs: &HVector) -> HVector {
        assert!(self.space.same_as(&rhs.space), "space mismatch");
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect();
        HVector { space: self.space.clone(), coords }
    }
}

impl Sub for &HVector {
    type Output = HVector;
    fn sub(self, rhs: &HVector) -> HVector {
        assert!(self.space.same_as(&rhs.space), "space mismatch");
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect();
        HVector { space: self.space.clone(), coords }
    }
}

impl Neg for &HVector {
    type Output = HVector;
    fn neg(self) -> HVector {
        self.scale(c(-1.0))
    }
}

impl Mul<f64> for &HVector {
    type Output = HVector;
    fn mul(self, a: f64) -> HVector {
        self.scale(c(a))
    }
}

/// Membership in `𝔠`: hermitian within `eps` and `‖ζ₀‖ ≤ (ζ, e) + eps`.
pub fn in_cone(z: &HVector, eps: f64) -> bool {
    z.is_hermitian(eps) && cone_margin(z) >= -eps
}

/// `(ζ, e) − ‖ζ₀‖` computed on the hermitian part.
pub fn cone_margin(z: &HVector) -> f64 {
    let u = z.space.unit;
    let lam = z.coords[u].re;
    let n0 = z
        .coords
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != u)
        .map(|(_, w)| w.re * w.re)
        .sum::<f64>()
        .sqrt();
    lam - n0
}

/// The order norm `‖ζ‖_e = sup |(ζ, s)|` over states `s`.
///
/// For hermitian `ζ = ζ₀ + λe` this is `‖ζ₀‖ + |λ|`. In general, writing
/// `ζ₀ = a + ib` with real `a, b`, the state values fill the ellipse traced by
/// `(a·s₀, b·s₀)`, and the supremum equals the maximum over an angle `φ` of
/// `Re(e^{-iφ}λ) + ‖cos φ·a + sin φ·b‖`, found by a grid followed by
/// golden-section refinement.
pub fn order_norm(z: &HVector) -> f64 {
    let (z0, lam) = z.decompose();
    if z.is_hermitian(0.0) {
        return z0.norm() + lam.re.abs();
    }
    let a = z0.re();
    let b = z0.im();
    let g = |phi: f64| {
        let (s, co) = phi.sin_cos();
        let nrm = a.iter().zip(&b).map(|(x, y)| (co * x + s * y).powi(2)).sum::<f64>().sqrt();
        co * lam.re + s * lam.im + nrm
    };
    let steps = 720usize;
    let h = std::f64::consts::TAU / steps as f64;
    let mut vals: Vec<(f64, f64)> = (0..steps).map(|k| (k as f64 * h, g(k as f64 * h))).collect();
    vals.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut best = vals[0].1;
    for &(phi, _) in vals.iter().take(4) {
        best = best.max(golden_max(&g, phi - h, phi + h, 60));
    }
    best
}

pub(crate) fn golden_max(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        }
    }
    f1.max(f2)
}

/// A state `s = s₀ + e` of `𝔠`, stored through its real `s₀ ⊥ e` with `‖s₀‖ ≤ 1`.
#[derive(Clone, PartialEq)]
pub struct StatePoint {
    space: Arc<UnitalSpace>,
    s0: Vec<f64>,
}

impl fmt::Debug for StatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StatePoint").field("s0", &self.s0).finish()
    }
}

impl StatePoint {
    pub fn new(s0: &HVector, eps: f64) -> Result<Self> {
        if !s0.is_hermitian(eps) {
            return Err(Error::NotState("s0 is not hermitian".into()));
        }
        let ue = s0.unit_coord().norm();
        if ue > eps {
            return Err(Error::NotState(format!("(s0, e) = {ue:.3e}")));
        }
        let n = s0.norm();
        if n > 1.0 + eps {
            return Err(Error::NotState(format!("‖s0‖ = {n}")));
        }
        let mut re = s0.re();
        re[s0.space.unit] = 0.0;
        Ok(StatePoint { space: s0.space.clone(), s0: re })
    }

    pub fn from_real(space: &Arc<UnitalSpace>, s0: &[f64], eps: f64) -> Result<Self> {
        StatePoint::new(&HVector::real(space, s0)?, eps)
    }

    /// The unit functional itself, `s₀ = 0`.
    pub fn unit(space: &Arc<UnitalSpace>) -> Self {
        StatePoint { space: space.clone(), s0: vec![0.0; space.dim()] }
    }

    /// The pure state `±f + e` for a non-unit basis index.
    pub fn pure(space: &Arc<UnitalSpace>, index: usize, sign: f64) -> Self {
        assert_ne!(index, space.unit, "pure states use non-unit directions");
        let mut s0 = vec![0.0; space.dim()];
        s0[index] = sign.signum();
        StatePoint { space: space.clone(), s0 }
    }

    pub fn space(&self) -> &Arc<UnitalSpace> {
        &self.space
    }

    pub fn s0(&self) -> HVector {
        HVector::real(&self.space, &self.s0).expect("shape")
    }

    pub fn s0_coords(&self) -> &[f64] {
        &self.s0
    }

    /// The state as a vector `s₀ + e`.
    pub fn vector(&self) -> HVector {
        let mut v = self.s0.clone();
        v[self.space.unit] = 1.0;
        HVector::real(&self.space, &v).expect("shape")
    }

    /// Real coordinates of `s₀ + e`.
    pub fn vector_coords(&self) -> Vec<f64> {
        let mut v = self.s0.clone();
        v[self.space.unit] = 1.0;
        v
    }

    /// The value `⟨ζ, s⟩ = (ζ, s)`.
    pub fn eval(&self, z: &HVector) -> C64 {
        let u = self.space.unit;
        z.coords()
            .iter()
            .enumerate()
            .map(|(i, w)| if i == u { *w } else { w * self.s0[i] })
            .sum()
    }

    pub fn norm0(&self) -> f64 {
        self.s0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// States for sampling: `e`, every pure `±f + e`, then uniform points of the ball.
///
/// The pure directions are always present, so the result has at least
/// `1 + 2(dim − 1)` points even when `count` is smaller.
pub fn sample_states(space: &Arc<UnitalSpace>, count: usize, seed: u64) -> Vec<StatePoint> {
    let mut out = vec![StatePoint::unit(space)];
    for i in space.non_unit() {
        out.push(StatePoint::pure(space, i, 1.0));
        out.push(StatePoint::pure(space, i, -1.0));
    }
    let d0 = space.dim() - 1;
    if d0 == 0 {
        return out;
    }
    let mut r = linalg::rng(seed);
    while out.len() < count {
        out.push(random_state(space, &mut r));
    }
    out
}

/// Pure states `e ± f` followed by `e + x` with `x` uniform on the unit sphere of `H_h^e`.
pub fn boundary_states(space: &Arc<UnitalSpace>, count: usize, seed: u64) -> Vec<StatePoint> {
    let mut out = Vec::new();
    for i in space.non_unit() {
        out.push(StatePoint::pure(space, i, 1.0));
        out.push(StatePoint::pure(space, i, -1.0));
    }
    if out.is_empty() {
        return vec![StatePoint::unit(space)];
    }
    let mut r = linalg::rng(seed);
    while out.len() < count {
        let mut s0 = vec![0.0; space.dim()];
        for i in space.non_unit() {
            s0[i] = linalg::gauss(&mut r);
        }
        let n = s0.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        s0.iter_mut().for_each(|x| *x /= n);
        out.push(StatePoint { space: space.clone(), s0 });
    }
    out
}

/// A state drawn uniformly from `ball(H_h^e) + e`.
pub fn random_state(space: &Arc<UnitalSpace>, r: &mut linalg::Rng64) -> StatePoint {
    use rand::Rng;
    let d0 = space.dim() - 1;
    if d0 == 0 {
        return StatePoint::unit(space);
    }
    let mut s0 = vec![0.0; space.dim()];
    let mut n2 = 0.0;
    for i in space.non_unit() {
        s0[i] = linalg::gauss(r);
        n2 += s0[i] * s0[i];
    }
    let radius = r.gen::<f64>().powf(1.0 / d0 as f64);
    let k = radius / n2.sqrt().max(1e-300);
    for x in &mut s0 {
        *x *= k;
    }
    StatePoint { space: space.clone(), s0 }
}

/// A random hermitian vector `ζ₀ + λe` of the cone boundary or interior.
pub fn random_cone_vector(space: &Arc<UnitalSpace>, r: &mut linalg::Rng64) -> HVector {
    use rand::Rng;
    let s = random_state(space, r);
    let scale = 0.1 + r.gen::<f64>() * 2.0;
    &s.vector() * scale
}
