//! Compact-space backends, measures on them, and `L²(X, μ)` with its unital cone.
//!
//! Two backends are supported: a finite set of atoms, and an interval discretized
//! by composite Gauss–Legendre quadrature. On the interval every panel uses the
//! same fixed order, and panel edges can be aligned to given breakpoints so that
//! step functions with those breakpoints integrate exactly (up to rounding).
//! Functions are stored by their values at atoms or quadrature nodes.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::hilbert::EPS;
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::matrix::{self, MembershipVerdict, Witness};

/// Gauss–Legendre nodes per panel on the interval backend.
pub const PANEL_ORDER: usize = 8;
/// Default number of quadrature nodes on the interval backend.
pub const DEFAULT_NODES: usize = 2048;

#[derive(Clone, Debug, PartialEq)]
pub enum CompactKind {
    Atoms { labels: Vec<String> },
    Interval { a: f64, b: f64, edges: Vec<f64> },
}

/// A compact space with a quadrature: points (atoms or nodes) and weights.
///
/// Atoms carry weight 1, so a measure on atoms is just its masses.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactSpace {
    kind: CompactKind,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl CompactSpace {
    pub fn atoms(n: usize) -> Arc<Self> {
        CompactSpace::labeled_atoms((0..n).map(|i| format!("t{i}")).collect()).expect("distinct labels")
    }

    pub fn labeled_atoms(labels: Vec<String>) -> Result<Arc<Self>> {
        if labels.is_empty() {
            return Err(Error::InvalidSpace("no atoms".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidSpace("atom labels must be distinct".into()));
        }
        let n = labels.len();
        Ok(Arc::new(CompactSpace {
            kind: CompactKind::Atoms { labels },
            points: (0..n).map(|i| i as f64).collect(),
            weights: vec![1.0; n],
        }))
    }

    /// `[a, b]` with about `nodes` quadrature nodes on equal panels.
    pub fn interval(a: f64, b: f64, nodes: usize) -> Result<Arc<Self>> {
        CompactSpace::interval_aligned(a, b, nodes, &[])
    }

    /// `[a, b]` whose panel edges include every breakpoint inside `(a, b)`.
    ///
    /// Panels are distributed among the pieces in proportion to their length,
    /// at least one per piece.
    pub fn interval_aligned(a: f64, b: f64, nodes: usize, breakpoints: &[f64]) -> Result<Arc<Self>> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidSpace(format!("bad interval [{a}, {b}]")));
        }
        let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut pieces = vec![a];
        pieces.extend(cuts);
        pieces.push(b);
        let total_panels = (nodes / PANEL_ORDER).max(pieces.len() - 1);
        let mut edges = vec![a];
        for w in pieces.windows(2) {
            let k = (((w[1] - w[0]) / (b - a)) * total_panels as f64).round().max(1.0) as usize;
            for j in 1..=k {
                edges.push(if j == k { w[1] } else { w[0] + (w[1] - w[0]) * j as f64 / k as f64 });
            }
        }
        CompactSpace::interval_with_edges(edges)
    }

    /// `[edges[0], edges[last]]` with one Gauss–Legendre panel between consecutive edges.
    pub fn interval_with_edges(edges: Vec<f64>) -> Result<Arc<Self>> {
        if edges.len() < 2 || edges.iter().any(|x| !x.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpace("panel edges must be finite and increasing".into()));
        }
        let (a, b) = (edges[0], edges[edges.len() - 1]);
        let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).unwrap());
        let ref_nodes: Vec<f64> = rule.nodes().copied().collect();
        let ref_weights: Vec<f64> = rule.weights().copied().collect();
        let mut points = Vec::with_capacity((edges.len() - 1) * PANEL_ORDER);
        let mut weights = Vec::with_capacity(points.capacity());
        for w in edges.windows(2) {
            let (mid, half) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0);
            for (x, q) in ref_nodes.iter().zip(&ref_weights) {
                points.push(mid + half * x);
                weights.push(half * q);
            }
        }
        Ok(Arc::new(CompactSpace { kind: CompactKind::Interval { a, b, edges }, points, weights }))
    }

    pub fn kind(&self) -> &CompactKind {
        &self.kind
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.kind, CompactKind::Atoms { .. })
    }

    /// Number of atoms or quadrature nodes.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Atom indices (as `f64`) or node abscissae.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Quadrature weights; 1 on atoms.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        match &self.kind {
            CompactKind::Atoms { labels } => Some(labels),
            _ => None,
        }
    }

    /// Sample `f` at every point.
    pub fn sample<T>(&self, f: impl Fn(f64) -> T) -> Vec<T> {
        self.points.iter().map(|&t| f(t)).collect()
    }
}

/// A real charge on `X`: atom masses, or a density against the quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    space: Arc<CompactSpace>,
    density: Vec<f64>,
}

impl Measure {
    pub fn atomic(space: &Arc<CompactSpace>, weights: Vec<f64>) -> Result<Self> {
        if !space.is_atomic() {
            return Err(Error::SpaceMismatch("atomic weights need an atomic space".into()));
        }
        Measure::density(space, weights)
    }

    /// Density values at the points; on atoms this is the same as masses.
    pub fn density(space: &Arc<CompactSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Shape(format!("{} values for {} points", values.len(), space.len())));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("non-finite measure values".into()));
        }
        Ok(Measure { space: space.clone(), density: values })
    }

    /// Uniform probability: equal atom masses, or `dt/(b − a)`.
    pub fn uniform(space: &Arc<CompactSpace>) -> Self {
        let v = match space.kind {
            CompactKind::Atoms { .. } => 1.0 / space.len() as f64,
            CompactKind::Interval { a, b, .. } => 1.0 / (b - a),
        };
        Measure { space: space.clone(), density: vec![v; space.len()] }
    }

    pub fn dirac(space: &Arc<CompactSpace>, atom: usize) -> Result<Self> {
        let mut w = vec![0.0; space.len()];
        *w.get_mut(atom).ok_or(Error::NotAnAtom(atom))? = 1.0;
        Measure::atomic(space, w)
    }

    pub fn space(&self) -> &Arc<CompactSpace> {
        &self.space
    }

    pub fn density_values(&self) -> &[f64] {
        &self.density
    }

    /// Mass carried by each point, `density × quadrature weight`.
    pub fn masses(&self) -> Vec<f64> {
        self.density.iter().zip(self.space.weights()).map(|(d, w)| d * w).collect()
    }

    pub fn total(&self) -> f64 {
        self.masses().iter().sum()
    }

    pub fn is_positive(&self, eps: f64) -> bool {
        self.density.iter().all(|&d| d >= -eps)
    }

    pub fn is_probability(&self, eps: f64) -> bool {
        self.is_positive(eps) && (self.total() - 1.0).abs() <= eps
    }

    /// Jordan decomposition by pointwise sign.
    pub fn jordan(&self) -> (Measure, Measure) {
        let p = self.density.iter().map(|d| d.max(0.0)).collect();
        let n = self.density.iter().map(|d| (-d).max(0.0)).collect();
        (Measure { space: self.space.clone(), density: p }, Measure { space: self.space.clone(), density: n })
    }

    /// `k·μ` for a function `k` given by its values.
    pub fn reweight(&self, k: &[f64]) -> Result<Measure> {
        if k.len() != self.density.len() {
            return Err(Error::Shape("weight function length".into()));
        }
        Measure::density(&self.space, self.density.iter().zip(k).map(|(d, k)| d * k).collect())
    }

    /// `μ(A)` for a set of point indices.
    pub fn mass_of(&self, set: &[usize]) -> f64 {
        let m = self.masses();
        set.iter().map(|&i| m[i]).sum()
    }

    fn require_probability(&self) -> Result<()> {
        if self.is_probability(1e-9) {
            Ok(())
        } else {
            Err(Error::NotProbability(format!("total {:.12}", self.total())))
        }
    }
}

/// `∫ v dμ`: an exact finite sum on atoms; on the interval, composite
/// Gauss–Legendre of order 8 per panel (exact for piecewise polynomials of degree
/// at most 15 whose breaks lie on panel edges).
pub fn integrate(values: &[C64], mu: &Measure) -> Result<C64> {
    if values.len() != mu.space.len() {
        return Err(Error::Shape("function and measure live on different grids".into()));
    }
    Ok(values.iter().zip(mu.masses()).map(|(v, m)| v * m).sum())
}

pub fn integrate_real(values: &[f64], mu: &Measure) -> Result<f64> {
    if values.len() != mu.space.len() {
        return Err(Error::Shape("function and measure live on different grids".into()));
    }
    Ok(values.iter().zip(mu.masses()).map(|(v, m)| v * m).sum())
}

/// An element of `L²(X, μ)` given by its values.
#[derive(Clone, Debug, PartialEq)]
pub struct L2Element {
    mu: Arc<Measure>,
    values: Vec<C64>,
}

impl L2Element {
    pub fn new(mu: &Arc<Measure>, values: Vec<C64>) -> Result<Self> {
        if values.len() != mu.space.len() {
            return Err(Error::Shape("value count differs from the grid".into()));
        }
        if !mu.is_positive(0.0) {
            return Err(Error::NotProbability("L² needs a positive measure".into()));
        }
        Ok(L2Element { mu: mu.clone(), values })
    }

    pub fn real(mu: &Arc<Measure>, values: &[f64]) -> Result<Self> {
        L2Element::new(mu, values.iter().map(|&x| c(x)).collect())
    }

    pub fn from_fn(mu: &Arc<Measure>, f: impl Fn(f64) -> f64) -> Self {
        let v = mu.space.sample(|t| c(f(t)));
        L2Element { mu: mu.clone(), values: v }
    }

    /// `u`, the constant function 1.
    pub fn unit(mu: &Arc<Measure>) -> Self {
        L2Element { mu: mu.clone(), values: vec![c(1.0); mu.space.len()] }
    }

    /// `χ_A` for a set of point indices.
    pub fn indicator(mu: &Arc<Measure>, set: &[usize]) -> Self {
        let mut v = vec![c(0.0); mu.space.len()];
        for &i in set {
            v[i] = c(1.0);
        }
        L2Element { mu: mu.clone(), values: v }
    }

    pub fn measure(&self) -> &Arc<Measure> {
        &self.mu
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn inner(&self, other: &L2Element) -> Result<C64> {
        if self.mu.space != other.mu.space || self.mu.density != other.mu.density {
            return Err(Error::SpaceMismatch("different measures".into()));
        }
        let v: Vec<C64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).collect();
        integrate(&v, &self.mu)
    }

    pub fn norm(&self) -> f64 {
        let m = self.mu.masses();
        self.values.iter().zip(m).map(|(v, m)| v.norm_sqr() * m).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= eps)
    }

    /// `η = η₀ + r u` with `r = ∫η dμ`; requires a probability measure.
    pub fn decompose(&self) -> Result<(L2Element, C64)> {
        self.mu.require_probability()?;
        let r = integrate(&self.values, &self.mu)?;
        let v = self.values.iter().map(|x| x - r).collect();
        Ok((L2Element { mu: self.mu.clone(), values: v }, r))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    pub fn scale(&self, a: C64) -> Self {
        L2Element { mu: self.mu.clone(), values: self.values.iter().map(|v| v * a).collect() }
    }

    pub fn add(&self, other: &L2Element) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::Shape("grids differ".into()));
        }
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(L2Element { mu: self.mu.clone(), values: v })
    }
}

/// `r − ‖η₀‖₂` with `r = ∫η dμ`, computed from the real part.
pub fn l2_cone_margin(eta: &L2Element) -> Result<f64> {
    let (eta0, r) = eta.decompose()?;
    Ok(r.re - eta0.norm())
}

/// Membership in `L²(X, μ)₊`: hermitian, `r ≥ −ε` and `‖η₀‖₂ ≤ r + ε`.
pub fn in_l2_cone(eta: &L2Element) -> Result<bool> {
    in_l2_cone_tol(eta, EPS)
}

pub fn in_l2_cone_tol(eta: &L2Element, eps: f64) -> Result<bool> {
    let (eta0, r) = eta.decompose()?;
    Ok(eta.is_hermitian(eps) && r.re >= -eps && eta0.norm() <= r.re + eps)
}

/// Cone margin relative to a general unit vector `w` (`‖w‖₂ = 1`, real):
/// `(η, w) − ‖η − (η, w)w‖₂`. Works for any positive measure.
pub fn cone_margin_with_unit(eta: &L2Element, w: &L2Element) -> Result<f64> {
    let r = eta.inner(w)?;
    let rest = eta.add(&w.scale(-r))?;
    Ok(r.re - rest.norm())
}

/// `U(η) = η/√k` from `L²(X, μ)` into `L²(X, kμ)`; it is unitary and sends `u` to `u/√k`.
pub fn equivalence_unitary(eta: &L2Element, k: &[f64]) -> Result<L2Element> {
    if k.iter().any(|&x| x <= 0.0) {
        return Err(Error::NotPositive("density must be strictly positive".into()));
    }
    let mu2 = Arc::new(eta.mu.reweight(k)?);
    let v = eta.values.iter().zip(k).map(|(v, k)| v / k.sqrt()).collect();
    L2Element::new(&mu2, v)
}

/// The step function of the non-positive cone element on `[−1, 1]` with `dt/2`:
/// `1` off `[−1/n, 1/n]`, `1 − √n` on `[−1/n, 0)`, `1 + √n` on `[0, 1/n)`.
pub fn signed_step_example(n: usize, nodes: usize) -> Result<L2Element> {
    let h = 1.0 / n as f64;
    let space = CompactSpace::interval_aligned(-1.0, 1.0, nodes, &[-h, 0.0, h])?;
    let mu = Arc::new(Measure::uniform(&space));
    let s = (n as f64).sqrt();
    Ok(L2Element::from_fn(&mu, |t| {
        if (-h..0.0).contains(&t) {
            1.0 - s
        } else if (0.0..h).contains(&t) {
            1.0 + s
        } else {
            1.0
        }
    }))
}

/// A level-`n` matrix over `L²(X, μ)`, stored as its value `η(t) ∈ Mₙ` at every point.
#[derive(Clone, Debug, PartialEq)]
pub struct L2Matrix {
    mu: Arc<Measure>,
    n: usize,
    values: Vec<CMat>,
}

impl L2Matrix {
    pub fn new(mu: &Arc<Measure>, values: Vec<CMat>) -> Result<Self> {
        if values.len() != mu.space.len() || values.is_empty() {
            return Err(Error::Shape("one matrix per point is required".into()));
        }
        let n = values[0].nrows();
        if values.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::Shape("matrices must be square of equal size".into()));
        }
        Ok(L2Matrix { mu: mu.clone(), n, values })
    }

    pub fn from_entries(entries: &[Vec<L2Element>]) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("entries must form a square array".into()));
        }
        let mu = entries[0][0].mu.clone();
        let points = mu.space.len();
        let values = (0..points).map(|p| CMat::from_fn(n, n, |i, j| entries[i][j].values[p])).collect();
        L2Matrix::new(&mu, values)
    }

    pub fn unit_power(mu: &Arc<Measure>, n: usize) -> Self {
        L2Matrix { mu: mu.clone(), n, values: vec![CMat::identity(n, n); mu.space.len()] }
    }

    pub fn level1(eta: &L2Element) -> Self {
        let values = eta.values.iter().map(|&v| CMat::from_element(1, 1, v)).collect();
        L2Matrix { mu: eta.mu.clone(), n: 1, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    /// `a = ⟨⟨η, ū⟩⟩ = ∫ η dμ`.
    pub fn unit_coefficient(&self) -> CMat {
        let mut a = CMat::zeros(self.n, self.n);
        for (m, w) in self.values.iter().zip(self.mu.masses()) {
            a += m * c(w);
        }
        a
    }
}

/// Membership in `min L²(X, μ)₊`: `a ⪰ 0` and `∫(η₀(t)β, β)² dμ ≤ (aβ, β)²` for all `β`.
///
/// `a ⪰ 0` is checked exactly. On atomic measures the necessary condition
/// `−a ⪯ μ(s)^{1/2} η₀(s) ⪯ a` is checked first. The `β`-inequality is then
/// searched with the same engine as [`matrix::in_min`], treating the weighted
/// point values `μ(t)^{1/2} η₀(t)` as coefficients against an orthonormal
/// family orthogonal to `u`.
pub fn in_min_l2(eta: &L2Matrix, budget: usize, seed: u64) -> Result<MembershipVerdict> {
    let eps = EPS;
    eta.mu.require_probability()?;
    let dev = eta.values.iter().map(|m| linalg::max_abs_diff(m, &m.adjoint())).fold(0.0, f64::max);
    if dev > eps {
        return Err(Error::NotHermitian(dev));
    }
    let n = eta.n;
    let a = linalg::hermitian_part(&eta.unit_coefficient());
    let masses = eta.mu.masses();
    let zf: Vec<CMat> = eta
        .values
        .iter()
        .zip(&masses)
        .filter(|(_, &m)| m > 0.0)
        .map(|(v, &m)| (linalg::hermitian_part(v) - &a) * c(m.sqrt()))
        .collect();
    let margin_at = |beta: &CVec| {
        let q = |m: &CMat| (beta.adjoint() * m * beta)[(0, 0)].re;
        q(&a) - zf.iter().map(|m| q(m).powi(2)).sum::<f64>().sqrt()
    };
    let (la, va) = linalg::min_eig(&a);
    if la < -eps {
        let m = margin_at(&va);
        return Ok(MembershipVerdict::refuted(Witness::Direction(va), m));
    }
    if eta.mu.space.is_atomic() {
        for z in &zf {
            for sign in [1.0, -1.0] {
                let (l, v) = linalg::min_eig(&(&a - z * c(sign)));
                if l < -eps {
                    let m = margin_at(&v);
                    if m < -eps {
                        return Ok(MembershipVerdict::refuted(Witness::Direction(v), m));
                    }
                }
            }
        }
    }
    let basis = |i: usize| CVec::from_fn(n, |k, _| if k == i { c(1.0) } else { c(0.0) });
    let diagonal = eta.values.iter().all(|m| (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() <= 1e-15)));
    if n == 1 || diagonal {
        let (m, i) = (0..n).map(|i| (margin_at(&basis(i)), i)).min_by(|x, y| x.0.total_cmp(&y.0)).unwrap();
        return Ok(if m < -eps {
            MembershipVerdict::refuted(Witness::Direction(basis(i)), m)
        } else {
            MembershipVerdict::member(m)
        });
    }
    let (best, beta, _) = matrix::min_margin_search(&a, &zf, budget, seed);
    if best < -eps {
        return Ok(MembershipVerdict::refuted(Witness::Direction(beta), best));
    }
    let mut s = a.clone();
    for z in &zf {
        s -= linalg::habs(z);
    }
    if linalg::lambda_min(&s) >= -eps {
        return Ok(MembershipVerdict::member(best));
    }
    Ok(MembershipVerdict::undecided(best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_lebesgue(nodes: usize) -> Arc<Measure> {
        Arc::new(Measure::uniform(&CompactSpace::interval(-1.0, 1.0, nodes).unwrap()))
    }

    #[test]
    fn quadrature_weights_sum_to_length() {
        let s = CompactSpace::interval_aligned(-1.0, 1.0, 2048, &[-0.25, 0.0, 0.25]).unwrap();
        let total: f64 = s.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
        assert!(s.weights().iter().all(|&w| w > 0.0));
        if let CompactKind::Interval { edges, .. } = s.kind() {
            for b in [-0.25, 0.0, 0.25] {
                assert!(edges.contains(&b));
            }
        }
    }

    #[test]
    fn integrates_constants_and_odd_functions() {
        let mu = half_lebesgue(2048);
        let one = L2Element::unit(&mu);
        assert!((integrate(one.values(), &mu).unwrap() - c(1.0)).norm() < 1e-13);
        let s = L2Element::from_fn(&mu, |t| (std::f64::consts::PI * t).sin());
        assert!(integrate(s.values(), &mu).unwrap().norm() < 1e-10);
    }

    #[test]
    fn unit_is_in_cone() {
        let mu = half_lebesgue(256);
        assert!(in_l2_cone(&L2Element::unit(&mu)).unwrap());
    }

    #[test]
    fn step_example() {
        let eta = signed_step_example(4, 2048).unwrap();
        let (eta0, r) = eta.decompose().unwrap();
        assert!((r - c(1.0)).norm() < 1e-12);
        assert!((eta0.norm() - 1.0).abs() < 1e-12);
        assert!(in_l2_cone(&eta).unwrap());
        assert!((eta.min_value() - (1.0 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn indicator_threshold() {
        let sp = CompactSpace::atoms(2);
        for (p, inside) in [(0.5 + 1e-9, true), (0.5 - 1e-9, false), (0.3, false), (0.7, true)] {
            let mu = Arc::new(Measure::atomic(&sp, vec![p, 1.0 - p]).unwrap());
            let chi = L2Element::indicator(&mu, &[0]);
            let (chi0, _) = chi.decompose().unwrap();
            assert!((chi0.norm().powi(2) - (1.0 - p) * p).abs() < 1e-15);
            assert_eq!(in_l2_cone_tol(&chi, 1e-12).unwrap(), inside);
        }
    }

    #[test]
    fn positive_function_need_not_be_in_cone() {
        let sp = CompactSpace::atoms(4);
        let mu = Arc::new(Measure::atomic(&sp, vec![0.1, 0.2, 0.3, 0.4]).unwrap());
        let v = L2Element::indicator(&mu, &[1]);
        assert!(v.min_value() >= 0.0);
        assert!(!in_l2_cone(&v).unwrap());
    }

    #[test]
    fn non_probability_rejected() {
        let sp = CompactSpace::atoms(2);
        let mu = Arc::new(Measure::atomic(&sp, vec![0.3, 0.3]).unwrap());
        assert!(in_l2_cone(&L2Element::unit(&mu)).is_err());
    }

    #[test]
    fn min_l2_unit_power_and_level_one() {
        let sp = CompactSpace::atoms(3);
        let mu = Arc::new(Measure::atomic(&sp, vec![0.2, 0.3, 0.5]).unwrap());
        assert!(!in_min_l2(&L2Matrix::unit_power(&mu, 3), 100, 0).unwrap().is_refuted());
        let eta = L2Element::real(&mu, &[1.5, 0.4, 1.1]).unwrap();
        assert_eq!(
            in_min_l2(&L2Matrix::level1(&eta), 10, 0).unwrap().is_member(),
            in_l2_cone(&eta).unwrap()
        );
    }

    #[test]
    fn min_l2_refutes_indefinite_mean() {
        let sp = CompactSpace::atoms(2);
        let mu = Arc::new(Measure::atomic(&sp, vec![0.5, 0.5]).unwrap());
        let m = linalg::real_matrix(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let eta = L2Matrix::new(&mu, vec![m.clone(), m]).unwrap();
        assert!(in_min_l2(&eta, 100, 0).unwrap().is_refuted());
    }
}
