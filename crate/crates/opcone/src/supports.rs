//! Supports and the unital positive maps they generate.
//!
//! A support on `X` is a family of real functions `k_f` (one per basis vector of
//! `H`, with `k_e ≡ 1`) such that `Tv = Σ_f (v, k_f) f` is unital and positive.
//! A map `C(X) → H` is stored by its columns `T(δ̂_t)`, the images of the point
//! indicators; on atoms these determine the map, on a grid they are its
//! quadrature discretization.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::function::{CompactSpace, Measure};
use crate::hilbert::{self, HVector, UnitalSpace};
use crate::linalg::{self, c, CMat, Rng64};
use crate::matrix::{CertTerm, HMatrix, MaxCertificate};

const TOL: f64 = 1e-9;

/// A family `k_f` on `X`, indexed like the basis of `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportOnX {
    h: Arc<UnitalSpace>,
    mu: Arc<Measure>,
    k: Vec<Vec<f64>>,
}

impl SupportOnX {
    /// Checks `k_e ≡ 1`, `|k_f| ≤ 1`, `∫k_f dμ = 0` and that `μ` is a probability.
    ///
    /// The support inequality is not checked here; see [`support_inequality_margin`].
    pub fn new(h: &Arc<UnitalSpace>, mu: &Arc<Measure>, k: Vec<Vec<f64>>) -> Result<Self> {
        if !mu.is_probability(TOL) {
            return Err(Error::NotProbability(format!("total {:.12}", mu.total())));
        }
        if k.len() != h.dim() || k.iter().any(|kf| kf.len() != mu.space().len()) {
            return Err(Error::Shape("one function per basis vector, one value per point".into()));
        }
        let u = h.unit_index();
        if k[u].iter().any(|&x| (x - 1.0).abs() > TOL) {
            return Err(Error::InvalidSupport("k_e must be the constant 1".into()));
        }
        let masses = mu.masses();
        for f in h.non_unit() {
            let label = &h.labels()[f];
            if let Some(x) = k[f].iter().find(|x| x.abs() > 1.0 + TOL) {
                return Err(Error::InvalidSupport(format!("|k_{label}| = {x} exceeds 1")));
            }
            let mean: f64 = k[f].iter().zip(&masses).map(|(a, m)| a * m).sum();
            if mean.abs() > TOL {
                return Err(Error::InvalidSupport(format!("k_{label} has mean {mean:.3e}")));
            }
        }
        Ok(SupportOnX { h: h.clone(), mu: mu.clone(), k })
    }

    /// The support with only `k_e = 1`.
    pub fn trivial(h: &Arc<UnitalSpace>, mu: &Arc<Measure>) -> Result<Self> {
        let n = mu.space().len();
        let mut k = vec![vec![0.0; n]; h.dim()];
        k[h.unit_index()] = vec![1.0; n];
        SupportOnX::new(h, mu, k)
    }

    pub fn h(&self) -> &Arc<UnitalSpace> {
        &self.h
    }

    pub fn measure(&self) -> &Arc<Measure> {
        &self.mu
    }

    pub fn functions(&self) -> &[Vec<f64>] {
        &self.k
    }

    pub fn function(&self, f: usize) -> &[f64] {
        &self.k[f]
    }

    /// `ζ_t = Σ_{f≠e} k_f(t) f`.
    pub fn zeta_at(&self, t: usize) -> HVector {
        let mut v = vec![0.0; self.h.dim()];
        for f in self.h.non_unit() {
            v[f] = self.k[f][t];
        }
        HVector::real(&self.h, &v).expect("shape")
    }

    /// `Σ_f ‖k_f‖₂²`, the squared Hilbert–Schmidt norm of `T_k: L²(X, μ) → H`.
    pub fn hs_norm_sq(&self) -> f64 {
        let m = self.mu.masses();
        self.k.iter().map(|kf| kf.iter().zip(&m).map(|(a, w)| a * a * w).sum::<f64>()).sum()
    }
}

/// Worst sampled value of `1 − (Σ_{f≠e}(v, k_f)²)^{1/2} / (v, 1)` over `v ≥ 0`.
///
/// The sample has the indicators of points of positive mass, random
/// non-negative vectors, random sparse vectors and, on an interval, tent
/// functions of random width.
pub fn support_inequality_margin(k: &SupportOnX, samples: usize, seed: u64) -> f64 {
    let m = k.mu.masses();
    let n = m.len();
    let eval = |v: &[f64]| {
        let mass: f64 = v.iter().zip(&m).map(|(a, w)| a * w).sum();
        if mass <= 1e-300 {
            return f64::INFINITY;
        }
        let s: f64 = k
            .h
            .non_unit()
            .map(|f| v.iter().zip(&k.k[f]).zip(&m).map(|((a, b), w)| a * b * w).sum::<f64>().powi(2))
            .sum();
        1.0 - s.sqrt() / mass
    };
    let mut worst = f64::INFINITY;
    let mut v = vec![0.0; n];
    for t in 0..n {
        if m[t] > 0.0 {
            v[t] = 1.0;
            worst = worst.min(eval(&v));
            v[t] = 0.0;
        }
    }
    let mut r = linalg::rng(seed);
    let pts = k.mu.space().points().to_vec();
    for i in 0..samples {
        let v: Vec<f64> = match i % 3 {
            0 => (0..n).map(|_| r.gen::<f64>()).collect(),
            1 => {
                let mut v = vec![0.0; n];
                for _ in 0..3 {
                    v[r.gen_range(0..n)] = r.gen::<f64>();
                }
                v
            }
            _ => {
                let (lo, hi) = (pts[0], pts[n - 1]);
                let centre = r.gen_range(lo..=hi);
                let width = (hi - lo).max(1.0) * 10f64.powf(r.gen_range(-3.0..0.0));
                pts.iter().map(|&t| (1.0 - (t - centre).abs() / width).max(0.0)).collect()
            }
        };
        worst = worst.min(eval(&v));
    }
    worst
}

/// Pointwise maximality `Σ_{f≠e} k_f(t)² ≤ 1` on points of positive mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaximalityReport {
    pub maximal: bool,
    /// Largest `Σ_{f≠e} k_f(t)²`.
    pub worst_sum: f64,
    /// `1 − worst_sum`.
    pub margin: f64,
    pub worst_point: usize,
}

pub fn is_maximal(k: &SupportOnX) -> MaximalityReport {
    let m = k.mu.masses();
    let (mut worst, mut at) = (0.0f64, 0);
    for (t, &w) in m.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let s: f64 = k.h.non_unit().map(|f| k.k[f][t].powi(2)).sum();
        if s > worst {
            worst = s;
            at = t;
        }
    }
    MaximalityReport { maximal: worst <= 1.0 + TOL, worst_sum: worst, margin: 1.0 - worst, worst_point: at }
}

/// A linear map `C(X) → H` stored by its columns `T(δ̂_t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapOnX {
    h: Arc<UnitalSpace>,
    x: Arc<CompactSpace>,
    columns: Vec<HVector>,
}

impl MapOnX {
    pub fn new(h: &Arc<UnitalSpace>, x: &Arc<CompactSpace>, columns: Vec<HVector>) -> Result<Self> {
        if columns.len() != x.len() {
            return Err(Error::Shape(format!("{} columns for {} points", columns.len(), x.len())));
        }
        for col in &columns {
            hilbert::check_space(h, col.space())?;
        }
        Ok(MapOnX { h: h.clone(), x: x.clone(), columns })
    }

    pub fn h(&self) -> &Arc<UnitalSpace> {
        &self.h
    }

    pub fn x(&self) -> &Arc<CompactSpace> {
        &self.x
    }

    pub fn columns(&self) -> &[HVector] {
        &self.columns
    }

    /// `Tv` for `v` given by its point values.
    pub fn apply(&self, v: &[f64]) -> HVector {
        let mut out = HVector::zero(&self.h);
        for (col, &a) in self.columns.iter().zip(v) {
            if a != 0.0 {
                out.axpy(c(a), col);
            }
        }
        out
    }

    /// `|T(1) − e|`.
    pub fn unital_defect(&self) -> f64 {
        self.apply(&vec![1.0; self.x.len()]).distance(&HVector::unit(&self.h))
    }

    /// Smallest cone margin over the columns; non-negative exactly when `T` is positive
    /// (on atoms; on a grid, positive on grid functions).
    pub fn positivity_margin(&self) -> f64 {
        self.columns.iter().map(hilbert::cone_margin).fold(f64::INFINITY, f64::min)
    }

    /// Largest column difference.
    pub fn distance(&self, other: &MapOnX) -> f64 {
        self.columns.iter().zip(&other.columns).map(|(a, b)| a.distance(b)).fold(0.0, f64::max)
    }

    /// `T^{(n)}(V) = Σ_t V(t) ⊗ T(δ̂_t)` for a matrix-valued function `V`.
    pub fn apply_matrix(&self, v: &[CMat]) -> HMatrix {
        let n = v[0].nrows();
        let mut acc = HMatrix::zeros(&self.h, n);
        for (vt, col) in v.iter().zip(&self.columns) {
            acc = acc.add(&HMatrix::tensor(vt, col)).expect("shape");
        }
        acc
    }

    /// `T^{(n)}(V)` for pointwise positive `V` together with the certificate
    /// `Σ_t V(t)^{1/2} T(δ̂_t)^{⊕n} V(t)^{1/2}`; valid when every column is in `𝔠`.
    pub fn apply_positive_matrix(&self, v: &[CMat]) -> (HMatrix, MaxCertificate) {
        let z = self.apply_matrix(v);
        let terms = v
            .iter()
            .zip(&self.columns)
            .map(|(vt, col)| CertTerm { a: linalg::psd_sqrt(vt), s: col.clone() })
            .collect();
        let mut cert = MaxCertificate { terms, residual_bound: 0.0 };
        cert.residual_bound = cert.reconstruct(&self.h, z.n()).distance(&z);
        (z, cert)
    }
}

/// `Tv = Σ_f (v, k_f) f`, columns `μ(t) Σ_f k_f(t) f`.
///
/// Rejects supports whose sampled support inequality fails.
pub fn build_map(k: &SupportOnX) -> Result<MapOnX> {
    let margin = support_inequality_margin(k, 64, 0);
    if margin < -TOL {
        return Err(Error::InvalidSupport(format!("support inequality fails by {:.3e}", -margin)));
    }
    Ok(build_map_unchecked(k))
}

pub(crate) fn build_map_unchecked(k: &SupportOnX) -> MapOnX {
    let m = k.mu.masses();
    let columns = (0..m.len())
        .map(|t| {
            let v: Vec<f64> = k.k.iter().map(|kf| kf[t] * m[t]).collect();
            HVector::real(&k.h, &v).expect("shape")
        })
        .collect();
    MapOnX { h: k.h.clone(), x: k.mu.space().clone(), columns }
}

/// Recover `μ(t) = (Tδ̂_t, e)` and `k_f(t) = (Tδ̂_t, f)/μ(t)`; `k_f = 0` on null points.
pub fn extract_support(t: &MapOnX) -> Result<SupportOnX> {
    let defect = t.unital_defect();
    if defect > TOL {
        return Err(Error::NotUnitalMap(defect));
    }
    let h = &t.h;
    let u = h.unit_index();
    let weights = t.x.weights();
    let mut density = Vec::with_capacity(t.columns.len());
    let mut k = vec![vec![0.0; t.columns.len()]; h.dim()];
    for (i, col) in t.columns.iter().enumerate() {
        let mass = col.coord(u).re;
        if mass < -TOL {
            return Err(Error::NegativeAtom { atom: i, mass });
        }
        let mass = mass.max(0.0);
        density.push(mass / weights[i]);
        k[u][i] = 1.0;
        if mass > 0.0 {
            let m = hilbert::cone_margin(col);
            if m < -TOL {
                return Err(Error::NotPositive(format!("column {i} leaves the cone by {:.3e}", -m)));
            }
            for f in h.non_unit() {
                k[f][i] = (col.coord(f).re / mass).clamp(-1.0, 1.0);
            }
        } else if col.norm() > TOL {
            return Err(Error::NotPositive(format!("column {i} has zero mass but norm {:.3e}", col.norm())));
        }
    }
    let mu = Arc::new(Measure::density(&t.x, density)?);
    SupportOnX::new(h, &mu, k)
}

/// A term `p ⊙ q` with `p ∈ 𝔠` and `q ≥ 0` given by point masses.
#[derive(Clone, Debug, PartialEq)]
pub struct SepTerm {
    pub p: HVector,
    pub q: Vec<(usize, f64)>,
}

/// `T = Σ_l p_l ⊙ q_l − e ⊙ q₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableDecomposition {
    pub h: Arc<UnitalSpace>,
    pub x: Arc<CompactSpace>,
    pub terms: Vec<SepTerm>,
    /// Point masses of the correction `q₀` (empty when zero).
    pub q0: Vec<(usize, f64)>,
}

impl SeparableDecomposition {
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn q0_total(&self) -> f64 {
        self.q0.iter().map(|(_, m)| m).sum()
    }

    /// The map the decomposition describes.
    pub fn reconstruct(&self) -> MapOnX {
        let mut cols = vec![HVector::zero(&self.h); self.x.len()];
        for term in &self.terms {
            for &(t, m) in &term.q {
                cols[t].axpy(c(m), &term.p);
            }
        }
        let e = HVector::unit(&self.h);
        for &(t, m) in &self.q0 {
            cols[t].axpy(c(-m), &e);
        }
        MapOnX { h: self.h.clone(), x: self.x.clone(), columns: cols }
    }

    /// All `p_l ∈ 𝔠` and all masses non-negative.
    pub fn is_valid(&self, eps: f64) -> bool {
        self.terms.iter().all(|t| hilbert::in_cone(&t.p, eps) && t.q.iter().all(|&(_, m)| m >= -eps))
            && self.q0.iter().all(|&(_, m)| m >= -eps)
    }
}

/// Per-point assembly: terms `(ζ_t + ‖ζ_t‖e) ⊙ μ(t)δ_t`, then `e ⊙ (μ + q₀ − q)`
/// with `q = Σ ‖ζ_t‖ μ(t) δ_t` and `q₀ = Σ μ(t)(‖ζ_t‖ − 1)₊ δ_t`.
///
/// The result describes `T + e ⊙ q₀`, written as `Σ p_l ⊙ q_l − e ⊙ q₀`.
pub fn nuclear_decomposition(k: &SupportOnX) -> SeparableDecomposition {
    let h = &k.h;
    let e = HVector::unit(h);
    let m = k.mu.masses();
    let mut terms = Vec::new();
    let mut rest = Vec::new();
    let mut q0 = Vec::new();
    for (t, &mt) in m.iter().enumerate() {
        if mt <= 0.0 {
            continue;
        }
        let z = k.zeta_at(t);
        let nz = z.norm();
        if nz > 0.0 {
            terms.push(SepTerm { p: &z + &(&e * nz), q: vec![(t, mt)] });
        }
        let excess = (nz - 1.0).max(0.0);
        if excess > 0.0 {
            q0.push((t, mt * excess));
        }
        let r = mt * (1.0 - nz).max(0.0);
        if r > 0.0 {
            rest.push((t, r));
        }
    }
    if !rest.is_empty() {
        terms.push(SepTerm { p: e, q: rest });
    }
    SeparableDecomposition { h: h.clone(), x: k.mu.space().clone(), terms, q0 }
}

/// Separable decomposition of `T_k` for a maximal support.
///
/// A non-maximal support yields [`Error::NotMaximal`] with the correction `q₀`
/// for which `T + e ⊙ q₀` is separable (see [`nuclear_decomposition`]).
pub fn separate(k: &SupportOnX) -> Result<SeparableDecomposition> {
    let rep = is_maximal(k);
    let d = nuclear_decomposition(k);
    if !rep.maximal {
        return Err(Error::NotMaximal { worst_sum: rep.worst_sum, q0_total: d.q0_total(), q0: d.q0 });
    }
    Ok(SeparableDecomposition { q0: Vec::new(), ..d })
}

/// Random unital positive map on `n` atoms: columns `c_t(e + x_t − b)` with
/// `‖x_t‖ ≤ 1/2` and `b = Σ c_t x_t`.
pub fn random_unital_positive_map(h: &Arc<UnitalSpace>, n: usize, r: &mut Rng64) -> MapOnX {
    let x = CompactSpace::atoms(n);
    let mut c_t: Vec<f64> = (0..n).map(|_| r.gen::<f64>() + 0.05).collect();
    let s: f64 = c_t.iter().sum();
    c_t.iter_mut().for_each(|w| *w /= s);
    let xs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut v: Vec<f64> = (0..h.dim()).map(|_| linalg::gauss(r)).collect();
            v[h.unit_index()] = 0.0;
            let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let rad = 0.5 * r.gen::<f64>();
            v.iter().map(|a| if nv > 0.0 { a * rad / nv } else { 0.0 }).collect()
        })
        .collect();
    let mut b = vec![0.0; h.dim()];
    for (w, x) in c_t.iter().zip(&xs) {
        for (bi, xi) in b.iter_mut().zip(x) {
            *bi += w * xi;
        }
    }
    let u = h.unit_index();
    let columns = c_t
        .iter()
        .zip(&xs)
        .map(|(w, x)| {
            let mut v: Vec<f64> = x.iter().zip(&b).map(|(a, bb)| w * (a - bb)).collect();
            v[u] = *w;
            HVector::real(h, &v).expect("shape")
        })
        .collect();
    MapOnX { h: h.clone(), x, columns }
}

/// The truncated sine family `k_n = n⁻¹ sin(nπt)`, `2 ≤ n ≤ N`, on `[−1, 1]` with `dt/2`.
///
/// `H` has dimension `N`, with `f_j` carrying `k_{j+1}`.
pub fn sine_support(truncation: usize, nodes: usize) -> Result<SupportOnX> {
    let x = CompactSpace::interval(-1.0, 1.0, nodes)?;
    let mu = Arc::new(Measure::uniform(&x));
    let h = UnitalSpace::standard(truncation);
    let pts = x.points();
    let mut k = vec![vec![1.0; pts.len()]];
    for n in 2..=truncation {
        let nf = n as f64;
        k.push(pts.iter().map(|&t| (nf * std::f64::consts::PI * t).sin() / nf).collect());
    }
    SupportOnX::new(&h, &mu, k)
}

/// An `H`-support in a unital space `K`: vectors `k_f ∈ K_h`, one per basis vector of `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportInK {
    k_space: Arc<UnitalSpace>,
    h: Arc<UnitalSpace>,
    k: Vec<HVector>,
}

impl SupportInK {
    pub fn new(k_space: &Arc<UnitalSpace>, h: &Arc<UnitalSpace>, k: Vec<HVector>) -> Result<Self> {
        if k.len() != h.dim() {
            return Err(Error::Shape("one vector per basis vector of H".into()));
        }
        for v in &k {
            hilbert::check_space(k_space, v.space())?;
            if !v.is_hermitian(TOL) {
                return Err(Error::InvalidSupport("support vectors must be hermitian".into()));
            }
        }
        if !hilbert::in_cone(&k[h.unit_index()], TOL) {
            return Err(Error::InvalidSupport("k_e must lie in the cone".into()));
        }
        Ok(SupportInK { k_space: k_space.clone(), h: h.clone(), k })
    }

    pub fn vectors(&self) -> &[HVector] {
        &self.k
    }

    pub fn source(&self) -> &Arc<UnitalSpace> {
        &self.k_space
    }

    pub fn target(&self) -> &Arc<UnitalSpace> {
        &self.h
    }

    pub fn sup_norm(&self) -> f64 {
        self.k.iter().map(HVector::norm).fold(0.0, f64::max)
    }
}

/// A linear map `K → H` between unital spaces, as a `dim H × dim K` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MapK {
    pub from: Arc<UnitalSpace>,
    pub to: Arc<UnitalSpace>,
    pub matrix: CMat,
}

impl MapK {
    pub fn new(from: &Arc<UnitalSpace>, to: &Arc<UnitalSpace>, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != to.dim() || matrix.ncols() != from.dim() {
            return Err(Error::Shape("matrix must be dim(to) × dim(from)".into()));
        }
        Ok(MapK { from: from.clone(), to: to.clone(), matrix })
    }

    pub fn identity(space: &Arc<UnitalSpace>) -> Self {
        MapK { from: space.clone(), to: space.clone(), matrix: CMat::identity(space.dim(), space.dim()) }
    }

    pub fn apply(&self, v: &HVector) -> HVector {
        let x = &self.matrix * crate::linalg::CVec::from_column_slice(v.coords());
        HVector::new(&self.to, x.iter().copied().collect()).expect("shape")
    }

    pub fn compose(&self, other: &MapK) -> Result<MapK> {
        hilbert::check_space(&self.from, &other.to)?;
        MapK::new(&other.from, &self.to, &self.matrix * &other.matrix)
    }

    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    /// Smallest cone margin of `T(η)` over `η` from the boundary of `𝔠_K`
    /// (the points `e ± g` and `samples` random `e + x`, `‖x‖ = 1`); also returns the
    /// worst `η`.
    pub fn positivity_margin(&self, samples: usize, seed: u64) -> (f64, HVector) {
        let k = &self.from;
        hilbert::boundary_states(k, samples, seed)
            .into_iter()
            .map(|s| {
                let v = s.vector();
                (hilbert::cone_margin(&self.apply(&v)), v)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap()
    }
}

/// `T_k η = Σ_f (η, k_f) f`.
pub fn build_map_k(k: &SupportInK) -> MapK {
    let matrix = CMat::from_fn(k.h.dim(), k.k_space.dim(), |f, g| k.k[f].coord(g).conj());
    MapK { from: k.k_space.clone(), to: k.h.clone(), matrix }
}

/// `k_f = T* f`; rejects maps found non-positive on the sampled boundary of `𝔠_K`.
pub fn extract_support_k(t: &MapK, samples: usize, seed: u64) -> Result<SupportInK> {
    let (m, _) = t.positivity_margin(samples, seed);
    if m < -TOL {
        return Err(Error::NotPositive(format!("cone margin {m:.3e} on a sampled boundary point")));
    }
    let k = (0..t.to.dim())
        .map(|f| HVector::new(&t.from, (0..t.from.dim()).map(|g| t.matrix[(f, g)].conj()).collect()).expect("shape"))
        .collect();
    SupportInK::new(&t.from, &t.to, k)
}

/// Random positive map `K → H` with `T(u) ∈ 𝔠`: `T = A ⊕ Q` in block form where
/// `T(u) = a e + w`, `T(x) ⊥ e` for `x ⊥ u`, and `‖w‖ + ‖Q‖ ≤ a`.
pub fn random_positive_map_k(from: &Arc<UnitalSpace>, to: &Arc<UnitalSpace>, r: &mut Rng64) -> MapK {
    let (ku, hu) = (from.unit_index(), to.unit_index());
    let mut q = CMat::zeros(to.dim(), from.dim());
    for f in to.non_unit() {
        for g in from.non_unit() {
            q[(f, g)] = c(linalg::gauss(r));
        }
    }
    let qn = linalg::op_norm(&q);
    let budget: f64 = r.gen_range(0.2..1.0);
    let split: f64 = r.gen();
    if qn > 0.0 {
        q *= c(budget * split / qn);
    }
    let mut w: Vec<f64> = (0..to.dim()).map(|_| linalg::gauss(r)).collect();
    w[hu] = 0.0;
    let wn = w.iter().map(|a| a * a).sum::<f64>().sqrt();
    for (f, wf) in w.iter().enumerate() {
        if f != hu && wn > 0.0 {
            q[(f, ku)] = c(wf / wn * budget * (1.0 - split));
        }
    }
    q[(hu, ku)] = c(1.0);
    MapK { from: from.clone(), to: to.clone(), matrix: q }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms_mu(w: Vec<f64>) -> Arc<Measure> {
        let x = CompactSpace::atoms(w.len());
        Arc::new(Measure::atomic(&x, w).unwrap())
    }

    #[test]
    fn trivial_support_gives_integral_times_e() {
        let h = UnitalSpace::standard(3);
        let mu = atoms_mu(vec![0.2, 0.3, 0.5]);
        let k = SupportOnX::trivial(&h, &mu).unwrap();
        let t = build_map(&k).unwrap();
        let tv = t.apply(&[1.0, 2.0, 3.0]);
        assert!(tv.distance(&(&HVector::unit(&h) * 2.3)) < 1e-14);
        let rep = is_maximal(&k);
        assert!(rep.maximal && rep.margin == 1.0);
        let d = separate(&k).unwrap();
        assert_eq!(d.term_count(), 1);
        assert_eq!(d.terms[0].p, HVector::unit(&h));
    }

    #[test]
    fn overlapping_functions_are_not_maximal() {
        let h = UnitalSpace::standard(3);
        let mu = atoms_mu(vec![0.5, 0.5]);
        let k = SupportOnX::new(&h, &mu, vec![vec![1.0, 1.0], vec![0.9, -0.9], vec![0.9, -0.9]]).unwrap();
        let rep = is_maximal(&k);
        assert!(!rep.maximal);
        assert!((rep.worst_sum - 1.62).abs() < 1e-12);
        assert!(build_map(&k).is_err());
        match separate(&k) {
            Err(Error::NotMaximal { q0_total, .. }) => assert!(q0_total > 0.0),
            other => panic!("unexpected {other:?}"),
        }
        let d = nuclear_decomposition(&k);
        assert!(d.is_valid(1e-12));
        assert!(d.reconstruct().distance(&build_map_unchecked(&k)) < 1e-14);
    }

    #[test]
    fn bound_violation_rejected_at_construction() {
        let h = UnitalSpace::standard(2);
        let mu = atoms_mu(vec![0.5, 0.5]);
        assert!(SupportOnX::new(&h, &mu, vec![vec![1.0, 1.0], vec![1.2, -1.2]]).is_err());
        assert!(SupportOnX::new(&h, &mu, vec![vec![1.0, 1.0], vec![0.5, 0.0]]).is_err());
    }

    #[test]
    fn round_trip_on_random_maps() {
        let h = UnitalSpace::standard(4);
        let mut r = linalg::rng(11);
        for n in 3..8 {
            let t = random_unital_positive_map(&h, n, &mut r);
            let k = extract_support(&t).unwrap();
            assert!(is_maximal(&k).maximal);
            assert!(build_map(&k).unwrap().distance(&t) < 1e-12);
            let d = separate(&k).unwrap();
            assert!(d.is_valid(1e-12));
            assert!(d.reconstruct().distance(&t) < 1e-12);
            assert!(d.term_count() <= n + 1);
        }
    }

    #[test]
    fn extract_rejects_non_unital_and_negative() {
        let h = UnitalSpace::standard(2);
        let x = CompactSpace::atoms(2);
        let e = HVector::unit(&h);
        let t = MapOnX::new(&h, &x, vec![&e * 0.5, &e * 0.6]).unwrap();
        assert!(matches!(extract_support(&t), Err(Error::NotUnitalMap(_))));
        let t = MapOnX::new(&h, &x, vec![&e * -0.5, &e * 1.5]).unwrap();
        assert!(matches!(extract_support(&t), Err(Error::NegativeAtom { atom: 0, .. })));
    }

    #[test]
    fn sine_family_is_maximal() {
        let k = sine_support(16, 512).unwrap();
        let rep = is_maximal(&k);
        let tail: f64 = (2..=16).map(|n| 1.0 / (n * n) as f64).sum();
        assert!(rep.worst_sum <= tail);
        assert!(build_map(&k).unwrap().unital_defect() < 1e-12);
    }

    #[test]
    fn identity_support_in_k() {
        let h = UnitalSpace::standard(4);
        let t = MapK::identity(&h);
        let k = extract_support_k(&t, 200, 0).unwrap();
        for f in 0..4 {
            assert_eq!(k.vectors()[f], HVector::basis(&h, f));
        }
        assert_eq!(build_map_k(&k), t);
    }

    #[test]
    fn random_k_maps_round_trip() {
        let mut r = linalg::rng(5);
        for d in 2..6 {
            let (k, h) = (UnitalSpace::standard(d), UnitalSpace::standard(7 - d));
            let t = random_positive_map_k(&k, &h, &mut r);
            let sup = extract_support_k(&t, 300, 1).unwrap();
            let back = build_map_k(&sup);
            assert!(linalg::max_abs_diff(&back.matrix, &t.matrix) < 1e-12);
            assert!(t.op_norm() <= 8.0 * 2f64.sqrt() * sup.sup_norm());
        }
    }

    #[test]
    fn positive_matrices_map_into_max() {
        let h = UnitalSpace::standard(3);
        let mut r = linalg::rng(2);
        let t = random_unital_positive_map(&h, 4, &mut r);
        let v: Vec<CMat> = (0..4).map(|_| linalg::random_psd(&mut r, 2)).collect();
        let (z, cert) = t.apply_positive_matrix(&v);
        assert!(cert.verify(&z, 1e-9));
    }
}
