//! Absolutely summing norms, Pietsch factorization and the nuclear bound.
//!
//! On a finite `X` the 1-summing norm of `T: C(X) → H` is the least total mass
//! of a measure with `‖Tv‖ ≤ ∫|v| dμ`. Testing the point indicators forces
//! `μ(t) ≥ ‖Tδ̂_t‖`, and that choice dominates by the triangle inequality, so
//! the optimum is `Σ_t ‖Tδ̂_t‖`. The LP over sampled `v` reproduces this and
//! gives a certified bracket.

use std::sync::Arc;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;

use crate::error::{Error, Result};
use crate::function::Measure;
use crate::hilbert::UnitalSpace;
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::supports::{self, MapOnX};

/// Bracket `lower ≤ π(T) ≤ upper` with the measure realizing `upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummingBounds {
    pub lower: f64,
    pub upper: f64,
    /// Point masses of a dominating measure with total `upper`.
    pub measure: Vec<f64>,
    pub constraints: usize,
}

/// LP over atom weights: minimize `Σ μ_t` subject to `Σ |v_t| μ_t ≥ ‖Tv‖` for
/// the point indicators and `samples` random sign patterns.
///
/// `lower` is the LP optimum (a relaxation of the semi-infinite problem);
/// `upper` is the mass of the LP solution raised, where needed, to `‖Tδ̂_t‖`,
/// which dominates for every `v`.
pub fn summing_norm_lp(t: &MapOnX, samples: usize, seed: u64) -> Result<SummingBounds> {
    if !t.x().is_atomic() {
        return Err(Error::SpaceMismatch("summing norm LP needs a finite atomic space".into()));
    }
    let n = t.x().len();
    let col_norms: Vec<f64> = t.columns().iter().map(|c| c.norm()).collect();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..n).map(|_| problem.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for (i, &norm) in col_norms.iter().enumerate() {
        problem.add_constraint([(vars[i], 1.0)], ComparisonOp::Ge, norm);
    }
    let mut r = linalg::rng(seed);
    for _ in 0..samples {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let s = if r.gen::<bool>() { 1.0 } else { -1.0 };
                s * r.gen::<f64>()
            })
            .collect();
        let rhs = t.apply(&v).norm();
        let expr: Vec<_> = vars.iter().zip(&v).map(|(&x, a)| (x, a.abs())).collect();
        problem.add_constraint(expr, ComparisonOp::Ge, rhs);
    }
    let sol = problem
        .solve()
        .map_err(|e| Error::Lp(e.to_string()))?
        .into_solution()
        .map_err(|_| Error::Lp("solver interrupted".into()))?;
    let lower = sol.objective();
    let measure: Vec<f64> = vars.iter().zip(&col_norms).map(|(&x, &cn)| sol.var_value(x).max(cn)).collect();
    let upper = measure.iter().sum();
    Ok(SummingBounds { lower, upper, measure, constraints: n + samples })
}

/// Largest sampled `‖Tv‖ / ∫|v| dμ`.
pub fn domination_ratio(t: &MapOnX, mu: &Measure, samples: usize, seed: u64) -> f64 {
    let m = mu.masses();
    let n = m.len();
    let mut r = linalg::rng(seed);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let v: Vec<f64> = if i % 2 == 0 {
            (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
        } else {
            let mut v = vec![0.0; n];
            v[r.gen_range(0..n)] = r.gen_range(-1.0..1.0);
            v
        };
        let den: f64 = v.iter().zip(&m).map(|(a, w)| a.abs() * w).sum();
        if den > 0.0 {
            worst = worst.max(t.apply(&v).norm() / den);
        }
    }
    worst
}

/// `T = T₂ ι T₁` with `T₁` the identity of `C(X)` and `T₂ = T_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub mu: Arc<Measure>,
    pub h: Arc<UnitalSpace>,
    /// `T₂` in the orthonormal coordinates `δ̂_t / μ(t)^{1/2}` of `L²(X, μ)`;
    /// null points get a zero column.
    pub t2: CMat,
    pub t1_norm: f64,
    pub t2_norm: f64,
    pub t2_hs_norm: f64,
    /// The bound `2√2` on `π(T)` for unital positive maps.
    pub bound: f64,
}

impl Factorization {
    /// `T₂ ι T₁` as a map on `C(X)`.
    pub fn reconstruct(&self) -> MapOnX {
        let m = self.mu.masses();
        let cols = (0..m.len())
            .map(|t| {
                let col: Vec<C64> = (0..self.h.dim()).map(|f| self.t2[(f, t)] * m[t].max(0.0).sqrt()).collect();
                crate::hilbert::HVector::new(&self.h, col).expect("shape")
            })
            .collect();
        MapOnX::new(&self.h, self.mu.space(), cols).expect("shape")
    }
}

/// Factor a unital positive map through `L²(X, μ)` with `μ` and `T_k` from its support.
pub fn factorize(t: &MapOnX) -> Result<Factorization> {
    let k = supports::extract_support(t)?;
    let mu = k.measure().clone();
    let m = mu.masses();
    let h = t.h().clone();
    let t2 = CMat::from_fn(h.dim(), m.len(), |f, i| c(k.function(f)[i] * m[i].max(0.0).sqrt()));
    Ok(Factorization {
        t2_norm: linalg::op_norm(&t2),
        t2_hs_norm: t2.norm(),
        mu,
        h,
        t2,
        t1_norm: 1.0,
        bound: 2.0 * 2f64.sqrt(),
    })
}

/// `‖Tι‖₁` and `‖T‖₂` for `T: L²(X, μ) → H` given in the orthonormal block basis
/// `χ_t / μ(t)^{1/2}` (one column per atom of `μ`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NuclearReport {
    /// Nuclear norm of `Tι: C(X) → H`, `Σ_t ‖Tι(δ̂_t)‖`.
    pub nuclear: f64,
    pub hs: f64,
    /// Trace norm of the column matrix `[Tι(δ̂_t)]`, a lower bound for `nuclear`.
    pub trace_norm: f64,
}

pub fn nuclear_bound_check(mu: &Measure, t: &CMat) -> Result<NuclearReport> {
    if !mu.space().is_atomic() || t.ncols() != mu.space().len() {
        return Err(Error::Shape("one column per atom of an atomic measure".into()));
    }
    let m = mu.masses();
    if m.iter().any(|&x| x < 0.0) {
        return Err(Error::NotProbability("negative mass".into()));
    }
    let cols = CMat::from_fn(t.nrows(), t.ncols(), |f, i| t[(f, i)] * m[i].sqrt());
    let nuclear = (0..cols.ncols()).map(|i| cols.column(i).norm()).sum();
    Ok(NuclearReport { nuclear, hs: t.norm(), trace_norm: linalg::trace_norm(&cols) })
}

/// `‖ιT‖₂` and `‖T‖ μ(X)^{1/2}` for `T: H → C(X)` given by the values `(Tf)(t)`
/// (rows indexed by points, columns by basis vectors of `H`).
pub fn iota_t_hs(mu: &Measure, t: &CMat) -> Result<(f64, f64)> {
    if t.nrows() != mu.space().len() {
        return Err(Error::Shape("one row per point".into()));
    }
    let m = mu.masses();
    let hs = (0..t.nrows()).map(|i| t.row(i).norm_squared() * m[i]).sum::<f64>().sqrt();
    let op = (0..t.nrows()).map(|i| t.row(i).norm()).fold(0.0, f64::max);
    Ok((hs, op * mu.total().sqrt()))
}

/// Bracket for `π(T)` of `T: K → H` between Hilbert spaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HilbertSumming {
    pub hs: f64,
    /// `‖T‖₂`, attained by the singular vectors.
    pub lower: f64,
    /// `min(‖T‖₁, (2/√π)‖T‖₂)`; the second is the Gaussian measure bound.
    pub upper: f64,
    /// `(2/√π) E‖x‖` for `x = Σ sᵢ gᵢ xᵢ`, estimated by Monte Carlo.
    pub monte_carlo: f64,
}

/// The Gaussian Pietsch measure: for `x = Σ sᵢ gᵢ xᵢ` with standard complex
/// Gaussians `gᵢ` and right singular pairs `(sᵢ, xᵢ)`, `⟨v, x⟩` is Gaussian with
/// variance `‖Tv‖²`, so `‖Tv‖ = (2/√π) E|⟨v, x⟩|`.
pub fn hilbert_summing(t: &CMat, samples: usize, seed: u64) -> HilbertSumming {
    let svd = t.clone().svd(false, true);
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let hs = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tr: f64 = s.iter().sum();
    let k = 2.0 / std::f64::consts::PI.sqrt();
    let vt = svd.v_t.expect("requested");
    let mut r = linalg::rng(seed);
    let mut acc = 0.0;
    for _ in 0..samples {
        let mut x = CVec::zeros(t.ncols());
        for (i, &si) in s.iter().enumerate() {
            let g = linalg::random_complex(&mut r);
            for j in 0..t.ncols() {
                x[j] += g * si * vt[(i, j)].conj();
            }
        }
        acc += x.norm();
    }
    let monte_carlo = if samples > 0 { k * acc / samples as f64 } else { f64::NAN };
    HilbertSumming { hs, lower: hs, upper: tr.min(k * hs), monte_carlo }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::CompactSpace;
    use crate::hilbert::HVector;

    #[test]
    fn point_mass_map_has_norm_one() {
        let h = UnitalSpace::standard(3);
        let x = CompactSpace::atoms(3);
        let e = HVector::unit(&h);
        let z = HVector::zero(&h);
        let t = MapOnX::new(&h, &x, vec![z.clone(), e, z]).unwrap();
        let b = summing_norm_lp(&t, 200, 0).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-9 && (b.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_bracket() {
        let h = UnitalSpace::standard(3);
        let x = CompactSpace::atoms(4);
        let zeta = HVector::real(&h, &[0.3, -1.0, 2.0]).unwrap();
        let nu = [0.5, -0.25, 0.1, 0.0];
        let t = MapOnX::new(&h, &x, nu.iter().map(|&a| &zeta * a).collect()).unwrap();
        let b = summing_norm_lp(&t, 500, 3).unwrap();
        let exact = zeta.norm() * 0.85;
        assert!(b.lower <= exact + 1e-9 && exact <= b.upper + 1e-12);
        assert!((b.upper - exact).abs() < 1e-12);
    }

    #[test]
    fn unital_positive_maps_are_summing() {
        let h = UnitalSpace::standard(4);
        let mut r = linalg::rng(4);
        for _ in 0..5 {
            let t = supports::random_unital_positive_map(&h, 5, &mut r);
            let b = summing_norm_lp(&t, 300, 1).unwrap();
            assert!(b.upper <= 2.0 * 2f64.sqrt() + 1e-9);
            let f = factorize(&t).unwrap();
            assert!(f.reconstruct().distance(&t) < 1e-12);
            assert!(f.t2_norm <= f.t2_hs_norm + 1e-12 && f.t2_hs_norm <= 2f64.sqrt() + 1e-12);
            let ratio = domination_ratio(&t, &f.mu, 500, 2);
            assert!(ratio <= 2.0 * 2f64.sqrt());
        }
    }

    #[test]
    fn trivial_factorization() {
        let h = UnitalSpace::standard(3);
        let x = CompactSpace::atoms(3);
        let mu = Arc::new(Measure::atomic(&x, vec![0.2, 0.3, 0.5]).unwrap());
        let k = supports::SupportOnX::trivial(&h, &mu).unwrap();
        let f = factorize(&supports::build_map(&k).unwrap()).unwrap();
        for i in 0..3 {
            assert!((f.t2[(0, i)].re - mu.masses()[i].sqrt()).abs() < 1e-15);
            assert!(f.t2[(1, i)].norm() == 0.0 && f.t2[(2, i)].norm() == 0.0);
        }
    }

    #[test]
    fn nuclear_single_block_and_zero() {
        let x = CompactSpace::atoms(3);
        let mu = Measure::atomic(&x, vec![0.2, 0.3, 0.5]).unwrap();
        let mut t = CMat::zeros(2, 3);
        t[(1, 1)] = c(0.3f64.sqrt());
        let rep = nuclear_bound_check(&mu, &t).unwrap();
        assert!((rep.nuclear - 0.3).abs() < 1e-15);
        assert!((rep.hs - 0.3f64.sqrt()).abs() < 1e-15);
        let z = nuclear_bound_check(&mu, &CMat::zeros(2, 3)).unwrap();
        assert_eq!((z.nuclear, z.hs), (0.0, 0.0));
    }

    #[test]
    fn hilbert_bracket() {
        let mut r = linalg::rng(8);
        let t = linalg::random_cmat(&mut r, 3, 4);
        let b = hilbert_summing(&t, 4000, 1);
        assert!(b.lower <= b.upper);
        assert!(b.upper <= 3f64.sqrt() * b.hs);
        assert!(b.monte_carlo >= b.lower * 0.95 && b.monte_carlo <= b.upper * 1.05);
    }
}
