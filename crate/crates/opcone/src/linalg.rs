//! Dense complex linear algebra used across the crate.
//!
//! Everything here is a thin layer over `nalgebra`: hermitian eigendecompositions,
//! positive square roots, spectral splitting and the handful of matrix norms the
//! cone tests need.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type Rng64 = ChaCha8Rng;

/// Eigenvalues below this are clamped to zero before square roots.
pub const CLAMP: f64 = 1e-12;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic sub-seed for shard `index` of a run seeded with `seed`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gauss(rng: &mut Rng64) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_complex(rng: &mut Rng64) -> C64 {
    C64::new(gauss(rng), gauss(rng)) / 2f64.sqrt()
}

pub fn random_cvec(rng: &mut Rng64, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_unit_cvec(rng: &mut Rng64, n: usize) -> CVec {
    loop {
        let v = random_cvec(rng, n);
        let nv = v.norm();
        if nv > 1e-12 {
            return v / c(nv);
        }
    }
}

pub fn random_cmat(rng: &mut Rng64, r: usize, cols: usize) -> CMat {
    CMat::from_fn(r, cols, |_, _| random_complex(rng))
}

/// Random hermitian matrix with Gaussian entries (GUE-like scaling).
pub fn random_hermitian(rng: &mut Rng64, n: usize) -> CMat {
    let a = random_cmat(rng, n, n);
    (&a + a.adjoint()) * c(0.5)
}

/// Random positive semidefinite matrix `a*a`.
pub fn random_psd(rng: &mut Rng64, n: usize) -> CMat {
    let a = random_cmat(rng, n, n);
    a.adjoint() * a
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5)
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.is_square() && (a - a.adjoint()).iter().all(|z| z.norm() <= tol)
}

/// Eigendecomposition of a hermitian matrix, eigenvalues ascending.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

pub fn eigvalsh(a: &CMat) -> Vec<f64> {
    eigh(a).0
}

/// Smallest eigenvalue and a unit eigenvector.
pub fn min_eig(a: &CMat) -> (f64, CVec) {
    let (vals, vecs) = eigh(a);
    (vals[0], vecs.column(0).into_owned())
}

pub fn lambda_min(a: &CMat) -> f64 {
    eigvalsh(a)[0]
}

pub fn lambda_max(a: &CMat) -> f64 {
    *eigvalsh(a).last().unwrap()
}

fn spectral_map(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(a);
    let d = CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&l| c(f(l)))));
    &vecs * d * vecs.adjoint()
}

/// Positive square root of a hermitian matrix; eigenvalues below the clamp are dropped.
pub fn psd_sqrt(a: &CMat) -> CMat {
    spectral_map(a, |l| if l > CLAMP { l.sqrt() } else { 0.0 })
}

/// Positive and negative spectral parts, `a = p - q` with `p, q ⪰ 0` and `pq = 0`.
pub fn spectral_parts(a: &CMat) -> (CMat, CMat) {
    let p = spectral_map(a, |l| if l > CLAMP { l } else { 0.0 });
    let q = spectral_map(a, |l| if l < -CLAMP { -l } else { 0.0 });
    (p, q)
}

/// Matrix absolute value `|a| = (a*a)^{1/2}` for hermitian `a`.
pub fn habs(a: &CMat) -> CMat {
    spectral_map(a, f64::abs)
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    a.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn op_norm(a: &CMat) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}

pub fn trace_norm(a: &CMat) -> f64 {
    singular_values(a).into_iter().sum()
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm()
}

pub fn trace(a: &CMat) -> C64 {
    a.trace()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn conj(a: &CMat) -> CMat {
    a.map(|z| z.conj())
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMat {
    CMat::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
}
