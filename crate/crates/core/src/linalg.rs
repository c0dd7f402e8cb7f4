//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything here works on `nalgebra` dynamic matrices over `Complex64`.
//! Hermitian problems go through `SymmetricEigen`, singular values through
//! `SVD`; nothing is hand-rolled beyond small reshaping utilities.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.norm();
    }
    if m.nrows() == 2 && m.ncols() == 2 {
        // σ_max² = (‖m‖_F² + √(‖m‖_F⁴ − 4|det m|²)) / 2
        let f = m.norm_squared();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let disc = (f * f - 4.0 * det.norm_sqr()).max(0.0);
        return ((f + disc.sqrt()) / 2.0).sqrt();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b))
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

/// Numerical rank with an absolute singular-value threshold.
pub fn rank(m: &CMat, threshold: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > threshold).count()
}

/// `(m + m*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrised first,
/// so tiny anti-Hermitian drift is discarded. Eigenvalues come back ascending,
/// with matching eigenvector columns.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `V diag(f(λ)) V*` for a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (vals, vecs) = eigh(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let fj = f(vals[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vecs.adjoint()
}

/// `exp(i h)` for Hermitian `h`; unitary up to rounding in the eigenvectors.
pub fn expm_i_hermitian(h: &CMat) -> CMat {
    hermitian_fn(h, |l| C64::from_polar(1.0, l))
}

/// `exp(a)` for skew-Hermitian `a`.
pub fn expm_skew_hermitian(a: &CMat) -> CMat {
    // a = i h with h = -i a Hermitian.
    let h = a * c(0.0, -1.0);
    expm_i_hermitian(&h)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    (m - m.adjoint()).camax() <= tol
}

/// `‖v* v − I‖_max`, for checking that columns are orthonormal.
pub fn isometry_defect(v: &CMat) -> f64 {
    let g = v.adjoint() * v;
    (g - CMat::identity(v.ncols(), v.ncols())).camax()
}

pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Complex Gaussian with `E|z|^2 = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re * s, im * s)
}

/// Ginibre matrix with unit-variance complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng, 1.0))
}

/// GUE sample: real `N(0,1)` diagonal, complex off-diagonal entries of unit
/// variance, Hermitian by construction.
pub fn gue<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = c(d, 0.0);
        for j in (i + 1)..n {
            let z = complex_gaussian(rng, 1.0);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase fix on `R`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    loop {
        let v = CVec::from_fn(n, |_, _| complex_gaussian(rng, 1.0));
        let nv = v.norm();
        if nv > 1e-12 {
            return v / c(nv, 0.0);
        }
    }
}

/// Split ascending eigenvalues into clusters separated by gaps larger than
/// `gap`. Returns index ranges into the sorted list.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    if values.is_empty() {
        return out;
    }
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out.push(start..values.len());
    out
}

/// Orthonormal basis (columns) of the range of a matrix, via SVD.
pub fn range_basis(m: &CMat, threshold: f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > threshold)
        .collect();
    CMat::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Hilbert–Schmidt pairing `tr(a* b)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.zip_fold(b, ZERO, |acc, x, y| acc + x.conj() * y)
}
