//! Structure of the *-algebra generated by a finite set of matrices.
//!
//! 1. Linear closure of words in the generators and their adjoints.
//! 2. Centre by solving `[z, g] = 0` on that span.
//! 3. Minimal central projections from the spectrum of a generic central
//!    Hermitian element.
//! 4. In each central summand `M_d ⊗ I_m`, minimal projections from a generic
//!    Hermitian element and matrix units `E_j a E_1` from a generic element,
//!    which together produce the frame.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FiniteVNAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, ONE};

const SPAN_TOL: f64 = 1e-9;
/// Relative eigenvalue threshold on the commutator Gram matrix.
const CENTER_TOL: f64 = 1e-10;
const CLUSTER_GAP: f64 = 1e-7;

fn vec_of(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.iter().copied())
}

fn mat_of(v: &CVec, n: usize) -> CMat {
    CMat::from_iterator(n, n, v.iter().copied())
}

/// Orthonormal (Hilbert–Schmidt) basis of the unital *-algebra generated by
/// `gens`, as `n×n` matrices.
fn linear_closure(gens: &[CMat], n: usize) -> Vec<CMat> {
    let mut words: Vec<CMat> = Vec::new();
    for g in gens {
        words.push(g.clone());
        words.push(g.adjoint());
    }
    let full = n * n;
    let mut basis: Vec<CVec> = Vec::new();
    let mut mats: Vec<CMat> = Vec::new();

    let push = |cand: CMat, basis: &mut Vec<CVec>, mats: &mut Vec<CMat>| -> bool {
        let scale = cand.norm();
        if scale == 0.0 {
            return false;
        }
        let mut v = vec_of(&cand);
        // Two Gram–Schmidt passes.
        for _ in 0..2 {
            for b in basis.iter() {
                let coef = b.dotc(&v);
                v.axpy(-coef, b, ONE);
            }
        }
        let r = v.norm();
        if r > SPAN_TOL * scale.max(1.0) {
            v /= c(r, 0.0);
            mats.push(mat_of(&v, n));
            basis.push(v);
            true
        } else {
            false
        }
    };

    push(CMat::identity(n, n), &mut basis, &mut mats);
    let mut q = 0;
    while q < mats.len() && mats.len() < full {
        let current = mats[q].clone();
        for w in &words {
            if mats.len() >= full {
                break;
            }
            push(w * &current, &mut basis, &mut mats);
        }
        q += 1;
    }
    mats
}

pub(super) fn generated_algebra(gens: &[CMat], seed: u64) -> Result<FiniteVNAlgebra> {
    let n = gens.first().map(|g| g.nrows()).ok_or_else(|| Error::InvalidAlgebra("no generators".into()))?;
    if gens.iter().any(|g| g.nrows() != n || g.ncols() != n) {
        return Err(Error::InvalidAlgebra("generators must be square of equal size".into()));
    }
    let basis = linear_closure(gens, n);
    let dim = basis.len();
    if dim == n * n {
        return FiniteVNAlgebra::standard(&[n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Centre: coefficients c with Σ c_i [b_i, g] = 0 for g in gens ∪ gens*.
    let mut all: Vec<CMat> = Vec::new();
    for g in gens {
        all.push(g.clone());
        all.push(g.adjoint());
    }
    let mut gram = CMat::zeros(dim, dim);
    for g in &all {
        let cols: Vec<CVec> = basis.iter().map(|b| vec_of(&(b * g - g * b))).collect();
        let m = CMat::from_columns(&cols);
        gram += m.adjoint() * m;
    }
    let (vals, vecs) = linalg::eigh(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(1.0);
    let center: Vec<CMat> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < CENTER_TOL * top)
        .map(|(k, _)| {
            let mut z = CMat::zeros(n, n);
            for (i, b) in basis.iter().enumerate() {
                z += b * vecs[(i, k)];
            }
            z
        })
        .collect();
    if center.is_empty() {
        return Err(Error::InvalidAlgebra("centre computation failed".into()));
    }

    let mut h = CMat::zeros(n, n);
    for z in &center {
        // Both Hermitian parts, since a central vector may be skew.
        let r: f64 = rng.random_range(-1.0..1.0);
        let s: f64 = rng.random_range(-1.0..1.0);
        h += (z + z.adjoint()) * c(r, 0.0) + (z - z.adjoint()) * c(0.0, s);
    }
    let (cvals, cvecs) = linalg::eigh(&h);
    let spread = (cvals[n - 1] - cvals[0]).abs().max(1.0);
    let central = linalg::cluster_sorted(&cvals, CLUSTER_GAP * spread);

    let mut blocks = Vec::new();
    let mut mults = Vec::new();
    let mut frame_cols: Vec<CVec> = Vec::new();
    for range in central {
        let q = cvecs.columns(range.start, range.len()).into_owned();
        let r = q.ncols();
        // Generic Hermitian and generic elements of the summand, compressed.
        let mut herm = CMat::zeros(n, n);
        let mut generic = CMat::zeros(n, n);
        for b in &basis {
            let s: f64 = rng.random_range(-1.0..1.0);
            let t = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            herm += (b + b.adjoint()) * c(s, 0.0);
            generic += b * t;
        }
        let hc = q.adjoint() * &herm * &q;
        let ac = q.adjoint() * &generic * &q;
        let (hv, he) = linalg::eigh(&hc);
        let hs = (hv[r - 1] - hv[0]).abs().max(1.0);
        let minimal = linalg::cluster_sorted(&hv, CLUSTER_GAP * hs);
        let d = minimal.len();
        let m = r / d;
        if d * m != r || minimal.iter().any(|rg| rg.len() != m) {
            return Err(Error::InvalidAlgebra(format!(
                "inconsistent multiplicities in a central summand of rank {r}"
            )));
        }
        let e: Vec<CMat> = minimal.iter().map(|rg| he.columns(rg.start, m).into_owned()).collect();
        let mut local: Vec<CMat> = Vec::with_capacity(d);
        local.push(e[0].clone());
        for ej in e.iter().skip(1) {
            let x = ej.adjoint() * &ac * &e[0];
            let alpha = x.norm() / (m as f64).sqrt();
            if alpha < 1e-8 {
                return Err(Error::InvalidAlgebra("degenerate matrix-unit construction".into()));
            }
            let u = x / c(alpha, 0.0);
            local.push(ej * u);
        }
        for lj in &local {
            let cols = &q * lj;
            for l in 0..m {
                frame_cols.push(cols.column(l).into_owned());
            }
        }
        blocks.push(d);
        mults.push(m);
    }
    let frame = CMat::from_columns(&frame_cols);
    let alg = FiniteVNAlgebra::new(&blocks, &mults, frame)?;
    for g in gens {
        let defect = alg.membership_defect(g);
        if defect > 1e-7 * g.camax().max(1.0) {
            return Err(Error::InvalidAlgebra(format!("generator not reproduced (defect {defect:e})")));
        }
    }
    if alg.dim() != dim {
        return Err(Error::InvalidAlgebra(format!(
            "block structure has dimension {} but the span has {dim}",
            alg.dim()
        )));
    }
    Ok(alg)
}
