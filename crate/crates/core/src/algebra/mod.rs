//! Finite-dimensional von Neumann algebras as direct sums of matrix blocks.
//!
//! An algebra `⊕_k M_{d_k}` is carried together with a concrete unital
//! representation on an ambient space `ℂ^n`. Up to unitary equivalence every
//! such representation is `x ↦ W (⊕_k x_k ⊗ I_{m_k}) W*` for multiplicities
//! `m_k` and a unitary frame `W`; that is exactly what is stored here.
//! Elements are kept abstractly, block by block.

mod decompose;
mod element;

pub use element::AlgebraElement;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, ONE, ZERO};

/// Singular-value threshold for the separating-vector rank test.
pub const SEPARATING_RANK_TOL: f64 = 1e-10;
/// Eigenvalue clip tolerance used by positivity tests.
pub const POSITIVITY_TOL: f64 = 1e-9;
const FRAME_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct FiniteVNAlgebra {
    blocks: Vec<usize>,
    multiplicities: Vec<usize>,
    frame: CMat,
    omega: Option<CVec>,
    separating: bool,
}

impl FiniteVNAlgebra {
    /// `⊕_k M_{d_k}` acting block-diagonally on `ℂ^{Σ d_k}`.
    pub fn standard(blocks: &[usize]) -> Result<Self> {
        Self::with_multiplicities(blocks, &vec![1; blocks.len()])
    }

    pub fn with_multiplicities(blocks: &[usize], multiplicities: &[usize]) -> Result<Self> {
        let n: usize = blocks.iter().zip(multiplicities).map(|(d, m)| d * m).sum();
        Self::new(blocks, multiplicities, CMat::identity(n, n))
    }

    pub fn new(blocks: &[usize], multiplicities: &[usize], frame: CMat) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        if blocks.len() != multiplicities.len() {
            return Err(Error::InvalidAlgebra("block/multiplicity length mismatch".into()));
        }
        if blocks.iter().chain(multiplicities).any(|&d| d == 0) {
            return Err(Error::InvalidAlgebra("block sizes and multiplicities must be positive".into()));
        }
        let n: usize = blocks.iter().zip(multiplicities).map(|(d, m)| d * m).sum();
        if frame.nrows() != n || frame.ncols() != n {
            return Err(Error::InvalidAlgebra(format!(
                "frame is {}x{}, ambient dimension is {n}",
                frame.nrows(),
                frame.ncols()
            )));
        }
        let defect = linalg::isometry_defect(&frame);
        if defect > FRAME_TOL {
            return Err(Error::InvalidAlgebra(format!("frame is not unitary (defect {defect:e})")));
        }
        let alg = FiniteVNAlgebra {
            blocks: blocks.to_vec(),
            multiplicities: multiplicities.to_vec(),
            frame,
            omega: None,
            separating: false,
        };
        alg.check_embedding()?;
        Ok(alg)
    }

    /// `ℂ` on `ℂ`.
    pub fn scalars() -> Self {
        Self::standard(&[1]).expect("valid")
    }

    /// Diagonal matrices on `ℂ^n`.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::standard(&vec![1; n])
    }

    /// Attach a distinguished unit vector and run the separating test.
    pub fn with_omega(mut self, omega: CVec) -> Result<Self> {
        if omega.len() != self.ambient_dim() {
            return Err(Error::InvalidAlgebra(format!(
                "omega has length {}, ambient dimension is {}",
                omega.len(),
                self.ambient_dim()
            )));
        }
        let nrm = omega.norm();
        if (nrm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidAlgebra(format!("omega must be a unit vector (norm {nrm})")));
        }
        self.omega = Some(omega);
        self.separating = self.omega_map_rank() == self.dim();
        Ok(self)
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.blocks
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn omega(&self) -> Option<&CVec> {
        self.omega.as_ref()
    }

    /// True iff an omega is present and `x ↦ xΩ` is injective.
    pub fn is_separating(&self) -> bool {
        self.separating
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Linear dimension `Σ d_k²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|d| d * d).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.blocks.len());
        let mut acc = 0;
        for (d, m) in self.blocks.iter().zip(&self.multiplicities) {
            off.push(acc);
            acc += d * m;
        }
        off
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::from_blocks_unchecked(self.blocks.iter().map(|&d| CMat::zeros(d, d)).collect())
    }

    pub fn identity(&self) -> AlgebraElement {
        AlgebraElement::from_blocks_unchecked(self.blocks.iter().map(|&d| CMat::identity(d, d)).collect())
    }

    pub fn element(&self, blocks: Vec<CMat>) -> Result<AlgebraElement> {
        let x = AlgebraElement::from_blocks_unchecked(blocks);
        self.check(&x)?;
        Ok(x)
    }

    /// Scalar multiple of the unit.
    pub fn scalar(&self, z: crate::linalg::C64) -> AlgebraElement {
        self.identity().scale(z)
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        x.shape() == self.blocks
    }

    pub fn check(&self, x: &AlgebraElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { expected: self.blocks.clone(), found: x.shape() })
        }
    }

    /// Matrix units `e^{(k)}_{ij}`, block by block, row-major inside a block.
    pub fn basis(&self) -> Vec<AlgebraElement> {
        let mut out = Vec::with_capacity(self.dim());
        for (k, &d) in self.blocks.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    let mut x = self.zero();
                    x.blocks_mut()[k][(i, j)] = ONE;
                    out.push(x);
                }
            }
        }
        out
    }

    /// `W (⊕ x_k ⊗ I_{m_k}) W*`.
    pub fn to_ambient(&self, x: &AlgebraElement) -> CMat {
        let inner = linalg::block_diag(
            &x.blocks()
                .iter()
                .zip(&self.multiplicities)
                .map(|(b, &m)| linalg::kron(b, &CMat::identity(m, m)))
                .collect::<Vec<_>>(),
        );
        &self.frame * inner * self.frame.adjoint()
    }

    /// Compress an ambient operator to block coordinates. Exact for operators
    /// that lie in the algebra; for others it reads off one multiplicity slice.
    pub fn from_ambient(&self, a: &CMat) -> AlgebraElement {
        let inner = self.frame.adjoint() * a * &self.frame;
        let off = self.offsets();
        let blocks = self
            .blocks
            .iter()
            .zip(&self.multiplicities)
            .zip(off)
            .map(|((&d, &m), o)| CMat::from_fn(d, d, |i, j| inner[(o + i * m, o + j * m)]))
            .collect();
        AlgebraElement::from_blocks_unchecked(blocks)
    }

    /// Distance of an ambient operator from the algebra in max-entry norm.
    pub fn membership_defect(&self, a: &CMat) -> f64 {
        let x = self.from_ambient(a);
        (self.to_ambient(&x) - a).camax()
    }

    /// `π(x) v` without forming the ambient matrix.
    pub fn apply(&self, x: &AlgebraElement, v: &CVec) -> CVec {
        let w = self.frame.adjoint() * v;
        &self.frame * self.apply_in_frame(x, &w)
    }

    /// `(⊕ x_k ⊗ I_{m_k}) w`, i.e. the action in frame coordinates.
    pub fn apply_in_frame(&self, x: &AlgebraElement, w: &CVec) -> CVec {
        let mut out = CVec::zeros(w.len());
        for ((&o, (&d, &m)), b) in self.offsets().iter().zip(self.blocks.iter().zip(&self.multiplicities)).zip(x.blocks()) {
            // (b ⊗ I_m) acting on a d·m slice laid out as (j, l) ↦ j·m + l.
            for i in 0..d {
                for l in 0..m {
                    let mut acc = ZERO;
                    for j in 0..d {
                        acc += b[(i, j)] * w[o + j * m + l];
                    }
                    out[o + i * m + l] = acc;
                }
            }
        }
        out
    }

    /// `π(x) Ω`; `None` when no omega is attached.
    pub fn apply_omega(&self, x: &AlgebraElement) -> Option<CVec> {
        self.omega.as_ref().map(|o| self.apply(x, o))
    }

    /// Rank of `x ↦ xΩ` on the matrix-unit basis.
    pub fn omega_map_rank(&self) -> usize {
        let Some(omega) = &self.omega else { return 0 };
        let basis = self.basis();
        let cols: Vec<CVec> = basis.iter().map(|b| self.apply(b, omega)).collect();
        let m = CMat::from_columns(&cols);
        linalg::rank(&m, SEPARATING_RANK_TOL)
    }

    /// The algebra `M_2(M) = ⊕ M_{2 d_k}` acting on `ℂ² ⊗ ℂ^n`.
    pub fn amplify2(&self) -> FiniteVNAlgebra {
        let n = self.ambient_dim();
        let off = self.offsets();
        let mut perm = CMat::zeros(2 * n, 2 * n);
        for (k, (&d, &m)) in self.blocks.iter().zip(&self.multiplicities).enumerate() {
            for i in 0..2 {
                for j in 0..d {
                    for l in 0..m {
                        let amplified = 2 * off[k] + (i * d + j) * m + l;
                        let tensor = i * n + off[k] + j * m + l;
                        perm[(tensor, amplified)] = ONE;
                    }
                }
            }
        }
        let frame = linalg::kron(&CMat::identity(2, 2), &self.frame) * perm;
        let blocks: Vec<usize> = self.blocks.iter().map(|d| 2 * d).collect();
        FiniteVNAlgebra::new(&blocks, &self.multiplicities, frame).expect("amplification preserves validity")
    }

    /// The algebra of which `self` is the 2×2 amplification, if block sizes are even.
    pub fn deamplify(&self) -> Option<Vec<usize>> {
        self.blocks.iter().map(|&d| (d % 2 == 0).then_some(d / 2)).collect()
    }

    /// `M ⊕ N` on `ℂ^{n_M} ⊕ ℂ^{n_N}`; omega is `(Ω_M ⊕ Ω_N)/√2` when both exist.
    pub fn direct_sum(&self, other: &FiniteVNAlgebra) -> FiniteVNAlgebra {
        let blocks: Vec<usize> = self.blocks.iter().chain(&other.blocks).copied().collect();
        let mults: Vec<usize> = self.multiplicities.iter().chain(&other.multiplicities).copied().collect();
        let frame = linalg::block_diag(&[self.frame.clone(), other.frame.clone()]);
        let sum = FiniteVNAlgebra::new(&blocks, &mults, frame).expect("direct sum preserves validity");
        match (&self.omega, &other.omega) {
            (Some(a), Some(b)) => {
                let v = CVec::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
                    * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                sum.with_omega(v).expect("unit vector")
            }
            _ => sum,
        }
    }

    /// `x ↦ (x, 0)` into `self ⊕ other`.
    pub fn inject_left(&self, other: &FiniteVNAlgebra, x: &AlgebraElement) -> AlgebraElement {
        let mut blocks = x.blocks().to_vec();
        blocks.extend(other.blocks.iter().map(|&d| CMat::zeros(d, d)));
        AlgebraElement::from_blocks_unchecked(blocks)
    }

    /// `y ↦ (0, y)` into `self ⊕ other`.
    pub fn inject_right(&self, _other: &FiniteVNAlgebra, y: &AlgebraElement) -> AlgebraElement {
        let mut blocks: Vec<CMat> = self.blocks.iter().map(|&d| CMat::zeros(d, d)).collect();
        blocks.extend(y.blocks().iter().cloned());
        AlgebraElement::from_blocks_unchecked(blocks)
    }

    /// Split an element of `self ⊕ other` into its two summands.
    pub fn project_sum(&self, z: &AlgebraElement) -> (AlgebraElement, AlgebraElement) {
        let k = self.blocks.len();
        let (a, b) = z.blocks().split_at(k);
        (AlgebraElement::from_blocks_unchecked(a.to_vec()), AlgebraElement::from_blocks_unchecked(b.to_vec()))
    }

    /// Compress to the central support of Ω: keep only the blocks whose
    /// minimal central projection does not annihilate Ω. Returns the reduced
    /// algebra (in its own frame coordinates, with the restricted Ω attached)
    /// and the isometry from the reduced ambient space into the original one.
    pub fn restrict_to_omega_support(&self) -> Result<(FiniteVNAlgebra, CMat, Vec<usize>)> {
        let omega = self.omega.as_ref().ok_or_else(|| Error::InvalidAlgebra("no omega attached".into()))?;
        let w = self.frame.adjoint() * omega;
        let off = self.offsets();
        let mut kept = Vec::new();
        for (k, (&d, &m)) in self.blocks.iter().zip(&self.multiplicities).enumerate() {
            let part = w.rows(off[k], d * m).norm();
            if part > SEPARATING_RANK_TOL {
                kept.push(k);
            }
        }
        let cols: Vec<usize> = kept
            .iter()
            .flat_map(|&k| off[k]..off[k] + self.blocks[k] * self.multiplicities[k])
            .collect();
        let iso = CMat::from_fn(self.ambient_dim(), cols.len(), |i, j| self.frame[(i, cols[j])]);
        let blocks: Vec<usize> = kept.iter().map(|&k| self.blocks[k]).collect();
        let mults: Vec<usize> = kept.iter().map(|&k| self.multiplicities[k]).collect();
        let mut reduced_omega = iso.adjoint() * omega;
        let nrm = reduced_omega.norm();
        reduced_omega /= c(nrm, 0.0);
        let reduced = FiniteVNAlgebra::with_multiplicities(&blocks, &mults)?.with_omega(reduced_omega)?;
        Ok((reduced, iso, kept))
    }

    /// Unital, *-preserving and isometric on matrix units.
    fn check_embedding(&self) -> Result<()> {
        let n = self.ambient_dim();
        let unit = self.to_ambient(&self.identity());
        if (unit - CMat::identity(n, n)).camax() > FRAME_TOL {
            return Err(Error::InvalidAlgebra("embedding is not unital".into()));
        }
        // Only a few generators: these are dense n×n products.
        for x in self.basis().into_iter().take(8) {
            let a = self.to_ambient(&x);
            let a_star = self.to_ambient(&x.adjoint());
            if (a.adjoint() - a_star).camax() > FRAME_TOL {
                return Err(Error::InvalidAlgebra("embedding is not *-preserving".into()));
            }
            if (linalg::op_norm(&a) - x.op_norm()).abs() > FRAME_TOL {
                return Err(Error::InvalidAlgebra("embedding is not isometric".into()));
            }
        }
        Ok(())
    }

    /// The *-algebra generated by a set of operators on `ℂ^n`, decomposed
    /// into blocks with an explicit frame.
    pub fn generated_by(generators: &[CMat], seed: u64) -> Result<FiniteVNAlgebra> {
        decompose::generated_algebra(generators, seed)
    }
}

impl PartialEq for FiniteVNAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
            && self.multiplicities == other.multiplicities
            && (self.frame.clone() - &other.frame).camax() == 0.0
    }
}

/// True iff `x = x*` within `tol` and the spectrum lies in `[−tol, 1 + tol]`.
pub fn is_positive_contraction(x: &AlgebraElement, tol: f64) -> bool {
    x.blocks().iter().all(|b| {
        if !linalg::is_hermitian(b, tol) {
            return false;
        }
        let (vals, _) = linalg::eigh(b);
        vals.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
    })
}

/// The four positive parts of a contraction.
#[derive(Clone, Debug)]
pub struct CanonicalParts {
    pub re_pos: AlgebraElement,
    pub re_neg: AlgebraElement,
    pub im_pos: AlgebraElement,
    pub im_neg: AlgebraElement,
}

impl CanonicalParts {
    pub fn recombine(&self) -> AlgebraElement {
        let re = &self.re_pos - &self.re_neg;
        let im = &self.im_pos - &self.im_neg;
        &re + &im.scale(linalg::I)
    }
}

/// `x = x₁₊ − x₁₋ + i(x₂₊ − x₂₋)` from the Hermitian real and imaginary parts
/// followed by the spectral positive/negative split.
pub fn canonical_decomposition(x: &AlgebraElement) -> Result<CanonicalParts> {
    let nrm = x.op_norm();
    if nrm > 1.0 + POSITIVITY_TOL {
        return Err(Error::NotContraction(nrm));
    }
    let re = x.real_part();
    let im = x.imag_part();
    let (re_pos, re_neg) = jordan(&re);
    let (im_pos, im_neg) = jordan(&im);
    Ok(CanonicalParts { re_pos, re_neg, im_pos, im_neg })
}

fn jordan(h: &AlgebraElement) -> (AlgebraElement, AlgebraElement) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for b in h.blocks() {
        if b.iter().all(|z| *z == ZERO) {
            pos.push(b.clone());
            neg.push(b.clone());
            continue;
        }
        pos.push(linalg::hermitian_fn(b, |l| c(l.max(0.0), 0.0)));
        neg.push(linalg::hermitian_fn(b, |l| c((-l).max(0.0), 0.0)));
    }
    (AlgebraElement::from_blocks_unchecked(pos), AlgebraElement::from_blocks_unchecked(neg))
}
