use std::ops::{Add, Mul, Neg, Sub};

use crate::linalg::{self, c, CMat, C64};

/// An element of `⊕_k M_{d_k}`, one square block per summand.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub(crate) fn from_blocks_unchecked(blocks: Vec<CMat>) -> Self {
        debug_assert!(blocks.iter().all(|b| b.is_square()));
        AlgebraElement { blocks }
    }

    /// Build from square blocks; the shape itself defines membership.
    pub fn from_blocks(blocks: Vec<CMat>) -> Option<Self> {
        blocks.iter().all(|b| b.is_square()).then(|| AlgebraElement { blocks })
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub(crate) fn blocks_mut(&mut self) -> &mut [CMat] {
        &mut self.blocks
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    pub fn shape(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn scale(&self, z: C64) -> Self {
        AlgebraElement { blocks: self.blocks.iter().map(|b| b * z).collect() }
    }

    pub fn scale_real(&self, r: f64) -> Self {
        self.scale(c(r, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        AlgebraElement { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    /// Operator norm: the largest singular value over all blocks.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn amax(&self) -> f64 {
        self.blocks.iter().map(|b| b.camax()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|z| z.re == 0.0 && z.im == 0.0))
    }

    /// `(x + x*) / 2`.
    pub fn real_part(&self) -> Self {
        AlgebraElement { blocks: self.blocks.iter().map(linalg::hermitian_part).collect() }
    }

    /// `(x − x*) / 2i`.
    pub fn imag_part(&self) -> Self {
        AlgebraElement {
            blocks: self.blocks.iter().map(|b| (b - b.adjoint()) * c(0.0, -0.5)).collect(),
        }
    }

    /// Hilbert–Schmidt pairing `Σ_k tr(ξ_k* x_k)`.
    pub fn pairing(&self, x: &AlgebraElement) -> C64 {
        self.blocks.iter().zip(&x.blocks).map(|(a, b)| linalg::hs_inner(a, b)).sum()
    }

    /// Entries `(a11, a12, a21, a22)` of an element of `M_2(M)`. Requires
    /// every block to have even size.
    pub fn entries2(&self) -> [AlgebraElement; 4] {
        let mut out: [Vec<CMat>; 4] = Default::default();
        for b in &self.blocks {
            let d = b.nrows() / 2;
            debug_assert_eq!(2 * d, b.nrows());
            for i in 0..2 {
                for j in 0..2 {
                    out[2 * i + j].push(b.view((i * d, j * d), (d, d)).into_owned());
                }
            }
        }
        out.map(|blocks| AlgebraElement { blocks })
    }

    /// Assemble `[[a11, a12], [a21, a22]] ∈ M_2(M)`.
    pub fn from_entries2(entries: [&AlgebraElement; 4]) -> Self {
        let k = entries[0].blocks.len();
        let blocks = (0..k)
            .map(|b| {
                let d = entries[0].blocks[b].nrows();
                let mut m = CMat::zeros(2 * d, 2 * d);
                for i in 0..2 {
                    for j in 0..2 {
                        m.view_mut((i * d, j * d), (d, d)).copy_from(&entries[2 * i + j].blocks[b]);
                    }
                }
                m
            })
            .collect();
        AlgebraElement { blocks }
    }

    /// `diag(a, a)`.
    pub fn diag2(&self) -> Self {
        let z = self.scale_real(0.0);
        Self::from_entries2([self, &z, &z, self])
    }

    /// `e_ij ⊗ a`.
    pub fn unit2(&self, i: usize, j: usize) -> Self {
        let z = self.scale_real(0.0);
        let mut e = [&z, &z, &z, &z];
        e[2 * i + j] = self;
        Self::from_entries2(e)
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect() }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().map(|b| -b).collect() }
    }
}
