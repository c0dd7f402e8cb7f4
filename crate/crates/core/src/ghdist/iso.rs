use crate::algebra::{AlgebraElement, FiniteVNAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

const UNITARY_TOL: f64 = 1e-10;

/// A *-isomorphism between block algebras: block `k` of the source goes to
/// block `perm[k]` of the target, conjugated by `unitaries[k]`.
#[derive(Clone, Debug)]
pub struct BlockIsomorphism {
    perm: Vec<usize>,
    unitaries: Vec<CMat>,
}

impl BlockIsomorphism {
    pub fn new(perm: Vec<usize>, unitaries: Vec<CMat>) -> Self {
        BlockIsomorphism { perm, unitaries }
    }

    pub fn identity(alg: &FiniteVNAlgebra) -> Self {
        let k = alg.block_dims().len();
        BlockIsomorphism { perm: (0..k).collect(), unitaries: alg.block_dims().iter().map(|&d| CMat::identity(d, d)).collect() }
    }

    /// `x ↦ u x u*` for a unitary `u` of the algebra.
    pub fn inner(u: &AlgebraElement) -> Self {
        BlockIsomorphism { perm: (0..u.blocks().len()).collect(), unitaries: u.blocks().to_vec() }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn unitaries(&self) -> &[CMat] {
        &self.unitaries
    }

    pub fn validate(&self, source: &FiniteVNAlgebra, target: &FiniteVNAlgebra) -> Result<()> {
        let (sd, td) = (source.block_dims(), target.block_dims());
        if self.perm.len() != sd.len() || sd.len() != td.len() || self.unitaries.len() != sd.len() {
            return Err(Error::NotIsomorphism("block counts differ".into()));
        }
        let mut seen = vec![false; td.len()];
        for (k, &p) in self.perm.iter().enumerate() {
            if p >= td.len() || seen[p] {
                return Err(Error::NotIsomorphism("block map is not a permutation".into()));
            }
            seen[p] = true;
            if td[p] != sd[k] || self.unitaries[k].shape() != (sd[k], sd[k]) {
                return Err(Error::NotIsomorphism(format!("block {k} has size {} but maps to size {}", sd[k], td[p])));
            }
            let defect = linalg::isometry_defect(&self.unitaries[k]);
            if defect > UNITARY_TOL {
                return Err(Error::NotIsomorphism(format!("block {k} conjugation is not unitary ({defect:e})")));
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut blocks: Vec<CMat> = vec![CMat::zeros(0, 0); self.perm.len()];
        for (k, b) in x.blocks().iter().enumerate() {
            let u = &self.unitaries[k];
            blocks[self.perm[k]] = u * b * u.adjoint();
        }
        AlgebraElement::from_blocks_unchecked(blocks)
    }

    /// The same map on `M_2(M)`: `u ↦ diag(u, u)` blockwise.
    pub fn amplify2(&self) -> Self {
        let unitaries = self
            .unitaries
            .iter()
            .map(|u| linalg::kron(&CMat::identity(2, 2), u))
            .collect();
        BlockIsomorphism { perm: self.perm.clone(), unitaries }
    }
}
