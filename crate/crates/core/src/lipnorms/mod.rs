//! Dual-Lip-norms on finite-dimensional algebras.
//!
//! Every norm here is a fixed norm of a complex-linear image of `x`, the
//! [`Feature`]. Bridges and Hausdorff scans work on features directly, so
//! a norm is evaluated once per net point and differences are cheap.

mod feature;

pub use feature::Feature;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, FiniteVNAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, I, ONE};
use crate::nets::Net;

/// Smallest singular value a kernel operator may have.
pub const KERNEL_INJECTIVITY_TOL: f64 = 1e-12;
/// Relative singular-value cut for the norm-property rank test.
pub const NORM_RANK_TOL: f64 = 1e-10;
pub const DEFAULT_EM_TERMS: usize = 16;

#[derive(Clone, Debug)]
pub enum NormKind {
    /// `‖T x Ω‖` with `T` mapping the ambient space into some host space.
    Kernel { t: CMat, omega: CVec },
    /// `Σ_{m,n} 2^{-m-n} |⟨ξ_m, x ξ_n⟩|`, `ξ` stored in frame coordinates.
    EffrosMarechal { vectors: Vec<CVec> },
    /// `max_k w_k ‖x_k‖`.
    WeightedEntry { weights: Vec<f64> },
    /// `max_i |⟨ξ_i, x⟩|` for the Hilbert–Schmidt pairing.
    Tabulated { functionals: Vec<AlgebraElement> },
    /// `max_{ij} L(a_ij)` on `M_2(M)`.
    Lifted { base: Box<DualLipNorm> },
}

#[derive(Clone, Debug)]
pub struct DualLipNorm {
    algebra: FiniteVNAlgebra,
    kind: NormKind,
}

/// Maximum of a norm over a ball net, with an additive bound on how far the
/// true maximum can lie above it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radius {
    pub value: f64,
    pub slack: f64,
    /// False when the slack rests on an empirical covering estimate.
    pub certified: bool,
}

impl Radius {
    pub fn upper(&self) -> f64 {
        self.value + self.slack
    }
}

impl DualLipNorm {
    pub fn kernel(algebra: &FiniteVNAlgebra, t: CMat) -> Result<Self> {
        let omega = algebra
            .omega()
            .cloned()
            .ok_or_else(|| Error::InvalidNorm("kernel norm needs an algebra with omega".into()))?;
        if t.ncols() != algebra.ambient_dim() {
            return Err(Error::InvalidNorm(format!(
                "kernel operator has {} columns, ambient dimension is {}",
                t.ncols(),
                algebra.ambient_dim()
            )));
        }
        let sv = linalg::singular_values(&t);
        let smin = if t.nrows() < t.ncols() { 0.0 } else { sv.last().copied().unwrap_or(0.0) };
        if smin <= KERNEL_INJECTIVITY_TOL {
            return Err(Error::NotInjective(smin));
        }
        log::debug!("kernel operator condition number {:e}", sv[0] / smin);
        Self::checked(algebra, NormKind::Kernel { t, omega })
    }

    /// Truncated Effros–Maréchal norm with `terms` unit vectors.
    pub fn effros_marechal(algebra: &FiniteVNAlgebra, terms: usize, seed: u64) -> Result<Self> {
        let vectors = em_vectors(algebra.ambient_dim(), terms, seed);
        Self::effros_marechal_with(algebra, vectors)
    }

    pub fn effros_marechal_with(algebra: &FiniteVNAlgebra, vectors: Vec<CVec>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidNorm("no vectors".into()));
        }
        if vectors.iter().any(|v| v.len() != algebra.ambient_dim()) {
            return Err(Error::InvalidNorm("vector length differs from ambient dimension".into()));
        }
        let w = algebra.frame().adjoint();
        let vectors = vectors.iter().map(|v| &w * v).collect();
        Self::checked(algebra, NormKind::EffrosMarechal { vectors })
    }

    pub fn weighted_entry(algebra: &FiniteVNAlgebra, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != algebra.block_dims().len() {
            return Err(Error::InvalidNorm(format!(
                "{} weights for {} blocks",
                weights.len(),
                algebra.block_dims().len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidNorm("weights must be positive".into()));
        }
        Ok(DualLipNorm { algebra: algebra.clone(), kind: NormKind::WeightedEntry { weights } })
    }

    /// The operator norm itself.
    pub fn operator(algebra: &FiniteVNAlgebra) -> Self {
        Self::weighted_entry(algebra, vec![1.0; algebra.block_dims().len()]).expect("unit weights")
    }

    pub fn tabulated(algebra: &FiniteVNAlgebra, functionals: Vec<AlgebraElement>) -> Result<Self> {
        if functionals.is_empty() {
            return Err(Error::InvalidNorm("no functionals".into()));
        }
        for f in &functionals {
            algebra.check(f)?;
        }
        Self::checked(algebra, NormKind::Tabulated { functionals })
    }

    fn checked(algebra: &FiniteVNAlgebra, kind: NormKind) -> Result<Self> {
        let norm = DualLipNorm { algebra: algebra.clone(), kind };
        let rank = norm.feature_rank();
        if rank < algebra.dim() {
            return Err(Error::DegenerateNorm { rank, dim: algebra.dim() });
        }
        Ok(norm)
    }

    /// Rank of the linear map `x ↦ feature(x)` on the matrix-unit basis.
    pub fn feature_rank(&self) -> usize {
        let cols: Vec<CVec> = self.algebra.basis().iter().map(|b| self.feature_unchecked(b).flatten()).collect();
        let m = CMat::from_columns(&cols);
        let sv = linalg::singular_values(&m);
        let top = sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|&&s| s > NORM_RANK_TOL * top.max(1e-300)).count()
    }

    pub fn algebra(&self) -> &FiniteVNAlgebra {
        &self.algebra
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NormKind::Kernel { .. } => "kernel",
            NormKind::EffrosMarechal { .. } => "effros_marechal",
            NormKind::WeightedEntry { .. } => "weighted_entry",
            NormKind::Tabulated { .. } => "tabulated",
            NormKind::Lifted { .. } => "lifted",
        }
    }

    pub fn is_operator_norm(&self) -> bool {
        matches!(&self.kind, NormKind::WeightedEntry { weights } if weights.iter().all(|&w| w == 1.0))
    }

    /// Kernel data `(T, Ω)`, if this is a kernel norm.
    pub fn kernel_data(&self) -> Option<(&CMat, &CVec)> {
        match &self.kind {
            NormKind::Kernel { t, omega } => Some((t, omega)),
            _ => None,
        }
    }

    pub fn eval(&self, x: &AlgebraElement) -> Result<f64> {
        self.algebra.check(x)?;
        Ok(self.value(x))
    }

    pub(crate) fn value(&self, x: &AlgebraElement) -> f64 {
        match &self.kind {
            NormKind::Lifted { base } => x.entries2().iter().map(|a| base.value(a)).fold(0.0, f64::max),
            NormKind::WeightedEntry { weights } => {
                x.blocks().iter().zip(weights).map(|(b, w)| w * linalg::op_norm(b)).fold(0.0, f64::max)
            }
            _ => self.feature_unchecked(x).norm(),
        }
    }

    pub fn feature(&self, x: &AlgebraElement) -> Result<Feature> {
        self.algebra.check(x)?;
        Ok(self.feature_unchecked(x))
    }

    pub(crate) fn feature_unchecked(&self, x: &AlgebraElement) -> Feature {
        match &self.kind {
            NormKind::Kernel { t, omega } => Feature::L2(t * self.algebra.apply(x, omega)),
            NormKind::EffrosMarechal { vectors } => {
                let images: Vec<CVec> = vectors.iter().map(|v| self.algebra.apply_in_frame(x, v)).collect();
                let j = vectors.len();
                let mut out = CVec::zeros(j * j);
                for (m, xi) in vectors.iter().enumerate() {
                    for (n, img) in images.iter().enumerate() {
                        let w = 0.5f64.powi((m + n + 2) as i32);
                        out[m * j + n] = xi.dotc(img) * c(w, 0.0);
                    }
                }
                Feature::L1(out)
            }
            NormKind::WeightedEntry { weights } => {
                Feature::Blocks(x.blocks().iter().zip(weights).map(|(b, &w)| b * c(w, 0.0)).collect())
            }
            NormKind::Tabulated { functionals } => {
                Feature::Sup(CVec::from_iterator(functionals.len(), functionals.iter().map(|f| f.pairing(x))))
            }
            NormKind::Lifted { base } => {
                let [a, b, cc, d] = x.entries2();
                Feature::Entries(Box::new([
                    base.feature_unchecked(&a),
                    base.feature_unchecked(&b),
                    base.feature_unchecked(&cc),
                    base.feature_unchecked(&d),
                ]))
            }
        }
    }

    /// The induced norm `max_{ij} L(a_ij)` on `M_2(M)`.
    pub fn lift2(&self) -> DualLipNorm {
        DualLipNorm { algebra: self.algebra.amplify2(), kind: NormKind::Lifted { base: Box::new(self.clone()) } }
    }

    /// A certified upper bound on `sup_{‖x‖ ≤ 1} L(x)`, i.e. on the radius.
    pub fn radius_bound(&self) -> f64 {
        match &self.kind {
            NormKind::Kernel { t, omega } => {
                if self.kernel_commutes() {
                    // T x Ω = x T Ω, so the supremum is attained at the unit.
                    (t * omega).norm()
                } else {
                    linalg::op_norm(t) * omega.norm()
                }
            }
            NormKind::EffrosMarechal { vectors } => {
                let s: f64 = vectors.iter().enumerate().map(|(m, v)| 0.5f64.powi(m as i32 + 1) * v.norm()).sum();
                s * s
            }
            NormKind::WeightedEntry { weights } => weights.iter().copied().fold(0.0, f64::max),
            NormKind::Tabulated { functionals } => functionals
                .iter()
                .map(|f| f.blocks().iter().map(linalg::trace_norm).sum::<f64>())
                .fold(0.0, f64::max),
            NormKind::Lifted { base } => base.radius_bound(),
        }
    }

    /// Whether a square kernel operator commutes with the represented algebra.
    fn kernel_commutes(&self) -> bool {
        let NormKind::Kernel { t, .. } = &self.kind else { return false };
        if !t.is_square() || self.algebra.dim() > 256 {
            return false;
        }
        let scale = t.camax().max(1e-300);
        self.algebra.basis().iter().all(|b| {
            let p = self.algebra.to_ambient(b);
            (t * &p - &p * t).camax() <= 1e-13 * scale
        })
    }

    /// Maximum of `L` over a net of the unit ball. The slack is the certified
    /// gap to [`radius_bound`](Self::radius_bound), tightened by
    /// `covering × bound` when the net carries an operator-norm covering
    /// estimate.
    pub fn radius(&self, ball: &Net) -> Result<Radius> {
        if ball.points().is_empty() {
            return Err(Error::EmptySet);
        }
        if ball.block_dims() != self.algebra.block_dims() {
            return Err(Error::ShapeMismatch {
                expected: self.algebra.block_dims().to_vec(),
                found: ball.block_dims().to_vec(),
            });
        }
        let value = ball.points().iter().map(|x| self.value(x)).fold(0.0, f64::max);
        let bound = self.radius_bound();
        let certified_slack = (bound - value).max(0.0);
        let empirical = ball
            .covering_estimate()
            .filter(|cov| cov.norm == crate::nets::OPERATOR_NORM_LABEL)
            .map(|cov| cov.value * bound);
        Ok(match empirical {
            Some(e) if e < certified_slack => Radius { value, slack: e, certified: false },
            _ => Radius { value, slack: certified_slack, certified: true },
        })
    }

    /// `max_{x ∈ net} |⟨ξ, x⟩|`: the dual norm of `ξ` estimated from below by
    /// a net of the L-unit ball.
    pub fn predual_norm(&self, xi: &AlgebraElement, dual_ball: &[AlgebraElement]) -> Result<f64> {
        self.algebra.check(xi)?;
        let mut best = 0.0f64;
        for x in dual_ball {
            self.algebra.check(x)?;
            best = best.max(xi.pairing(x).norm());
        }
        Ok(best)
    }
}

/// Unit vectors for the truncated Effros–Maréchal series: the standard basis,
/// then normalised `e_i ± e_j` and `e_i + i e_j`, then seeded random vectors.
pub fn em_vectors(n: usize, terms: usize, seed: u64) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::with_capacity(terms);
    let unit = |i: usize| {
        let mut v = CVec::zeros(n);
        v[i] = ONE;
        v
    };
    for i in 0..n {
        out.push(unit(i));
    }
    let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    'pairs: for i in 0..n {
        for j in (i + 1)..n {
            if out.len() >= terms {
                break 'pairs;
            }
            let phases: [C64; 3] = [ONE, -ONE, I];
            for ph in phases {
                out.push((unit(i) + unit(j) * ph) * h);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < terms {
        out.push(linalg::random_unit_vector(&mut rng, n));
    }
    out.truncate(terms);
    out
}
