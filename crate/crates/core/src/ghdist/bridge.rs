use crate::algebra::{AlgebraElement, FiniteVNAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::lipnorms::{DualLipNorm, Feature};

use super::iso::BlockIsomorphism;

/// Relative outward rounding applied to certified operator-norm bounds.
pub const CERT_ROUNDING: f64 = 1e-13;
/// Tolerance for the restriction and junction checks.
pub const MATCH_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum BridgeKind {
    /// `L_M(x) + L_N(y)`.
    Sum,
    /// `‖T x Ω + S y Ω‖`.
    Kernel,
    /// `L_N(ψ(x) + y)`.
    Iso(BlockIsomorphism),
    /// `‖U T_M x Ω_M + T_N y Ω_N‖` with `U` an isometry between host spaces.
    Coupler(CMat),
    /// `min_z J12(x, −z) + J23(z, y)` over a finite middle set.
    Composed(Box<Composed>),
}

#[derive(Clone, Debug)]
pub struct Composed {
    pub first: BridgeSpec,
    pub second: BridgeSpec,
    pub middle: Vec<AlgebraElement>,
    first_right: Vec<Prepared>,
    second_left: Vec<Prepared>,
}

/// A seminorm on `M ⊕ N` restricting to the two given norms.
#[derive(Clone, Debug)]
pub struct BridgeSpec {
    left: DualLipNorm,
    right: DualLipNorm,
    kind: BridgeKind,
}

/// One side of a bridge evaluated on an element; [`BridgeSpec::combine`]
/// turns a left and a right value into `J(x, y)`.
#[derive(Clone, Debug)]
pub enum Prepared {
    Scalar(f64),
    Feature(Feature),
    Profile(Vec<f64>),
}

fn same_algebra(a: &FiniteVNAlgebra, b: &FiniteVNAlgebra) -> bool {
    a == b
        && match (a.omega(), b.omega()) {
            (Some(x), Some(y)) => (x - y).camax() == 0.0,
            (None, None) => true,
            _ => false,
        }
}

impl BridgeSpec {
    pub fn sum(left: &DualLipNorm, right: &DualLipNorm) -> BridgeSpec {
        BridgeSpec { left: left.clone(), right: right.clone(), kind: BridgeKind::Sum }
    }

    /// Both norms must be kernel norms on one algebra with one vector and
    /// kernel operators into the same host space.
    pub fn kernel(left: &DualLipNorm, right: &DualLipNorm) -> Result<BridgeSpec> {
        let (Some((t, _)), Some((s, _))) = (left.kernel_data(), right.kernel_data()) else {
            return Err(Error::InvalidBridge("kernel bridge needs two kernel norms".into()));
        };
        if !same_algebra(left.algebra(), right.algebra()) {
            return Err(Error::InvalidBridge("kernel norms live on different algebras or vectors".into()));
        }
        if t.shape() != s.shape() {
            return Err(Error::InvalidBridge(format!("kernel shapes {:?} and {:?} differ", t.shape(), s.shape())));
        }
        Ok(BridgeSpec { left: left.clone(), right: right.clone(), kind: BridgeKind::Kernel })
    }

    /// `ψ` must be a *-isomorphism carrying `L_M` onto `L_N`.
    pub fn iso(psi: BlockIsomorphism, left: &DualLipNorm, right: &DualLipNorm) -> Result<BridgeSpec> {
        psi.validate(left.algebra(), right.algebra())?;
        for b in left.algebra().basis() {
            let lm = left.value(&b);
            let ln = right.value(&psi.apply(&b));
            if (lm - ln).abs() > MATCH_TOL * lm.max(1.0) {
                return Err(Error::NotIsomorphism(format!("norm not preserved on a matrix unit: {lm} vs {ln}")));
            }
        }
        Ok(BridgeSpec { left: left.clone(), right: right.clone(), kind: BridgeKind::Iso(psi) })
    }

    pub fn coupler(u: CMat, left: &DualLipNorm, right: &DualLipNorm) -> Result<BridgeSpec> {
        let (Some((t, _)), Some((s, _))) = (left.kernel_data(), right.kernel_data()) else {
            return Err(Error::InvalidBridge("coupler bridge needs two kernel norms".into()));
        };
        if u.ncols() != t.nrows() || u.nrows() != s.nrows() {
            return Err(Error::InvalidBridge(format!(
                "coupler is {}x{}, hosts are {} and {}",
                u.nrows(),
                u.ncols(),
                t.nrows(),
                s.nrows()
            )));
        }
        let defect = linalg::isometry_defect(&u);
        if defect > MATCH_TOL {
            return Err(Error::NotIsometry(defect));
        }
        Ok(BridgeSpec { left: left.clone(), right: right.clone(), kind: BridgeKind::Coupler(u) })
    }

    /// Compose `J12` on `M1 ⊕ M2` with `J23` on `M2 ⊕ M3`. Including `0` in
    /// `middle` keeps both restrictions exact.
    pub fn compose(first: &BridgeSpec, second: &BridgeSpec, middle: Vec<AlgebraElement>) -> Result<BridgeSpec> {
        let a = first.right.algebra();
        let b = second.left.algebra();
        if a.block_dims() != b.block_dims() {
            return Err(Error::InvalidBridge("junction algebras differ".into()));
        }
        for x in a.basis() {
            let (p, q) = (first.right.value(&x), second.left.value(&x));
            if (p - q).abs() > MATCH_TOL * p.max(1.0) {
                return Err(Error::InvalidBridge(format!("junction norms differ: {p} vs {q}")));
            }
        }
        if middle.is_empty() {
            return Err(Error::EmptySet);
        }
        for z in &middle {
            a.check(z)?;
        }
        let first_right = middle.iter().map(|z| first.prepare_right(&z.scale_real(-1.0))).collect();
        let second_left = middle.iter().map(|z| second.prepare_left(z)).collect();
        Ok(BridgeSpec {
            left: first.left.clone(),
            right: second.right.clone(),
            kind: BridgeKind::Composed(Box::new(Composed {
                first: first.clone(),
                second: second.clone(),
                middle,
                first_right,
                second_left,
            })),
        })
    }

    pub fn left(&self) -> &DualLipNorm {
        &self.left
    }

    pub fn right(&self) -> &DualLipNorm {
        &self.right
    }

    pub fn kind(&self) -> &BridgeKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            BridgeKind::Sum => "sum".into(),
            BridgeKind::Kernel => "kernel".into(),
            BridgeKind::Iso(_) => "iso".into(),
            BridgeKind::Coupler(_) => "coupler".into(),
            BridgeKind::Composed(c) => format!("composed({},{})", c.first.name(), c.second.name()),
        }
    }

    pub fn prepare_left(&self, x: &AlgebraElement) -> Prepared {
        match &self.kind {
            BridgeKind::Sum => Prepared::Scalar(self.left.value(x)),
            BridgeKind::Kernel => Prepared::Feature(self.left.feature_unchecked(x)),
            BridgeKind::Iso(psi) => Prepared::Feature(self.right.feature_unchecked(&psi.apply(x))),
            BridgeKind::Coupler(u) => Prepared::Feature(self.left.feature_unchecked(x).map_l2(u)),
            BridgeKind::Composed(c) => {
                let l = c.first.prepare_left(x);
                Prepared::Profile(c.first_right.iter().map(|r| c.first.combine(&l, r)).collect())
            }
        }
    }

    pub fn prepare_right(&self, y: &AlgebraElement) -> Prepared {
        match &self.kind {
            BridgeKind::Sum => Prepared::Scalar(self.right.value(y)),
            BridgeKind::Kernel | BridgeKind::Iso(_) | BridgeKind::Coupler(_) => {
                Prepared::Feature(self.right.feature_unchecked(y))
            }
            BridgeKind::Composed(c) => {
                let r = c.second.prepare_right(y);
                Prepared::Profile(c.second_left.iter().map(|l| c.second.combine(l, &r)).collect())
            }
        }
    }

    pub fn combine(&self, left: &Prepared, right: &Prepared) -> f64 {
        match (left, right) {
            (Prepared::Scalar(a), Prepared::Scalar(b)) => a + b,
            (Prepared::Feature(a), Prepared::Feature(b)) => a.norm_of_sum(b),
            (Prepared::Profile(a), Prepared::Profile(b)) => {
                a.iter().zip(b).map(|(p, q)| p + q).fold(f64::INFINITY, f64::min)
            }
            _ => unreachable!("both sides of a bridge prepare the same shape"),
        }
    }

    /// `J(x, y)`.
    pub fn eval(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
        self.left.algebra().check(x)?;
        self.right.algebra().check(y)?;
        Ok(self.combine(&self.prepare_left(x), &self.prepare_right(y)))
    }

    /// A net-free bound on `sup_{‖x‖ ≤ 1} J(x, −x)` when one is available:
    /// `‖T − S‖·‖Ω‖` for kernel bridges, `‖U T − S‖·‖Ω‖` for couplers on one
    /// algebra.
    pub fn certified_diameter(&self) -> Option<f64> {
        match &self.kind {
            BridgeKind::Kernel => {
                let (t, omega) = self.left.kernel_data()?;
                let (s, _) = self.right.kernel_data()?;
                kernel_gap_certified(t, s, omega.norm()).ok()
            }
            BridgeKind::Coupler(u) if same_algebra(self.left.algebra(), self.right.algebra()) => {
                let (t, omega) = self.left.kernel_data()?;
                let (s, _) = self.right.kernel_data()?;
                kernel_gap_certified(&(u * t), s, omega.norm()).ok()
            }
            _ => None,
        }
    }
}

/// `‖T − S‖_op · ‖Ω‖`, rounded outward.
pub fn kernel_gap_certified(t: &CMat, s: &CMat, omega_norm: f64) -> Result<f64> {
    if t.shape() != s.shape() {
        return Err(Error::ShapeMismatch { expected: vec![t.nrows(), t.ncols()], found: vec![s.nrows(), s.ncols()] });
    }
    Ok(linalg::op_norm(&(t - s)) * omega_norm * (1.0 + CERT_ROUNDING))
}
