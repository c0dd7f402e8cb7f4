//! Finite nets of unit balls, unit spheres and positive unit balls.
//!
//! Points are drawn from a single seeded stream after a deterministic prefix
//! of extremal points, so a net with more points always contains every net
//! with fewer points for the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::algebra::{is_positive_contraction, AlgebraElement, FiniteVNAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::lipnorms::DualLipNorm;

pub const MEMBERSHIP_TOL: f64 = 1e-9;
pub const DEFAULT_COUNT: usize = 512;
/// Label of covering estimates measured in the operator norm.
pub const OPERATOR_NORM_LABEL: &str = "operator";
/// Offset of the probe stream relative to the net seed.
const PROBE_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetTarget {
    /// Positive contractions in `M_2(M)`.
    #[serde(rename = "positive_unit_ball_2x2")]
    PositiveUnitBall2x2,
    /// Positive contractions in `M`.
    #[serde(rename = "positive_unit_ball")]
    PositiveUnitBall,
    #[serde(rename = "unit_ball")]
    UnitBall,
    #[serde(rename = "unit_sphere")]
    UnitSphere,
}

impl NetTarget {
    pub fn name(self) -> &'static str {
        match self {
            NetTarget::PositiveUnitBall2x2 => "positive_unit_ball_2x2",
            NetTarget::PositiveUnitBall => "positive_unit_ball",
            NetTarget::UnitBall => "unit_ball",
            NetTarget::UnitSphere => "unit_sphere",
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, NetTarget::PositiveUnitBall2x2 | NetTarget::PositiveUnitBall)
    }

    /// Block sizes of the points for a net over `algebra`.
    pub fn point_dims(self, algebra: &FiniteVNAlgebra) -> Vec<usize> {
        match self {
            NetTarget::PositiveUnitBall2x2 => algebra.block_dims().iter().map(|d| 2 * d).collect(),
            _ => algebra.block_dims().to_vec(),
        }
    }

    pub fn contains(self, x: &AlgebraElement, tol: f64) -> bool {
        match self {
            NetTarget::PositiveUnitBall2x2 | NetTarget::PositiveUnitBall => is_positive_contraction(x, tol),
            NetTarget::UnitBall => x.op_norm() <= 1.0 + tol,
            NetTarget::UnitSphere => (x.op_norm() - 1.0).abs() <= tol,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, dims: &[usize], rng: &mut R) -> AlgebraElement {
        match self {
            NetTarget::PositiveUnitBall2x2 | NetTarget::PositiveUnitBall => sample_positive_contraction(dims, rng),
            NetTarget::UnitBall => {
                let r: f64 = rng.random();
                sample_sphere(dims, rng).scale_real(r)
            }
            NetTarget::UnitSphere => sample_sphere(dims, rng),
        }
    }

    fn extremals(self, dims: &[usize]) -> Vec<AlgebraElement> {
        let zero = AlgebraElement::from_blocks_unchecked(dims.iter().map(|&d| CMat::zeros(d, d)).collect());
        let unit = AlgebraElement::from_blocks_unchecked(dims.iter().map(|&d| CMat::identity(d, d)).collect());
        let mut out = match self {
            NetTarget::UnitSphere => vec![unit],
            _ => vec![zero.clone(), unit],
        };
        if self.is_positive() {
            for (k, &d) in dims.iter().enumerate() {
                for i in 0..d {
                    let mut p = zero.clone();
                    p.blocks_mut()[k][(i, i)] = c(1.0, 0.0);
                    out.push(p);
                }
            }
        }
        out
    }
}

impl std::str::FromStr for NetTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidArgument(format!("unknown net target {s:?}")))
    }
}

/// Gaussian Hermitian matrix per block with its spectrum pushed through the
/// standard normal CDF. For `dims = [1]` the result is uniform on `[0, 1]`.
pub fn sample_positive_contraction<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> AlgebraElement {
    let phi = Normal::standard();
    let blocks = dims
        .iter()
        .map(|&d| {
            let h = linalg::gue(rng, d);
            linalg::hermitian_part(&linalg::hermitian_fn(&h, |l| c(phi.cdf(l), 0.0)))
        })
        .collect();
    AlgebraElement::from_blocks_unchecked(blocks)
}

fn sample_sphere<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> AlgebraElement {
    loop {
        let x = AlgebraElement::from_blocks_unchecked(dims.iter().map(|&d| linalg::ginibre(rng, d, d)).collect());
        let n = x.op_norm();
        if n > 1e-12 {
            return x.scale_real(1.0 / n);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoveringMethod {
    Certified,
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    pub value: f64,
    pub method: CoveringMethod,
    /// Which norm the distances were measured in.
    #[serde(default = "operator_label")]
    pub norm: String,
}

fn operator_label() -> String {
    OPERATOR_NORM_LABEL.to_string()
}

#[derive(Clone, Debug)]
pub struct Net {
    target: NetTarget,
    seed: u64,
    dims: Vec<usize>,
    points: Vec<AlgebraElement>,
    covering: Option<CoveringEstimate>,
}

/// `count` points: the extremal prefix, then seeded random samples.
pub fn build_net(algebra: &FiniteVNAlgebra, target: NetTarget, count: usize, seed: u64) -> Result<Net> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!("net count must be at least 2, got {count}")));
    }
    let dims = target.point_dims(algebra);
    let mut points = target.extremals(&dims);
    points.truncate(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while points.len() < count {
        points.push(target.sample(&dims, &mut rng));
    }
    Ok(Net { target, seed, dims, points, covering: None })
}

/// `max_probe min_point L(probe − point)` over probes from the target's own
/// sampling distribution. A lower estimate of the true covering radius.
pub fn estimate_covering(net: &Net, norm: &DualLipNorm, probes: usize, seed: u64) -> Result<CoveringEstimate> {
    if probes == 0 {
        return Err(Error::InvalidArgument("at least one probe is required".into()));
    }
    if norm.algebra().block_dims() != net.dims.as_slice() {
        return Err(Error::ShapeMismatch { expected: norm.algebra().block_dims().to_vec(), found: net.dims.clone() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ PROBE_STREAM);
    let samples: Vec<AlgebraElement> = (0..probes).map(|_| net.target.sample(&net.dims, &mut rng)).collect();
    covering_against(net, norm, &samples)
}

/// Covering estimate against explicit probe points.
pub fn covering_against(net: &Net, norm: &DualLipNorm, samples: &[AlgebraElement]) -> Result<CoveringEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("at least one probe is required".into()));
    }
    for s in samples {
        norm.algebra().check(s)?;
    }
    let feats: Vec<_> = net.points.par_iter().map(|p| norm.feature_unchecked(p)).collect();
    let value = samples
        .par_iter()
        .map(|s| {
            let f = norm.feature_unchecked(s);
            feats.iter().map(|g| f.distance(g)).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    let label = if norm.is_operator_norm() { OPERATOR_NORM_LABEL.to_string() } else { norm.kind_name().to_string() };
    Ok(CoveringEstimate { value, method: CoveringMethod::Empirical, norm: label })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetFile {
    target: NetTarget,
    seed: u64,
    blocks: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    covering_estimate: Option<CoveringEstimate>,
}

impl Net {
    /// A net from explicit points, each checked against the target.
    pub fn from_points(target: NetTarget, seed: u64, dims: Vec<usize>, points: Vec<AlgebraElement>) -> Result<Net> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        for (i, p) in points.iter().enumerate() {
            if p.shape() != dims {
                return Err(Error::ShapeMismatch { expected: dims, found: p.shape() });
            }
            if !target.contains(p, MEMBERSHIP_TOL) {
                return Err(Error::Net(format!("point {i} is not in the {} target", target.name())));
            }
        }
        Ok(Net { target, seed, dims, points, covering: None })
    }

    pub fn target(&self) -> NetTarget {
        self.target
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn points(&self) -> &[AlgebraElement] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn covering_estimate(&self) -> Option<&CoveringEstimate> {
        self.covering.as_ref()
    }

    pub fn with_covering(mut self, est: CoveringEstimate) -> Self {
        self.covering = Some(est);
        self
    }

    /// Image of the net under a map that preserves the target set.
    /// The first `k` points; the covering estimate is dropped.
    pub fn prefix(&self, k: usize) -> Net {
        let k = k.clamp(1, self.points.len());
        Net { target: self.target, seed: self.seed, dims: self.dims.clone(), points: self.points[..k].to_vec(), covering: None }
    }

    pub fn mapped(&self, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> Net {
        let points: Vec<AlgebraElement> = self.points.iter().map(f).collect();
        let dims = points.first().map(|p| p.shape()).unwrap_or_default();
        Net { target: self.target, seed: self.seed, dims, points, covering: None }
    }

    /// Exact covering radius in `|·|` for a net of real points of `[0, 1]`
    /// (one `1×1` block, positive-ball target).
    pub fn certified_interval_covering(&self) -> Option<f64> {
        if self.dims != [1] || self.target != NetTarget::PositiveUnitBall {
            return None;
        }
        let mut t: Vec<f64> = self.points.iter().map(|p| p.blocks()[0][(0, 0)].re).collect();
        t.sort_by(f64::total_cmp);
        let mut r = t[0].max(1.0 - t[t.len() - 1]);
        for w in t.windows(2) {
            r = r.max((w[1] - w[0]) / 2.0);
        }
        Some(r)
    }

    pub fn to_json(&self) -> Result<String> {
        let blocks = self
            .points
            .iter()
            .map(|p| {
                p.blocks()
                    .iter()
                    .map(|b| {
                        let d = b.nrows();
                        (0..d * d).map(|k| [b[(k / d, k % d)].re, b[(k / d, k % d)].im]).collect()
                    })
                    .collect()
            })
            .collect();
        let file = NetFile { target: self.target, seed: self.seed, blocks, covering_estimate: self.covering.clone() };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Net> {
        let file: NetFile = serde_json::from_str(s)?;
        let mut points = Vec::with_capacity(file.blocks.len());
        for p in &file.blocks {
            let mut blocks = Vec::with_capacity(p.len());
            for b in p {
                let d = (b.len() as f64).sqrt().round() as usize;
                if d * d != b.len() {
                    return Err(Error::Net(format!("block with {} entries is not square", b.len())));
                }
                blocks.push(CMat::from_fn(d, d, |i, j| c(b[i * d + j][0], b[i * d + j][1])));
            }
            points.push(AlgebraElement::from_blocks_unchecked(blocks));
        }
        let dims = points.first().map(|p| p.shape()).ok_or(Error::EmptySet)?;
        let mut net = Net::from_points(file.target, file.seed, dims, points)?;
        net.covering = file.covering_estimate;
        Ok(net)
    }
}

#[cfg(test)]
mod tests;
