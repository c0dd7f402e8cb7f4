//! Bridge seminorms on `M ⊕ N` and the two-sided estimate of the dual
//! quantum Gromov–Hausdorff distance.
//!
//! The distance is an infimum over all bridges of the Hausdorff distance
//! between the positive parts of the unit balls of `M_2(M)` and `M_2(N)`.
//! Here the infimum runs over an explicit candidate family and the balls are
//! replaced by nets, so each candidate gives `H_net + s_M + s_N`, where `s_*`
//! are covering radii of the nets. Kernel bridges on one algebra also carry a
//! net-free bound. The lower end comes from the radii alone.

mod bridge;
mod iso;
mod optimize;

pub use bridge::{kernel_gap_certified, BridgeKind, BridgeSpec, Prepared, CERT_ROUNDING, MATCH_TOL};
pub use iso::BlockIsomorphism;
pub use optimize::{optimize_coupler, CouplerSearch, DEFAULT_COUPLER_BUDGET};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, FiniteVNAlgebra};
use crate::error::{Error, Result};
use crate::lipnorms::{DualLipNorm, Radius};
use crate::nets::{build_net, estimate_covering, Net, NetTarget};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hausdorff {
    pub value: f64,
    /// `max_a min_b d(a, b)`.
    pub forward: f64,
    /// `max_b min_a d(a, b)`.
    pub backward: f64,
}

fn argmin_first(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Two-sided Hausdorff distance from a full distance matrix, `d[i][j]`
/// between `a_i` and `b_j`.
pub fn hausdorff_matrix(d: &[Vec<f64>]) -> Result<Hausdorff> {
    if d.is_empty() || d[0].is_empty() {
        return Err(Error::EmptySet);
    }
    let forward = d.iter().map(|row| argmin_first(row.iter().copied()).1).fold(0.0, f64::max);
    let backward = (0..d[0].len())
        .map(|j| argmin_first(d.iter().map(|row| row[j])).1)
        .fold(0.0, f64::max);
    Ok(Hausdorff { value: forward.max(backward), forward, backward })
}

pub fn hausdorff<A: Sync, B: Sync>(a: &[A], b: &[B], d: impl Fn(&A, &B) -> f64 + Sync) -> Result<Hausdorff> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let m: Vec<Vec<f64>> = a.par_iter().map(|x| b.iter().map(|y| d(x, y)).collect()).collect();
    hausdorff_matrix(&m)
}

fn check_net(net: &Net, norm: &DualLipNorm) -> Result<()> {
    let dims = norm.algebra().amplify2().block_dims().to_vec();
    if net.block_dims() != dims.as_slice() {
        return Err(Error::ShapeMismatch { expected: dims, found: net.block_dims().to_vec() });
    }
    Ok(())
}

/// `J_2(X_i, −Y_j) = max_{kl} J(x_kl, −y_kl)` for all pairs of points of two
/// nets of `M_2(M)` and `M_2(N)`.
pub fn bridge_pair_matrix(j: &BridgeSpec, xs: &Net, ys: &Net) -> Result<Vec<Vec<f64>>> {
    check_net(xs, j.left())?;
    check_net(ys, j.right())?;
    let left: Vec<Vec<Prepared>> =
        xs.points().par_iter().map(|x| x.entries2().iter().map(|e| j.prepare_left(e)).collect()).collect();
    let right: Vec<Vec<Prepared>> = ys
        .points()
        .par_iter()
        .map(|y| y.entries2().iter().map(|e| j.prepare_right(&e.scale_real(-1.0))).collect())
        .collect();
    Ok(left
        .par_iter()
        .map(|l| {
            right
                .iter()
                .map(|r| l.iter().zip(r).map(|(a, b)| j.combine(a, b)).fold(0.0, f64::max))
                .collect()
        })
        .collect())
}

pub fn bridge_hausdorff(j: &BridgeSpec, xs: &Net, ys: &Net) -> Result<Hausdorff> {
    hausdorff_matrix(&bridge_pair_matrix(j, xs, ys)?)
}

/// `max_{x ∈ net} J(x, −x)`: a lower estimate of `sup_{‖x‖=1} J(x, −x)`,
/// which bounds the distance when both norms live on one algebra.
pub fn bridge_diameter_bound(j: &BridgeSpec, sphere_net: &Net) -> Result<f64> {
    let (a, b) = (j.left().algebra(), j.right().algebra());
    if a.block_dims() != b.block_dims() || a.ambient_dim() != b.ambient_dim() {
        return Err(Error::InvalidBridge("diameter needs both norms on one algebra".into()));
    }
    if sphere_net.block_dims() != a.block_dims() {
        return Err(Error::ShapeMismatch { expected: a.block_dims().to_vec(), found: sphere_net.block_dims().to_vec() });
    }
    Ok(sphere_net
        .points()
        .par_iter()
        .map(|x| j.combine(&j.prepare_left(x), &j.prepare_right(&x.scale_real(-1.0))))
        .reduce(|| 0.0, f64::max))
}

/// Nets and per-side slack shared by every candidate bridge.
#[derive(Clone, Debug)]
pub struct DistanceNets {
    pub x_m: Net,
    pub x_n: Net,
    /// Covering radii of `x_m` and `x_n` in the lifted norms.
    pub slack_m: f64,
    pub slack_n: f64,
    pub radius_m: Radius,
    pub radius_n: Radius,
}

impl DistanceNets {
    /// Fresh nets of `count` points for both sides. Both sides use the same
    /// seed, so equal algebras get equal nets.
    pub fn build(lm: &DualLipNorm, ln: &DualLipNorm, count: usize, probes: usize, seed: u64) -> Result<Self> {
        let x_m = build_net(lm.algebra(), NetTarget::PositiveUnitBall2x2, count, seed)?;
        let x_n = build_net(ln.algebra(), NetTarget::PositiveUnitBall2x2, count, seed)?;
        Self::with_nets(lm, ln, x_m, x_n, count, probes, seed)
    }

    pub fn with_nets(
        lm: &DualLipNorm,
        ln: &DualLipNorm,
        x_m: Net,
        x_n: Net,
        ball_count: usize,
        probes: usize,
        seed: u64,
    ) -> Result<Self> {
        check_net(&x_m, lm)?;
        check_net(&x_n, ln)?;
        let slack_m = estimate_covering(&x_m, &lm.lift2(), probes, seed)?.value;
        let slack_n = estimate_covering(&x_n, &ln.lift2(), probes, seed.wrapping_add(1))?.value;
        let radius_m = radius_with_net(lm, ball_count, probes, seed)?;
        let radius_n = radius_with_net(ln, ball_count, probes, seed)?;
        Ok(DistanceNets { x_m, x_n, slack_m, slack_n, radius_m, radius_n })
    }

    pub fn max_slack(&self) -> f64 {
        self.slack_m.max(self.slack_n)
    }
}

fn radius_with_net(l: &DualLipNorm, count: usize, probes: usize, seed: u64) -> Result<Radius> {
    let ball = build_net(l.algebra(), NetTarget::UnitBall, count, seed)?;
    let cov = estimate_covering(&ball, &DualLipNorm::operator(l.algebra()), probes, seed)?;
    l.radius(&ball.with_covering(cov))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceEstimate {
    pub lower: f64,
    pub upper: f64,
    pub bridge: String,
    pub slack: Slack,
    pub radii: [f64; 2],
    /// Upper bound contributed by each candidate, in input order.
    #[serde(skip)]
    pub candidates: Vec<(String, f64)>,
}

/// Upper bound from one candidate: the net Hausdorff distance plus both net
/// slacks, or the certified diameter when that is smaller.
pub fn candidate_upper(j: &BridgeSpec, nets: &DistanceNets) -> Result<f64> {
    let h = bridge_hausdorff(j, &nets.x_m, &nets.x_n)?.value;
    let net_bound = h + nets.slack_m + nets.slack_n;
    Ok(match j.certified_diameter() {
        Some(c) => net_bound.min(c),
        None => net_bound,
    })
}

/// Radius floor `max(0, R_M − R_N − s_N, R_N − R_M − s_M)` with `s` the radius
/// slacks.
pub fn radius_lower(rm: &Radius, rn: &Radius) -> f64 {
    (rm.value - rn.upper()).max(rn.value - rm.upper()).max(0.0)
}

pub fn estimate_distance(
    lm: &DualLipNorm,
    ln: &DualLipNorm,
    candidates: &[BridgeSpec],
    nets: &DistanceNets,
) -> Result<DistanceEstimate> {
    let mut scored = Vec::new();
    for j in candidates {
        if j.left().algebra().block_dims() != lm.algebra().block_dims()
            || j.right().algebra().block_dims() != ln.algebra().block_dims()
        {
            warn!("skipping {} bridge: algebras do not match the pair", j.name());
            continue;
        }
        scored.push((j.name(), candidate_upper(j, nets)?));
    }
    if scored.is_empty() {
        return Err(Error::NoBridge);
    }
    let (best, upper) = scored[argmin_first(scored.iter().map(|s| s.1)).0].clone();
    let mut lower = radius_lower(&nets.radius_m, &nets.radius_n);
    if upper < lower {
        warn!("upper bound {upper} fell below radius floor {lower}; clamping");
        lower = upper;
    }
    Ok(DistanceEstimate {
        lower,
        upper,
        bridge: best,
        slack: Slack { m: nets.slack_m, n: nets.slack_n },
        radii: [nets.radius_m.value, nets.radius_n.value],
        candidates: scored,
    })
}

/// Hausdorff distance between two nets of positive contractions under an
/// Effros–Maréchal norm on the common ambient matrix algebra.
pub fn em_plus_distance(
    m: &FiniteVNAlgebra,
    m_net: &Net,
    n: &FiniteVNAlgebra,
    n_net: &Net,
    em: &DualLipNorm,
) -> Result<f64> {
    let amb = em.algebra();
    if m.ambient_dim() != n.ambient_dim() || amb.block_dims() != [m.ambient_dim()] {
        return Err(Error::ShapeMismatch { expected: vec![m.ambient_dim()], found: amb.block_dims().to_vec() });
    }
    for (alg, net) in [(m, m_net), (n, n_net)] {
        if net.block_dims() != alg.block_dims() {
            return Err(Error::ShapeMismatch { expected: alg.block_dims().to_vec(), found: net.block_dims().to_vec() });
        }
    }
    let lift = |alg: &FiniteVNAlgebra, net: &Net| -> Vec<_> {
        net.points()
            .par_iter()
            .map(|x| em.feature_unchecked(&AlgebraElement::from_blocks_unchecked(vec![alg.to_ambient(x)])))
            .collect()
    };
    let (fm, fn_) = (lift(m, m_net), lift(n, n_net));
    Ok(hausdorff(&fm, &fn_, |a, b| a.distance(b))?.value)
}

#[cfg(test)]
mod tests;
