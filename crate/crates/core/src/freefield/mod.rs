//! A free scalar field truncated to finitely many momentum modes and a
//! bound on the total particle number.
//!
//! Hamiltonians are diagonal in the occupation basis, so the heat semigroup
//! `e^{−βH_m}` is a diagonal matrix and the gap between two masses can be
//! bounded exactly by enumeration. The Lip-norms `A ↦ ‖e^{−βH_m} A Ω‖` all
//! live on one algebra generated by truncated Weyl operators.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteVNAlgebra;
use crate::error::{Error, Result};
use crate::ghdist::{estimate_distance, BridgeSpec, DistanceNets};
use crate::linalg::{self, c, CMat, CVec, C64, ONE};
use crate::lipnorms::DualLipNorm;
use crate::nets::{build_net, NetTarget};

/// Seed used when decomposing generated algebras.
const DECOMPOSE_SEED: u64 = 0x5eed;

/// Occupation-number basis `{n ∈ ℕ^K : Σ n_k ≤ N}` in lexicographic order.
#[derive(Clone, Debug)]
pub struct TruncatedFock {
    momenta: Vec<f64>,
    cutoff: usize,
    basis: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn enumerate(k: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for n in 0..=budget {
        prefix.push(n);
        enumerate(k, budget - n, prefix, out);
        prefix.pop();
    }
}

impl TruncatedFock {
    pub fn new(momenta: Vec<f64>, cutoff: usize) -> Result<Self> {
        if momenta.is_empty() {
            return Err(Error::InvalidArgument("at least one mode is required".into()));
        }
        if let Some(p) = momenta.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidArgument(format!("momentum {p} must be finite and nonnegative")));
        }
        let mut basis = Vec::new();
        enumerate(momenta.len(), cutoff, &mut Vec::new(), &mut basis);
        let index = basis.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Ok(TruncatedFock { momenta, cutoff, basis, index })
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn modes(&self) -> usize {
        self.momenta.len()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = ONE;
        v
    }
}

/// `ω_m(p) = √(m² + p²)`.
pub fn dispersion(m: f64, p: f64) -> Result<f64> {
    if !(m >= 0.0 && p >= 0.0) {
        return Err(Error::InvalidArgument(format!("dispersion needs m, p ≥ 0, got ({m}, {p})")));
    }
    Ok(m.hypot(p))
}

/// `E_m(n) = Σ_k n_k ω_m(p_k)` per basis vector.
pub fn energies(fock: &TruncatedFock, m: f64) -> Result<Vec<f64>> {
    let omegas = fock.momenta.iter().map(|&p| dispersion(m, p)).collect::<Result<Vec<_>>>()?;
    Ok(fock.basis.iter().map(|n| n.iter().zip(&omegas).map(|(&k, w)| k as f64 * w).sum()).collect())
}

/// Diagonal of `e^{−βH_m}`.
pub fn semigroup_diagonal(fock: &TruncatedFock, m: f64, beta: f64) -> Result<Vec<f64>> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    Ok(energies(fock, m)?.into_iter().map(|e| (-beta * e).exp()).collect())
}

pub fn semigroup(fock: &TruncatedFock, m: f64, beta: f64) -> Result<CMat> {
    let d = semigroup_diagonal(fock, m, beta)?;
    Ok(CMat::from_diagonal(&CVec::from_iterator(d.len(), d.into_iter().map(|x| c(x, 0.0)))))
}

/// `φ(f) = Σ_k (f̄_k a_k + f_k a_k†)` compressed to the truncated space.
pub fn field_operator(fock: &TruncatedFock, f: &[C64]) -> Result<CMat> {
    if f.len() != fock.modes() {
        return Err(Error::InvalidArgument(format!("{} coefficients for {} modes", f.len(), fock.modes())));
    }
    let d = fock.dim();
    let mut phi = CMat::zeros(d, d);
    for (j, n) in fock.basis.iter().enumerate() {
        for (k, &fk) in f.iter().enumerate() {
            // a_k† |n⟩ = √(n_k + 1) |n + e_k⟩, dropped outside the cutoff.
            let mut up = n.clone();
            up[k] += 1;
            if let Some(i) = fock.index_of(&up) {
                let amp = ((n[k] + 1) as f64).sqrt();
                phi[(i, j)] += fk * amp;
                phi[(j, i)] += fk.conj() * amp;
            }
        }
    }
    Ok(phi)
}

/// `exp(i φ(f))`.
pub fn weyl(fock: &TruncatedFock, f: &[C64]) -> Result<CMat> {
    let phi = field_operator(fock, f)?;
    if f.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(CMat::identity(fock.dim(), fock.dim()));
    }
    Ok(linalg::expm_i_hermitian(&phi))
}

/// The algebra generated by a set of Weyl operators, with the vacuum, and its
/// compression to the central support of the vacuum.
#[derive(Clone, Debug)]
pub struct LocalAlgebra {
    /// Generated algebra on the full truncated space, vacuum attached.
    pub algebra: FiniteVNAlgebra,
    /// Summands on which the vacuum has weight, in their own frame.
    pub support: FiniteVNAlgebra,
    /// Isometry from the support's ambient space into Fock space.
    pub embedding: CMat,
}

impl LocalAlgebra {
    /// Whether the vacuum separates the full generated algebra.
    pub fn is_separating(&self) -> bool {
        self.algebra.is_separating()
    }
}

pub fn local_algebra(fock: &TruncatedFock, generators: &[Vec<C64>]) -> Result<LocalAlgebra> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("at least one generator is required".into()));
    }
    let weyls = generators.iter().map(|f| weyl(fock, f)).collect::<Result<Vec<_>>>()?;
    let algebra = FiniteVNAlgebra::generated_by(&weyls, DECOMPOSE_SEED)?.with_omega(fock.vacuum())?;
    let (support, embedding, _) = algebra.restrict_to_omega_support()?;
    Ok(LocalAlgebra { algebra, support, embedding })
}

/// `A ↦ ‖e^{−βH_m} A Ω‖` on the vacuum support of `local`.
pub fn free_lip_norm(fock: &TruncatedFock, local: &LocalAlgebra, m: f64, beta: f64) -> Result<DualLipNorm> {
    if !local.support.is_separating() {
        return Err(Error::NotSeparating);
    }
    let t = semigroup(fock, m, beta)? * &local.embedding;
    DualLipNorm::kernel(&local.support, t).map_err(|e| match e {
        Error::DegenerateNorm { .. } => Error::NotSeparating,
        other => other,
    })
}

/// `max_n |e^{−βE_{m′}(n)} − e^{−βE_m(n)}|`, which dominates
/// `‖(e^{−βH_{m′}} − e^{−βH_m}) A Ω‖` for every contraction `A`.
pub fn mass_gap_bound(fock: &TruncatedFock, m: f64, m_prime: f64, beta: f64) -> Result<f64> {
    let a = semigroup_diagonal(fock, m, beta)?;
    let b = semigroup_diagonal(fock, m_prime, beta)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// How smeared test functions become mode coefficients at a given mass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMap {
    /// The same coefficients at every mass.
    #[default]
    Fixed,
    /// `f_k / √(2 ω_m(p_k))`, the usual one-particle normalisation.
    MassScaled,
}

/// Which algebra carries the norm at mass `m′`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraMode {
    /// One algebra, generated at the base mass, for every norm.
    #[default]
    Fixed,
    /// The algebra generated at each mass itself; compared through a
    /// coupler bridge. No continuity claim is attached to this mode.
    Intrinsic,
}

#[derive(Clone, Debug)]
pub struct FreeFieldConfig {
    pub beta: f64,
    pub base_mass: f64,
    /// Ascending.
    pub masses: Vec<f64>,
    pub generators: Vec<Vec<C64>>,
    pub fock: TruncatedFock,
    pub coefficients: CoefficientMap,
    pub algebra_mode: AlgebraMode,
}

impl Default for FreeFieldConfig {
    fn default() -> Self {
        FreeFieldConfig {
            beta: 1.0,
            base_mass: 0.0,
            masses: vec![0.03125, 0.0625, 0.125, 0.25, 0.5, 1.0],
            generators: vec![vec![c(0.8, 0.0), c(0.5, 0.0), c(0.3, 0.0)]],
            fock: TruncatedFock::new(vec![0.5, 1.0, 2.0], 4).expect("valid defaults"),
            coefficients: CoefficientMap::Fixed,
            algebra_mode: AlgebraMode::Fixed,
        }
    }
}

impl FreeFieldConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.base_mass >= 0.0) {
            return Err(Error::InvalidArgument("base mass must be nonnegative".into()));
        }
        if self.masses.is_empty() {
            return Err(Error::InvalidArgument("mass grid is empty".into()));
        }
        if self.masses.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument("masses must be finite and nonnegative".into()));
        }
        if self.masses.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("masses must be sorted ascending".into()));
        }
        if self.generators.is_empty() {
            return Err(Error::InvalidArgument("at least one generator is required".into()));
        }
        for f in &self.generators {
            if f.len() != self.fock.modes() {
                return Err(Error::InvalidArgument(format!("{} coefficients for {} modes", f.len(), self.fock.modes())));
            }
            if f.iter().all(|z| z.norm() == 0.0) {
                return Err(Error::InvalidArgument("generators must be nonzero".into()));
            }
        }
        Ok(())
    }

    /// Mode coefficients of the generators at mass `m`.
    pub fn coefficients_at(&self, m: f64) -> Result<Vec<Vec<C64>>> {
        match self.coefficients {
            CoefficientMap::Fixed => Ok(self.generators.clone()),
            CoefficientMap::MassScaled => self
                .generators
                .iter()
                .map(|f| {
                    f.iter()
                        .zip(self.fock.momenta())
                        .map(|(z, &p)| {
                            let w = dispersion(m, p)?;
                            if w == 0.0 {
                                return Err(Error::InvalidArgument("mass-scaled map needs ω > 0 on every mode".into()));
                            }
                            Ok(z / (2.0 * w).sqrt())
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn local_algebra_at(&self, m: f64) -> Result<LocalAlgebra> {
        local_algebra(&self.fock, &self.coefficients_at(m)?)
    }
}

/// Net sizes for [`mass_sweep`].
#[derive(Clone, Copy, Debug)]
pub struct SweepNets {
    pub count: usize,
    pub probes: usize,
    pub seed: u64,
}

impl Default for SweepNets {
    fn default() -> Self {
        SweepNets { count: 256, probes: 64, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m_prime: f64,
    pub certified_bound: f64,
    pub net_sup: f64,
    pub qgh_upper: f64,
    /// `s_M + s_N` of the distance estimate in that row.
    #[serde(skip)]
    pub net_slack: f64,
}

pub fn mass_sweep(config: &FreeFieldConfig, nets: SweepNets) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let (fock, beta, m0) = (&config.fock, config.beta, config.base_mass);
    let base = config.local_algebra_at(m0)?;
    let l0 = free_lip_norm(fock, &base, m0, beta)?;
    let ball = build_net(&base.support, NetTarget::UnitBall, nets.count, nets.seed)?;
    let y_net = build_net(&base.support, NetTarget::PositiveUnitBall2x2, nets.count, nets.seed)?;
    let s0 = semigroup(fock, m0, beta)?;
    config
        .masses
        .par_iter()
        .map(|&mp| {
            let certified_bound = mass_gap_bound(fock, m0, mp, beta)?;
            let gap = (semigroup(fock, mp, beta)? - &s0) * &base.embedding;
            let omega = base.support.omega().expect("support carries the vacuum");
            let net_sup = ball
                .points()
                .iter()
                .map(|a| (&gap * base.support.apply(a, omega)).norm())
                .fold(0.0, f64::max);
            let (lm, bridge, x_net) = match config.algebra_mode {
                AlgebraMode::Fixed => {
                    let lm = free_lip_norm(fock, &base, mp, beta)?;
                    let j = BridgeSpec::kernel(&lm, &l0)?;
                    (lm, j, y_net.clone())
                }
                AlgebraMode::Intrinsic => {
                    let local = config.local_algebra_at(mp)?;
                    let lm = free_lip_norm(fock, &local, mp, beta)?;
                    let j = BridgeSpec::coupler(CMat::identity(fock.dim(), fock.dim()), &lm, &l0)?;
                    let x = build_net(&local.support, NetTarget::PositiveUnitBall2x2, nets.count, nets.seed)?;
                    (lm, j, x)
                }
            };
            let dn = DistanceNets::with_nets(&lm, &l0, x_net, y_net.clone(), nets.count, nets.probes, nets.seed)?;
            let est = estimate_distance(&lm, &l0, &[bridge], &dn)?;
            Ok(SweepRow { m_prime: mp, certified_bound, net_sup, qgh_upper: est.upper, net_slack: dn.slack_m + dn.slack_n })
        })
        .collect()
}

pub const CSV_HEADER: &str = "m_prime,certified_bound,net_sup,qgh_upper";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.m_prime, r.certified_bound, r.net_sup, r.qgh_upper));
    }
    out
}

#[derive(Serialize)]
struct Report<'a> {
    base_mass: f64,
    beta: f64,
    rows: &'a [SweepRow],
}

pub fn sweep_report(config: &FreeFieldConfig, rows: &[SweepRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Report { base_mass: config.base_mass, beta: config.beta, rows })?)
}

/// `max_bound=<v> at m_prime=<m>`, first row on ties.
pub fn sweep_summary(rows: &[SweepRow]) -> String {
    let mut best: Option<&SweepRow> = None;
    for r in rows {
        if best.is_none_or(|b| r.certified_bound > b.certified_bound) {
            best = Some(r);
        }
    }
    match best {
        Some(r) => format!("max_bound={} at m_prime={}", r.certified_bound, r.m_prime),
        None => "max_bound=0 at m_prime=none".into(),
    }
}
