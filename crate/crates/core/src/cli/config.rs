//! JSON configuration documents for the subcommands. Unknown keys are
//! rejected everywhere.

use serde::Deserialize;

use crate::algebra::FiniteVNAlgebra;
use crate::error::{Error, Result};
use crate::freefield::{AlgebraMode, CoefficientMap, FreeFieldConfig, TruncatedFock};
use crate::linalg::{c, CMat, CVec, C64};
use crate::lipnorms::{DualLipNorm, DEFAULT_EM_TERMS};
use crate::nets::{NetTarget, DEFAULT_COUNT};

/// `[re, im]`.
pub type ComplexJson = [f64; 2];
/// Row-major rows of complex entries.
pub type MatrixJson = Vec<Vec<ComplexJson>>;

fn complex(z: &ComplexJson) -> C64 {
    c(z[0], z[1])
}

pub fn matrix(m: &MatrixJson) -> Result<CMat> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("matrices must be nonempty and rectangular".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| complex(&m[i][j])))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    pub blocks: Vec<usize>,
    #[serde(default)]
    pub multiplicities: Option<Vec<usize>>,
    /// Defaults to the normalised all-ones vector.
    #[serde(default)]
    pub omega: Option<Vec<ComplexJson>>,
}

impl AlgebraConfig {
    pub fn build(&self) -> Result<FiniteVNAlgebra> {
        let mults = self.multiplicities.clone().unwrap_or_else(|| vec![1; self.blocks.len()]);
        let alg = FiniteVNAlgebra::with_multiplicities(&self.blocks, &mults)?;
        let n = alg.ambient_dim();
        let omega = match &self.omega {
            Some(v) => CVec::from_iterator(v.len(), v.iter().map(complex)),
            None => CVec::from_element(n, c(1.0 / (n as f64).sqrt(), 0.0)),
        };
        alg.with_omega(omega)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormConfig {
    /// `‖T x Ω‖`; `t` defaults to the identity times `scale`.
    Kernel {
        #[serde(default)]
        t: Option<MatrixJson>,
        #[serde(default)]
        scale: Option<f64>,
    },
    EffrosMarechal {
        #[serde(default)]
        terms: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
    WeightedEntry {
        weights: Vec<f64>,
    },
    Operator,
}

impl NormConfig {
    pub fn build(&self, alg: &FiniteVNAlgebra) -> Result<DualLipNorm> {
        match self {
            NormConfig::Kernel { t, scale } => {
                let n = alg.ambient_dim();
                let base = match t {
                    Some(m) => matrix(m)?,
                    None => CMat::identity(n, n),
                };
                DualLipNorm::kernel(alg, base * c(scale.unwrap_or(1.0), 0.0))
            }
            NormConfig::EffrosMarechal { terms, seed } => {
                DualLipNorm::effros_marechal(alg, terms.unwrap_or(DEFAULT_EM_TERMS), seed.unwrap_or(0))
            }
            NormConfig::WeightedEntry { weights } => DualLipNorm::weighted_entry(alg, weights.clone()),
            NormConfig::Operator => Ok(DualLipNorm::operator(alg)),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideConfig {
    pub algebra: AlgebraConfig,
    pub norm: NormConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BridgeConfig {
    Sum,
    Kernel,
    /// Block permutation and per-block unitaries; identity when omitted.
    Iso {
        #[serde(default)]
        perm: Option<Vec<usize>>,
        #[serde(default)]
        unitaries: Option<Vec<MatrixJson>>,
    },
    /// Either a fixed isometry or an optimised one.
    Coupler {
        #[serde(default)]
        u: Option<MatrixJson>,
        #[serde(default)]
        budget: Option<usize>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_probes")]
    pub probes: usize,
}

fn default_count() -> usize {
    DEFAULT_COUNT
}

fn default_probes() -> usize {
    64
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig { count: default_count(), probes: default_probes() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistConfig {
    pub left: SideConfig,
    pub right: SideConfig,
    pub bridges: Vec<BridgeConfig>,
    #[serde(default)]
    pub net: NetConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeFieldJson {
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub base_mass: Option<f64>,
    #[serde(default)]
    pub masses: Option<Vec<f64>>,
    #[serde(default)]
    pub momenta: Option<Vec<f64>>,
    #[serde(default)]
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub generators: Option<Vec<Vec<ComplexJson>>>,
    #[serde(default)]
    pub coefficients: CoefficientMap,
    #[serde(default)]
    pub algebra_mode: AlgebraMode,
    #[serde(default)]
    pub net: Option<NetConfig>,
}

impl FreeFieldJson {
    pub fn build(&self) -> Result<FreeFieldConfig> {
        let d = FreeFieldConfig::default();
        let fock = match (&self.momenta, self.cutoff) {
            (None, None) => d.fock.clone(),
            (p, n) => TruncatedFock::new(
                p.clone().unwrap_or_else(|| d.fock.momenta().to_vec()),
                n.unwrap_or(d.fock.cutoff()),
            )?,
        };
        let generators = match &self.generators {
            Some(g) => g.iter().map(|f| f.iter().map(complex).collect()).collect(),
            None => d.generators.clone(),
        };
        let cfg = FreeFieldConfig {
            beta: self.beta.unwrap_or(d.beta),
            base_mass: self.base_mass.unwrap_or(d.base_mass),
            masses: self.masses.clone().unwrap_or(d.masses),
            generators,
            fock,
            coefficients: self.coefficients,
            algebra_mode: self.algebra_mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn net(&self) -> NetConfig {
        self.net.clone().unwrap_or(NetConfig { count: 256, probes: 64 })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetJob {
    pub algebra: AlgebraConfig,
    pub target: NetTarget,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Norm for the covering estimate; the operator norm by default.
    #[serde(default)]
    pub norm: Option<NormConfig>,
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}
