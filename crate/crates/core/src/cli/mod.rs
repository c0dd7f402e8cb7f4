//! Command-line front end: `dist`, `freefield`, `verify` and `net`.

pub mod config;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::error::{Error, Result};
use crate::freefield::{mass_sweep, sweep_csv, sweep_report, sweep_summary, SweepNets};
use crate::ghdist::{
    bridge_hausdorff, estimate_distance, optimize_coupler, BlockIsomorphism, BridgeSpec, CouplerSearch, DistanceNets,
    DEFAULT_COUPLER_BUDGET,
};
use crate::lipnorms::DualLipNorm;
use crate::nets::{build_net, estimate_covering, NetTarget};

use config::{matrix, BridgeConfig, DistConfig, FreeFieldJson, NetJob};

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NO_BRIDGE: i32 = 3;
pub const EXIT_NOT_SEPARATING: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lvna", version, about = "Distance estimates between finite Lip-von Neumann algebras")]
pub struct Cli {
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InjectArg {
    BridgeRestriction,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the distance between two algebras; prints JSON.
    Dist,
    /// Mass sweep of the truncated free field; writes sweep.csv and sweep.json.
    Freefield,
    /// Run the invariant suites.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, value_enum, hide = true)]
        inject: Option<InjectArg>,
    },
    /// Build a net with its covering estimate; writes net.json.
    Net,
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn read_config(path: Option<&Path>) -> Result<Option<String>> {
    path.map(|p| fs::read_to_string(p).map_err(Error::from)).transpose()
}

fn build_bridges(cfg: &[BridgeConfig], lm: &DualLipNorm, ln: &DualLipNorm, nets: &DistanceNets, seed: u64) -> Vec<BridgeSpec> {
    let mut out = Vec::new();
    for b in cfg {
        let built = match b {
            BridgeConfig::Sum => Ok(BridgeSpec::sum(lm, ln)),
            BridgeConfig::Kernel => BridgeSpec::kernel(lm, ln),
            BridgeConfig::Iso { perm, unitaries } => {
                let psi = match (perm, unitaries) {
                    (None, None) => Ok(BlockIsomorphism::identity(lm.algebra())),
                    (p, u) => {
                        let k = lm.algebra().block_dims().len();
                        let perm = p.clone().unwrap_or_else(|| (0..k).collect());
                        let us = match u {
                            Some(us) => us.iter().map(matrix).collect::<Result<Vec<_>>>(),
                            None => Ok(BlockIsomorphism::identity(lm.algebra()).unitaries().to_vec()),
                        };
                        us.map(|us| BlockIsomorphism::new(perm, us))
                    }
                };
                psi.and_then(|psi| BridgeSpec::iso(psi, lm, ln))
            }
            BridgeConfig::Coupler { u: Some(u), .. } => matrix(u).and_then(|u| BridgeSpec::coupler(u, lm, ln)),
            BridgeConfig::Coupler { u: None, budget } => {
                let search = CouplerSearch { budget: budget.unwrap_or(DEFAULT_COUPLER_BUDGET), restarts: 4, seed };
                // Score candidates on a prefix of the nets to keep each evaluation cheap.
                let k = nets.x_m.len().min(32);
                let xm = nets.x_m.prefix(k);
                let xn = nets.x_n.prefix(k);
                optimize_coupler(lm, ln, |j| bridge_hausdorff(j, &xm, &xn).map_or(f64::INFINITY, |h| h.value), search)
                    .map(|(j, _)| j)
            }
        };
        match built {
            Ok(j) => out.push(j),
            Err(e) => warn!("dropping bridge candidate: {e}"),
        }
    }
    out
}

pub fn cmd_dist(text: &str, seed: u64) -> Result<String> {
    let cfg: DistConfig = config::parse(text)?;
    let lm = cfg.left.norm.build(&cfg.left.algebra.build()?)?;
    let ln = cfg.right.norm.build(&cfg.right.algebra.build()?)?;
    if cfg.net.count < 2 || cfg.net.probes == 0 {
        return Err(Error::InvalidArgument("net needs count ≥ 2 and probes ≥ 1".into()));
    }
    let nets = DistanceNets::build(&lm, &ln, cfg.net.count, cfg.net.probes, seed)?;
    let bridges = build_bridges(&cfg.bridges, &lm, &ln, &nets, seed);
    let est = estimate_distance(&lm, &ln, &bridges, &nets)?;
    info!("candidates: {:?}", est.candidates);
    Ok(serde_json::to_string(&est)?)
}

pub struct FreeFieldOutput {
    pub csv: String,
    pub report: String,
    pub summary: String,
}

pub fn cmd_freefield(text: Option<&str>, seed: u64) -> Result<FreeFieldOutput> {
    let json: FreeFieldJson = config::parse(text.unwrap_or("{}"))?;
    let cfg = json.build()?;
    let net = json.net();
    let rows = mass_sweep(&cfg, SweepNets { count: net.count, probes: net.probes, seed })?;
    Ok(FreeFieldOutput { csv: sweep_csv(&rows), report: sweep_report(&cfg, &rows)?, summary: sweep_summary(&rows) })
}

pub fn cmd_net(text: &str, seed: u64) -> Result<String> {
    let job: NetJob = config::parse(text)?;
    let alg = job.algebra.build()?;
    let net = build_net(&alg, job.target, job.count, seed)?;
    let norm = match &job.norm {
        Some(n) => n.build(&alg)?,
        None => DualLipNorm::operator(&alg),
    };
    let norm = if job.target == NetTarget::PositiveUnitBall2x2 { norm.lift2() } else { norm };
    let cov = estimate_covering(&net, &norm, job.probes, seed)?;
    net.with_covering(cov).to_json()
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoBridge => EXIT_NO_BRIDGE,
        Error::NotSeparating => EXIT_NOT_SEPARATING,
        Error::Io(_) => 1,
        _ => EXIT_SCHEMA,
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("could not size the thread pool: {e}");
        }
    }
    let result = (|| -> Result<i32> {
        match &cli.command {
            Command::Dist => {
                let text = read_config(cli.config.as_deref())?
                    .ok_or_else(|| Error::InvalidArgument("dist needs --config".into()))?;
                println!("{}", cmd_dist(&text, cli.seed)?);
                Ok(0)
            }
            Command::Freefield => {
                let text = read_config(cli.config.as_deref())?;
                let out = cmd_freefield(text.as_deref(), cli.seed)?;
                write_atomic(&cli.out.join("sweep.csv"), &out.csv)?;
                write_atomic(&cli.out.join("sweep.json"), &out.report)?;
                println!("{}", out.summary);
                Ok(0)
            }
            Command::Verify { level, inject } => {
                let level = match level {
                    LevelArg::Quick => verify::Level::Quick,
                    LevelArg::Full => verify::Level::Full,
                };
                let fault = inject.map(|InjectArg::BridgeRestriction| verify::Fault::BridgeRestriction);
                let report = verify::run(cli.seed, level, fault)?;
                print!("{}", report.render());
                Ok(if report.ok() { 0 } else { EXIT_VERIFY_FAILED })
            }
            Command::Net => {
                let text = read_config(cli.config.as_deref())?
                    .ok_or_else(|| Error::InvalidArgument("net needs --config".into()))?;
                let json = cmd_net(&text, cli.seed)?;
                write_atomic(&cli.out.join("net.json"), &json)?;
                Ok(0)
            }
        }
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
