//! Cross-module invariant suites run by `lvna verify`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{canonical_decomposition, is_positive_contraction, AlgebraElement, FiniteVNAlgebra};
use crate::error::Result;
use crate::freefield::{self, TruncatedFock};
use crate::ghdist::{self, BlockIsomorphism, BridgeSpec, DistanceNets};
use crate::linalg::{self, c, ginibre, CMat};
use crate::lipnorms::DualLipNorm;
use crate::nets::{build_net, NetTarget, MEMBERSHIP_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn samples(self) -> usize {
        match self {
            Level::Quick => 20,
            Level::Full => 100,
        }
    }
}

/// Faults that can be planted to check that the suites catch them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Build the bridge suite's sum bridge against a rescaled right norm.
    BridgeRestriction,
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let tag = if s.ok() { "ok" } else { "FAIL" };
            writeln!(out, "suite {}: {}/{} passed [{tag}]", s.name, s.passed, s.total).unwrap();
        }
        let failed: Vec<&str> = self.suites.iter().filter(|s| !s.ok()).map(|s| s.name).collect();
        if failed.is_empty() {
            writeln!(out, "verify: PASS").unwrap();
        } else {
            writeln!(out, "verify: FAIL ({})", failed.join(", ")).unwrap();
        }
        out
    }
}

struct Tally {
    name: &'static str,
    passed: usize,
    total: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, passed: 0, total: 0 }
    }

    fn check(&mut self, cond: bool) {
        self.total += 1;
        if cond {
            self.passed += 1;
        }
    }

    fn done(self) -> SuiteResult {
        SuiteResult { name: self.name, passed: self.passed, total: self.total }
    }
}

fn random_element(alg: &FiniteVNAlgebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
    alg.element(alg.block_dims().iter().map(|&d| ginibre(rng, d, d)).collect()).expect("matching shape")
}

fn test_algebra(rng: &mut ChaCha8Rng) -> Result<FiniteVNAlgebra> {
    FiniteVNAlgebra::with_multiplicities(&[2, 1], &[2, 1])?.with_omega(linalg::random_unit_vector(rng, 5))
}

fn random_kernel(alg: &FiniteVNAlgebra, rng: &mut ChaCha8Rng) -> Result<DualLipNorm> {
    DualLipNorm::kernel(alg, ginibre(rng, 5, 5))
}

fn suite_algebra(level: Level, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new("algebra");
    let alg = FiniteVNAlgebra::standard(&[2, 1, 3])?;
    for _ in 0..level.samples() {
        let (x, y) = (random_element(&alg, rng), random_element(&alg, rng));
        t.check((&x * &y).op_norm() <= x.op_norm() * y.op_norm() * (1.0 + 1e-12));
        let xc = x.scale_real(1.0 / x.op_norm());
        let parts = canonical_decomposition(&xc)?;
        let ok = [&parts.re_pos, &parts.re_neg, &parts.im_pos, &parts.im_neg]
            .iter()
            .all(|p| is_positive_contraction(p, 1e-9))
            && (&parts.recombine() - &xc).op_norm() < 1e-12;
        t.check(ok);
        t.check(alg.amplify2().to_ambient(&x.diag2()).nrows() == 2 * alg.ambient_dim());
    }
    Ok(t.done())
}

fn suite_lipnorms(level: Level, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new("lipnorms");
    let alg = test_algebra(rng)?;
    let norms = [
        random_kernel(&alg, rng)?,
        DualLipNorm::effros_marechal(&alg, 16, rng.random())?,
        DualLipNorm::weighted_entry(&alg, vec![0.5, 2.0])?,
    ];
    for l in &norms {
        let ball = build_net(&alg, NetTarget::UnitBall, 64, rng.random())?;
        let r = l.radius(&ball)?;
        for _ in 0..level.samples() {
            let (x, y) = (random_element(&alg, rng), random_element(&alg, rng));
            let lx = l.eval(&x)?;
            t.check(lx > 0.0);
            t.check(l.eval(&(&x + &y))? <= lx + l.eval(&y)? + 1e-10);
            t.check((l.eval(&x.scale(c(0.3, -0.9)))? - c(0.3, -0.9).norm() * lx).abs() <= 1e-10 * lx.max(1.0));
            t.check(l.lift2().eval(&x.diag2())? == lx);
            t.check(lx <= r.upper() * x.op_norm() * (1.0 + 1e-12));
        }
    }
    Ok(t.done())
}

fn suite_nets(level: Level, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new("nets");
    let alg = FiniteVNAlgebra::standard(&[2, 1])?;
    for target in [NetTarget::PositiveUnitBall2x2, NetTarget::PositiveUnitBall, NetTarget::UnitBall, NetTarget::UnitSphere]
    {
        let seed = rng.random();
        let small = build_net(&alg, target, level.samples(), seed)?;
        let big = build_net(&alg, target, 2 * level.samples(), seed)?;
        t.check(small.points() == &big.points()[..small.len()]);
        t.check(big.points().iter().all(|p| target.contains(p, MEMBERSHIP_TOL)));
        t.check(build_net(&alg, target, level.samples(), seed)?.to_json()? == small.to_json()?);
    }
    Ok(t.done())
}

fn suite_bridge(level: Level, rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Result<SuiteResult> {
    let mut t = Tally::new("bridge");
    let alg = test_algebra(rng)?;
    let (l1, l2) = (random_kernel(&alg, rng)?, random_kernel(&alg, rng)?);
    let sum_right = match fault {
        Some(Fault::BridgeRestriction) => DualLipNorm::kernel(&alg, l2.kernel_data().unwrap().0 * c(1.5, 0.0))?,
        None => l2.clone(),
    };
    let host = linalg::haar_unitary(rng, 5);
    // Restrictions are checked against the intended pair, not the bridge's own norms.
    let cases = [
        (BridgeSpec::sum(&l1, &sum_right), &l2),
        (BridgeSpec::kernel(&l1, &l2)?, &l2),
        (BridgeSpec::iso(BlockIsomorphism::identity(&alg), &l1, &l1)?, &l1),
        (BridgeSpec::coupler(host, &l1, &l2)?, &l2),
    ];
    let zero = alg.zero();
    for (j, right) in &cases {
        for _ in 0..level.samples() {
            let (x, y) = (random_element(&alg, rng), random_element(&alg, rng));
            let (lx, ly) = (l1.eval(&x)?, right.eval(&y)?);
            t.check((j.eval(&x, &zero)? - lx).abs() <= 1e-10 * lx.max(1.0));
            t.check((j.eval(&zero, &y)? - ly).abs() <= 1e-10 * ly.max(1.0));
        }
    }
    Ok(t.done())
}

fn suite_hausdorff(level: Level, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new("hausdorff");
    let alg = test_algebra(rng)?;
    let l = random_kernel(&alg, rng)?;
    for _ in 0..level.samples() / 4 {
        let sets: Vec<Vec<_>> = (0..3)
            .map(|_| (0..6).map(|_| l.feature(&random_element(&alg, rng))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let h = |i: usize, j: usize| ghdist::hausdorff(&sets[i], &sets[j], |a, b| a.distance(b)).map(|h| h.value);
        t.check(h(0, 1)? == h(1, 0)?);
        t.check(h(0, 2)? <= h(0, 1)? + h(1, 2)? + 1e-12);
        t.check(h(1, 1)? == 0.0);
    }
    Ok(t.done())
}

fn suite_distance(level: Level, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new("distance");
    let alg = test_algebra(rng)?;
    let count = match level {
        Level::Quick => 24,
        Level::Full => 64,
    };
    for _ in 0..level.samples() / 10 {
        let l: Vec<DualLipNorm> = (0..3).map(|_| random_kernel(&alg, rng)).collect::<Result<_>>()?;
        let seed = rng.random();
        let nets = |a: &DualLipNorm, b: &DualLipNorm| DistanceNets::build(a, b, count, 16, seed);
        let (n12, n23, n13) = (nets(&l[0], &l[1])?, nets(&l[1], &l[2])?, nets(&l[0], &l[2])?);
        let j12 = BridgeSpec::kernel(&l[0], &l[1])?;
        let j23 = BridgeSpec::kernel(&l[1], &l[2])?;
        let e12 = ghdist::estimate_distance(&l[0], &l[1], &[j12.clone(), BridgeSpec::sum(&l[0], &l[1])], &n12)?;
        let e23 = ghdist::estimate_distance(&l[1], &l[2], &[j23.clone()], &n23)?;
        let mut middle = vec![alg.zero()];
        middle.extend(n12.x_n.points().iter().flat_map(|p| p.entries2()));
        let j13 = BridgeSpec::compose(&j12, &j23, middle)?;
        let e13 = ghdist::estimate_distance(&l[0], &l[2], &[j13, BridgeSpec::kernel(&l[0], &l[2])?], &n13)?;
        let slack = n12.max_slack().max(n23.max_slack()).max(n13.max_slack());
        for (e, n) in [(&e12, &n12), (&e23, &n23), (&e13, &n13)] {
            t.check(e.lower <= e.upper);
            t.check(e.lower >= ghdist::radius_lower(&n.radius_m, &n.radius_n).min(e.upper));
        }
        t.check(e13.upper <= e12.upper + e23.upper + 3.0 * slack);
    }
    Ok(t.done())
}

fn suite_freefield(level: Level, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let mut t = Tally::new("freefield");
    let fock = TruncatedFock::new(vec![0.5, 1.0, 2.0], 4)?;
    let n = fock.dim();
    t.check(n == freefield::binomial(7, 3));
    for _ in 0..level.samples() {
        let f: Vec<_> = (0..3).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let w = freefield::weyl(&fock, &f)?;
        t.check((&w * w.adjoint() - CMat::identity(n, n)).camax() < 1e-12);
        let (m, mp) = (rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        let g = freefield::mass_gap_bound(&fock, m, mp, 1.0)?;
        t.check(g <= 4.0 * (m - mp).abs() + 1e-15);
        t.check(g == freefield::mass_gap_bound(&fock, mp, m, 1.0)?);
        let d = freefield::semigroup_diagonal(&fock, m, 1.0)?;
        t.check(d[0] == 1.0 && d.iter().all(|&x| x > 0.0 && x <= 1.0));
    }
    let cfg = freefield::FreeFieldConfig::default();
    let local = cfg.local_algebra_at(0.0)?;
    let l0 = freefield::free_lip_norm(&cfg.fock, &local, 0.0, 1.0)?;
    let l1 = freefield::free_lip_norm(&cfg.fock, &local, 0.5, 1.0)?;
    for _ in 0..level.samples() {
        let x = random_element(&local.support, rng);
        t.check(l1.eval(&x)? <= l0.eval(&x)? * (1.0 + 1e-12));
    }
    Ok(t.done())
}

pub fn run(seed: u64, level: Level, fault: Option<Fault>) -> Result<Report> {
    // Each suite gets its own stream so the report does not depend on order.
    let stream = |k: u64| ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k));
    let suites = vec![
        suite_algebra(level, &mut stream(1))?,
        suite_lipnorms(level, &mut stream(2))?,
        suite_nets(level, &mut stream(3))?,
        suite_bridge(level, &mut stream(4), fault)?,
        suite_hausdorff(level, &mut stream(5))?,
        suite_distance(level, &mut stream(6))?,
        suite_freefield(level, &mut stream(7))?,
    ];
    Ok(Report { suites })
}
