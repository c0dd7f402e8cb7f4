use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::{self, c, ginibre, CMat, CVec, ONE, ZERO};

fn scalar_alg() -> FiniteVNAlgebra {
    FiniteVNAlgebra::scalars().with_omega(CVec::from_element(1, ONE)).unwrap()
}

fn scalar_kernel(t: crate::linalg::C64) -> DualLipNorm {
    DualLipNorm::kernel(&scalar_alg(), CMat::from_element(1, 1, t)).unwrap()
}

fn mixed_alg(rng: &mut ChaCha8Rng) -> FiniteVNAlgebra {
    FiniteVNAlgebra::with_multiplicities(&[2, 1], &[2, 1])
        .unwrap()
        .with_omega(linalg::random_unit_vector(rng, 5))
        .unwrap()
}

fn random_element(alg: &FiniteVNAlgebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
    alg.element(alg.block_dims().iter().map(|&d| ginibre(rng, d, d)).collect()).unwrap()
}

fn random_unitary(alg: &FiniteVNAlgebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
    alg.element(alg.block_dims().iter().map(|&d| linalg::haar_unitary(rng, d)).collect()).unwrap()
}

/// `L_M = ‖T·Ω‖` and its transport `L_N = ‖T π(u)* · π(u)Ω‖` along `Ad u`.
fn conjugated_pair(rng: &mut ChaCha8Rng) -> (DualLipNorm, DualLipNorm, BlockIsomorphism) {
    let alg = mixed_alg(rng);
    let t = ginibre(rng, 5, 5);
    let u = random_unitary(&alg, rng);
    let pu = alg.to_ambient(&u);
    let beta = FiniteVNAlgebra::with_multiplicities(&[2, 1], &[2, 1])
        .unwrap()
        .with_omega(&pu * alg.omega().unwrap())
        .unwrap();
    let lm = DualLipNorm::kernel(&alg, t.clone()).unwrap();
    let ln = DualLipNorm::kernel(&beta, t * pu.adjoint()).unwrap();
    (lm, ln, BlockIsomorphism::inner(&u))
}

/// One bridge of each non-composed kind, all on `mixed_alg`.
fn sample_bridges(rng: &mut ChaCha8Rng) -> Vec<BridgeSpec> {
    let alg = mixed_alg(rng);
    let l1 = DualLipNorm::kernel(&alg, ginibre(rng, 5, 5)).unwrap();
    let l2 = DualLipNorm::kernel(&alg, ginibre(rng, 5, 5)).unwrap();
    let (lm, ln, psi) = conjugated_pair(rng);
    let host = linalg::haar_unitary(rng, 5);
    vec![
        BridgeSpec::sum(&l1, &DualLipNorm::weighted_entry(&alg, vec![1.0, 2.0]).unwrap()),
        BridgeSpec::kernel(&l1, &l2).unwrap(),
        BridgeSpec::iso(psi, &lm, &ln).unwrap(),
        BridgeSpec::coupler(host, &l1, &l2).unwrap(),
    ]
}

#[test]
fn hausdorff_examples() {
    let d = |a: &f64, b: &f64| (a - b).abs();
    let a = [0.3, -1.0, 2.5];
    assert_eq!(hausdorff(&a, &a, d).unwrap().value, 0.0);
    assert_eq!(hausdorff(&[1.5], &[-0.5], d).unwrap().value, 2.0);
    let h = hausdorff(&[0.0, 1.0], &[0.0], d).unwrap();
    assert_eq!((h.value, h.forward, h.backward), (1.0, 1.0, 0.0));
    let empty: [f64; 0] = [];
    assert!(matches!(hausdorff(&empty, &a, d), Err(Error::EmptySet)));
}

#[test]
fn restrictions_hold_for_each_kind() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for j in sample_bridges(&mut rng) {
        let (zm, zn) = (j.left().algebra().zero(), j.right().algebra().zero());
        assert_eq!(j.eval(&zm, &zn).unwrap(), 0.0, "{}", j.name());
        for _ in 0..20 {
            let x = random_element(j.left().algebra(), &mut rng);
            let y = random_element(j.right().algebra(), &mut rng);
            let lx = j.left().eval(&x).unwrap();
            let ly = j.right().eval(&y).unwrap();
            assert!((j.eval(&x, &zn).unwrap() - lx).abs() <= 1e-10 * lx.max(1.0), "{}", j.name());
            assert!((j.eval(&zm, &y).unwrap() - ly).abs() <= 1e-10 * ly.max(1.0), "{}", j.name());
        }
    }
}

#[test]
fn sum_bridge_hausdorff_is_at_most_larger_radius() {
    let alg = FiniteVNAlgebra::standard(&[1, 1]).unwrap();
    let lm = DualLipNorm::weighted_entry(&alg, vec![1.0, 3.0]).unwrap();
    let ln = DualLipNorm::weighted_entry(&alg, vec![2.0, 0.5]).unwrap();
    let j = BridgeSpec::sum(&lm, &ln);
    let x = build_net(&alg, NetTarget::PositiveUnitBall2x2, 64, 1).unwrap();
    let y = build_net(&alg, NetTarget::PositiveUnitBall2x2, 64, 2).unwrap();
    let h = bridge_hausdorff(&j, &x, &y).unwrap().value;
    assert!(h <= 3.0 + 1e-12);
    assert!(h > 0.0);
}

#[test]
fn scalar_kernel_diameter_is_gap() {
    let j = BridgeSpec::kernel(&scalar_kernel(c(1.0, 0.0)), &scalar_kernel(c(0.5, 0.0))).unwrap();
    let sphere = build_net(&FiniteVNAlgebra::scalars(), NetTarget::UnitSphere, 32, 0).unwrap();
    let d = bridge_diameter_bound(&j, &sphere).unwrap();
    assert!((d - 0.5).abs() < 1e-15);
    let same = BridgeSpec::kernel(&scalar_kernel(c(0.7, 0.2)), &scalar_kernel(c(0.7, 0.2))).unwrap();
    assert_eq!(bridge_diameter_bound(&same, &sphere).unwrap(), 0.0);
}

#[test]
fn kernel_bridge_rejects_mismatch() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = mixed_alg(&mut rng);
    let b = mixed_alg(&mut rng);
    let la = DualLipNorm::kernel(&a, ginibre(&mut rng, 5, 5)).unwrap();
    let lb = DualLipNorm::kernel(&b, ginibre(&mut rng, 5, 5)).unwrap();
    assert!(BridgeSpec::kernel(&la, &lb).is_err());
    let tall = DualLipNorm::kernel(&a, ginibre(&mut rng, 7, 5)).unwrap();
    assert!(BridgeSpec::kernel(&la, &tall).is_err());
    let w = DualLipNorm::operator(&a);
    assert!(BridgeSpec::kernel(&la, &w).is_err());
}

#[test]
fn kernel_gap_examples() {
    let t = CMat::identity(2, 2);
    assert_eq!(kernel_gap_certified(&t, &t, 1.0).unwrap(), 0.0);
    let s = CMat::from_diagonal(&CVec::from_vec(vec![ONE, ZERO]));
    assert!((kernel_gap_certified(&t, &s, 1.0).unwrap() - 1.0).abs() < 1e-12);
    assert!(kernel_gap_certified(&t, &CMat::identity(3, 3), 1.0).is_err());
}

#[test]
fn iso_bridge_vanishes_along_the_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (lm, ln, psi) = conjugated_pair(&mut rng);
    let j = BridgeSpec::iso(psi.clone(), &lm, &ln).unwrap();
    for _ in 0..20 {
        let x = random_element(lm.algebra(), &mut rng);
        assert!(j.eval(&x, &psi.apply(&x).scale_real(-1.0)).unwrap() < 1e-12);
    }
    let id = BlockIsomorphism::identity(lm.algebra());
    let self_bridge = BridgeSpec::iso(id, &lm, &lm).unwrap();
    let x = random_element(lm.algebra(), &mut rng);
    assert_eq!(self_bridge.eval(&x, &x.scale_real(-1.0)).unwrap(), 0.0);
}

#[test]
fn iso_bridge_rejects_norm_change_and_bad_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let alg = mixed_alg(&mut rng);
    let lm = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
    let ln = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
    let id = BlockIsomorphism::identity(&alg);
    assert!(matches!(BridgeSpec::iso(id, &lm, &ln), Err(Error::NotIsomorphism(_))));
    let swap = BlockIsomorphism::new(vec![1, 0], vec![CMat::identity(2, 2), CMat::identity(1, 1)]);
    assert!(BridgeSpec::iso(swap, &lm, &lm).is_err());
    let skewed = BlockIsomorphism::new(vec![0, 1], vec![CMat::identity(2, 2) * c(2.0, 0.0), CMat::identity(1, 1)]);
    assert!(BridgeSpec::iso(skewed, &lm, &lm).is_err());
}

#[test]
fn identity_coupler_reduces_to_kernel_bridge() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let alg = mixed_alg(&mut rng);
    let t = ginibre(&mut rng, 5, 5);
    let l = DualLipNorm::kernel(&alg, t).unwrap();
    let cp = BridgeSpec::coupler(CMat::identity(5, 5), &l, &l).unwrap();
    let kb = BridgeSpec::kernel(&l, &l).unwrap();
    for _ in 0..10 {
        let x = random_element(&alg, &mut rng);
        let y = random_element(&alg, &mut rng);
        assert!((cp.eval(&x, &y).unwrap() - kb.eval(&x, &y).unwrap()).abs() < 1e-12);
    }
    assert!(matches!(
        BridgeSpec::coupler(CMat::identity(5, 5) * c(1.1, 0.0), &l, &l),
        Err(Error::NotIsometry(_))
    ));
}

#[test]
fn phase_coupler_optimum_matches_grid_oracle() {
    let (t, s) = (c(2.0, 0.0), c(0.5 * 1.2f64.cos(), 0.5 * 1.2f64.sin()));
    let (lm, ln) = (scalar_kernel(t), scalar_kernel(s));
    let sphere = build_net(&FiniteVNAlgebra::scalars(), NetTarget::UnitSphere, 8, 0).unwrap();
    let search = CouplerSearch { budget: DEFAULT_COUPLER_BUDGET, restarts: 2, seed: 1 };
    let (_, best) = optimize_coupler(&lm, &ln, |j| bridge_diameter_bound(j, &sphere).unwrap(), search).unwrap();
    let oracle = (0..10_000)
        .map(|k| {
            let th = k as f64 * std::f64::consts::TAU / 10_000.0;
            (c(th.cos(), th.sin()) * t - s).norm()
        })
        .fold(f64::INFINITY, f64::min);
    assert!((oracle - 1.5).abs() < 1e-6);
    assert!(best >= 1.5 - 1e-12);
    assert!(best <= oracle + 1e-6, "{best} vs {oracle}");
}

#[test]
fn composed_with_identity_matches_first_bridge() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let alg = mixed_alg(&mut rng);
    let l1 = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
    let l2 = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
    let j12 = BridgeSpec::kernel(&l1, &l2).unwrap();
    let j23 = BridgeSpec::iso(BlockIsomorphism::identity(&alg), &l2, &l2).unwrap();
    let xs: Vec<AlgebraElement> = (0..6).map(|_| random_element(&alg, &mut rng)).collect();
    let ys: Vec<AlgebraElement> = (0..6).map(|_| random_element(&alg, &mut rng)).collect();
    let mut middle = vec![alg.zero()];
    middle.extend(ys.iter().map(|y| y.scale_real(-1.0)));
    let j13 = BridgeSpec::compose(&j12, &j23, middle).unwrap();
    let zero = alg.zero();
    assert_eq!(j13.eval(&zero, &zero).unwrap(), 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        // With −y in the middle set the identity leg costs nothing.
        let direct = j12.eval(x, y).unwrap();
        let composed = j13.eval(x, y).unwrap();
        assert!(composed <= direct + 1e-12);
        assert!(composed >= direct - 1e-12);
        let l = l1.eval(x).unwrap();
        assert!((j13.eval(x, &zero).unwrap() - l).abs() <= 1e-12 * l.max(1.0));
    }
}

#[test]
fn compose_rejects_junction_mismatch() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let alg = mixed_alg(&mut rng);
    let l: Vec<DualLipNorm> = (0..4).map(|_| DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap()).collect();
    let j12 = BridgeSpec::kernel(&l[0], &l[1]).unwrap();
    let j34 = BridgeSpec::kernel(&l[2], &l[3]).unwrap();
    assert!(BridgeSpec::compose(&j12, &j34, vec![alg.zero()]).is_err());
    let j23 = BridgeSpec::kernel(&l[1], &l[2]).unwrap();
    assert!(matches!(BridgeSpec::compose(&j12, &j23, vec![]), Err(Error::EmptySet)));
}

#[test]
fn diameter_never_exceeds_certified_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let alg = mixed_alg(&mut rng);
    let sphere = build_net(&alg, NetTarget::UnitSphere, 128, 14).unwrap();
    for _ in 0..10 {
        let l1 = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
        let l2 = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
        let j = BridgeSpec::kernel(&l1, &l2).unwrap();
        let cert = j.certified_diameter().unwrap();
        assert!(bridge_diameter_bound(&j, &sphere).unwrap() <= cert);
    }
}

#[test]
fn identical_scalars_have_zero_distance() {
    let l = scalar_kernel(ONE);
    let nets = DistanceNets::build(&l, &l, 128, 64, 2).unwrap();
    let iso = BridgeSpec::iso(BlockIsomorphism::identity(l.algebra()), &l, &l).unwrap();
    let est = estimate_distance(&l, &l, &[iso], &nets).unwrap();
    assert_eq!(est.lower, 0.0);
    assert!(est.upper <= 2.0 * nets.max_slack());
    assert_eq!(est.bridge, "iso");
}

#[test]
fn scaled_scalars_are_sandwiched_by_radii() {
    let (l1, l2) = (scalar_kernel(ONE), scalar_kernel(c(2.0, 0.0)));
    let nets = DistanceNets::build(&l1, &l2, 128, 64, 3).unwrap();
    let cands = [BridgeSpec::sum(&l1, &l2), BridgeSpec::kernel(&l1, &l2).unwrap()];
    let est = estimate_distance(&l1, &l2, &cands, &nets).unwrap();
    let slack = nets.slack_m + nets.slack_n;
    assert!(est.lower >= 1.0 - 1e-12);
    assert!(est.upper <= 3.0 + slack);
    assert!(est.lower <= est.upper);
    // ‖T − S‖ = 1 certifies the distance exactly.
    assert!((est.upper - 1.0).abs() < 1e-12);
    assert_eq!(est.candidates.len(), 2);
}

#[test]
fn kernel_upper_never_exceeds_certified_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let alg = mixed_alg(&mut rng);
    for _ in 0..3 {
        let l1 = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
        let l2 = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
        let nets = DistanceNets::build(&l1, &l2, 32, 16, 4).unwrap();
        let j = BridgeSpec::kernel(&l1, &l2).unwrap();
        let cert = j.certified_diameter().unwrap();
        let est = estimate_distance(&l1, &l2, &[j], &nets).unwrap();
        assert!(est.upper <= cert);
    }
}

#[test]
fn estimate_requires_a_candidate() {
    let l = scalar_kernel(ONE);
    let nets = DistanceNets::build(&l, &l, 8, 4, 0).unwrap();
    assert!(matches!(estimate_distance(&l, &l, &[], &nets), Err(Error::NoBridge)));
}

#[test]
fn estimate_json_shape() {
    let l = scalar_kernel(ONE);
    let nets = DistanceNets::build(&l, &l, 8, 4, 0).unwrap();
    let est = estimate_distance(&l, &l, &[BridgeSpec::sum(&l, &l)], &nets).unwrap();
    let v: serde_json::Value = serde_json::to_value(&est).unwrap();
    let mut keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    keys.sort();
    assert_eq!(keys, ["bridge", "lower", "radii", "slack", "upper"]);
    assert!(v["slack"]["M"].is_number() && v["slack"]["N"].is_number());
    assert_eq!(v["radii"].as_array().unwrap().len(), 2);
}

fn em_on(n: usize) -> DualLipNorm {
    DualLipNorm::effros_marechal(&FiniteVNAlgebra::standard(&[n]).unwrap(), 16, 0).unwrap()
}

#[test]
fn em_plus_same_net_is_zero() {
    let alg = FiniteVNAlgebra::with_multiplicities(&[1, 1], &[1, 1]).unwrap();
    let net = build_net(&alg, NetTarget::PositiveUnitBall, 32, 1).unwrap();
    assert_eq!(em_plus_distance(&alg, &net, &alg, &net, &em_on(2)).unwrap(), 0.0);
    assert!(em_plus_distance(&alg, &net, &alg, &net, &em_on(3)).is_err());
}

#[test]
fn em_plus_scalars_against_diagonal() {
    let scal = FiniteVNAlgebra::with_multiplicities(&[1], &[2]).unwrap();
    let diag = FiniteVNAlgebra::diagonal(2).unwrap();
    let em = em_on(2);
    let fine = 200;
    let su: Vec<AlgebraElement> = (0..=fine).map(|k| scal.scalar(c(k as f64 / fine as f64, 0.0))).collect();
    let coarse = 20;
    let mut dg = Vec::new();
    for a in 0..=coarse {
        for b in 0..=coarse {
            let d = CVec::from_vec(vec![c(a as f64 / coarse as f64, 0.0), c(b as f64 / coarse as f64, 0.0)]);
            dg.push(diag.element(vec![CMat::from_element(1, 1, d[0]), CMat::from_element(1, 1, d[1])]).unwrap());
        }
    }
    let m_net = Net::from_points(NetTarget::PositiveUnitBall, 0, vec![1], su).unwrap();
    let n_net = Net::from_points(NetTarget::PositiveUnitBall, 0, vec![1, 1], dg).unwrap();
    let v = em_plus_distance(&scal, &m_net, &diag, &n_net, &em).unwrap();
    let w = em_plus_distance(&diag, &n_net, &scal, &m_net, &em).unwrap();
    assert_eq!(v, w);
    // Oracle: distance from diag(1, 0) to its best scalar approximant.
    let e = FiniteVNAlgebra::standard(&[2]).unwrap();
    let corner = CMat::from_diagonal(&CVec::from_vec(vec![ONE, ZERO]));
    let oracle = (0..=10_000)
        .map(|k| {
            let u = k as f64 / 10_000.0;
            em.eval(&e.element(vec![&corner - CMat::identity(2, 2) * c(u, 0.0)]).unwrap()).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    let lip = em.radius_bound();
    assert!((v - oracle).abs() <= lip / fine as f64, "{v} vs {oracle}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hausdorff_is_a_metric_on_finite_sets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = mixed_alg(&mut rng);
        let l = DualLipNorm::kernel(&alg, ginibre(&mut rng, 5, 5)).unwrap();
        let sets: Vec<Vec<_>> = (0..3)
            .map(|_| (0..5).map(|_| l.feature(&random_element(&alg, &mut rng)).unwrap()).collect())
            .collect();
        let d = |a: &crate::lipnorms::Feature, b: &crate::lipnorms::Feature| a.distance(b);
        let h = |i: usize, j: usize| hausdorff(&sets[i], &sets[j], d).unwrap().value;
        prop_assert_eq!(h(0, 1), h(1, 0));
        prop_assert_eq!(h(0, 0), 0.0);
        prop_assert!(h(0, 2) <= h(0, 1) + h(1, 2) + 1e-12);
    }

    #[test]
    fn bridges_are_seminorms_with_exact_restrictions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for j in sample_bridges(&mut rng) {
            let (ma, na) = (j.left().algebra().clone(), j.right().algebra().clone());
            for _ in 0..5 {
                let (x, y) = (random_element(&ma, &mut rng), random_element(&na, &mut rng));
                let (x2, y2) = (random_element(&ma, &mut rng), random_element(&na, &mut rng));
                let v = j.eval(&x, &y).unwrap();
                let z = c(-0.4, 1.7);
                prop_assert!((j.eval(&x.scale(z), &y.scale(z)).unwrap() - z.norm() * v).abs() <= 1e-10 * v.max(1.0));
                prop_assert!(j.eval(&(&x + &x2), &(&y + &y2)).unwrap() <= v + j.eval(&x2, &y2).unwrap() + 1e-10);
                let lx = j.left().eval(&x).unwrap();
                prop_assert!((j.eval(&x, &na.zero()).unwrap() - lx).abs() <= 1e-10 * lx.max(1.0));
                let ly = j.right().eval(&y).unwrap();
                prop_assert!((j.eval(&ma.zero(), &y).unwrap() - ly).abs() <= 1e-10 * ly.max(1.0));
            }
        }
    }

    #[test]
    fn near_partners_are_unique(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for j in sample_bridges(&mut rng) {
            let x = random_element(j.left().algebra(), &mut rng);
            let y = random_element(j.right().algebra(), &mut rng);
            let y2 = &y + &random_element(j.right().algebra(), &mut rng).scale_real(0.1);
            let eps = j.eval(&x, &y.scale_real(-1.0)).unwrap().max(j.eval(&x, &y2.scale_real(-1.0)).unwrap());
            let gap = j.right().eval(&(&y - &y2)).unwrap();
            prop_assert!(gap <= 2.0 * eps * (1.0 + 1e-12), "{}: {gap} > 2·{eps}", j.name());
        }
    }
}
