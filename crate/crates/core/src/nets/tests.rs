use proptest::prelude::*;

use super::*;
use crate::linalg::ONE;

fn m2() -> FiniteVNAlgebra {
    FiniteVNAlgebra::standard(&[2]).unwrap()
}

#[test]
fn positive_samples_are_positive_contractions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x = sample_positive_contraction(&[3, 1, 2], &mut rng);
        assert!(is_positive_contraction(&x, 1e-9));
    }
}

#[test]
fn positive_samples_are_deterministic() {
    let a = sample_positive_contraction(&[2, 2], &mut ChaCha8Rng::seed_from_u64(7));
    let b = sample_positive_contraction(&[2, 2], &mut ChaCha8Rng::seed_from_u64(7));
    let bits = |x: &AlgebraElement| -> Vec<u64> {
        x.blocks().iter().flat_map(|m| m.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()])).collect()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn scalar_samples_are_uniform() {
    // One-sample Kolmogorov–Smirnov against U[0, 1].
    let n = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut v: Vec<f64> = (0..n).map(|_| sample_positive_contraction(&[1], &mut rng).blocks()[0][(0, 0)].re).collect();
    v.sort_by(f64::total_cmp);
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n as f64 - x).max(x - i as f64 / n as f64))
        .fold(0.0, f64::max);
    // Critical value at level 0.001.
    let crit = 1.949 / (n as f64).sqrt();
    assert!(d < crit, "KS statistic {d} exceeds {crit}");
}

#[test]
fn two_point_unit_ball_is_zero_and_one() {
    let net = build_net(&m2(), NetTarget::UnitBall, 2, 5).unwrap();
    assert_eq!(net.points(), &[m2().zero(), m2().identity()]);
    assert!(build_net(&m2(), NetTarget::UnitBall, 1, 5).is_err());
}

#[test]
fn mandatory_points_present() {
    let alg = FiniteVNAlgebra::standard(&[2, 1]).unwrap();
    let sphere = build_net(&alg, NetTarget::UnitSphere, 10, 0).unwrap();
    assert_eq!(sphere.points()[0], alg.identity());
    let pos = build_net(&alg, NetTarget::PositiveUnitBall2x2, 20, 0).unwrap();
    let amp = alg.amplify2();
    assert_eq!(pos.points()[0], amp.zero());
    assert_eq!(pos.points()[1], amp.identity());
    // Rank-one diagonal projections of each block follow.
    assert_eq!(pos.points()[2].blocks()[0][(0, 0)], ONE);
    assert_eq!(pos.points()[2].op_norm(), 1.0);
}

#[test]
fn scalar_x_net_is_positive_two_by_two() {
    let net = build_net(&FiniteVNAlgebra::scalars(), NetTarget::PositiveUnitBall2x2, 64, 3).unwrap();
    assert_eq!(net.block_dims(), &[2]);
    assert!(net.points().iter().all(|p| is_positive_contraction(p, 1e-9)));
}

#[test]
fn nets_are_reproducible() {
    let a = build_net(&m2(), NetTarget::PositiveUnitBall2x2, 512, 42).unwrap();
    let b = build_net(&m2(), NetTarget::PositiveUnitBall2x2, 512, 42).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    let c = build_net(&m2(), NetTarget::PositiveUnitBall2x2, 512, 43).unwrap();
    assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
}

#[test]
fn covering_of_net_containing_its_probes_is_zero() {
    let alg = FiniteVNAlgebra::standard(&[2, 1]).unwrap();
    let net = build_net(&alg, NetTarget::UnitBall, 50, 4).unwrap();
    let l = DualLipNorm::operator(&alg);
    let est = covering_against(&net, &l, &net.points()[10..20]).unwrap();
    assert_eq!(est.value, 0.0);
    assert_eq!(est.norm, OPERATOR_NORM_LABEL);
}

#[test]
fn interval_grid_covering() {
    let s = FiniteVNAlgebra::scalars();
    let l = DualLipNorm::operator(&s);
    for k in [4usize, 10, 50] {
        let h = 1.0 / k as f64;
        let pts: Vec<AlgebraElement> = (0..=k).map(|i| s.scalar(c(i as f64 * h, 0.0))).collect();
        let net = Net::from_points(NetTarget::PositiveUnitBall, 0, vec![1], pts).unwrap();
        let exact = net.certified_interval_covering().unwrap();
        assert!((exact - h / 2.0).abs() < 1e-15);
        let est = estimate_covering(&net, &l, 2000, 11).unwrap();
        assert_eq!(est.method, CoveringMethod::Empirical);
        assert!(est.value <= exact + 1e-15);
        // With 2000 uniform probes the estimate should sit near the exact value.
        assert!(est.value >= exact * 0.9);
    }
}

#[test]
fn covering_shrinks_along_nested_nets() {
    let alg = m2();
    let l = DualLipNorm::operator(&alg.amplify2());
    let mut last = f64::INFINITY;
    for count in [8, 32, 128, 512] {
        let net = build_net(&alg, NetTarget::PositiveUnitBall2x2, count, 17).unwrap();
        let est = estimate_covering(&net, &l, 100, 17).unwrap().value;
        assert!(est <= last);
        last = est;
    }
}

#[test]
fn json_round_trip_is_lossless() {
    let alg = FiniteVNAlgebra::standard(&[2, 1]).unwrap();
    let net = build_net(&alg, NetTarget::UnitBall, 16, 8).unwrap();
    let l = DualLipNorm::operator(&alg);
    let cov = estimate_covering(&net, &l, 10, 8).unwrap();
    let net = net.with_covering(cov.clone());
    let text = net.to_json().unwrap();
    let back = Net::from_json(&text).unwrap();
    assert_eq!(back.points(), net.points());
    assert_eq!(back.covering_estimate(), Some(&cov));
    assert_eq!(back.to_json().unwrap(), text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["target"], "unit_ball");
    assert_eq!(v["covering_estimate"]["method"], "empirical");
}

#[test]
fn json_rejects_non_members() {
    let bad = r#"{"target":"unit_ball","seed":0,"blocks":[[[[2.0,0.0]]]]}"#;
    assert!(Net::from_json(bad).is_err());
    let unknown = r#"{"target":"unit_ball","seed":0,"blocks":[[[[0.5,0.0]]]],"extra":1}"#;
    assert!(Net::from_json(unknown).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn all_points_are_members(seed in any::<u64>(), t in 0usize..4) {
        let target = [NetTarget::PositiveUnitBall2x2, NetTarget::PositiveUnitBall, NetTarget::UnitBall, NetTarget::UnitSphere][t];
        let alg = FiniteVNAlgebra::standard(&[2, 1]).unwrap();
        let net = build_net(&alg, target, 40, seed).unwrap();
        prop_assert!(net.points().iter().all(|p| target.contains(p, MEMBERSHIP_TOL)));
    }

    #[test]
    fn nets_are_prefix_nested(seed in any::<u64>()) {
        let alg = FiniteVNAlgebra::standard(&[1, 2]).unwrap();
        let small = build_net(&alg, NetTarget::PositiveUnitBall2x2, 12, seed).unwrap();
        let big = build_net(&alg, NetTarget::PositiveUnitBall2x2, 30, seed).unwrap();
        prop_assert_eq!(small.points(), &big.points()[..12]);
    }
}
