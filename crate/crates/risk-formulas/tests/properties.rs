use fidelimax_risk::*;
use proptest::prelude::*;

#[test]
fn stabilizer_formula_equals_two_outcome_formula() {
    for delta in [2.0, 4.0, 8.0, 16.0] {
        for r in [100u64, 1657, 5000] {
            let a = risk_stabilizer(delta, r, 0.05).unwrap();
            let m = TwoOutcomeModel::new(1.0, stabilizer_omega2(delta), r, 0.05).unwrap();
            let b = risk_two_outcome(&m);
            assert!((a - b).abs() < 1e-10, "delta {delta} R {r}: {a} vs {b}");
        }
    }
}

#[test]
fn stabilizer_risk_stays_bounded_in_dimension() {
    let mut prev = 0.0;
    for k in 1..12 {
        let r = risk_stabilizer((1u64 << k) as f64, 2000, 0.05).unwrap();
        assert!(r >= prev - 1e-12 && r <= 0.5);
        prev = r;
    }
}

#[test]
fn sample_complexities_are_sufficient() {
    for &risk in &[0.02, 0.05, 0.1, 0.2] {
        let r = sample_complexity_optimal(risk, 0.05).unwrap();
        let m = TwoOutcomeModel::new(1.0, 0.0, r, 0.05).unwrap();
        assert!(risk_two_outcome(&m) <= risk);
        for d in [4usize, 8, 16] {
            let r = sample_complexity_stabilizer(risk, 0.05, d).unwrap();
            let m = TwoOutcomeModel::new(1.0, stabilizer_omega2(d as f64), r, 0.05).unwrap();
            assert!(risk_two_outcome(&m) <= risk, "stabilizer d={d} risk={risk}");
            let n = pauli_norm_bound(d).unwrap();
            if let Ok(r) = sample_complexity_pauli(risk, 0.05, n, d) {
                let (w1, w2) = ((d as f64 + n - 1.0) / (2.0 * n), (n - 1.0) / (2.0 * n));
                let m = TwoOutcomeModel::new(w1, w2, r, 0.05).unwrap();
                assert!(risk_two_outcome(&m) <= risk, "pauli d={d} risk={risk}");
            }
        }
    }
}

proptest! {
    #[test]
    fn two_outcome_non_increasing_in_r(w1 in 0.5f64..1.0, gap in 0.05f64..0.5, r in 1u64..5000) {
        let w2 = (w1 - gap).max(0.0);
        let a = risk_two_outcome(&TwoOutcomeModel::new(w1, w2, r, 0.05).unwrap());
        let b = risk_two_outcome(&TwoOutcomeModel::new(w1, w2, r + 1 + r / 3, 0.05).unwrap());
        prop_assert!(b <= a + 1e-12);
        prop_assert!(a > 0.0 && a <= 0.5);
    }

    #[test]
    fn two_outcome_non_increasing_in_separation(center in 0.3f64..0.7, gap in 0.02f64..0.55, r in 10u64..5000) {
        let wide = gap + 0.05;
        let m1 = TwoOutcomeModel::new((center + gap / 2.0).min(1.0), (center - gap / 2.0).max(0.0), r, 0.05);
        let m2 = TwoOutcomeModel::new((center + wide / 2.0).min(1.0), (center - wide / 2.0).max(0.0), r, 0.05);
        if let (Ok(m1), Ok(m2)) = (m1, m2) {
            prop_assert!(risk_two_outcome(&m2) <= risk_two_outcome(&m1) + 1e-12);
        }
    }

    #[test]
    fn lower_bound_beats_every_two_outcome_povm(w1 in 0.0f64..1.0, w2 in 0.0f64..1.0, r in 1u64..10000, eps in 0.001f64..0.24) {
        prop_assume!(w1 > w2);
        let m = TwoOutcomeModel::new(w1, w2, r, eps).unwrap();
        prop_assert!(risk_lower_bound(r, eps).unwrap() <= risk_two_outcome(&m) + 1e-12);
        if r as f64 > m.r0() {
            prop_assert!(!m.feasible_set().is_empty());
        }
    }

    #[test]
    fn two_outcome_matches_brute_force(w1 in 0.0f64..1.0, w2 in 0.0f64..1.0, r in 1u64..3000) {
        prop_assume!(w1 > w2 + 0.01);
        let m = TwoOutcomeModel::new(w1, w2, r, 0.05).unwrap();
        let oracle = brute_force_risk(w1, w2, r, 0.05);
        prop_assert!((risk_two_outcome(&m) - oracle).abs() < 1e-4, "formula {} oracle {}", risk_two_outcome(&m), oracle);
    }
}

/// max (α₁ − α₂)/2 over [0, 1]² subject to R·ln AffH ≥ ln(ε/2): a lattice in
/// α₁ and, for each α₁, bisection for the smallest admissible α₂ (the affinity
/// grows as α₂ approaches α₁).
fn brute_force_risk(w1: f64, w2: f64, r: u64, eps: f64) -> f64 {
    let log_aff = |a1: f64, a2: f64| {
        let (q1, q2) = (w2 + (w1 - w2) * a1, w2 + (w1 - w2) * a2);
        r as f64 * ((q1 * q2).sqrt() + ((1.0 - q1) * (1.0 - q2)).sqrt()).ln()
    };
    let target = (eps / 2.0).ln();
    let n = 20_000;
    let mut best = 0.0f64;
    for i in 0..=n {
        let a1 = i as f64 / n as f64;
        if log_aff(a1, 0.0) >= target {
            best = best.max(a1 / 2.0);
            continue;
        }
        let (mut lo, mut hi) = (0.0, a1);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if log_aff(a1, mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        best = best.max((a1 - hi) / 2.0);
    }
    best
}
