use num_complex::Complex64;
use proptest::prelude::*;
use qram_core::bounds::{
    ballistic_constraint, diagonal_pair, distillation_fidelity_cap, gate_capacity, hamiltonian_distance_floor,
    indistinguishable_tables, min_gates_for_table, BallisticMode, BallisticParams, BoundsError, DistillationParams,
};

#[test]
fn min_gates_agrees_with_linear_scan() {
    for (w, d, g, k) in [(16u64, 16u64, 4u64, 2u64), (64, 8, 16, 1), (32, 32, 2, 3)] {
        for n in [1u64, 10, 100, 500, 1000] {
            let scan = (1..=w * d).find(|&x| gate_capacity(x, w, d, g, k) >= n as f64);
            match min_gates_for_table(n, w, d, g, k) {
                Ok(m) => assert_eq!(Some(m.gates), scan, "N={n} W={w} D={d}"),
                Err(BoundsError::Infeasible { limit, .. }) => {
                    assert!((1..=limit).all(|x| gate_capacity(x, w, d, g, k) < n as f64));
                }
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn floor_is_below_diagonal_witness() {
    for eps in [1e-3, 1e-2, 0.1, 0.3] {
        for t in [0.05, 0.5, 1.0, 3.0] {
            let c = diagonal_pair(eps, t).unwrap();
            assert!(c.floor <= eps * (1.0 + 1e-12), "eps={eps} t={t} floor={}", c.floor);
        }
    }
    assert!(hamiltonian_distance_floor(2.5, 1.0).is_err());
    assert!(hamiltonian_distance_floor(0.5, 0.0).is_err());
}

#[test]
fn uniform_probe_against_closed_form() {
    // Uniform probe with output bit 0: flipping ℓ entries leaves overlap
    // 1 − ℓ/N, so each probe contributes √(1 − (1 − ℓ/N)²).
    let (n, d, ell) = (64usize, 4usize, 1usize);
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let state: Vec<Complex64> = (0..2 * n).map(|i| if i % 2 == 0 { amp } else { Complex64::default() }).collect();
    let r = indistinguishable_tables(&vec![state; d], n, ell).unwrap();
    let each = (1.0 - (1.0 - ell as f64 / n as f64).powi(2)).sqrt();
    assert!((r.sum_delta - d as f64 * each).abs() < 1e-12, "{}", r.sum_delta);
    assert_eq!(r.bound, 2.0 * ell as f64 * (d as f64).sqrt() / n as f64);
    assert!(!r.holds);
    assert!(r.holds_corrected);
}

#[test]
fn probe_avoiding_flipped_addresses_sees_nothing() {
    let n = 8;
    let mut state = vec![Complex64::default(); 2 * n];
    state[2 * 3] = Complex64::new(1.0, 0.0);
    let r = indistinguishable_tables(&[state], n, 1).unwrap();
    assert_eq!(r.indices, vec![0]);
    assert_eq!(r.sum_delta, 0.0);
    assert!(r.holds);
}

#[test]
fn ballistic_hand_values() {
    let p = BallisticParams { n: 3.0, t: 2.0, e: 5.0, w: 8.0, table_size: 40.0, locality: 2 };
    let s = ballistic_constraint(&p, BallisticMode::Summary).unwrap();
    assert_eq!(s.lhs, 3.0 * 10.0 + 3.0 * 3.0);
    assert!(!s.satisfied_for_n);
    // W=2, k=2: 4·2 + 16·1 = 24 Pauli terms
    let q = BallisticParams { n: 1.0, t: 1.0, e: 1.0, w: 2.0, table_size: 1.0, locality: 2 };
    let st = ballistic_constraint(&q, BallisticMode::Stirling).unwrap();
    let want = 24f64.log2() + std::f64::consts::LOG2_E + (2.0 * std::f64::consts::E).log2();
    assert!((st.lhs - want).abs() < 1e-12);
    assert!(ballistic_constraint(&BallisticParams { w: 0.0, ..q }, BallisticMode::Summary).is_err());
}

#[test]
fn cap_examples() {
    let cap = |d, n, ell| distillation_fidelity_cap(&DistillationParams { d, n, ell }).unwrap();
    assert_eq!(cap(4, 64, 1).cap, 0.8125);
    assert_eq!(cap(1, 8, 1).cap, 1.0);
    assert!(cap(1, 8, 1).vacuous);
    assert!(distillation_fidelity_cap(&DistillationParams { d: 1, n: 4, ell: 5 }).is_err());
}

proptest! {
    #[test]
    fn floor_increases_with_delta(a in 0.0f64..2.0, b in 0.0f64..2.0, t in 0.01f64..10.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f = |x| hamiltonian_distance_floor(x, t).unwrap();
        prop_assert!(f(lo).floor <= f(hi).floor);
        prop_assert!(f(hi).lower <= f(hi).floor + 1e-15);
    }

    #[test]
    fn capacity_met_at_min_gates(e in 4u32..20, g in 1u64..32, k in 1u64..4) {
        let n = 1u64 << e;
        let (w, d) = (1u64 << 16, 1u64 << 16);
        let m = min_gates_for_table(n, w, d, g, k).unwrap();
        prop_assert!(gate_capacity(m.gates, w, d, g, k) >= n as f64);
        prop_assert!(m.gates == 1 || gate_capacity(m.gates - 1, w, d, g, k) < n as f64);
    }
}
