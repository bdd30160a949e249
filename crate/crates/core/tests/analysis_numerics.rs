use statrs::function::gamma::gamma_ur;

use streammatch::analysis::{
    adaptive_simpson, choose_pass_count, eps_star, gamma_tail, guarantee, integrated_gamma_tail, loss_term, tail_bound,
};

#[test]
fn gamma_tail_matches_regularized_gamma() {
    for k in [1u32, 2, 3, 5, 8, 20, 100] {
        for x in [0.01, 0.5, 1.0, 3.0, 7.5, 20.0, 80.0, 150.0] {
            let want = gamma_ur(k as f64, x);
            let got = gamma_tail(k, x);
            assert!(
                (got - want).abs() <= 1e-10 + 1e-8 * want,
                "k={k} x={x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn guarantee_reference_values() {
    assert!((guarantee(1) - (1.0 - (-1f64).exp())).abs() < 1e-15);
    assert!((guarantee(1) - 0.632121).abs() < 1e-6);
    assert!((guarantee(2) - 0.729329).abs() < 1e-6);
    assert!((guarantee(5) - 0.824533).abs() < 1e-6);
    assert!((guarantee(8) - 0.860413).abs() < 1e-6);
    for k in 1..50 {
        assert!(guarantee(k + 1) > guarantee(k));
    }
}

#[test]
fn guarantee_equals_tail_integral() {
    for k in 1..=12u32 {
        let kf = k as f64;
        let tail = adaptive_simpson(|x| gamma_tail(k, x), kf, kf + 40.0 * kf.sqrt() + 60.0, 1e-12);
        assert!((guarantee(k) - (1.0 - tail / kf)).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn integrated_tail_identity() {
    // integral_0^inf F^k = k
    for k in [1u32, 4, 9] {
        let total = integrated_gamma_tail(k, k as f64 + 200.0);
        assert!((total - k as f64).abs() < 1e-6);
    }
}

#[test]
fn tail_bound_dominates_quadrature() {
    for k in [5u32, 20, 60] {
        for es in [0.05, 0.2] {
            let kf = k as f64;
            let a = kf * (1.0 + es);
            let q = adaptive_simpson(|x| gamma_tail(k, x), a, a + 60.0 * kf.sqrt() + 100.0, 1e-10) / kf;
            assert!(q <= tail_bound(k, es) * (1.0 + 1e-9), "k={k} eps*={es}");
        }
        assert!((tail_bound(k, 0.0) - loss_term(k)).abs() < 1e-15);
    }
}

#[test]
fn pass_count_for_the_gap_suite() {
    let es = eps_star(0.2);
    assert!((es - (0.95 / 0.9 - 1.0)).abs() < 1e-15);
    let k = choose_pass_count(0.2, 1_000_000, 60);
    let target = 60f64.powi(-2);
    assert!(tail_bound(k, es) <= target);
    assert!(tail_bound(k - 1, es) > target);
    // the universe size does not enter the bound
    assert_eq!(k, choose_pass_count(0.2, 120, 60));
    assert!(choose_pass_count(0.4, 1, 60) < k);
}
