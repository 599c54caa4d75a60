use conelet::filter_design::*;
use conelet::ConeletError;
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn haar_and_db2_taps() {
    let haar = spectral_factorize(&halfband_power(1, 1).unwrap()).unwrap();
    assert_eq!(haar.taps.len(), 2);
    for t in &haar.taps {
        assert!((t - 0.5).abs() < 1e-10);
    }
    let db2 = spectral_factorize(&halfband_power(2, 2).unwrap()).unwrap();
    let r3 = 3f64.sqrt();
    let want = [(1.0 + r3) / 8.0, (3.0 + r3) / 8.0, (3.0 - r3) / 8.0, (1.0 - r3) / 8.0];
    for (a, b) in db2.taps.iter().zip(want) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn residuals_small_orders() {
    for k in 1..30 {
        for l in 1..=(30 - k) {
            let p = halfband_power(k, l).unwrap();
            let f = spectral_factorize(&p).unwrap();
            assert!(f.residual <= 1e-10, "K={k} L={l} residual {}", f.residual);
            assert_eq!(f.taps.len(), k + l);
            assert!((f.taps.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn residuals_construction_scale() {
    for (k, l) in [(39, 18), (39, 19), (36, 20), (30, 12)] {
        let p = halfband_power(k, l).unwrap();
        let f = spectral_factorize(&p).unwrap();
        let fine = factorization_residual(&p, &f.taps, 16384);
        assert!(fine <= 1e-8, "K={k} L={l} residual {fine}");
    }
}

#[test]
fn minimum_phase_energy_front_loaded() {
    // Partial energies of a minimum-phase filter dominate those of its time reversal.
    let f = spectral_factorize(&halfband_power(12, 8).unwrap()).unwrap();
    let rev: Vec<f64> = f.taps.iter().rev().copied().collect();
    let (mut a, mut b) = (0.0, 0.0);
    for (x, y) in f.taps.iter().zip(&rev) {
        a += x * x;
        b += y * y;
        assert!(a >= b - 1e-14);
    }
}

#[test]
fn c2_oracle_values() {
    assert!(close(compute_c2(39, 18, 27).unwrap(), 63.356_529_931_005_27, 1e-12));
    assert!(close(compute_c2(39, 18, 15).unwrap(), 40323.820682449916, 1e-12));
    assert!(close(compute_c2(39, 19, 18).unwrap(), 8_629.607_618_097_556, 1e-12));
    // K' = 0 keeps only the binomials.
    assert!(close(compute_c2(4, 3, 0).unwrap(), 1.0 + 4.0 + 10.0, 1e-15));
}

#[test]
fn fourier_moment_oracle_values() {
    assert!(close(fourier_moment(6, 4, 3), 4.21875, 1e-14));
    assert!(close(fourier_moment(39, 18, 27), 278.48281365781066, 1e-12));
    assert!(close(fourier_moment(20, 12, 10), 282.103_168_408_557_4, 1e-12));
}

#[test]
fn envelope_oracle_values() {
    let cases = [
        ((39, 18, 27), 9.007_289_292_331_974, 14.937726549547082, 3.9825330080324503),
        ((39, 18, 15), 16.350327639882746, 15.673250166428789, 3.5345582126013422),
        ((39, 18, 17), 15.328536061897553, 15.50589064410817, 3.6364010384334124),
        ((39, 19, 27), 8.854_618_725_649_22, 15.070038898323459, 3.898_377_552_118_069),
        ((39, 19, 18), 14.462_460_376_361_65, 15.592793829693239, 3.581_036_083_871_75),
        ((20, 12, 10), 6.763_049_094_928_345, 15.727213979979863, 3.503_020_700_753_693),
    ];
    for ((k, l, kp), gamma, q, qp) in cases {
        let e = feasibility_envelope(&FilterParams::new(k, l, kp), EnvelopeOptions::default()).unwrap();
        assert!(close(e.gamma, gamma, 1e-12), "gamma {k} {l} {kp}: {}", e.gamma);
        assert!(close(e.q, q, 1e-12));
        assert!(close(e.qprime, qp, 1e-9), "q' {k} {l} {kp}: {} vs {qp}", e.qprime);
        assert!(close(e.r, 2.0 * e.qprime, 1e-15));
        assert_eq!(e.alpha, (k - kp) as f64);
    }
}

#[test]
fn envelope_flags_hypotheses() {
    let ok = feasibility_envelope(&FilterParams::new(39, 18, 27), EnvelopeOptions::default()).unwrap();
    assert!(ok.certifying);
    let bad = feasibility_envelope(&FilterParams::new(39, 18, 30), EnvelopeOptions::default()).unwrap();
    assert!(!bad.certifying);
    assert!(bad.violations.iter().any(|v| v.contains("1/4")));
    assert!(matches!(
        feasibility_envelope(&FilterParams::new(39, 18, 39), EnvelopeOptions::default()),
        Err(ConeletError::InvalidParams(_))
    ));
}

#[test]
fn construction_hypotheses() {
    assert!(FilterParams::new(39, 18, 27).construction_violations().is_empty());
    let v = FilterParams::new(3, 18, 0).construction_violations();
    assert!(v.iter().any(|s| s.contains("3L/2 <= K")));
}

#[test]
fn invalid_orders_rejected() {
    assert!(matches!(halfband_power(0, 3), Err(ConeletError::InvalidParams(_))));
    assert!(matches!(halfband_power(3, 0), Err(ConeletError::InvalidParams(_))));
    assert!(matches!(halfband_power(200, 100), Err(ConeletError::DegreeTooLarge { .. })));
}

#[test]
fn expanded_matches_factored() {
    let p = halfband_power(9, 5).unwrap();
    let c = p.coefficients();
    for i in 0..=20 {
        let y = i as f64 / 20.0;
        let direct: f64 = c.iter().rev().fold(0.0, |a, &b| a * y + b);
        assert!((direct - p.eval(y)).abs() < 1e-9);
    }
}

#[test]
fn highpass_response() {
    let f = spectral_factorize(&halfband_power(5, 5).unwrap()).unwrap();
    let p = halfband_power(5, 5).unwrap();
    for i in 0..40 {
        let xi = i as f64 / 41.0;
        assert!((f.m1(xi).norm_sqr() - eval_m1_sq(&p, xi)).abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m0_sq_is_a_flat_decreasing_lowpass(k in 1usize..40, l in 1usize..20, t in 0.0f64..0.5, dt in 0.0f64..0.05) {
        // (K, L) arbitrary within range; L <= K keeps the sum truncated.
        let l = l.min(k);
        let p = halfband_power(k, l).unwrap();
        let a = eval_m0_sq(&p, t);
        let b = eval_m0_sq(&p, (t + dt).min(0.5));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        prop_assert!(b <= a + 1e-12);
        prop_assert!(a + eval_m0_sq(&p, t + 0.5) <= 1.0 + 1e-12);
        prop_assert!((eval_m0_sq(&p, 0.0) - 1.0).abs() < 1e-15);
        prop_assert!(eval_m0_sq(&p, 0.5).abs() < 1e-15);
        // symmetric and 1-periodic
        prop_assert!((eval_m0_sq(&p, -t) - a).abs() < 1e-13);
        prop_assert!((eval_m0_sq(&p, t + 3.0) - a).abs() < 1e-10);
    }

    #[test]
    fn daubechies_case_is_qmf(k in 1usize..25, t in -1.0f64..1.0) {
        let p = halfband_power(k, k).unwrap();
        prop_assert!((eval_m0_sq(&p, t) + eval_m1_sq(&p, t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_filter_dominates(k in 2usize..40, l in 1usize..20, kp_frac in 0.0f64..1.0, t in 0.0f64..0.5) {
        let kp = ((k - 1) as f64 * kp_frac) as usize;
        let p = halfband_power(k, l).unwrap();
        prop_assert!(eval_tilde_m0_sq(&p, kp, t) >= eval_m0_sq(&p, t) * (1.0 - 1e-12));
    }

    #[test]
    fn factorization_reproduces_power(k in 1usize..20, l in 1usize..10) {
        let p = halfband_power(k, l).unwrap();
        let f = spectral_factorize(&p).unwrap();
        prop_assert!(f.residual <= 1e-10);
    }
}
