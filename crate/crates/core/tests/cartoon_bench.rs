use conelet::cartoon_bench::*;
use conelet::filter_design::FilterParams;
use conelet::frame_certification::FeasibleParamSet;
use conelet::shearlet_transform::*;
use conelet::ConeletError;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn small_spec(seed: u64) -> CartoonSpec {
    CartoonSpec { seed, size: 64, ..CartoonSpec::default() }
}

fn sys64() -> &'static ShearletSystem {
    static S: OnceLock<ShearletSystem> = OnceLock::new();
    S.get_or_init(|| {
        build_system_with(
            &FilterParams::new(39, 19, 0),
            &FeasibleParamSet::regular(1.0, 0.15),
            64,
            3,
            Sampling::Decimated { threshold: DEFAULT_ALIAS_THRESHOLD },
        )
        .unwrap()
    })
}

/// Central second difference of ρ.
fn rho_second_fd(meta: &CartoonMeta, rho0: f64, t: f64) -> f64 {
    let h = 1e-4;
    (meta.rho(rho0, t + h) - 2.0 * meta.rho(rho0, t) + meta.rho(rho0, t - h)) / (h * h)
}

#[test]
fn disc_case_has_zero_curvature() {
    for nu in [1e-3, 1.0, 100.0] {
        let (img, meta) = make_cartoon(&CartoonSpec { nu, harmonics: 0, ..small_spec(3) }).unwrap();
        assert_eq!(meta.curvature_bound, 0.0);
        assert!((0..100).all(|i| meta.rho_second(0.35, i as f64 * 0.1) == 0.0));
        assert!(img.data.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn same_seed_is_bit_identical() {
    let (a, ma) = make_cartoon(&small_spec(11)).unwrap();
    let (b, mb) = make_cartoon(&small_spec(11)).unwrap();
    assert_eq!(ma, mb);
    assert!(a.data.iter().zip(&b.data).all(|(x, y)| x.to_bits() == y.to_bits()));
    let (c, _) = make_cartoon(&small_spec(12)).unwrap();
    assert_ne!(a.data, c.data);
}

#[test]
fn parameter_errors() {
    assert!(matches!(make_cartoon(&CartoonSpec { nu: 0.0, ..small_spec(1) }), Err(ConeletError::InvalidParams(_))));
    assert!(matches!(make_cartoon(&CartoonSpec { rho0: 1.0, ..small_spec(1) }), Err(ConeletError::InvalidParams(_))));
    assert!(make_cartoon(&CartoonSpec { rho0: 0.6, ..small_spec(1) }).is_err());
}

#[test]
fn set_stays_inside_the_square() {
    for seed in 0..20 {
        let spec = CartoonSpec { seed, size: 8, ..CartoonSpec::default() };
        let (_, meta) = make_cartoon(&spec).unwrap();
        for i in 0..4096 {
            let t = 2.0 * PI * i as f64 / 4096.0;
            let r = meta.rho(spec.rho0, t);
            assert!(r > 0.0 && r <= spec.rho0);
            let (x, y) = (meta.center.0 + r * t.cos(), meta.center.1 + r * t.sin());
            assert!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0);
        }
    }
}

#[test]
fn edge_pixels_are_blended() {
    let (img, _) = make_cartoon(&CartoonSpec { seed: 2, size: 64, ..CartoonSpec::default() }).unwrap();
    let (smooth, _) = make_cartoon(&CartoonSpec { seed: 2, size: 64, edge: false, ..CartoonSpec::default() }).unwrap();
    let diff: Vec<f64> = img.data.iter().zip(&smooth.data).map(|(a, b)| a - b).collect();
    assert!(diff.iter().filter(|d| d.abs() > 1e-12).count() > 64 * 64 / 10);
    // corners are outside B
    assert_eq!(diff[0], 0.0);
}

#[test]
fn slope_fit_synthetic_curves() {
    let ns: Vec<usize> = (6..=14).map(|e| 1usize << e).collect();
    let curve = |f: &dyn Fn(f64) -> f64| -> Vec<DecayPoint> {
        ns.iter()
            .map(|&n| {
                let err = f(n as f64);
                let l = (n as f64).ln();
                DecayPoint { n_terms: n, err, err_deflated: err * (n as f64).powi(2) / l.powi(3) }
            })
            .collect()
    };
    let fit = slope_fit(&curve(&|n| n.powi(-2)), 256, 8192).unwrap();
    assert!((fit.slope + 2.0).abs() < 1e-9);
    let fit = slope_fit(&curve(&|n| 5.0 * n.ln().powi(3) * n.powi(-2)), 256, 8192).unwrap();
    assert!(fit.deflated_slope.abs() < 1e-6);
    assert!((fit.deflated_intercept - 5f64.ln()).abs() < 1e-6);
    assert!(matches!(slope_fit(&curve(&|n| 1.0 / n), 256, 1024), Err(ConeletError::InvalidParams(_))));
}

#[test]
fn n_term_curve_is_monotone_and_exact_at_full_count() {
    let s = sys64();
    let (img, _) = make_cartoon(&small_spec(5)).unwrap();
    let total: usize = s.info.lattices.iter().map(|l| l.points(64)).sum();
    let mut list: Vec<usize> = (4..=14).map(|e| 1usize << e).filter(|&n| n < total).collect();
    list.push(total);
    let curve = n_term_error(s, &img, &list).unwrap();
    for w in curve.windows(2) {
        assert!(w[1].err <= w[0].err + 1e-12, "{} -> {}", w[0].err, w[1].err);
    }
    assert!(curve.last().unwrap().err <= 1e-10);
    assert!(matches!(n_term_error(s, &img, &[8, 4]), Err(ConeletError::InvalidParams(_))));
}

#[test]
fn wavelet_curve_is_monotone_and_exact_at_full_count() {
    let (img, _) = make_cartoon(&small_spec(6)).unwrap();
    let basis = WaveletBasis::new(64, 19, 3).unwrap();
    let list: Vec<usize> = (4..=12).map(|e| 1usize << e).collect();
    let curve = wavelet_n_term_error(&basis, &img, &list).unwrap();
    assert!(curve.windows(2).all(|w| w[1].err <= w[0].err + 1e-14));
    assert!(curve.last().unwrap().err < 1e-20);
    // orthonormal: the error is the discarded energy
    let c = basis.forward(&img);
    let keep = largest_indices(&c, 256);
    let kept: f64 = keep.iter().map(|&i| c[i] * c[i]).sum();
    let total: f64 = c.iter().map(|v| v * v).sum();
    let err = wavelet_n_term_error(&basis, &img, &[256]).unwrap()[0].err;
    assert!((err - (total - kept) / 4096.0).abs() < 1e-12 * total);
}

#[test]
fn smooth_images_need_few_coefficients() {
    let spec = CartoonSpec { seed: 9, size: 128, edge: false, ..CartoonSpec::default() };
    let (img, _) = make_cartoon(&spec).unwrap();
    let sys = build_system_with(
        &FilterParams::new(39, 19, 0),
        &FeasibleParamSet::regular(1.0, 0.15),
        128,
        4,
        Sampling::Decimated { threshold: DEFAULT_ALIAS_THRESHOLD },
    )
    .unwrap();
    let total: usize = sys.info.lattices.iter().map(|l| l.points(128)).sum();
    let budget = total / 20;
    let sh = n_term_error(&sys, &img, &[budget]).unwrap()[0].err;
    assert!(sh <= 1e-6, "{sh}");
    let basis = WaveletBasis::new(128, 19, 4).unwrap();
    let wv = wavelet_n_term_error(&basis, &img, &[128 * 128 / 20]).unwrap()[0].err;
    assert!(wv <= 1e-6, "{wv}");
}

#[test]
fn n_term_is_thread_count_independent() {
    let s = sys64();
    let (img, _) = make_cartoon(&small_spec(7)).unwrap();
    let run = |t: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| n_term_error(s, &img, &[64, 512]).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert!(a.iter().zip(&b).all(|(x, y)| x.err.to_bits() == y.err.to_bits()));
}

#[test]
fn decay_csv_schema() {
    let cfg = BenchConfig {
        size: 32,
        j_max: Some(2),
        seeds: vec![1],
        n_list: vec![16, 32, 64, 128, 256],
        fit_range: (16, 256),
        wavelet_order: 4,
        cartoon: CartoonSpec { size: 32, ..CartoonSpec::default() },
        ..BenchConfig::default()
    };
    let report = run_bench(&cfg).unwrap();
    let mut out = Vec::new();
    write_decay_csv(&mut out, &report).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "seed,system,N,err,err_deflated");
    assert_eq!(lines.count(), 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_budget_holds(seed in 0u64..10_000, nu in 0.01f64..200.0, harmonics in 1usize..12) {
        let spec = CartoonSpec { seed, nu, harmonics, size: 4, ..CartoonSpec::default() };
        let (_, meta) = make_cartoon(&spec).unwrap();
        for i in 0..2048 {
            let t = 2.0 * PI * i as f64 / 2048.0;
            prop_assert!(rho_second_fd(&meta, spec.rho0, t).abs() <= nu * (1.0 + 1e-5) + 1e-6);
            prop_assert!(meta.rho(spec.rho0, t) <= spec.rho0 + 1e-15);
        }
    }

    #[test]
    fn largest_indices_match_full_sort(v in proptest::collection::vec(-3i32..3, 1..60), k in 0usize..70) {
        let vals: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let mut full: Vec<usize> = (0..vals.len()).collect();
        full.sort_by(|&a, &b| vals[b].abs().partial_cmp(&vals[a].abs()).unwrap().then(a.cmp(&b)));
        full.truncate(k.min(vals.len()));
        prop_assert_eq!(largest_indices(&vals, k), full);
    }
}
