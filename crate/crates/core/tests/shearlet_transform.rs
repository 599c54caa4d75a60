use conelet::filter_design::FilterParams;
use conelet::frame_certification::FeasibleParamSet;
use conelet::shearlet_transform::io::{read_coefficients, write_coefficients};
use conelet::shearlet_transform::*;
use conelet::ConeletError;
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn set() -> FeasibleParamSet {
    FeasibleParamSet::regular(1.0, 0.15)
}

fn sys16() -> &'static ShearletSystem {
    static S: OnceLock<ShearletSystem> = OnceLock::new();
    S.get_or_init(|| build_system(&FilterParams::new(12, 8, 0), &set(), 16, 2).unwrap())
}

fn sys64() -> &'static ShearletSystem {
    static S: OnceLock<ShearletSystem> = OnceLock::new();
    S.get_or_init(|| build_system(&FilterParams::new(39, 18, 0), &set(), 64, 3).unwrap())
}

fn sys128() -> &'static ShearletSystem {
    static S: OnceLock<ShearletSystem> = OnceLock::new();
    S.get_or_init(|| build_system(&FilterParams::new(39, 18, 0), &set(), 128, 4).unwrap())
}

fn sys64d() -> &'static ShearletSystem {
    static S: OnceLock<ShearletSystem> = OnceLock::new();
    S.get_or_init(|| {
        build_system_with(&FilterParams::new(39, 19, 0), &set(), 64, 3, Sampling::Decimated { threshold: DEFAULT_ALIAS_THRESHOLD }).unwrap()
    })
}

fn random_coeffs(sys: &ShearletSystem, seed: u64) -> CoefficientSet {
    let n = sys.n();
    let mut c = CoefficientSet::zeros(&sys.info);
    for (b, band) in c.bands.iter_mut().enumerate() {
        let r = Image::random(n, seed * 1000 + b as u64);
        let len = band.len();
        band.copy_from_slice(&r.data[..len]);
    }
    c
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

fn ceil_sqrt_pow2(j: u32) -> i32 {
    // smallest m with m² >= 2^j
    let t = 1u64 << j;
    (0..).find(|&m: &u64| m * m >= t).unwrap() as i32
}

#[test]
fn subband_count_matches_index_set() {
    assert_eq!(subband_count(3), 27);
    for jm in 1..=14 {
        let brute: usize = 1 + 2 * (0..jm).map(|j| (2 * ceil_sqrt_pow2(j) + 1) as usize).sum::<usize>();
        assert_eq!(subband_count(jm), brute);
        assert_eq!(shear_bound(jm), ceil_sqrt_pow2(jm));
    }
    assert_eq!(sys64().subbands().len(), 27);
    assert_eq!(sys128().subbands().len(), 41);
}

#[test]
fn subband_order_is_sorted_and_unique() {
    let s = sys128().subbands();
    assert!(s.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(s[0].cone, Cone::Lowpass);
}

#[test]
fn dc_values() {
    let s = sys64();
    assert!((s.filter_response(0)[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    for i in 1..s.subbands().len() {
        assert!(s.filter_response(i)[0].norm() < 1e-14);
    }
}

/// `φ̂` by the plain infinite product truncated at 60 factors.
fn phi_product(m0: impl Fn(f64) -> Complex64, xi: f64) -> Complex64 {
    (0..60).fold(Complex64::new(1.0, 0.0), |acc, j| acc * m0(xi * 2f64.powi(-j)))
}

#[test]
fn unsheared_band_matches_generator_samples() {
    let s = sys64();
    let n = s.n();
    let w = s.info.frequency_scale;
    let idx = s.subbands().iter().position(|b| b.cone == Cone::Horizontal && b.j == 0 && b.k == 0).unwrap();
    let g = s.filter_response(idx);
    let f = &s.filter;
    let fr = |i: usize| if i < n / 2 { i as f64 } else { i as f64 - n as f64 } / w;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == n / 2 || j == n / 2 {
                continue; // symmetrized Nyquist bins
            }
            let (x1, x2) = (fr(i), fr(j));
            let want = f.m1(4.0 * x1) * phi_product(|x| f.m0(x), x1) * phi_product(|x| f.m0(x), 2.0 * x2);
            worst = worst.max((g[i * n + j] - want).norm());
        }
    }
    assert!(worst < 1e-12, "{worst}");
    // vertical cone is the coordinate swap
    let v = s.subbands().iter().position(|b| b.cone == Cone::Vertical && b.j == 0 && b.k == 0).unwrap();
    let gv = s.filter_response(v);
    for i in 0..n {
        for j in 0..n {
            assert_eq!(gv[j * n + i], g[i * n + j]);
        }
    }
}

#[test]
fn analyze_zero_and_linearity() {
    let s = sys64();
    let z = s.analyze(&Image::zeros(64)).unwrap();
    assert!(z.bands.iter().flatten().all(|&v| v == 0.0));
    assert!(s.adjoint(&CoefficientSet::zeros(&s.info)).unwrap().data.iter().all(|&v| v == 0.0));
    let (f, g) = (Image::random(64, 1), Image::random(64, 2));
    let (a, b) = (0.7, -2.3);
    let mix = Image { n: 64, data: f.data.iter().zip(&g.data).map(|(x, y)| a * x + b * y).collect() };
    let (cf, cg, cm) = (s.analyze(&f).unwrap(), s.analyze(&g).unwrap(), s.analyze(&mix).unwrap());
    let mut worst = 0.0f64;
    for bnd in 0..cm.bands.len() {
        for i in 0..64 * 64 {
            worst = worst.max((cm.bands[bnd][i] - a * cf.bands[bnd][i] - b * cg.bands[bnd][i]).abs());
        }
    }
    assert!(worst < 1e-10, "{worst}");
    let (c1, c2) = (random_coeffs(s, 1), random_coeffs(s, 2));
    let cmix = CoefficientSet {
        info: s.info.clone(),
        bands: c1.bands.iter().zip(&c2.bands).map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()).collect(),
    };
    let want: Vec<f64> = s
        .adjoint(&c1)
        .unwrap()
        .data
        .iter()
        .zip(&s.adjoint(&c2).unwrap().data)
        .map(|(x, y)| a * x + b * y)
        .collect();
    assert!(rel_err(&s.adjoint(&cmix).unwrap().data, &want) < 1e-12);
}

#[test]
fn adjoint_identity_hundred_trials() {
    let s = sys64();
    let mut worst = 0.0f64;
    for t in 0..100 {
        let f = Image::random(64, 10_000 + t);
        let c = random_coeffs(s, 20_000 + t);
        let lhs = s.analyze(&f).unwrap().dot(&c);
        let af = s.adjoint(&c).unwrap();
        let rhs: f64 = f.data.iter().zip(&af.data).map(|(x, y)| x * y).sum();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn adjoint_matches_dense_transpose() {
    let s = sys16();
    let n = 16;
    let nb = s.subbands().len();
    // columns of the analysis matrix from delta images
    let cols: Vec<CoefficientSet> = (0..n * n)
        .map(|p| {
            let mut d = Image::zeros(n);
            d.data[p] = 1.0;
            s.analyze(&d).unwrap()
        })
        .collect();
    let c = random_coeffs(s, 7);
    let dense: Vec<f64> = cols.iter().map(|col| col.dot(&c)).collect();
    assert!(rel_err(&s.adjoint(&c).unwrap().data, &dense) < 1e-12);
    // S δ is real and symmetric under x ↦ -x and the coordinate swap
    let sd = s.adjoint(&cols[0]).unwrap();
    for i in 0..n {
        for j in 0..n {
            let v = sd.data[i * n + j];
            assert!((v - sd.data[((n - i) % n) * n + (n - j) % n]).abs() < 1e-13);
            assert!((v - sd.data[j * n + i]).abs() < 1e-13);
        }
    }
    assert_eq!(cols[0].bands.len(), nb);
}

#[test]
fn frame_operator_is_the_symbol() {
    let s = sys64();
    let f = Image::random(64, 3);
    let sf = s.frame_operator(&f).unwrap();
    // independent: apply Σ|g|² by a naive DFT on each row/column
    let n = 64;
    let mult: Vec<f64> = (0..n * n).map(|b| (0..s.subbands().len()).map(|i| s.filter_response(i)[b].norm_sqr()).sum()).collect();
    let tw = |k: usize| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / n as f64);
    let dft = |x: &[Complex64], sign: f64| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..n {
                    for q in 0..n {
                        let t = tw((a * p + b * q) % n);
                        acc += x[p * n + q] * if sign > 0.0 { t } else { t.conj() };
                    }
                }
                out[a * n + b] = acc;
            }
        }
        out
    };
    let mut spec = dft(&f.data.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(), 1.0);
    for (v, m) in spec.iter_mut().zip(&mult) {
        *v *= m / (n * n) as f64;
    }
    let back: Vec<f64> = dft(&spec, -1.0).iter().map(|z| z.re).collect();
    assert!(rel_err(&sf.data, &back) < 1e-11);
}

#[test]
fn reconstruct_random_128() {
    let s = sys128();
    let f = Image::random(128, 42);
    let (g, rep) = reconstruct(s, &s.analyze(&f).unwrap(), 1e-8).unwrap();
    assert!(rel_err(&g.data, &f.data) <= 1e-6);
    assert!(rep.relative_residual <= 1e-8);
    // CG bound: iterations <= ½√κ ln(2/tol)
    let (lo, hi) = s.multiplier_bounds();
    let bound = 0.5 * (hi / lo).sqrt() * (2.0f64 / 1e-8).ln();
    let it = rep.iterations as f64;
    assert!(it <= 3.0 * bound && it >= bound / 3.0, "iterations {it} bound {bound}");
    let (z, _) = reconstruct(s, &CoefficientSet::zeros(&s.info), 1e-8).unwrap();
    assert!(z.data.iter().all(|&v| v == 0.0));
}

#[test]
fn reconstruct_reports_stall() {
    let s = sys64();
    let c = s.analyze(&Image::random(64, 5)).unwrap();
    let b = s.adjoint(&c).unwrap();
    let r = solve_frame_operator(s, &b, None, CgOptions { tol: 1e-14, max_iter: 3, preconditioned: false });
    assert!(matches!(r, Err(ConeletError::NotConverged { iterations: 3, .. })));
    let (_, rep) = solve_frame_operator(s, &b, None, CgOptions { tol: 1e-12, max_iter: 50, preconditioned: true }).unwrap();
    assert!(rep.iterations <= 2);
}

#[test]
fn numeric_bounds_against_exact_symbol() {
    let s = sys64();
    let est = numeric_frame_bounds(s, 60).unwrap();
    let (lo, hi) = s.multiplier_bounds();
    // Rayleigh quotients lie inside the spectrum
    assert!(est.lambda_min >= lo * (1.0 - 1e-9) && est.lambda_max <= hi * (1.0 + 1e-9));
    assert!((est.lambda_max - hi) / hi < 0.02, "{} vs {hi}", est.lambda_max);
    assert!((est.lambda_min - lo) / lo < 0.05, "{} vs {lo}", est.lambda_min);
    assert!(matches!(numeric_frame_bounds(s, 10), Err(ConeletError::InvalidParams(_))));
    // energy sandwich
    for t in 0..5 {
        let f = Image::random(64, 300 + t);
        let e = s.analyze(&f).unwrap().energy();
        let nf = f.norm().powi(2);
        assert!(e >= lo * nf * (1.0 - 1e-12) && e <= hi * nf * (1.0 + 1e-12));
    }
}

#[test]
fn frequency_coverage_is_positive() {
    for s in [sys16(), sys64(), sys128()] {
        let (lo, hi) = s.multiplier_bounds();
        assert!(lo > 0.0 && hi.is_finite() && hi >= lo);
    }
}

#[test]
fn shift_covariance() {
    let s = sys64();
    let mut d = Image::zeros(64);
    d.data[5 * 64 + 9] = 1.0;
    let c = s.analyze(&d).unwrap();
    for &(a, b) in &[(1isize, 0isize), (0, 3), (-7, 12), (63, 63)] {
        let cs = s.analyze(&d.shifted(a, b)).unwrap();
        for (band, bs) in c.bands.iter().zip(&cs.bands) {
            let moved = Image { n: 64, data: band.clone() }.shifted(a, b);
            let worst = moved.data.iter().zip(bs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-13);
        }
    }
}

#[test]
fn build_errors() {
    let p = FilterParams::new(12, 8, 0);
    assert!(matches!(build_system(&p, &set(), 16, 5), Err(ConeletError::ScaleOverflow(_))));
    assert!(matches!(build_system(&p, &set(), 48, 2), Err(ConeletError::InvalidParams(_))));
    let s = sys16();
    assert!(matches!(s.analyze(&Image::zeros(32)), Err(ConeletError::SizeMismatch(_))));
    let mut c = CoefficientSet::zeros(&s.info);
    c.bands.pop();
    c.info.subbands.pop();
    assert!(matches!(s.adjoint(&c), Err(ConeletError::SizeMismatch(_))));
}

#[test]
fn container_round_trip_is_bit_exact() {
    let s = sys16();
    let c = random_coeffs(s, 99);
    let extra = serde_json::json!({"note": "x"});
    let mut buf = Vec::new();
    write_coefficients(&mut buf, &c, &extra).unwrap();
    let (back, ex) = read_coefficients(&buf[..]).unwrap();
    assert_eq!(ex, extra);
    assert_eq!(back.info, c.info);
    for (a, b) in back.bands.iter().zip(&c.bands) {
        assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(matches!(read_coefficients(&bad[..]), Err(ConeletError::Format(_))));
    assert!(read_coefficients(&buf[..buf.len() - 1]).is_err());
}

#[test]
fn analysis_is_thread_count_independent() {
    let s = sys64();
    let f = Image::random(64, 77);
    let run = |t: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
        pool.install(|| {
            let c = s.analyze(&f).unwrap();
            (c.clone(), s.adjoint(&c).unwrap())
        })
    };
    let (c1, a1) = run(1);
    let (c4, a4) = run(4);
    assert_eq!(c1, c4);
    assert!(a1.data.iter().zip(&a4.data).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn decimated_adjoint_and_reconstruction() {
    let s = sys64d();
    let total: usize = s.info.lattices.iter().map(|l| l.points(64)).sum();
    assert!(total < 64 * 64 * s.subbands().len() / 2, "decimation should cut the coefficient count");
    let mut worst = 0.0f64;
    for t in 0..100 {
        let f = Image::random(64, 50_000 + t);
        let c = random_coeffs(s, 60_000 + t);
        let lhs = s.analyze(&f).unwrap().dot(&c);
        let af = s.adjoint(&c).unwrap();
        let rhs: f64 = f.data.iter().zip(&af.data).map(|(x, y)| x * y).sum();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    assert!(worst < 1e-10, "{worst}");
    let f = Image::random(64, 8);
    let (g, _) = reconstruct(s, &s.analyze(&f).unwrap(), 1e-10).unwrap();
    assert!(rel_err(&g.data, &f.data) < 1e-8);
}

#[test]
fn decimated_bounds_stay_near_the_symbol() {
    let s = sys64d();
    let est = numeric_frame_bounds(s, 50).unwrap();
    let (lo, hi) = s.multiplier_bounds();
    assert!(est.lambda_min > 0.0 && est.lambda_max >= est.lambda_min);
    let ratio = est.lambda_max / est.lambda_min;
    assert!((ratio / (hi / lo) - 1.0).abs() < 0.05, "{ratio} vs {}", hi / lo);
}

#[test]
fn lattice_points_are_distinct() {
    for l in &sys64d().info.lattices {
        let mut p = l.positions(64);
        assert_eq!(p.len(), l.points(64));
        p.sort_unstable();
        p.dedup();
        assert_eq!(p.len(), l.points(64));
    }
}

#[test]
fn decimated_shift_covariance_on_common_lattice() {
    let s = sys64d();
    let n = 64isize;
    let step = s.info.lattices.iter().map(|l| l.d1 * l.d2).max().unwrap() as isize;
    let f = Image::random(64, 21);
    let c = s.analyze(&f).unwrap();
    let cs = s.analyze(&f.shifted(step, 0)).unwrap();
    // a shift by a common lattice vector permutes coefficients inside each band
    for (b, l) in s.info.lattices.iter().enumerate() {
        let pos = l.positions(64);
        let lookup: std::collections::HashMap<u32, usize> = pos.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        for (i, &p) in pos.iter().enumerate() {
            let (x1, x2) = (p as isize / n, p as isize % n);
            let moved = (((x1 + step).rem_euclid(n)) * n + x2) as u32;
            let jdx = lookup[&moved];
            assert!((cs.bands[b][jdx] - c.bands[b][i]).abs() < 1e-12);
        }
    }
}

#[test]
fn decimated_container_round_trip() {
    let s = sys64d();
    let c = s.analyze(&Image::random(64, 4)).unwrap();
    let mut buf = Vec::new();
    write_coefficients(&mut buf, &c, &serde_json::Value::Null).unwrap();
    let (back, _) = read_coefficients(&buf[..]).unwrap();
    assert_eq!(back, c);
    assert!(s.adjoint(&back).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjointness_property(sf in 0u64..1_000_000, sc in 0u64..1_000_000) {
        let s = sys16();
        let f = Image::random(16, sf);
        let c = random_coeffs(s, sc);
        let lhs = s.analyze(&f).unwrap().dot(&c);
        let af = s.adjoint(&c).unwrap();
        let rhs: f64 = f.data.iter().zip(&af.data).map(|(x, y)| x * y).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn energy_sandwich_property(seed in 0u64..1_000_000, scale in -50.0f64..50.0) {
        let s = sys16();
        let mut f = Image::random(16, seed);
        for v in f.data.iter_mut() { *v *= scale; }
        let (lo, hi) = s.multiplier_bounds();
        let e = s.analyze(&f).unwrap().energy();
        let nf = f.norm().powi(2);
        prop_assert!(e >= lo * nf * (1.0 - 1e-12) - 1e-300);
        prop_assert!(e <= hi * nf * (1.0 + 1e-12) + 1e-300);
    }
}
