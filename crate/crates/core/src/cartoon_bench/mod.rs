//! Cartoon-like test images and nonlinear N-term approximation curves.
//!
//! A cartoon is `f₀ + f₁ χ_B` on the unit torus, where `B` is star-shaped
//! about `x₀` with radius `ρ(θ) = ρ₀(0.6 + A s(θ))` and `s` a random
//! trigonometric polynomial with `Σ|ŝ_n| = 1`. The amplitude `A ≤ 0.4` is the
//! largest that keeps `ρ₀ A Σ n²|ŝ_n| ≤ ν`, which bounds `sup|ρ''|` by `ν`.

pub mod wavelet;

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use wavelet::WaveletBasis;

use crate::error::{invalid, ConeletError, Result};
use crate::filter_design::FilterParams;
use crate::frame_certification::FeasibleParamSet;
use crate::shearlet_transform::{
    build_system_with, default_j_max, solve_frame_operator, CgOptions, Image, Sampling, ShearletSystem, DEFAULT_ALIAS_THRESHOLD,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartoonSpec {
    pub nu: f64,
    pub rho0: f64,
    pub seed: u64,
    pub size: usize,
    pub supersample: usize,
    /// Harmonics in the boundary series.
    pub harmonics: usize,
    /// Trigonometric degree of `f₀` and `f₁`.
    pub smooth_degree: usize,
    /// `false` gives the smooth-only image `f₀`.
    pub edge: bool,
}

impl Default for CartoonSpec {
    fn default() -> Self {
        Self { nu: 10.0, rho0: 0.35, seed: 1, size: 256, supersample: 4, harmonics: 6, smooth_degree: 3, edge: true }
    }
}

/// Boundary and smooth-part coefficients of a generated cartoon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartoonMeta {
    pub center: (f64, f64),
    pub amplitude: f64,
    /// `(a_n, b_n)` of `s(θ) = Σ a_n cos nθ + b_n sin nθ`, `n = 1, 2, …`.
    pub rho_coeffs: Vec<(f64, f64)>,
    pub curvature_bound: f64,
    pub f0: Vec<TrigTerm>,
    pub f1: Vec<TrigTerm>,
}

impl CartoonMeta {
    pub fn rho(&self, rho0: f64, theta: f64) -> f64 {
        let s: f64 = self
            .rho_coeffs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let t = (i + 1) as f64 * theta;
                a * t.cos() + b * t.sin()
            })
            .sum();
        rho0 * (0.6 + self.amplitude * s)
    }

    pub fn rho_second(&self, rho0: f64, theta: f64) -> f64 {
        let s: f64 = self
            .rho_coeffs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let n = (i + 1) as f64;
                -n * n * (a * (n * theta).cos() + b * (n * theta).sin())
            })
            .sum();
        rho0 * self.amplitude * s
    }
}

/// `amp · cos(2π(p x₁ + q x₂) + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub p: i32,
    pub q: i32,
    pub amp: f64,
    pub phase: f64,
}

fn eval_trig(terms: &[TrigTerm], x1: f64, x2: f64) -> f64 {
    terms.iter().map(|t| t.amp * (2.0 * PI * (t.p as f64 * x1 + t.q as f64 * x2) + t.phase).cos()).sum()
}

fn random_field(rng: &mut ChaCha8Rng, degree: usize, mean: f64, spread: f64) -> Vec<TrigTerm> {
    let d = degree as i32;
    let mut terms = vec![TrigTerm { p: 0, q: 0, amp: mean, phase: 0.0 }];
    let mut raw = Vec::new();
    for p in 0..=d {
        for q in -d..=d {
            if (p == 0 && q <= 0) || p * p + q * q > d * d {
                continue;
            }
            let amp: f64 = rng.gen_range(-1.0..1.0) / (1.0 + (p * p + q * q) as f64);
            raw.push(TrigTerm { p, q, amp, phase: rng.gen_range(0.0..2.0 * PI) });
        }
    }
    let total: f64 = raw.iter().map(|t| t.amp.abs()).sum();
    for t in raw.iter_mut() {
        t.amp *= spread / total.max(1e-300);
    }
    terms.extend(raw);
    terms
}

pub fn make_cartoon(spec: &CartoonSpec) -> Result<(Image, CartoonMeta)> {
    if !(spec.nu > 0.0) || !spec.nu.is_finite() {
        return invalid(format!("nu must be positive (nu={})", spec.nu));
    }
    if !(spec.rho0 > 0.0 && spec.rho0 < 1.0) {
        return invalid(format!("rho0 must lie in (0, 1) (rho0={})", spec.rho0));
    }
    if spec.rho0 >= 0.45 {
        return invalid(format!("rho0={} leaves the unit square; use rho0 < 0.45", spec.rho0));
    }
    if spec.size < 2 || spec.supersample == 0 {
        return invalid("size >= 2 and supersample >= 1 are required");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let center = (0.5 + rng.gen_range(-0.05..0.05), 0.5 + rng.gen_range(-0.05..0.05));
    let mut coeffs: Vec<(f64, f64)> = (0..spec.harmonics).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let l1: f64 = coeffs.iter().map(|(a, b)| a.hypot(*b)).sum();
    if l1 > 0.0 {
        for c in coeffs.iter_mut() {
            c.0 /= l1;
            c.1 /= l1;
        }
    }
    let weight: f64 = coeffs.iter().enumerate().map(|(i, (a, b))| ((i + 1) as f64).powi(2) * a.hypot(*b)).sum();
    let amplitude = if weight > 0.0 { 0.4f64.min(spec.nu / (spec.rho0 * weight)) } else { 0.0 };
    let f0 = random_field(&mut rng, spec.smooth_degree, 0.2, 0.1);
    let f1 = random_field(&mut rng, spec.smooth_degree, 0.6, 0.1);
    let meta = CartoonMeta { center, amplitude, rho_coeffs: coeffs, curvature_bound: spec.rho0 * amplitude * weight, f0, f1 };
    let worst = (0..8192).map(|i| meta.rho_second(spec.rho0, 2.0 * PI * i as f64 / 8192.0).abs()).fold(0.0, f64::max);
    if worst > spec.nu * (1.0 + 1e-12) {
        return Err(ConeletError::CurvatureInfeasible(format!("sup|rho''| = {worst} exceeds nu = {}", spec.nu)));
    }

    let n = spec.size;
    let s = spec.supersample;
    let mut img = Image::zeros(n);
    let h = 1.0 / (n * s) as f64;
    for i in 0..n {
        for j in 0..n {
            let (x1, x2) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            let mut v = eval_trig(&meta.f0, x1, x2);
            if spec.edge {
                let mut inside = 0usize;
                for a in 0..s {
                    for b in 0..s {
                        let y1 = (i * s + a) as f64 * h + 0.5 * h - center.0;
                        let y2 = (j * s + b) as f64 * h + 0.5 * h - center.1;
                        let r = y1.hypot(y2);
                        if r <= meta.rho0_max(spec.rho0) && r <= meta.rho(spec.rho0, y2.atan2(y1)) {
                            inside += 1;
                        }
                    }
                }
                if inside > 0 {
                    v += eval_trig(&meta.f1, x1, x2) * inside as f64 / (s * s) as f64;
                }
            }
            img.data[i * n + j] = v;
        }
    }
    Ok((img, meta))
}

impl CartoonMeta {
    fn rho0_max(&self, rho0: f64) -> f64 {
        rho0 * (0.6 + self.amplitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub n_terms: usize,
    /// `‖f - f_N‖²` in `L²([0,1]²)`, i.e. the pixel mean of squared errors.
    pub err: f64,
    /// `err · N² / (ln N)³`.
    pub err_deflated: f64,
}

fn decay_point(n_terms: usize, err: f64) -> DecayPoint {
    let l = (n_terms as f64).ln();
    DecayPoint { n_terms, err, err_deflated: err * (n_terms as f64).powi(2) / (l * l * l) }
}

/// Indices of the `count` largest magnitudes; ties go to the smaller index.
pub fn largest_indices(values: &[f64], count: usize) -> Vec<usize> {
    let cmp = |a: &usize, b: &usize| values[*b].abs().total_cmp(&values[*a].abs()).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let count = count.min(idx.len());
    if count == 0 {
        return Vec::new();
    }
    if count < idx.len() {
        idx.select_nth_unstable_by(count - 1, cmp);
        idx.truncate(count);
    }
    idx.sort_unstable_by(cmp);
    idx
}

fn check_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return invalid("N list must be non-empty, positive and strictly ascending");
    }
    Ok(())
}

fn mse(a: &Image, b: &Image) -> f64 {
    a.data.iter().zip(&b.data).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.data.len() as f64
}

/// N-term curve through the shearlet frame: keep the largest coefficients,
/// then invert the frame operator on their synthesis.
pub fn n_term_error(sys: &ShearletSystem, img: &Image, n_list: &[usize]) -> Result<Vec<DecayPoint>> {
    check_list(n_list)?;
    let coeffs = sys.analyze(img)?;
    let flat: Vec<f64> = coeffs.bands.concat();
    let mut starts = Vec::with_capacity(coeffs.bands.len());
    let mut acc = 0;
    for band in &coeffs.bands {
        starts.push(acc);
        acc += band.len();
    }
    let order = largest_indices(&flat, *n_list.last().unwrap());
    let mut kept = coeffs.clone();
    kept.bands.iter_mut().for_each(|b| b.iter_mut().for_each(|v| *v = 0.0));
    let mut done = 0;
    let mut out = Vec::with_capacity(n_list.len());
    let opts = CgOptions { tol: 1e-12, max_iter: 500, preconditioned: true };
    for &nt in n_list {
        let upto = nt.min(order.len());
        for &i in &order[done..upto] {
            let band = starts.partition_point(|&st| st <= i) - 1;
            kept.bands[band][i - starts[band]] = flat[i];
        }
        done = upto;
        let b = sys.adjoint(&kept)?;
        let (approx, _) = solve_frame_operator(sys, &b, None, opts)?;
        out.push(decay_point(nt, mse(img, &approx)));
    }
    Ok(out)
}

/// N-term curve in an orthonormal wavelet basis.
pub fn wavelet_n_term_error(basis: &WaveletBasis, img: &Image, n_list: &[usize]) -> Result<Vec<DecayPoint>> {
    check_list(n_list)?;
    if img.n != basis.n {
        return Err(ConeletError::SizeMismatch(format!("image is {}x{}, basis expects {}", img.n, img.n, basis.n)));
    }
    let c = basis.forward(img);
    let order = largest_indices(&c, *n_list.last().unwrap());
    let mut kept = vec![0.0; c.len()];
    let mut done = 0;
    let mut out = Vec::with_capacity(n_list.len());
    for &nt in n_list {
        let upto = nt.min(order.len());
        for &i in &order[done..upto] {
            kept[i] = c[i];
        }
        done = upto;
        out.push(decay_point(nt, mse(img, &basis.inverse(&kept))));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub deflated_slope: f64,
    pub deflated_intercept: f64,
    pub points: usize,
}

fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least squares of `ln err` and `ln(err N²/(ln N)³)` against `ln N` over `lo <= N <= hi`.
pub fn slope_fit(curve: &[DecayPoint], lo: usize, hi: usize) -> Result<SlopeFit> {
    let pts: Vec<&DecayPoint> = curve.iter().filter(|p| p.n_terms >= lo && p.n_terms <= hi && p.err > 0.0).collect();
    let distinct = {
        let mut v: Vec<usize> = pts.iter().map(|p| p.n_terms).collect();
        v.dedup();
        v.len()
    };
    if distinct < 4 {
        return invalid(format!("insufficient points: {distinct} in [{lo}, {hi}], need 4"));
    }
    let x: Vec<f64> = pts.iter().map(|p| (p.n_terms as f64).ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.err.ln()).collect();
    let yd: Vec<f64> = pts.iter().map(|p| p.err_deflated.ln()).collect();
    let (slope, intercept) = ols(&x, &y);
    let (deflated_slope, deflated_intercept) = ols(&x, &yd);
    Ok(SlopeFit { slope, intercept, deflated_slope, deflated_intercept, points: pts.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub size: usize,
    pub j_max: Option<u32>,
    pub c: (f64, f64),
    pub sampling: Sampling,
    pub seeds: Vec<u64>,
    pub n_list: Vec<usize>,
    pub fit_range: (usize, usize),
    /// `K = L` of the Daubechies baseline.
    pub wavelet_order: usize,
    pub wavelet_levels: Option<u32>,
    pub cartoon: CartoonSpec,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            k: 39,
            l: 19,
            size: 256,
            j_max: None,
            c: (1.0, 0.15),
            sampling: Sampling::Decimated { threshold: DEFAULT_ALIAS_THRESHOLD },
            seeds: vec![1, 2, 3, 4, 5],
            n_list: (6..=14).map(|e| 1usize << e).collect(),
            fit_range: (1 << 8, 1 << 13),
            wavelet_order: 19,
            wavelet_levels: None,
            cartoon: CartoonSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub cartoon: CartoonMeta,
    pub shearlet: Vec<DecayPoint>,
    pub wavelet: Vec<DecayPoint>,
    pub shearlet_fit: SlopeFit,
    pub wavelet_fit: SlopeFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub j_max: u32,
    pub subbands: usize,
    pub results: Vec<SeedResult>,
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let j_max = cfg.j_max.unwrap_or_else(|| default_j_max(cfg.size));
    let set = FeasibleParamSet::regular(cfg.c.0, cfg.c.1);
    let sys = build_system_with(&FilterParams::new(cfg.k, cfg.l, 0), &set, cfg.size, j_max, cfg.sampling)?;
    let levels = cfg.wavelet_levels.unwrap_or_else(|| default_j_max(cfg.size));
    let basis = WaveletBasis::new(cfg.size, cfg.wavelet_order, levels)?;
    let mut results = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let spec = CartoonSpec { seed, size: cfg.size, ..cfg.cartoon.clone() };
        let (img, meta) = make_cartoon(&spec)?;
        let shearlet = n_term_error(&sys, &img, &cfg.n_list)?;
        let wavelet = wavelet_n_term_error(&basis, &img, &cfg.n_list)?;
        let shearlet_fit = slope_fit(&shearlet, cfg.fit_range.0, cfg.fit_range.1)?;
        let wavelet_fit = slope_fit(&wavelet, cfg.fit_range.0, cfg.fit_range.1)?;
        results.push(SeedResult { seed, cartoon: meta, shearlet, wavelet, shearlet_fit, wavelet_fit });
    }
    Ok(BenchReport { config: cfg.clone(), j_max, subbands: sys.subbands().len(), results })
}

/// Columns: `seed,system,N,err,err_deflated`.
pub fn write_decay_csv<W: Write>(mut w: W, report: &BenchReport) -> Result<()> {
    writeln!(w, "seed,system,N,err,err_deflated")?;
    for r in &report.results {
        for (name, curve) in [("shearlet", &r.shearlet), ("wavelet", &r.wavelet)] {
            for p in curve {
                writeln!(w, "{},{},{},{:e},{:e}", r.seed, name, p.n_terms, p.err, p.err_deflated)?;
            }
        }
    }
    Ok(())
}
