//! Explicit frame bounds for cone-adapted shearlet systems.
//!
//! The lower bound comes from `L̃_inf - R̃(c)`, the upper from
//! `L̃_sup + R̃(c)`, both divided by `|det M_c|`. `L̃_sup` and `R̃` use the
//! decay envelope of a reduced filter; the two reduced orders may differ.

mod shear_sum;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use shear_sum::{hurwitz_zeta, integer_shear_sum, shear_sum_constant, ShearSequence, ShearSumGrid};

use crate::error::{invalid, ConeletError, Result};
use crate::filter_design::{
    eval_m1_sq, feasibility_envelope_with, halfband_power, EnvelopeOptions, FeasibilityEnvelope, FilterParams,
    HalfbandPolynomial,
};
use crate::scaling_function::{linf_tilde, phi_hat_sq_truncated, select_j0, DEFAULT_TRUNCATION};

/// Scales `a_j = 2^{-j}`, growth certificate `(p, μ)`, shears and sampling `M_c = diag(c₁, c₂)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleParamSet {
    pub p: u32,
    pub mu: f64,
    pub shears: ShearSequence,
    pub c1: f64,
    pub c2: f64,
}

impl FeasibleParamSet {
    /// Dyadic scales, `p = 1`, `μ = 1/2`, `s_k = k`.
    pub fn regular(c1: f64, c2: f64) -> Self {
        Self { p: 1, mu: 0.5, shears: ShearSequence::Integers, c1, c2 }
    }

    pub fn with_sampling(&self, c1: f64, c2: f64) -> Self {
        Self { c1, c2, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return invalid("p >= 1 is required");
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return invalid(format!("mu must lie in (0,1) (mu={})", self.mu));
        }
        // a_{j+p}/a_j = 2^{-p} for dyadic scales; equality with μ is accepted.
        if 2f64.powi(-(self.p as i32)) > self.mu {
            return invalid(format!("growth condition a_(j+p)/a_j <= mu fails (p={}, mu={})", self.p, self.mu));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c1.is_finite() && self.c2.is_finite()) {
            return invalid("sampling constants must be positive and finite");
        }
        if self.c1 < self.c2 {
            return invalid(format!("c1 >= c2 is required (c1={}, c2={})", self.c1, self.c2));
        }
        if let ShearSequence::Finite(s) = &self.shears {
            if !s.contains(&0.0) {
                return invalid("the shear sequence must contain 0");
            }
            // a_j^{-1/2} + 1 >= 2 at j = 0
            if s.iter().any(|x| !x.is_finite() || x.abs() > 2.0) {
                return invalid("shears must satisfy |s_k| <= a_j^(-1/2) + 1 for every scale");
            }
        }
        Ok(())
    }

    pub fn det(&self) -> f64 {
        self.c1 * self.c2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LsupMode {
    /// Uses `C(2γ)` of the shear sequence.
    General,
    /// The sharper constant `q/r (2 + 2/(2γ-1)) + 1`, valid for `s_k = k`.
    Regular,
}

fn log_ceil(env: &FeasibilityEnvelope, mu: f64) -> f64 {
    let v = (env.q / env.qprime).ln() / (1.0 / mu).ln();
    // guard against `ceil(2.0000000000000004)`
    (v - 1e-12).ceil().max(0.0)
}

/// Upper estimate of `L_sup`.
pub fn lsup_bound(env: &FeasibilityEnvelope, set: &FeasibleParamSet, mode: LsupMode, grid: &ShearSumGrid) -> Result<f64> {
    set.validate()?;
    let (g, a, mu) = (env.gamma, env.alpha, set.mu);
    if !(a > g) {
        return invalid(format!("alpha > gamma is required (alpha={a}, gamma={g})"));
    }
    let bracket = log_ceil(env, mu) + 1.0 / (1.0 - mu.powf(2.0 * a - 1.0)) + 1.0 / (1.0 - mu.powf(2.0 * g));
    let front = match mode {
        LsupMode::Regular => {
            if set.shears != ShearSequence::Integers {
                return invalid("the regular L_sup bound needs s_k = k");
            }
            env.q / env.r * (2.0 + 2.0 / (2.0 * g - 1.0)) + 1.0
        }
        LsupMode::General => env.q / env.r * shear_sum_constant(&set.shears, 2.0 * g, grid)?,
    };
    Ok(set.p as f64 * front * bracket)
}

/// Certified `L̃_inf` for the filter `(K, L)` with depth `J₀`.
pub fn linf_bound(params: &FilterParams, j0: u32) -> Result<f64> {
    params.validate_basic()?;
    let poly = halfband_power(params.k, params.l)?;
    linf_tilde(&poly, j0)
}

/// `(D₁(h), D₂(h))`.
pub fn d_constants(h: f64) -> Result<(f64, f64)> {
    if !(h > 2.0) {
        return Err(ConeletError::InvalidParams(format!("h out of range: h > 2 is required (h={h})")));
    }
    let tail = 4.0 / (h - 1.0) * (1.0 + 1.0 / (h - 2.0));
    let base = 1.0 + 1.0 / (h - 1.0);
    Ok((2.0 * base + tail, 6.0 * base + tail))
}

/// `R̃(c)` and its ingredients for one `γ'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RBreakdown {
    pub total: f64,
    pub gamma_prime: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    #[serde(rename = "T3")]
    pub t3: f64,
    #[serde(rename = "D1_val")]
    pub d1: f64,
    #[serde(rename = "D2_val")]
    pub d2: f64,
    #[serde(rename = "C_of_gamma")]
    pub c_gamma: f64,
    #[serde(rename = "C_of_gamma_prime")]
    pub c_gamma_prime: f64,
}

/// `R̃ = T₁D₁(γ) + min{⌈c₁/c₂⌉,2} T₂ D₂(γ-γ') + T₃(D₁(γ)+D₂(γ))`.
pub fn r_bound(env: &FeasibilityEnvelope, set: &FeasibleParamSet, gamma_prime: f64, grid: &ShearSumGrid) -> Result<RBreakdown> {
    set.validate()?;
    let (g, a, mu, q, qp, r) = (env.gamma, env.alpha, set.mu, env.q, env.qprime, env.r);
    if !(gamma_prime > 1.0 && gamma_prime < g - 2.0) {
        return Err(ConeletError::GammaOutOfRange(format!(
            "gamma_prime out of range: 1 < gamma' < gamma - 2 is required (gamma'={gamma_prime}, gamma={g})"
        )));
    }
    let p = set.p as f64;
    let lg = log_ceil(env, mu);
    let c_g = shear_sum_constant(&set.shears, g, grid)?;
    let c_gp = shear_sum_constant(&set.shears, gamma_prime, grid)?;
    let geo = |e: f64| 1.0 / (1.0 - mu.powf(e));
    let x1 = (2.0 * set.c1 / qp).powf(g);
    let x2 = (2.0 * q * set.c2 / (qp * r)).powf(g - gamma_prime);
    let t1 = p * (q / r * c_g) * (lg + geo(g) + geo(a - g)) * x1;
    let t2 = p * (q / r * c_gp) * (2.0 * lg + geo(gamma_prime) + geo(a - gamma_prime) + geo(g) + geo(a - g)) * x2;
    let t3 = p * (q / r * c_g) * geo(g) * x1;
    let (d1g, d2g) = d_constants(g)?;
    let (_, d2gp) = d_constants(g - gamma_prime)?;
    let ratio = (set.c1 / set.c2).ceil().min(2.0);
    let total = t1 * d1g + ratio * t2 * d2gp + t3 * (d1g + d2g);
    Ok(RBreakdown {
        total,
        gamma_prime,
        t1,
        t2,
        t3,
        d1: d1g,
        d2: d2gp,
        c_gamma: c_g,
        c_gamma_prime: c_gp,
    })
}

/// How `γ'` is chosen inside `(1, γ-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GammaPrimeRule {
    /// Minimise `R̃` over `points` log-spaced values in `(1+10⁻³, γ-2-10⁻³)`.
    Grid { points: usize },
    Fixed(f64),
}

impl Default for GammaPrimeRule {
    fn default() -> Self {
        GammaPrimeRule::Grid { points: 64 }
    }
}

/// The candidate `γ'` values for an envelope.
pub fn gamma_prime_candidates(gamma: f64, rule: GammaPrimeRule) -> Result<Vec<f64>> {
    match rule {
        GammaPrimeRule::Fixed(g) => Ok(vec![g]),
        GammaPrimeRule::Grid { points } => {
            let lo = 1.0 + 1e-3;
            let hi = gamma - 2.0 - 1e-3;
            if !(hi > lo) || points == 0 {
                return Err(ConeletError::GammaOutOfRange(format!(
                    "no gamma' in (1, gamma-2) for gamma={gamma}"
                )));
            }
            if points == 1 {
                return Ok(vec![(lo * hi).sqrt()]);
            }
            let (a, b) = (lo.ln(), hi.ln());
            Ok((0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect())
        }
    }
}

/// `R̃` minimised over the candidate `γ'`; ties keep the smaller `γ'`.
pub fn best_r_bound(env: &FeasibilityEnvelope, set: &FeasibleParamSet, rule: GammaPrimeRule, grid: &ShearSumGrid) -> Result<RBreakdown> {
    let mut best: Option<RBreakdown> = None;
    for gp in gamma_prime_candidates(env.gamma, rule)? {
        let r = r_bound(env, set, gp, grid)?;
        if best.is_none_or(|b| r.total < b.total) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| ConeletError::GammaOutOfRange("empty gamma' grid".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub struct CertifyOptions {
    /// Depths of the envelope products; `None` selects them by convergence.
    pub envelope: EnvelopeOptions,
    pub gamma_prime: GammaPrimeRule,
    pub shear_grid: ShearSumGrid,
}


/// Certified frame bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCertificate {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "Kprime_pair")]
    pub kprime_pair: (usize, usize),
    #[serde(rename = "J0")]
    pub j0: u32,
    #[serde(rename = "L_inf_tilde")]
    pub l_inf: f64,
    #[serde(rename = "L_sup_tilde")]
    pub l_sup: f64,
    #[serde(rename = "R_tilde")]
    pub r: f64,
    pub gamma_prime: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    #[serde(rename = "T3")]
    pub t3: f64,
    #[serde(rename = "D1_val")]
    pub d1: f64,
    #[serde(rename = "D2_val")]
    pub d2: f64,
    #[serde(rename = "C_of_gamma")]
    pub c_gamma: f64,
    #[serde(rename = "C_of_gamma_prime")]
    pub c_gamma_prime: f64,
    #[serde(rename = "det_Mc")]
    pub det_mc: f64,
    #[serde(rename = "A_low")]
    pub a_low: f64,
    #[serde(rename = "B_high")]
    pub b_high: f64,
    pub ratio: f64,
    pub valid: bool,
    pub envelope_sup: FeasibilityEnvelope,
    pub envelope_r: FeasibilityEnvelope,
}

impl FrameCertificate {
    fn assemble(
        k: usize,
        l: usize,
        set: &FeasibleParamSet,
        j0: u32,
        l_inf: f64,
        l_sup: f64,
        rb: RBreakdown,
        env_sup: FeasibilityEnvelope,
        env_r: FeasibilityEnvelope,
    ) -> Self {
        let det = set.det();
        let a_low = (l_inf - rb.total) / det;
        let b_high = (l_sup + rb.total) / det;
        let valid = a_low > 0.0;
        Self {
            k,
            l,
            c1: set.c1,
            c2: set.c2,
            kprime_pair: (env_sup.k_prime, env_r.k_prime),
            j0,
            l_inf,
            l_sup,
            r: rb.total,
            gamma_prime: rb.gamma_prime,
            t1: rb.t1,
            t2: rb.t2,
            t3: rb.t3,
            d1: rb.d1,
            d2: rb.d2,
            c_gamma: rb.c_gamma,
            c_gamma_prime: rb.c_gamma_prime,
            det_mc: det,
            a_low,
            b_high,
            ratio: if valid { b_high / a_low } else { f64::INFINITY },
            valid,
            envelope_sup: env_sup,
            envelope_r: env_r,
        }
    }

    /// Turns an invalid certificate into an error.
    pub fn ensure_valid(self) -> Result<Self> {
        if self.valid {
            Ok(self)
        } else {
            Err(ConeletError::NotCertifiable(format!(
                "R~ = {:.6e} >= L~_inf = {:.6e} for every gamma' (c = ({}, {}))",
                self.r, self.l_inf, self.c1, self.c2
            )))
        }
    }
}

fn checked_envelope(poly: &HalfbandPolynomial, kp: usize, opts: EnvelopeOptions) -> Result<FeasibilityEnvelope> {
    let env = feasibility_envelope_with(poly, kp, opts)?;
    if !env.violations.is_empty() {
        return invalid(format!("K'={kp} violates: {}", env.violations.join("; ")));
    }
    Ok(env)
}

fn resolve_j0(poly: &HalfbandPolynomial, opts: &EnvelopeOptions) -> Result<u32> {
    match opts.j0 {
        Some(j) => Ok(j),
        None => select_j0(poly),
    }
}

/// Frame bounds for `(K, L)` with `K'_pair = (K' for L̃_sup, K' for R̃)`.
///
/// An invalid certificate (`R̃ >= L̃_inf` at the best `γ'`) is returned with
/// `valid = false`; see [`FrameCertificate::ensure_valid`].
pub fn certify(k: usize, l: usize, kprime_pair: (usize, usize), set: &FeasibleParamSet, opts: &CertifyOptions) -> Result<FrameCertificate> {
    set.validate()?;
    FilterParams::new(k, l, 0).validate_basic()?;
    let poly = halfband_power(k, l)?;
    let j0 = resolve_j0(&poly, &opts.envelope)?;
    let env_opts = EnvelopeOptions { j0: Some(j0), j1: opts.envelope.j1 };
    let env_sup = checked_envelope(&poly, kprime_pair.0, env_opts)?;
    let env_r = checked_envelope(&poly, kprime_pair.1, env_opts)?;
    let l_inf = linf_tilde(&poly, j0)?;
    let l_sup = lsup_for_set(&env_sup, set, &opts.shear_grid)?;
    let rb = best_r_bound(&env_r, set, opts.gamma_prime, &opts.shear_grid)?;
    Ok(FrameCertificate::assemble(k, l, set, j0, l_inf, l_sup, rb, env_sup, env_r))
}

fn lsup_for_set(env: &FeasibilityEnvelope, set: &FeasibleParamSet, grid: &ShearSumGrid) -> Result<f64> {
    let mode = if set.shears == ShearSequence::Integers { LsupMode::Regular } else { LsupMode::General };
    lsup_bound(env, set, mode, grid)
}

/// Exhaustive search over admissible `(K'_L, K'_R)` minimising `B/A`.
/// Ties go to the smaller `K'_L`, then the smaller `K'_R`.
pub fn kprime_search(k: usize, l: usize, set: &FeasibleParamSet, opts: &CertifyOptions) -> Result<FrameCertificate> {
    set.validate()?;
    FilterParams::new(k, l, 0).validate_basic()?;
    let poly = halfband_power(k, l)?;
    let j0 = resolve_j0(&poly, &opts.envelope)?;
    let env_opts = EnvelopeOptions { j0: Some(j0), j1: opts.envelope.j1 };
    let l_inf = linf_tilde(&poly, j0)?;
    let kmax = FilterParams::max_k_prime(k, l);
    let envs: Vec<FeasibilityEnvelope> = (0..=kmax)
        .filter_map(|kp| checked_envelope(&poly, kp, env_opts).ok())
        .collect();
    let sups: Vec<Option<f64>> = envs.iter().map(|e| lsup_for_set(e, set, &opts.shear_grid).ok()).collect();
    let rs: Vec<Option<RBreakdown>> = envs
        .iter()
        .map(|e| best_r_bound(e, set, opts.gamma_prime, &opts.shear_grid).ok())
        .collect();
    let mut best: Option<FrameCertificate> = None;
    for (i, es) in envs.iter().enumerate() {
        let Some(ls) = sups[i] else { continue };
        for (j, er) in envs.iter().enumerate() {
            let Some(rb) = rs[j] else { continue };
            let cert = FrameCertificate::assemble(k, l, set, j0, l_inf, ls, rb, es.clone(), er.clone());
            if !cert.valid {
                continue;
            }
            if best.as_ref().is_none_or(|b| cert.ratio < b.ratio) {
                best = Some(cert);
            }
        }
    }
    best.ok_or_else(|| ConeletError::NotCertifiable("no admissible pair".into()))
}

/// Sample grid on the cone `{ξ₁ >= ξ1_min, |ξ₂/ξ₁| <= 1}`: log-spaced `ξ₁`, uniform slopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalderonGrid {
    pub xi1_points: usize,
    pub slope_points: usize,
    pub xi1_min: f64,
    pub xi1_max: f64,
}

impl Default for CalderonGrid {
    fn default() -> Self {
        Self { xi1_points: 160, slope_points: 81, xi1_min: 1.0, xi1_max: 256.0 }
    }
}

impl CalderonGrid {
    pub fn refined(&self) -> Self {
        Self { xi1_points: 2 * self.xi1_points - 1, slope_points: 2 * self.slope_points - 1, ..*self }
    }
}

/// `|ψ̂(ξ)|² = |m1(4ξ₁)|² |φ̂(ξ₁)|² |φ̂(2ξ₂)|²`.
pub fn psi_hat_sq(poly: &HalfbandPolynomial, xi1: f64, xi2: f64) -> f64 {
    let a = eval_m1_sq(poly, 4.0 * xi1);
    if a == 0.0 {
        return 0.0;
    }
    a * phi_hat_sq_truncated(poly, xi1, DEFAULT_TRUNCATION) * phi_hat_sq_truncated(poly, 2.0 * xi2, DEFAULT_TRUNCATION)
}

/// `Φ(ξ,0) = Σ_{j<=j_max} Σ_{|k|<=⌈2^{j/2}⌉} |ψ̂(2^{-j}ξ₁, k2^{-j}ξ₁ + 2^{-j/2}ξ₂)|²`.
///
/// Scales whose radial factor is below 1e-20 and shears with `|2v| > 32`
/// are skipped; both contribute far below double precision of the sum.
pub fn calderon_sum(poly: &HalfbandPolynomial, xi1: f64, xi2: f64, j_max: u32) -> f64 {
    let mut total = 0.0;
    for j in 0..=j_max {
        let a = 2f64.powi(-(j as i32));
        let u = a * xi1;
        let radial = eval_m1_sq(poly, 4.0 * u) * phi_hat_sq_truncated(poly, u, DEFAULT_TRUNCATION);
        if radial < 1e-20 {
            continue;
        }
        let kmax = (2f64.powf(j as f64 / 2.0)).ceil() as i64;
        let w = a.sqrt() * xi2;
        let (lo, hi) = if u.abs() > 0.0 {
            let l1 = ((-16.0 - w) / u).floor() as i64;
            let h1 = ((16.0 - w) / u).ceil() as i64;
            (l1.min(h1).max(-kmax), l1.max(h1).min(kmax))
        } else {
            (-kmax, kmax)
        };
        for k in lo..=hi {
            let v = k as f64 * u + w;
            total += radial * phi_hat_sq_truncated(poly, 2.0 * v, DEFAULT_TRUNCATION);
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalderonEstimate {
    pub inf_est: f64,
    pub sup_est: f64,
    pub argmin: (f64, f64),
    pub argmax: (f64, f64),
}

/// Grid minimum and maximum of `Φ(ξ,0)` over the cone (diagnostic, not certified).
pub fn numeric_calderon(k: usize, l: usize, set: &FeasibleParamSet, grid: &CalderonGrid, j_max: u32) -> Result<CalderonEstimate> {
    set.validate()?;
    if set.shears != ShearSequence::Integers {
        return invalid("numeric Calderon sums are implemented for s_k = k");
    }
    if grid.xi1_points < 2 || grid.slope_points < 2 || !(grid.xi1_max > grid.xi1_min) || !(grid.xi1_min > 0.0) {
        return invalid("degenerate Calderon grid");
    }
    let poly = halfband_power(k, l)?;
    let (lo, hi) = (grid.xi1_min.ln(), grid.xi1_max.ln());
    let pts: Vec<(f64, f64)> = (0..grid.xi1_points)
        .flat_map(|i| {
            let xi1 = (lo + (hi - lo) * i as f64 / (grid.xi1_points - 1) as f64).exp();
            (0..grid.slope_points).map(move |s| {
                let t = -1.0 + 2.0 * s as f64 / (grid.slope_points - 1) as f64;
                (xi1, t * xi1)
            })
        })
        .collect();
    let vals: Vec<f64> = pts.par_iter().map(|&(a, b)| calderon_sum(&poly, a, b, j_max)).collect();
    let mut est = CalderonEstimate { inf_est: f64::INFINITY, sup_est: f64::NEG_INFINITY, argmin: (0.0, 0.0), argmax: (0.0, 0.0) };
    for (p, &v) in pts.iter().zip(&vals) {
        if v < est.inf_est {
            est.inf_est = v;
            est.argmin = *p;
        }
        if v > est.sup_est {
            est.sup_est = v;
            est.argmax = *p;
        }
    }
    Ok(est)
}

/// Reference grid `(K, L, c1, c2, K'_pair)`: two panels of five rows, one per
/// filter pair, with `c2` decreasing inside each panel.
pub const REFERENCE_GRID: [(usize, usize, f64, f64, (usize, usize)); 10] = [
    (39, 18, 1.0, 0.40, (27, 17)),
    (39, 18, 1.0, 0.30, (27, 15)),
    (39, 18, 1.0, 0.25, (27, 15)),
    (39, 18, 1.0, 0.15, (27, 15)),
    (39, 18, 1.0, 0.10, (27, 15)),
    (39, 19, 0.9, 0.40, (27, 18)),
    (39, 19, 0.9, 0.30, (27, 16)),
    (39, 19, 0.9, 0.25, (27, 15)),
    (39, 19, 0.9, 0.20, (27, 15)),
    (39, 19, 0.9, 0.15, (27, 15)),
];

/// Certifies every row of [`REFERENCE_GRID`] in order.
pub fn reference_table(opts: &CertifyOptions) -> Result<Vec<FrameCertificate>> {
    REFERENCE_GRID
        .iter()
        .map(|&(k, l, c1, c2, pair)| certify(k, l, pair, &FeasibleParamSet::regular(c1, c2), opts))
        .collect()
}

impl From<&FrameCertificate> for TableRow {
    fn from(c: &FrameCertificate) -> Self {
        Self { k: c.k, l: c.l, c1: c.c1, c2: c.c2, kprime_pair: c.kprime_pair, ratio: c.ratio }
    }
}

/// One reproduced row of the frame-bound table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "Kprime_pair")]
    pub kprime_pair: (usize, usize),
    pub ratio: f64,
}

pub fn write_table_csv<W: Write>(mut w: W, rows: &[TableRow]) -> Result<()> {
    writeln!(w, "K,L,c1,c2,Kprime_pair,ratio")?;
    for r in rows {
        writeln!(w, "{},{},{},{},\"({},{})\",{:.6}", r.k, r.l, r.c1, r.c2, r.kprime_pair.0, r.kprime_pair.1, r.ratio)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_constants_at_four() {
        let (d1, d2) = d_constants(4.0).unwrap();
        assert!((d1 - 14.0 / 3.0).abs() < 1e-14);
        assert!((d2 - 10.0).abs() < 1e-14);
        assert!(d_constants(2.0).is_err());
    }

    #[test]
    fn growth_condition() {
        assert!(FeasibleParamSet::regular(1.0, 0.5).validate().is_ok());
        let mut s = FeasibleParamSet::regular(1.0, 0.5);
        s.mu = 0.4;
        assert!(s.validate().is_err());
        assert!(FeasibleParamSet::regular(0.5, 1.0).validate().is_err());
    }

    #[test]
    fn gamma_prime_grid_bounds() {
        let g = gamma_prime_candidates(9.0, GammaPrimeRule::default()).unwrap();
        assert_eq!(g.len(), 64);
        assert!((g[0] - 1.001).abs() < 1e-12);
        assert!((g[63] - 6.999).abs() < 1e-12);
        assert!(gamma_prime_candidates(3.0, GammaPrimeRule::default()).is_err());
    }
}
