//! Maximally flat trigonometric low-pass filters.
//!
//! `|m0(ξ)|² = P(sin²πξ)` with `P(y) = (1-y)^K Σ_{n<L} C(K-1+n, n) yⁿ`.
//! The module builds the half-band polynomial, factors it into a
//! minimum-phase FIR low-pass filter and derives the decay constants used
//! by the frame-bound certificate.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, ConeletError, Result};
use crate::extended::{ComplexDD, DoubleDouble};
use crate::scaling_function;

/// Filter order `K`, flatness `L` and reduced order `K'` used for the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FilterParams {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "Kprime")]
    pub k_prime: usize,
}

impl FilterParams {
    pub fn new(k: usize, l: usize, k_prime: usize) -> Self {
        Self { k, l, k_prime }
    }

    /// Structural requirements every stage relies on.
    pub fn validate_basic(&self) -> Result<()> {
        if self.k < 1 {
            return invalid("K >= 1 is required");
        }
        if self.l < 1 {
            return invalid("L >= 1 is required");
        }
        if self.k_prime >= self.k {
            return invalid(format!("K' < K is required (K'={}, K={})", self.k_prime, self.k));
        }
        Ok(())
    }

    /// Violated hypotheses of the frame construction: `L >= 10` and
    /// `3L/2 <= K <= 3L-2`.
    pub fn construction_violations(&self) -> Vec<String> {
        let (k, l) = (self.k, self.l);
        let mut v = Vec::new();
        if l < 10 {
            v.push(format!("L >= 10 (L={l})"));
        }
        if 2 * k < 3 * l {
            v.push(format!("3L/2 <= K (K={k}, 3L/2={})", 1.5 * l as f64));
        }
        if k + 2 > 3 * l {
            v.push(format!("K <= 3L-2 (K={k}, 3L-2={})", 3 * l as i64 - 2));
        }
        v
    }

    /// Violated hypotheses of the decay envelope:
    /// `L >= 6`, `L+1 <= K <= 3L-2` and `(K-K')/(K'+L-1) >= 1/4`.
    pub fn envelope_violations(&self) -> Vec<String> {
        let (k, l, kp) = (self.k, self.l, self.k_prime);
        let mut v = Vec::new();
        if l < 6 {
            v.push(format!("L >= 6 (L={l})"));
        }
        if k < l + 1 {
            v.push(format!("L+1 <= K (K={k}, L={l})"));
        }
        if k + 2 > 3 * l {
            v.push(format!("K <= 3L-2 (K={k}, 3L-2={})", 3 * l as i64 - 2));
        }
        if kp < k && 4 * (k - kp) < kp + l - 1 {
            v.push(format!(
                "(K-K')/(K'+L-1) >= 1/4 (K'={kp}, ratio={:.4})",
                (k - kp) as f64 / (kp + l - 1) as f64
            ));
        }
        v
    }

    /// Largest `K'` allowed by the envelope hypothesis `(K-K')/(K'+L-1) >= 1/4`.
    pub fn max_k_prime(k: usize, l: usize) -> usize {
        let num = (4 * k + 1) as i64 - l as i64;
        if num < 0 {
            0
        } else {
            ((num / 5) as usize).min(k.saturating_sub(1))
        }
    }
}

/// Checked binomial coefficient.
pub fn binomial_i128(n: u64, k: u64) -> Option<i128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1)
        acc = acc.checked_mul((n - i) as i128)? / (i as i128 + 1);
    }
    Some(acc)
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    match binomial_i128(n, k) {
        Some(v) => v as f64,
        None => {
            let mut acc = 1.0f64;
            let k = k.min(n - k);
            for i in 0..k {
                acc *= (n - i) as f64 / (i + 1) as f64;
            }
            acc
        }
    }
}

/// The half-band polynomial `P(y) = (1-y)^K Q(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfbandPolynomial {
    pub k: usize,
    pub l: usize,
    /// `Q(y) = Σ_{n<L} C(K-1+n, n) yⁿ`, ascending powers, exact.
    pub q_exact: Vec<i128>,
    /// Expanded `P`, ascending powers, exact.
    pub p_exact: Vec<i128>,
    q_f64: Vec<f64>,
}

/// Builds `P` for given `K`, `L` with exact integer arithmetic.
pub fn halfband_power(k: usize, l: usize) -> Result<HalfbandPolynomial> {
    if k < 1 || l < 1 {
        return invalid("K >= 1 and L >= 1 are required");
    }
    let overflow = || ConeletError::DegreeTooLarge { k, l };
    let mut q = Vec::with_capacity(l);
    for n in 0..l {
        q.push(binomial_i128((k - 1 + n) as u64, n as u64).ok_or_else(overflow)?);
    }
    let mut one_minus_y = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let b = binomial_i128(k as u64, j as u64).ok_or_else(overflow)?;
        one_minus_y.push(if j % 2 == 0 { b } else { -b });
    }
    let mut p = vec![0i128; k + l];
    for (i, &a) in one_minus_y.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            let t = a.checked_mul(b).ok_or_else(overflow)?;
            p[i + j] = p[i + j].checked_add(t).ok_or_else(overflow)?;
        }
    }
    let q_f64 = q.iter().map(|&c| c as f64).collect();
    Ok(HalfbandPolynomial { k, l, q_exact: q, p_exact: p, q_f64 })
}

impl HalfbandPolynomial {
    /// Expanded coefficients of `P` in ascending powers of `y`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.p_exact.iter().map(|&c| c as f64).collect()
    }

    pub fn degree(&self) -> usize {
        self.k + self.l - 1
    }

    /// `Q(y)` by Horner; all coefficients are positive so this is stable for `y >= 0`.
    pub fn q(&self, y: f64) -> f64 {
        self.q_f64.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }

    /// `P(y)` evaluated in factored form.
    pub fn eval(&self, y: f64) -> f64 {
        (1.0 - y).powi(self.k as i32) * self.q(y)
    }

    /// `c^K' Q(s)` with `c = cos²πξ`, `s = sin²πξ` supplied directly.
    #[inline]
    fn eval_cs(&self, c: f64, s: f64, power: usize) -> f64 {
        c.powi(power as i32) * self.q(s)
    }
}

#[inline]
fn cos_sin_sq(xi: f64) -> (f64, f64) {
    let t = xi - xi.round();
    let (s, c) = (PI * t).sin_cos();
    (c * c, s * s)
}

/// `|m0(ξ)|²`.
pub fn eval_m0_sq(poly: &HalfbandPolynomial, xi: f64) -> f64 {
    let (c, s) = cos_sin_sq(xi);
    poly.eval_cs(c, s, poly.k)
}

/// `|m1(ξ)|² = |m0(ξ + 1/2)|²`.
pub fn eval_m1_sq(poly: &HalfbandPolynomial, xi: f64) -> f64 {
    let (c, s) = cos_sin_sq(xi);
    poly.eval_cs(s, c, poly.k)
}

/// Reduced low-pass `|m̃0(ξ)|² = cos^{2K'}(πξ) Q(sin²πξ)`.
pub fn eval_tilde_m0_sq(poly: &HalfbandPolynomial, k_prime: usize, xi: f64) -> f64 {
    let (c, s) = cos_sin_sq(xi);
    poly.eval_cs(c, s, k_prime)
}

/// `C₂ = Σ_{n<L} C(K-1+n, n) (K'/(K'+n))^{K'} (n/(K'+n))ⁿ` with `0⁰ = 1`.
pub fn compute_c2(k: usize, l: usize, k_prime: usize) -> Result<f64> {
    if k < 1 || l < 1 {
        return invalid("K >= 1 and L >= 1 are required");
    }
    if k_prime >= k {
        return invalid(format!("K' < K is required (K'={k_prime}, K={k})"));
    }
    let mut sum = 0.0;
    for n in 0..l {
        let b = binomial_f64((k - 1 + n) as u64, n as u64);
        let tot = (k_prime + n) as f64;
        let a = if k_prime == 0 { 1.0 } else { (k_prime as f64 / tot).powi(k_prime as i32) };
        let c = if n == 0 { 1.0 } else { (n as f64 / tot).powi(n as i32) };
        sum += b * a * c;
    }
    Ok(sum)
}

/// `Σ_n |h(n)| |n|` where `h(n)` are the Fourier coefficients of `|m̃0|²`.
///
/// Computed exactly: with `z = e^{2πiξ}`, `cos²πξ = (1+z)²/(4z)` and
/// `sin²πξ = -(1-z)²/(4z)`, so `4^M z^M |m̃0|²` is an integer polynomial
/// with `M = K'+L-1`.
pub fn fourier_moment(k: usize, l: usize, k_prime: usize) -> f64 {
    let m = k_prime + l - 1;
    let mut total = vec![BigInt::zero(); 2 * m + 1];
    let one_plus = poly_pow(&[BigInt::one(), BigInt::one()], 2 * k_prime);
    let one_minus_sq = vec![BigInt::one(), BigInt::from(-2), BigInt::one()];
    let mut minus_pow = vec![BigInt::one()];
    for n in 0..l {
        let b = big_binomial(k - 1 + n, n);
        let sign = if n % 2 == 0 { BigInt::one() } else { BigInt::from(-1) };
        let scale = b * sign * BigInt::from(4).pow((l - 1 - n) as u32);
        let prod = poly_mul(&one_plus, &minus_pow);
        let shift = l - 1 - n;
        for (i, c) in prod.iter().enumerate() {
            total[i + shift] += c * &scale;
        }
        minus_pow = poly_mul(&minus_pow, &one_minus_sq);
    }
    let denom = 4f64.powi(m as i32);
    let mut acc = BigInt::zero();
    for (p, c) in total.iter().enumerate() {
        let off = (p as i64 - m as i64).unsigned_abs();
        acc += c.abs() * BigInt::from(off);
    }
    acc.to_f64().unwrap_or(f64::INFINITY) / denom
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(base: &[BigInt], e: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for _ in 0..e {
        out = poly_mul(&out, base);
    }
    out
}

/// Minimum-phase FIR low-pass filter `m0(ξ) = Σ_n h_n e^{-2πinξ}`, normalised to `Σ h_n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowpassFilter {
    pub k: usize,
    pub l: usize,
    pub taps: Vec<f64>,
    /// Max deviation of `|m0|²` from `P(sin²πξ)` on the verification grid.
    pub residual: f64,
}

impl LowpassFilter {
    /// Complex frequency response `m0(ξ)`.
    pub fn m0(&self, xi: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, -2.0 * PI * xi);
        horner(&self.taps, w)
    }

    /// High-pass `m1(ξ) = e^{-2πiξ} conj(m0(ξ + 1/2))`.
    pub fn m1(&self, xi: f64) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * PI * xi) * self.m0(xi + 0.5).conj()
    }

    /// Taps of `m1`: `g_n = (-1)^{n-1} h_{1-n}`, stored for `n = 1-len+1 .. 1`.
    pub fn highpass_taps(&self) -> Vec<f64> {
        let n = self.taps.len();
        (0..n)
            .map(|i| {
                let h = self.taps[n - 1 - i];
                if (n - 1 - i).is_multiple_of(2) {
                    h
                } else {
                    -h
                }
            })
            .collect()
    }
}

#[inline]
pub(crate) fn horner(taps: &[f64], w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &h in taps.iter().rev() {
        acc = acc * w + h;
    }
    acc
}

/// Factors `P(sin²πξ) = |m0(ξ)|²` with all zeros of `m0` inside or on the unit circle.
///
/// The factor `(1-y)^K` contributes a `K`-fold zero at `-1`. Roots of the
/// degree `L-1` polynomial `Q` are found in double precision, polished in
/// double-double against the exact coefficients and mapped through
/// `z² - (2-4y)z + 1 = 0`, keeping the root with `|z| <= 1`.
pub fn spectral_factorize(poly: &HalfbandPolynomial) -> Result<LowpassFilter> {
    let k = poly.k;
    let deg = poly.l - 1;
    let roots = if deg == 0 { Vec::new() } else { polished_roots(&poly.q_exact)? };

    let mut h: Vec<ComplexDD> = vec![ComplexDD::ONE];
    for _ in 0..k {
        h = conv_linear(&h, ComplexDD::ONE, ComplexDD::ONE);
    }
    let two = DoubleDouble::new(2.0);
    let four = DoubleDouble::new(4.0);
    for y in &roots {
        // z = b/2 ± sqrt(b²/4 - 1), b = 2 - 4y
        let b = ComplexDD::new(two - four * y.re, -(four * y.im));
        let half_b = b.scale(DoubleDouble::new(0.5));
        let disc = (half_b * half_b - ComplexDD::ONE).sqrt();
        let z1 = half_b + disc;
        let z2 = half_b - disc;
        let z = if z1.norm_sqr().to_f64() <= z2.norm_sqr().to_f64() { z1 } else { z2 };
        if z.norm_sqr().to_f64() > 1.0 + 1e-12 {
            return Err(ConeletError::FactorizationFailed("no root inside the unit disk".into()));
        }
        h = conv_linear(&h, ComplexDD::ONE, -z);
    }
    let mut sum = DoubleDouble::ZERO;
    for c in &h {
        sum = sum + c.re;
    }
    let mut max_im = 0.0f64;
    let taps: Vec<f64> = h
        .iter()
        .map(|c| {
            max_im = max_im.max(c.im.to_f64().abs());
            (c.re / sum).to_f64()
        })
        .collect();
    if !(max_im / sum.to_f64().abs() < 1e-8) {
        return Err(ConeletError::FactorizationFailed(format!(
            "taps are not real (imaginary part {max_im:.3e})"
        )));
    }
    let residual = factorization_residual(poly, &taps, 4096);
    if !(residual <= 1e-8) {
        return Err(ConeletError::FactorizationFailed(format!("residual {residual:.3e} exceeds 1e-8")));
    }
    Ok(LowpassFilter { k, l: poly.l, taps, residual })
}

/// `max_ξ | |m0(ξ)|² - P(sin²πξ) |` on `n` equispaced points of `[0, 1/2]`.
pub fn factorization_residual(poly: &HalfbandPolynomial, taps: &[f64], n: usize) -> f64 {
    (0..=n)
        .map(|i| {
            let xi = 0.5 * i as f64 / n as f64;
            let w = Complex64::from_polar(1.0, -2.0 * PI * xi);
            (horner(taps, w).norm_sqr() - eval_m0_sq(poly, xi)).abs()
        })
        .fold(0.0, f64::max)
}

fn conv_linear(a: &[ComplexDD], c0: ComplexDD, c1: ComplexDD) -> Vec<ComplexDD> {
    let mut out = vec![ComplexDD::ZERO; a.len() + 1];
    for (i, &x) in a.iter().enumerate() {
        out[i] = out[i] + x * c0;
        out[i + 1] = out[i + 1] + x * c1;
    }
    out
}

/// Roots of an integer polynomial (ascending coefficients, nonzero leading term).
fn polished_roots(coeffs: &[i128]) -> Result<Vec<ComplexDD>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg] as f64;
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| Complex64::new(c as f64 / lead, 0.0)).collect();
    let approx = aberth(&monic)?;
    let exact: Vec<DoubleDouble> = coeffs.iter().map(|&c| DoubleDouble::from_i128(c)).collect();
    let mut out = Vec::with_capacity(deg);
    for z0 in approx {
        let mut z = ComplexDD::from_c64(z0);
        for _ in 0..8 {
            let (p, dp) = eval_dd(&exact, z);
            if p.norm_sqr().to_f64() == 0.0 {
                break;
            }
            let step = p / dp;
            z = z - step;
            if step.norm_sqr().to_f64().sqrt() <= 1e-31 * z.norm_sqr().to_f64().sqrt() {
                break;
            }
        }
        out.push(z);
    }
    Ok(out)
}

fn eval_dd(c: &[DoubleDouble], z: ComplexDD) -> (ComplexDD, ComplexDD) {
    let mut p = ComplexDD::ZERO;
    let mut dp = ComplexDD::ZERO;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ComplexDD::new(a, DoubleDouble::ZERO);
    }
    (p, dp)
}

/// Aberth–Ehrlich simultaneous root iteration for a monic polynomial.
fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = c.len() - 1;
    let radius = c[0].norm().powf(1.0 / deg as f64).max(1e-300);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| Complex64::from_polar(radius, 2.0 * PI * (i as f64 + 0.25) / deg as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..2000 {
        let mut max_rel = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= step;
            max_rel = max_rel.max(step.norm() / z[i].norm().max(1e-300));
        }
        if max_rel < 1e-15 {
            return Ok(z);
        }
    }
    // Convergence stalls at rounding level for clustered roots; Newton polishing follows.
    if z.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(z)
    } else {
        Err(ConeletError::FactorizationFailed("root iteration diverged".into()))
    }
}

/// Decay and flatness constants of the scaling function for `(K, L, K')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityEnvelope {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "Kprime")]
    pub k_prime: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub q: f64,
    pub qprime: f64,
    pub r: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "J0")]
    pub j0: u32,
    #[serde(rename = "J1")]
    pub j1: u32,
    pub fourier_moment: f64,
    /// All envelope hypotheses hold.
    pub certifying: bool,
    pub violations: Vec<String>,
}

/// Truncation depths; `None` selects them automatically.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeOptions {
    pub j0: Option<u32>,
    pub j1: Option<u32>,
}

/// `q'` for a given `J₁` and precomputed `C₂`, `γ` and Fourier moment.
pub fn qprime_for(poly: &HalfbandPolynomial, k_prime: usize, c2: f64, gamma: f64, moment: f64, j1: u32) -> f64 {
    let mut log_prod = 0.0;
    for j in 0..j1 {
        let xi = 2f64.powi(-(j as i32)) / (2.0 * PI);
        log_prod += eval_tilde_m0_sq(poly, k_prime, xi).ln();
    }
    let tail = 2f64.powi(1 - j1 as i32) * moment;
    let log_base = c2.ln() + log_prod + tail;
    2.0 * PI * (-log_base / (2.0 * gamma)).exp()
}

/// Default `J₁`: grow in steps of 5 from 20 until `q'` is stable to 1e-12.
pub fn select_j1(poly: &HalfbandPolynomial, k_prime: usize, c2: f64, gamma: f64, moment: f64) -> u32 {
    let mut j1 = 20;
    let mut prev = qprime_for(poly, k_prime, c2, gamma, moment, j1);
    while j1 < 200 {
        let next = qprime_for(poly, k_prime, c2, gamma, moment, j1 + 5);
        j1 += 5;
        if ((next - prev) / next).abs() < 1e-12 {
            break;
        }
        prev = next;
    }
    j1
}

pub fn feasibility_envelope(params: &FilterParams, opts: EnvelopeOptions) -> Result<FeasibilityEnvelope> {
    params.validate_basic()?;
    let poly = halfband_power(params.k, params.l)?;
    feasibility_envelope_with(&poly, params.k_prime, opts)
}

pub fn feasibility_envelope_with(
    poly: &HalfbandPolynomial,
    k_prime: usize,
    opts: EnvelopeOptions,
) -> Result<FeasibilityEnvelope> {
    let params = FilterParams::new(poly.k, poly.l, k_prime);
    params.validate_basic()?;
    let violations = params.envelope_violations();
    let c2 = compute_c2(poly.k, poly.l, k_prime)?;
    let alpha = (poly.k - k_prime) as f64;
    let gamma = alpha - 0.5 * c2.log2();
    let q = 4.0 * PI * c2.powf(1.0 / (2.0 * alpha));
    let moment = fourier_moment(poly.k, poly.l, k_prime);
    let j1 = opts.j1.unwrap_or_else(|| select_j1(poly, k_prime, c2, gamma, moment));
    let qprime = qprime_for(poly, k_prime, c2, gamma, moment, j1);
    let c1 = 1.0 - eval_m0_sq(poly, 1.0 / 6.0);
    let j0 = match opts.j0 {
        Some(j) => j,
        None => scaling_function::select_j0(poly)?,
    };
    if !(gamma.is_finite() && q.is_finite() && qprime.is_finite()) {
        return Err(ConeletError::InvalidParams(format!(
            "envelope constants are not finite for K={}, L={}, K'={k_prime}",
            poly.k, poly.l
        )));
    }
    Ok(FeasibilityEnvelope {
        k: poly.k,
        l: poly.l,
        k_prime,
        alpha,
        gamma,
        q,
        qprime,
        r: 2.0 * qprime,
        c1,
        c2,
        j0,
        j1,
        fourier_moment: moment,
        certifying: violations.is_empty() && gamma > 1.0,
        violations,
    })
}

impl FeasibilityEnvelope {
    /// Upper envelope `min(1, |q'ξ|^{-2γ})` for `|φ̂(ξ)|²`.
    pub fn phi_upper_sq(&self, xi: f64) -> f64 {
        let t = (self.qprime * xi).abs();
        if t <= 1.0 {
            1.0
        } else {
            t.powf(-2.0 * self.gamma)
        }
    }

    /// Envelope for `|ψ̂(ξ)|`:
    /// `min{1,|qξ₁|^α} min{1,|q'ξ₁|^{-γ}} min{1,|rξ₂|^{-γ}}`.
    pub fn psi_envelope(&self, xi1: f64, xi2: f64) -> f64 {
        let a = (self.q * xi1).abs().powf(self.alpha).min(1.0);
        let b = (self.qprime * xi1).abs().powf(-self.gamma).min(1.0);
        let c = (self.r * xi2).abs().powf(-self.gamma).min(1.0);
        a * b * c
    }
}
