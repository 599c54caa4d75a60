//! Scaling function `φ̂(ξ) = Π_{j≥0} m0(2^{-j}ξ)`: truncated products,
//! certified lower and upper envelopes, and time-domain samples by the
//! cascade algorithm.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, ConeletError, Result};
use crate::filter_design::{eval_m0_sq, horner, FeasibilityEnvelope, HalfbandPolynomial, LowpassFilter};

/// Default number of factors in the truncated product for `|φ̂|²`.
pub const DEFAULT_TRUNCATION: u32 = 40;

/// Beyond this frequency `|φ̂|²` is replaced by its envelope when one is available.
pub const FREQUENCY_CAP: f64 = 65536.0;

/// `|φ̂(ξ)|² ≈ Π_{j<J} |m0(2^{-j}ξ)|²`.
pub fn phi_hat_sq_truncated(poly: &HalfbandPolynomial, xi: f64, j_trunc: u32) -> f64 {
    let mut acc = 1.0;
    let mut x = xi;
    for _ in 0..j_trunc {
        acc *= eval_m0_sq(poly, x);
        if acc == 0.0 {
            break;
        }
        x *= 0.5;
    }
    acc
}

/// `|φ̂|²` with a fixed truncation and an optional envelope beyond [`FREQUENCY_CAP`].
#[derive(Debug, Clone)]
pub struct ScalingProfile {
    pub poly: HalfbandPolynomial,
    pub j_trunc: u32,
    pub envelope: Option<FeasibilityEnvelope>,
}

impl ScalingProfile {
    pub fn new(poly: HalfbandPolynomial) -> Self {
        Self { poly, j_trunc: DEFAULT_TRUNCATION, envelope: None }
    }

    pub fn with_envelope(mut self, env: FeasibilityEnvelope) -> Self {
        self.envelope = Some(env);
        self
    }

    pub fn phi_hat_sq(&self, xi: f64) -> f64 {
        if xi.abs() > FREQUENCY_CAP {
            if let Some(env) = &self.envelope {
                return env.phi_upper_sq(xi);
            }
        }
        phi_hat_sq_truncated(&self.poly, xi, self.j_trunc)
    }
}

/// Complex `φ̂(ξ)` from the filter taps.
///
/// The product is cut once `2^{-J}|ξ| <= 2^{-20}` and the remaining factors
/// are folded in through the second-order expansion of `log m0` at the origin.
#[derive(Debug, Clone)]
pub struct PhiHat {
    taps: Vec<f64>,
    a1: Complex64,
    a2: Complex64,
}

impl PhiHat {
    pub fn new(filter: &LowpassFilter) -> Self {
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for (n, &h) in filter.taps.iter().enumerate() {
            let t = Complex64::new(0.0, -2.0 * PI * n as f64);
            b1 += h * t;
            b2 += h * t * t * 0.5;
        }
        Self { taps: filter.taps.clone(), a1: b1, a2: b2 - b1 * b1 * 0.5 }
    }

    #[inline]
    pub fn m0(&self, xi: f64) -> Complex64 {
        let t = xi - xi.round();
        horner(&self.taps, Complex64::from_polar(1.0, -2.0 * PI * t))
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        let mut x = xi;
        const SMALL: f64 = 1.0 / 1048576.0;
        while x.abs() > SMALL {
            acc *= self.m0(x);
            x *= 0.5;
        }
        // Σ_{j≥0} over the remaining factors m0(2^{-j}x)
        let tail = self.a1 * (2.0 * x) + self.a2 * (x * x * 4.0 / 3.0);
        acc * tail.exp()
    }
}

/// `C₁ = 1 - |m0(1/6)|²`.
pub fn c1_constant(poly: &HalfbandPolynomial) -> f64 {
    1.0 - eval_m0_sq(poly, 1.0 / 6.0)
}

/// Lower bound for `|φ̂(ξ)|²` on `|ξ| <= 1/6`:
/// `Π_{j<J₀} |m0(2^{-j}ξ)|² e^{-2^{-J₀+2} C₁}`.
pub fn phi_lower_bound(poly: &HalfbandPolynomial, j0: u32, xi: f64) -> Result<f64> {
    if xi.abs() > 1.0 / 6.0 + 1e-15 {
        return invalid(format!("the lower bound holds on |xi| <= 1/6 (xi={xi})"));
    }
    let c1 = c1_constant(poly);
    if 2f64.powi(-(j0 as i32)) * c1 > 0.5 {
        return invalid(format!("J0={j0} violates 2^-J0 C1 <= 1/2 (C1={c1})"));
    }
    let prod = phi_hat_sq_truncated(poly, xi, j0);
    Ok(prod * (-(2f64.powi(2 - j0 as i32)) * c1).exp())
}

/// `L̃_inf = |m0(1/6)|² (Π_{j<J₀} |m0(2^{-j}/6)|² e^{-2^{-J₀+2}C₁})²`.
pub fn linf_tilde(poly: &HalfbandPolynomial, j0: u32) -> Result<f64> {
    let lb = phi_lower_bound(poly, j0, 1.0 / 6.0)?;
    Ok(eval_m0_sq(poly, 1.0 / 6.0) * lb * lb)
}

/// Smallest admissible `J₀`, then grown until `J₀ + 5` changes `L̃_inf` by less than 1e-6.
pub fn select_j0(poly: &HalfbandPolynomial) -> Result<u32> {
    const CAP: u32 = 64;
    let c1 = c1_constant(poly);
    let mut j = 0u32;
    while 2f64.powi(-(j as i32)) * c1 > 0.5 {
        j += 1;
    }
    loop {
        if j + 5 > CAP {
            return Err(ConeletError::J0TooLarge(format!("lower bound has not converged by J0={CAP}")));
        }
        let a = linf_tilde(poly, j)?;
        let b = linf_tilde(poly, j + 5)?;
        if ((b - a) / b).abs() < 1e-6 {
            return Ok(j);
        }
        j += 1;
    }
}

/// Samples of the compactly supported solution of `φ(x) = 2 Σ h_n φ(2x-n)`
/// on the grid `k 2^{-levels}`, `0 <= x <= len-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeSamples {
    pub levels: u32,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Cascade algorithm: integer values from the eigenvector of the refinement
/// matrix, then exact dyadic refinement.
pub fn cascade_phi(filter: &LowpassFilter, levels: u32) -> Result<CascadeSamples> {
    if levels > 16 {
        return invalid("at most 16 refinement levels");
    }
    let h = &filter.taps;
    let n = h.len();
    let mut vals = vec![0.0; n];
    if n <= 2 {
        vals[0] = 1.0;
    } else {
        // Interior nodes 1..n-2; φ(0) = φ(n-1) = 0.
        let m = n - 2;
        let tap = |i: i64| if i >= 0 && (i as usize) < n { h[i as usize] } else { 0.0 };
        let mut a = DMatrix::<f64>::zeros(m, m);
        for r in 0..m {
            let i = r as i64 + 1;
            for c in 0..m {
                let j = c as i64 + 1;
                a[(r, c)] = 2.0 * tap(2 * i - j) - if r == c { 1.0 } else { 0.0 };
            }
        }
        for c in 0..m {
            a[(m - 1, c)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(m);
        rhs[m - 1] = 1.0;
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| ConeletError::FactorizationFailed("cascade did not converge: singular refinement matrix".into()))?;
        for r in 0..m {
            vals[r + 1] = sol[r];
        }
    }
    for l in 0..levels {
        let step = 1usize << l;
        let fine_len = (n - 1) * (step << 1) + 1;
        let mut next = vec![0.0; fine_len];
        for (m, out) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &hk) in h.iter().enumerate() {
                let off = k * step;
                if off > m {
                    break;
                }
                let idx = m - off;
                if idx < vals.len() {
                    acc += hk * vals[idx];
                }
            }
            *out = 2.0 * acc;
        }
        vals = next;
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(ConeletError::FactorizationFailed("cascade did not converge".into()));
    }
    let d = 2f64.powi(-(levels as i32));
    let x = (0..vals.len()).map(|i| i as f64 * d).collect();
    Ok(CascadeSamples { levels, x, phi: vals })
}

/// Writes `x,phi` rows.
pub fn write_phi_csv<W: Write>(mut w: W, samples: &CascadeSamples) -> Result<()> {
    writeln!(w, "x,phi")?;
    for (x, p) in samples.x.iter().zip(&samples.phi) {
        writeln!(w, "{x:.17e},{p:.17e}")?;
    }
    Ok(())
}

/// One row of the envelope table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub xi: f64,
    pub phi_hat_sq: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `|φ̂|²` with its certified bounds on `points` equispaced frequencies in `[0, xi_max]`.
/// The lower bound is reported as 0 outside `|ξ| <= 1/6`.
pub fn envelope_table(profile: &ScalingProfile, env: &FeasibilityEnvelope, xi_max: f64, points: usize) -> Result<Vec<EnvelopeRow>> {
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let xi = if points > 1 { xi_max * i as f64 / (points - 1) as f64 } else { 0.0 };
        let lower = if xi.abs() <= 1.0 / 6.0 { phi_lower_bound(&profile.poly, env.j0, xi)? } else { 0.0 };
        rows.push(EnvelopeRow { xi, phi_hat_sq: profile.phi_hat_sq(xi), lower, upper: env.phi_upper_sq(xi) });
    }
    Ok(rows)
}

pub fn write_envelope_csv<W: Write>(mut w: W, rows: &[EnvelopeRow]) -> Result<()> {
    writeln!(w, "xi,phi_hat_sq,lower,upper")?;
    for r in rows {
        writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", r.xi, r.phi_hat_sq, r.lower, r.upper)?;
    }
    Ok(())
}
