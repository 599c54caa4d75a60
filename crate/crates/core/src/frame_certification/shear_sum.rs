//! `C(γ) = sup_x min(1,|x₂|) Σ_k min(1, |x₁ + s_k x₂|^{-γ})`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{ConeletError, Result};

/// Shear parameters `s_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShearSequence {
    /// `s_k = k`, `k ∈ ℤ`.
    Integers,
    /// A finite list of shears.
    Finite(Vec<f64>),
}

/// Search grid for the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShearSumGrid {
    pub x1_points: usize,
    pub x2_points: usize,
    pub x2_min: f64,
    pub x2_max: f64,
    pub refine_rounds: usize,
}

impl Default for ShearSumGrid {
    fn default() -> Self {
        Self { x1_points: 192, x2_points: 192, x2_min: 1.0 / 64.0, x2_max: 16.0, refine_rounds: 4 }
    }
}

impl ShearSumGrid {
    fn key(&self, gamma: f64) -> [u64; 6] {
        [
            gamma.to_bits(),
            self.x1_points as u64,
            self.x2_points as u64,
            self.x2_min.to_bits(),
            self.x2_max.to_bits(),
            self.refine_rounds as u64,
        ]
    }
}

const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,              // B2/2!
    -1.0 / 720.0,            // B4/4!
    1.0 / 30240.0,           // B6/6!
    -1.0 / 1209600.0,        // B8/8!
    1.0 / 47900160.0,        // B10/10!
    -691.0 / 1307674368000.0, // B12/12!
    1.0 / 74724249600.0,     // B14/14!
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a+k)^{-s}` for `s > 1`, `a > 0` by Euler–Maclaurin.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const N: usize = 8;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + N as f64;
    let xs = x.powf(-s);
    sum += x * xs / (s - 1.0) + 0.5 * xs;
    // (s)_{2j-1} x^{-s-2j+1}
    let mut rising = s;
    let mut pow = xs / x;
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += b * rising * pow;
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        pow /= x * x;
    }
    sum
}

/// `min(1,x₂) Σ_{k∈ℤ} min(1,|x₁+kx₂|^{-γ})` for `x₂ > 0`, `0 <= x₁ <= x₂/2`.
pub fn integer_shear_sum(x1: f64, x2: f64, gamma: f64) -> f64 {
    let (k0, a) = if x1 >= 1.0 {
        (0.0, x1)
    } else {
        let k0 = ((1.0 - x1) / x2).ceil();
        (k0, (x1 + k0 * x2).max(1.0))
    };
    let k1 = ((1.0 + x1) / x2).ceil().max(1.0);
    let b = (k1 * x2 - x1).max(1.0);
    let tail = x2.powf(-gamma) * (hurwitz_zeta(gamma, a / x2) + hurwitz_zeta(gamma, b / x2));
    x2.min(1.0) * (k0 + k1 - 1.0 + tail)
}

fn finite_shear_sum(shears: &[f64], x1: f64, x2: f64, gamma: f64) -> f64 {
    let s: f64 = shears
        .iter()
        .map(|&sk| {
            let t = (x1 + sk * x2).abs();
            if t <= 1.0 {
                1.0
            } else {
                t.powf(-gamma)
            }
        })
        .sum();
    x2.abs().min(1.0) * s
}

fn cache() -> &'static Mutex<HashMap<[u64; 6], f64>> {
    static CACHE: OnceLock<Mutex<HashMap<[u64; 6], f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Upper estimate of `C(γ)`.
///
/// For `s_k = k` the function is even and `x₂`-periodic in `x₁`, so the
/// search runs over `0 <= x₁ <= x₂/2`. Below `x2_min` the Riemann-sum bound
/// `∫ min(1,|t|^{-γ}) dt + x₂ = 2 + 2/(γ-1) + x₂` applies; above `x2_max`
/// only the `k = 0` term is of order one.
pub fn shear_sum_constant(shears: &ShearSequence, gamma: f64, grid: &ShearSumGrid) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(ConeletError::GammaOutOfRange(format!("gamma must be positive (gamma={gamma})")));
    }
    match shears {
        ShearSequence::Integers => {
            if gamma <= 1.0 {
                return Err(ConeletError::Diverged(format!(
                    "the sum over all integer shears diverges for gamma={gamma} <= 1"
                )));
            }
            let key = grid.key(gamma);
            if let Some(v) = cache().lock().ok().and_then(|c| c.get(&key).copied()) {
                return Ok(v);
            }
            let v = integer_sup(gamma, grid);
            if let Ok(mut c) = cache().lock() {
                c.insert(key, v);
            }
            Ok(v)
        }
        ShearSequence::Finite(s) => {
            if s.is_empty() {
                return Ok(0.0);
            }
            Ok(finite_sup(s, gamma, grid))
        }
    }
}

fn x2_nodes(grid: &ShearSumGrid) -> Vec<f64> {
    let lo = grid.x2_min.ln();
    let hi = grid.x2_max.ln();
    let n = grid.x2_points.max(2);
    let mut v: Vec<f64> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect();
    // the sawtooth peaks sit at x₂ = 1/m
    for m in 1..=64 {
        let x = 1.0 / m as f64;
        if x >= grid.x2_min && x <= grid.x2_max {
            v.push(x);
        }
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

fn integer_sup(gamma: f64, grid: &ShearSumGrid) -> f64 {
    let nodes = x2_nodes(grid);
    let n1 = grid.x1_points.max(2);
    let mut best: Vec<(f64, f64, f64)> = Vec::new();
    for &x2 in &nodes {
        for i in 0..n1 {
            let x1 = 0.5 * x2 * i as f64 / (n1 - 1) as f64;
            let f = integer_shear_sum(x1, x2, gamma);
            best.push((f, x1, x2));
        }
    }
    best.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    best.truncate(8);
    let mut sup = best.first().map(|b| b.0).unwrap_or(0.0);
    let dlog = (grid.x2_max / grid.x2_min).ln() / (grid.x2_points.max(2) - 1) as f64;
    for &(_, cx1, cx2) in &best {
        let (mut c1, mut c2) = (cx1, cx2);
        let mut h2 = cx2 * dlog;
        let mut h1 = 0.5 * cx2 / (n1 - 1) as f64;
        for _ in 0..grid.refine_rounds {
            let mut local = (f64::MIN, c1, c2);
            for a in -4i32..=4 {
                let x2 = (c2 + h2 * a as f64 / 4.0).clamp(grid.x2_min, grid.x2_max);
                for b in -4i32..=4 {
                    let x1 = (c1 + h1 * b as f64 / 4.0).clamp(0.0, 0.5 * x2);
                    let f = integer_shear_sum(x1, x2, gamma);
                    if f > local.0 {
                        local = (f, x1, x2);
                    }
                }
            }
            sup = sup.max(local.0);
            c1 = local.1;
            c2 = local.2;
            h1 *= 0.25;
            h2 *= 0.25;
        }
    }
    let small = 2.0 + 2.0 / (gamma - 1.0) + grid.x2_min;
    let big = {
        let x = 0.5 * grid.x2_max;
        1.0 + 2.0 * x.powf(-gamma) * (1.0 - 2f64.powf(-gamma)) * hurwitz_zeta(gamma, 1.0)
    };
    sup.max(small).max(big)
}

fn finite_sup(shears: &[f64], gamma: f64, grid: &ShearSumGrid) -> f64 {
    let smax = shears.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let nodes = x2_nodes(grid);
    let n1 = grid.x1_points.max(2);
    let mut sup = 0.0f64;
    for &x2 in &nodes {
        let span = smax * x2 + 1.0;
        let mut eval = |x1: f64| sup = sup.max(finite_shear_sum(shears, x1, x2, gamma));
        for &s in shears {
            eval(-s * x2);
        }
        for i in 0..n1 {
            eval(-span + 2.0 * span * i as f64 / (n1 - 1) as f64);
        }
    }
    // Past x2_max the shifted peaks separate further, so the sum only approaches a single term.
    sup.min(shears.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_matches_direct_sum() {
        for &(s, a) in &[(2.0, 1.0), (4.0, 0.3), (9.5, 2.7), (1.5, 1.0), (30.0, 1.0)] {
            let direct: f64 = (0..2_000_000).map(|k| (a + k as f64).powf(-s)).sum::<f64>()
                + (a + 2e6f64).powf(1.0 - s) / (s - 1.0);
            assert!(((hurwitz_zeta(s, a) - direct) / direct).abs() < 1e-9, "s={s} a={a}");
        }
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - z2).abs() < 1e-14);
    }

    #[test]
    fn integer_sum_at_unit_lattice() {
        let g = 4.0;
        let want = 1.0 + 2.0 * hurwitz_zeta(g, 1.0);
        assert!((integer_shear_sum(0.0, 1.0, g) - want).abs() < 1e-13);
    }
}
