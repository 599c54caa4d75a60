//! Periodic orthonormal separable 2-D wavelet transform (Mallat layout).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::filter_design::{halfband_power, spectral_factorize};
use crate::shearlet_transform::Image;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletBasis {
    pub n: usize,
    pub levels: u32,
    pub order: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl WaveletBasis {
    /// Daubechies basis from the `K = L = order` maximally flat filter.
    pub fn new(n: usize, order: usize, levels: u32) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return invalid(format!("wavelet size must be a power of two (N={n})"));
        }
        if levels == 0 || (n >> levels) == 0 {
            return invalid(format!("{levels} levels do not fit N={n}"));
        }
        let f = spectral_factorize(&halfband_power(order, order)?)?;
        let lo: Vec<f64> = f.taps.iter().map(|t| t * std::f64::consts::SQRT_2).collect();
        let len = lo.len();
        let hi = (0..len).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * lo[len - 1 - i]).collect();
        Ok(Self { n, levels, order, lo, hi })
    }

    fn split(&self, x: &[f64], out: &mut [f64]) {
        let m = x.len();
        let h = m / 2;
        for k in 0..h {
            let (mut a, mut d) = (0.0, 0.0);
            for (i, (l, g)) in self.lo.iter().zip(&self.hi).enumerate() {
                let v = x[(2 * k + i) % m];
                a += l * v;
                d += g * v;
            }
            out[k] = a;
            out[h + k] = d;
        }
    }

    fn merge(&self, c: &[f64], out: &mut [f64]) {
        let m = c.len();
        let h = m / 2;
        out.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..h {
            let (a, d) = (c[k], c[h + k]);
            for (i, (l, g)) in self.lo.iter().zip(&self.hi).enumerate() {
                out[(2 * k + i) % m] += l * a + g * d;
            }
        }
    }

    /// Applies `op` to every row and then every column of the leading `m × m` block.
    fn block(&self, data: &mut [f64], m: usize, forward: bool) {
        let n = self.n;
        let mut line = vec![0.0; m];
        let mut out = vec![0.0; m];
        let mut pass = |data: &mut [f64], rows: bool| {
            for a in 0..m {
                for b in 0..m {
                    line[b] = if rows { data[a * n + b] } else { data[b * n + a] };
                }
                if forward {
                    self.split(&line, &mut out);
                } else {
                    self.merge(&line, &mut out);
                }
                for b in 0..m {
                    if rows {
                        data[a * n + b] = out[b];
                    } else {
                        data[b * n + a] = out[b];
                    }
                }
            }
        };
        if forward {
            pass(data, true);
            pass(data, false);
        } else {
            pass(data, false);
            pass(data, true);
        }
    }

    pub fn forward(&self, img: &Image) -> Vec<f64> {
        let mut d = img.data.clone();
        for l in 0..self.levels {
            self.block(&mut d, self.n >> l, true);
        }
        d
    }

    pub fn inverse(&self, coeffs: &[f64]) -> Image {
        let mut d = coeffs.to_vec();
        for l in (0..self.levels).rev() {
            self.block(&mut d, self.n >> l, false);
        }
        Image { n: self.n, data: d }
    }
}
