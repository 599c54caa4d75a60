//! Square 2-D FFTs on row-major `n × n` buffers.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({})", self.n)
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    fn rows(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        buf.par_chunks_mut(n * 8.min(n)).for_each(|chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(chunk, &mut scratch);
        });
    }

    fn transpose(&self, buf: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                buf.swap(i * n + j, j * n + i);
            }
        }
    }

    /// Unnormalised forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.rows(buf, &self.fwd);
        self.transpose(buf);
        self.rows(buf, &self.fwd);
        self.transpose(buf);
    }

    /// Inverse transform including the `1/n²` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.rows(buf, &self.inv);
        self.transpose(buf);
        self.rows(buf, &self.inv);
        self.transpose(buf);
        let s = 1.0 / (self.n * self.n) as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }
}

/// Index of the bin holding frequency `-ω` for the bin at `(i, j)`.
#[inline]
pub fn partner(n: usize, i: usize, j: usize) -> usize {
    ((n - i) % n) * n + (n - j) % n
}

/// Signed frequency of DFT index `i` in `[-n/2, n/2)`.
#[inline]
pub fn signed_freq(n: usize, i: usize) -> f64 {
    if i < n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}
