//! Digital cone-adapted shearlet transform on the periodic `N × N` square.
//!
//! Continuum frequencies are sampled as `ξ = ω / W` with `ω` the signed DFT
//! index. `W` places the Nyquist frequency at `NYQUIST_POSITION` of the
//! finest band's radial variable, beyond the passband where the radial
//! factor has decayed. Coefficients are kept on the full pixel grid for every
//! subband, so the frame operator is the Fourier multiplier
//! `Σ_λ |ĝ_λ(ω)|²` and all bounds can be checked exactly against it.
//!
//! With [`Sampling::Decimated`] each subband is instead sampled on the
//! coarsest integer lattice `{(d₁m₁ + σm₂, d₂m₂)}` whose dual lattice does
//! not fold the significant part of its filter onto itself. Decimated
//! coefficients carry a `√(d₁d₂)` factor so the alias-free part of the frame
//! operator keeps the same symbol.

mod fft2;
pub mod io;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fft2::Fft2;
use fft2::{partner, signed_freq};

use crate::error::{invalid, ConeletError, Result};
use crate::filter_design::{halfband_power, spectral_factorize, FilterParams, LowpassFilter};
use crate::frame_certification::FeasibleParamSet;
use crate::scaling_function::PhiHat;

/// Radial variable of the finest band at the Nyquist frequency.
pub const NYQUIST_POSITION: f64 = 5.0 / 32.0;

/// Radial factors below this are stored as zero.
const NEGLIGIBLE: f64 = 1e-20;

/// Square real image, row-major; the first index is `x₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Image {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Image {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(ConeletError::SizeMismatch(format!("expected {} values, got {}", n * n, data.len())));
        }
        Ok(Self { n, data })
    }

    pub fn norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    /// Cyclic shift by `(d1, d2)` pixels.
    pub fn shifted(&self, d1: isize, d2: isize) -> Self {
        let n = self.n as isize;
        let mut out = Self::zeros(self.n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = ((i + d1).rem_euclid(n), (j + d2).rem_euclid(n));
                out.data[(a * n + b) as usize] = self.data[(i * n + j) as usize];
            }
        }
        out
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { n, data: (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect() }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cone {
    Lowpass,
    #[serde(rename = "h")]
    Horizontal,
    #[serde(rename = "v")]
    Vertical,
}

/// Identity of one subband; ordering is the storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubbandIndex {
    pub cone: Cone,
    pub j: u32,
    pub k: i32,
}

/// Header data shared by the system and its coefficient files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemInfo {
    #[serde(rename = "N")]
    pub n: usize,
    pub j_max: u32,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub c: (f64, f64),
    pub frequency_scale: f64,
    pub nyquist_position: f64,
    pub subbands: Vec<SubbandIndex>,
    pub sampling: Sampling,
    pub lattices: Vec<Lattice>,
}

/// Translation sampling of the digital system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Every subband on the full pixel grid.
    Full,
    /// Per-subband lattices; bins with `|ĝ|² < threshold · max|ĝ|²` may alias.
    Decimated { threshold: f64 },
}

/// Default alias threshold for [`Sampling::Decimated`].
pub const DEFAULT_ALIAS_THRESHOLD: f64 = 1e-4;

/// Pixel lattice generated by `(d1, 0)` and `(shear, d2)`, modulo `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub d1: usize,
    pub d2: usize,
    pub shear: usize,
}

impl Lattice {
    pub const FULL: Lattice = Lattice { d1: 1, d2: 1, shear: 0 };

    pub fn points(&self, n: usize) -> usize {
        n * n / (self.d1 * self.d2)
    }

    /// Pixel offsets `x₁N + x₂` in coefficient order (`m₁` major).
    pub fn positions(&self, n: usize) -> Vec<u32> {
        let (r1, r2) = (n / self.d1, n / self.d2);
        let mut out = Vec::with_capacity(r1 * r2);
        for m1 in 0..r1 {
            for m2 in 0..r2 {
                let x1 = (self.d1 * m1 + self.shear * m2) % n;
                out.push((x1 * n + self.d2 * m2) as u32);
            }
        }
        out
    }

    /// True when no two bins of `support` differ by a dual-lattice vector.
    fn separates(&self, n: usize, support: &[(usize, usize)], seen: &mut Vec<bool>) -> bool {
        let (r1, r2) = (n / self.d1, n / self.d2);
        let lift = self.shear * n / (self.d1 * self.d2);
        seen.clear();
        seen.resize(r1 * r2, false);
        for &(w1, w2) in support {
            let t = w1 / r1;
            let key = (w1 % r1) * r2 + (w2 + t * lift) % r2;
            if std::mem::replace(&mut seen[key], true) {
                return false;
            }
        }
        true
    }
}

/// Coarsest lattice separating the bins where `|g|² >= threshold · max|g|²`.
pub fn choose_lattice(n: usize, g: &[Complex64], threshold: f64) -> Lattice {
    let peak = g.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Lattice::FULL;
    }
    let support: Vec<(usize, usize)> = (0..n * n)
        .filter(|&b| g[b].norm_sqr() >= threshold * peak)
        .map(|b| (b / n, b % n))
        .collect();
    let mut seen = Vec::new();
    let mut p = (n * n / support.len().max(1)).min(n).next_power_of_two();
    while p > 1 {
        let mut shapes: Vec<(usize, usize)> = (0..=p.trailing_zeros())
            .map(|e| (1usize << e, p >> e))
            .filter(|&(d1, d2)| d1 <= n && d2 <= n && d1 * d2 <= n)
            .collect();
        shapes.sort_by_key(|&(d1, d2)| ((d1.trailing_zeros() as i32 - d2.trailing_zeros() as i32).abs(), d1));
        for (d1, d2) in shapes {
            for shear in 0..d1 {
                let lat = Lattice { d1, d2, shear };
                if lat.separates(n, &support, &mut seen) {
                    return lat;
                }
            }
        }
        p /= 2;
    }
    Lattice::FULL
}

/// Sampled filters of a digital shearlet system. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ShearletSystem {
    pub info: SystemInfo,
    pub filter: LowpassFilter,
    filters: Vec<Vec<Complex64>>,
    positions: Vec<Option<Vec<u32>>>,
    multiplier: Vec<f64>,
    fft: Fft2,
}

/// Number of subbands: `1 + 2 Σ_{j<j_max} (2⌈2^{j/2}⌉ + 1)`.
pub fn subband_count(j_max: u32) -> usize {
    1 + 2 * (0..j_max).map(|j| 2 * shear_bound(j) as usize + 1).sum::<usize>()
}

/// `⌈2^{j/2}⌉`, exact for even `j`.
pub fn shear_bound(j: u32) -> i32 {
    if j.is_multiple_of(2) {
        1 << (j / 2)
    } else {
        (2f64.powf(j as f64 / 2.0)).ceil() as i32
    }
}

/// Continuum-to-DFT scale `W` with `ξ = ω/W`.
pub fn frequency_scale(n: usize, j_max: u32) -> f64 {
    n as f64 / (NYQUIST_POSITION * 2f64.powi(j_max as i32))
}

/// Default number of scales: `log₂N - 3`, at least 1.
pub fn default_j_max(n: usize) -> u32 {
    (n.trailing_zeros().saturating_sub(3)).max(1)
}

/// Full-grid system; see [`build_system_with`].
pub fn build_system(params: &FilterParams, set: &FeasibleParamSet, n: usize, j_max: u32) -> Result<ShearletSystem> {
    build_system_with(params, set, n, j_max, Sampling::Full)
}

pub fn build_system_with(
    params: &FilterParams,
    set: &FeasibleParamSet,
    n: usize,
    j_max: u32,
    sampling: Sampling,
) -> Result<ShearletSystem> {
    if let Sampling::Decimated { threshold } = sampling {
        if !(threshold > 0.0 && threshold < 1.0) {
            return invalid(format!("alias threshold must lie in (0, 1) (got {threshold})"));
        }
    }
    params.validate_basic()?;
    set.validate()?;
    if n < 4 || !n.is_power_of_two() {
        return invalid(format!("image size must be a power of two >= 4 (N={n})"));
    }
    if j_max == 0 {
        return invalid("j_max >= 1 is required");
    }
    if 1usize.checked_shl(j_max).is_none_or(|s| s > n) {
        return Err(ConeletError::ScaleOverflow(format!("2^j_max = 2^{j_max} exceeds N = {n}")));
    }
    let poly = halfband_power(params.k, params.l)?;
    let filter = spectral_factorize(&poly)?;
    let phi = PhiHat::new(&filter);
    let w = frequency_scale(n, j_max);
    let freqs: Vec<f64> = (0..n).map(|i| signed_freq(n, i) / w).collect();

    let mut index = vec![SubbandIndex { cone: Cone::Lowpass, j: 0, k: 0 }];
    for j in 0..j_max {
        let b = shear_bound(j);
        for k in -b..=b {
            index.push(SubbandIndex { cone: Cone::Horizontal, j, k });
        }
    }
    let horizontal: Vec<SubbandIndex> = index[1..].to_vec();
    for s in &horizontal {
        index.push(SubbandIndex { cone: Cone::Vertical, ..*s });
    }

    // θ̂(ξ) = φ̂(ξ₁)φ̂(ξ₂)
    let phi1: Vec<Complex64> = freqs.iter().map(|&x| phi.eval(x)).collect();
    let mut low = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            low[i * n + j] = phi1[i] * phi1[j];
        }
    }

    // radial part m1(4u) φ̂(u) per scale, u = 2^{-j} ξ₁
    let radial: Vec<Vec<Complex64>> = (0..j_max)
        .map(|j| {
            let a = 2f64.powi(-(j as i32));
            freqs.iter().map(|&x| filter.m1(4.0 * a * x) * phi.eval(a * x)).collect()
        })
        .collect();

    let h_filters: Vec<Vec<Complex64>> = horizontal
        .par_iter()
        .map(|s| {
            let a = 2f64.powi(-(s.j as i32));
            let sa = a.sqrt();
            let rad = &radial[s.j as usize];
            let mut g = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                let r = rad[i];
                if r.norm() < NEGLIGIBLE {
                    continue;
                }
                let u = a * freqs[i];
                for jj in 0..n {
                    let v = s.k as f64 * u + sa * freqs[jj];
                    g[i * n + jj] = r * phi.eval(2.0 * v);
                }
            }
            hermitian(n, &mut g);
            g
        })
        .collect();
    hermitian(n, &mut low);

    let mut filters = Vec::with_capacity(index.len());
    filters.push(low);
    for g in &h_filters {
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = g[i * n + j];
            }
        }
        filters.push(t);
    }
    let mut ordered = Vec::with_capacity(index.len());
    ordered.push(filters.remove(0));
    ordered.extend(h_filters);
    ordered.extend(filters);

    let mut multiplier = vec![0.0; n * n];
    for g in &ordered {
        for (m, v) in multiplier.iter_mut().zip(g) {
            *m += v.norm_sqr();
        }
    }
    let lattices: Vec<Lattice> = match sampling {
        Sampling::Full => vec![Lattice::FULL; ordered.len()],
        Sampling::Decimated { threshold } => ordered.par_iter().map(|g| choose_lattice(n, g, threshold)).collect(),
    };
    let positions = lattices.iter().map(|l| if *l == Lattice::FULL { None } else { Some(l.positions(n)) }).collect();
    Ok(ShearletSystem {
        info: SystemInfo {
            n,
            j_max,
            k: params.k,
            l: params.l,
            c: (set.c1, set.c2),
            frequency_scale: w,
            nyquist_position: NYQUIST_POSITION,
            subbands: index,
            sampling,
            lattices,
        },
        filter,
        filters: ordered,
        positions,
        multiplier,
        fft: Fft2::new(n),
    })
}

/// Forces `g(-ω) = conj(g(ω))`; only the unpaired Nyquist bins change.
fn hermitian(n: usize, g: &mut [Complex64]) {
    let orig = g.to_vec();
    for i in 0..n {
        for j in 0..n {
            let p = partner(n, i, j);
            g[i * n + j] = 0.5 * (orig[i * n + j] + orig[p].conj());
        }
    }
}

/// Coefficients of every subband, each on its lattice in `(m₁, m₂)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub info: SystemInfo,
    pub bands: Vec<Vec<f64>>,
}

impl CoefficientSet {
    pub fn zeros(info: &SystemInfo) -> Self {
        let bands = info.lattices.iter().map(|l| vec![0.0; l.points(info.n)]).collect();
        Self { info: info.clone(), bands }
    }

    pub fn len(&self) -> usize {
        self.bands.iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.bands.iter().zip(&other.bands).map(|(a, b)| dot(a, b)).sum()
    }

    pub fn energy(&self) -> f64 {
        self.dot(self)
    }
}

impl ShearletSystem {
    pub fn n(&self) -> usize {
        self.info.n
    }

    pub fn subbands(&self) -> &[SubbandIndex] {
        &self.info.subbands
    }

    /// Sampled filter of subband `idx` in DFT order.
    pub fn filter_response(&self, idx: usize) -> &[Complex64] {
        &self.filters[idx]
    }

    /// `Σ_λ |ĝ_λ|²` on the DFT grid: the symbol of the frame operator for
    /// full sampling, and of its alias-free part when decimated.
    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// Minimum and maximum of [`ShearletSystem::multiplier`].
    pub fn multiplier_bounds(&self) -> (f64, f64) {
        self.multiplier.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &m| (a.min(m), b.max(m)))
    }

    fn check_image(&self, img: &Image) -> Result<()> {
        if img.n != self.info.n || img.data.len() != img.n * img.n {
            return Err(ConeletError::SizeMismatch(format!(
                "image is {}x{}, system expects {}x{}",
                img.n, img.n, self.info.n, self.info.n
            )));
        }
        Ok(())
    }

    fn spectrum(&self, img: &Image) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = img.data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut buf);
        buf
    }

    pub fn analyze(&self, img: &Image) -> Result<CoefficientSet> {
        self.check_image(img)?;
        let spec = self.spectrum(img);
        let nb = self.filters.len();
        let pairs: Vec<(usize, Option<usize>)> =
            (0..nb).step_by(2).map(|a| (a, if a + 1 < nb { Some(a + 1) } else { None })).collect();
        let out: Vec<(Vec<f64>, Option<Vec<f64>>)> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let ga = &self.filters[a];
                let mut buf: Vec<Complex64> = match b {
                    Some(b) => {
                        let gb = &self.filters[b];
                        spec.iter()
                            .zip(ga.iter().zip(gb))
                            .map(|(s, (x, y))| s * x.conj() + Complex64::i() * (s * y.conj()))
                            .collect()
                    }
                    None => spec.iter().zip(ga).map(|(s, x)| s * x.conj()).collect(),
                };
                self.fft.inverse(&mut buf);
                let re = self.gather(a, &buf, |z| z.re);
                let im = b.map(|b| self.gather(b, &buf, |z| z.im));
                (re, im)
            })
            .collect();
        let mut bands = Vec::with_capacity(nb);
        for (re, im) in out {
            bands.push(re);
            if let Some(im) = im {
                bands.push(im);
            }
        }
        Ok(CoefficientSet { info: self.info.clone(), bands })
    }

    fn gather(&self, band: usize, buf: &[Complex64], part: impl Fn(&Complex64) -> f64) -> Vec<f64> {
        match &self.positions[band] {
            None => buf.iter().map(part).collect(),
            Some(pos) => {
                let l = self.info.lattices[band];
                let w = ((l.d1 * l.d2) as f64).sqrt();
                pos.iter().map(|&p| w * part(&buf[p as usize])).collect()
            }
        }
    }

    /// Writes a band into the full grid, zero off its lattice.
    fn scatter(&self, band: usize, values: &[f64], out: &mut [f64]) {
        match &self.positions[band] {
            None => out.copy_from_slice(values),
            Some(pos) => {
                let l = self.info.lattices[band];
                let w = ((l.d1 * l.d2) as f64).sqrt();
                out.iter_mut().for_each(|v| *v = 0.0);
                for (&p, &v) in pos.iter().zip(values) {
                    out[p as usize] = w * v;
                }
            }
        }
    }

    fn check_coeffs(&self, c: &CoefficientSet) -> Result<()> {
        let n = self.info.n;
        if c.info.n != n
            || c.info.subbands != self.info.subbands
            || c.info.lattices != self.info.lattices
            || c.bands.len() != self.info.lattices.len()
            || c.bands.iter().zip(&self.info.lattices).any(|(b, l)| b.len() != l.points(n))
        {
            return Err(ConeletError::SizeMismatch("coefficient metadata does not match the system".into()));
        }
        Ok(())
    }

    /// Synthesis operator, the exact adjoint of [`ShearletSystem::analyze`].
    pub fn adjoint(&self, c: &CoefficientSet) -> Result<Image> {
        self.check_coeffs(c)?;
        let n = self.info.n;
        let nb = self.filters.len();
        let pairs: Vec<usize> = (0..nb).step_by(2).collect();
        let partials: Vec<Vec<Complex64>> = pairs
            .par_iter()
            .map(|&a| {
                let b = if a + 1 < nb { Some(a + 1) } else { None };
                let mut re = vec![0.0; n * n];
                let mut im = vec![0.0; n * n];
                self.scatter(a, &c.bands[a], &mut re);
                if let Some(b) = b {
                    self.scatter(b, &c.bands[b], &mut im);
                }
                let mut buf: Vec<Complex64> = re.iter().zip(&im).map(|(&x, &y)| Complex64::new(x, y)).collect();
                self.fft.forward(&mut buf);
                let ga = &self.filters[a];
                let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    for j in 0..n {
                        let idx = i * n + j;
                        let z = buf[idx];
                        let zp = buf[partner(n, i, j)].conj();
                        let ca = 0.5 * (z + zp);
                        acc[idx] = ca * ga[idx];
                        if let Some(b) = b {
                            let cb = (z - zp) * Complex64::new(0.0, -0.5);
                            acc[idx] += cb * self.filters[b][idx];
                        }
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![Complex64::new(0.0, 0.0); n * n];
        for p in &partials {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        self.fft.inverse(&mut total);
        Ok(Image { n, data: total.iter().map(|z| z.re).collect() })
    }

    /// `S f = adjoint(analyze(f))`.
    pub fn frame_operator(&self, img: &Image) -> Result<Image> {
        self.adjoint(&self.analyze(img)?)
    }

    /// `S^{-1} g` applied through the symbol; used as a preconditioner.
    pub fn inverse_frame_operator(&self, img: &Image) -> Result<Image> {
        self.check_image(img)?;
        let mut s = self.spectrum(img);
        for (v, m) in s.iter_mut().zip(&self.multiplier) {
            *v /= *m;
        }
        self.fft.inverse(&mut s);
        Ok(Image { n: img.n, data: s.iter().map(|z| z.re).collect() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Precondition with the exact symbol inverse.
    pub preconditioned: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 1000, preconditioned: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `S f = b` by (preconditioned) conjugate gradients, starting from `x0` or zero.
pub fn solve_frame_operator(sys: &ShearletSystem, b: &Image, x0: Option<&Image>, opts: CgOptions) -> Result<(Image, CgReport)> {
    sys.check_image(b)?;
    let n = b.n;
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok((Image::zeros(n), CgReport { iterations: 0, relative_residual: 0.0 }));
    }
    let mut x = x0.cloned().unwrap_or_else(|| Image::zeros(n));
    let mut r = if x0.is_some() {
        let sx = sys.frame_operator(&x)?;
        Image { n, data: b.data.iter().zip(&sx.data).map(|(a, c)| a - c).collect() }
    } else {
        b.clone()
    };
    let precond = |v: &Image| -> Result<Image> {
        if opts.preconditioned {
            sys.inverse_frame_operator(v)
        } else {
            Ok(v.clone())
        }
    };
    let mut z = precond(&r)?;
    let mut p = z.clone();
    let mut rz = dot(&r.data, &z.data);
    let mut res = r.norm() / bnorm;
    let mut it = 0;
    while res > opts.tol {
        if it >= opts.max_iter {
            return Err(ConeletError::NotConverged { iterations: it, residual: res });
        }
        let sp = sys.frame_operator(&p)?;
        let psp = dot(&p.data, &sp.data);
        if !(psp > 0.0) {
            return Err(ConeletError::InvalidParams(format!("not positive definite: p^T S p = {psp:.3e}")));
        }
        let alpha = rz / psp;
        for i in 0..x.data.len() {
            x.data[i] += alpha * p.data[i];
            r.data[i] -= alpha * sp.data[i];
        }
        z = precond(&r)?;
        let rz_new = dot(&r.data, &z.data);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.data.len() {
            p.data[i] = z.data[i] + beta * p.data[i];
        }
        res = r.norm() / bnorm;
        it += 1;
    }
    Ok((x, CgReport { iterations: it, relative_residual: res }))
}

/// `S^{-1} adjoint(c)` by plain conjugate gradients to relative residual `tol`.
pub fn reconstruct(sys: &ShearletSystem, c: &CoefficientSet, tol: f64) -> Result<(Image, CgReport)> {
    let b = sys.adjoint(c)?;
    solve_frame_operator(sys, &b, None, CgOptions { tol, ..CgOptions::default() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBoundsEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub iterations: usize,
}

/// `λ_max` by power iteration on `S`, `λ_min` by inverse iteration with CG
/// solves; both reported as Rayleigh quotients of the final iterates.
pub fn numeric_frame_bounds(sys: &ShearletSystem, iters: usize) -> Result<FrameBoundsEstimate> {
    if iters < 50 {
        return invalid("at least 50 iterations are required");
    }
    let n = sys.n();
    let normalize = |v: &mut Image| {
        let s = v.norm();
        for x in v.data.iter_mut() {
            *x /= s;
        }
    };
    let mut v = Image::random(n, 0x5eed_0001);
    normalize(&mut v);
    let mut lmax = 0.0;
    for _ in 0..iters {
        let sv = sys.frame_operator(&v)?;
        lmax = dot(&v.data, &sv.data);
        v = sv;
        normalize(&mut v);
    }
    let mut u = Image::random(n, 0x5eed_0002);
    normalize(&mut u);
    let mut lmin = f64::INFINITY;
    let mut guess: Option<Image> = None;
    for _ in 0..iters {
        let (w, _) = solve_frame_operator(sys, &u, guess.as_ref(), CgOptions { tol: 1e-10, max_iter: 5000, preconditioned: true })?;
        let mut w = w;
        normalize(&mut w);
        let sw = sys.frame_operator(&w)?;
        lmin = dot(&w.data, &sw.data);
        // warm start: S^{-1} w ≈ w / λ
        guess = Some(Image { n, data: w.data.iter().map(|x| x / lmin).collect() });
        u = w;
    }
    if !(lmin > 0.0) {
        return Err(ConeletError::InvalidParams(format!("not positive definite: lambda_min = {lmin:.3e}")));
    }
    Ok(FrameBoundsEstimate { lambda_min: lmin, lambda_max: lmax, iterations: iters })
}
