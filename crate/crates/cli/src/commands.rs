use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use conelet::cartoon_bench::{run_bench, write_decay_csv, BenchConfig, CartoonSpec};
use conelet::filter_design::{feasibility_envelope, halfband_power, spectral_factorize, EnvelopeOptions, FilterParams};
use conelet::frame_certification::{
    certify as certify_pair, kprime_search, reference_table, write_table_csv, CertifyOptions, FeasibleParamSet,
    FrameCertificate, GammaPrimeRule, TableRow,
};
use conelet::scaling_function::{cascade_phi, envelope_table, write_envelope_csv, write_phi_csv, ScalingProfile};
use conelet::shearlet_transform::{
    build_system_with, default_j_max, io, reconstruct, Image, Sampling, ShearletSystem, DEFAULT_ALIAS_THRESHOLD,
};

use crate::artifacts::{ensure_dir, run_value, write_csv, write_json, write_text, RunConfig};
use crate::{svg, Failure};

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad integer {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad integer {b:?}"))?;
    Ok((a, b))
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse().map_err(|_| format!("bad integer {t:?}"))).collect()
}

#[derive(Args, Debug, Serialize)]
pub struct DesignArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    k: usize,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: usize,
    /// Reduced order of the envelope; defaults to the largest admissible value.
    #[arg(long = "Kprime")]
    #[serde(rename = "Kprime")]
    k_prime: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    j0: Option<u32>,
    #[arg(long)]
    j1: Option<u32>,
    /// Also write `phi.csv` sampled on the grid `2^-levels`.
    #[arg(long)]
    phi_levels: Option<u32>,
    /// Also write `envelope.csv` with this many frequencies in `[0, xi_max]`.
    #[arg(long)]
    envelope_points: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    xi_max: f64,
}

pub fn design(a: &DesignArgs) -> Result<(), Failure> {
    let run = RunConfig::new("design", a);
    let base = FilterParams::new(a.k, a.l, 0);
    base.validate_basic()?;
    // K = L gives the Daubechies filters used by the wavelet baseline; they
    // are outside the shearlet construction and get no envelope.
    let daubechies = a.k == a.l;
    if !daubechies {
        let v = base.construction_violations();
        if !v.is_empty() {
            return Err(Failure::params(format!("K={}, L={} violates {}", a.k, a.l, v.join("; "))));
        }
    }
    let poly = halfband_power(a.k, a.l)?;
    let filter = spectral_factorize(&poly)?;
    let envelope = if daubechies {
        None
    } else {
        let kp = a.k_prime.unwrap_or_else(|| FilterParams::max_k_prime(a.k, a.l));
        let params = FilterParams::new(a.k, a.l, kp);
        let v = params.envelope_violations();
        if !v.is_empty() {
            return Err(Failure::params(format!("K'={kp} violates {}", v.join("; "))));
        }
        Some(feasibility_envelope(&params, EnvelopeOptions { j0: a.j0, j1: a.j1 })?)
    };

    ensure_dir(&a.out)?;
    let env_summary = envelope.as_ref().map(|e| {
        json!({
            "alpha": e.alpha, "gamma": e.gamma, "q": e.q, "qprime": e.qprime, "r": e.r,
            "C1": e.c1, "C2": e.c2, "J0": e.j0, "J1": e.j1,
        })
    });
    let filter_json = json!({
        "K": a.k,
        "L": a.l,
        "Kprime": envelope.as_ref().map(|e| e.k_prime),
        "taps": filter.taps,
        "P_coeffs": poly.coefficients(),
        "residual": filter.residual,
        "envelope": env_summary,
    });
    let mut written = vec![write_json(&a.out.join("filter.json"), &run, &filter_json)?];
    if let Some(env) = &envelope {
        written.push(write_json(&a.out.join("envelope.json"), &run, env)?);
    }
    if let Some(levels) = a.phi_levels {
        let samples = cascade_phi(&filter, levels)?;
        written.push(write_csv(&a.out.join("phi.csv"), &run, |w| write_phi_csv(w, &samples))?);
    }
    if let (Some(points), Some(env)) = (a.envelope_points, &envelope) {
        if !(a.xi_max > 0.0 && a.xi_max.is_finite()) || points == 0 {
            return Err(Failure::params("envelope table needs xi_max > 0 and at least one point"));
        }
        let profile = ScalingProfile::new(poly.clone()).with_envelope(env.clone());
        let rows = envelope_table(&profile, env, a.xi_max, points)?;
        written.push(write_csv(&a.out.join("envelope.csv"), &run, |w| write_envelope_csv(w, &rows))?);
    }

    println!("taps {} residual {:e}", filter.taps.len(), filter.residual);
    match &envelope {
        Some(e) => println!(
            "K'={} alpha={} gamma={} q={} qprime={} r={} C1={} C2={} J0={} J1={}",
            e.k_prime, e.alpha, e.gamma, e.q, e.qprime, e.r, e.c1, e.c2, e.j0, e.j1
        ),
        None => println!("no envelope for K = L"),
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    #[arg(long = "K", default_value_t = 39)]
    #[serde(rename = "K")]
    k: usize,
    #[arg(long = "L", default_value_t = 18)]
    #[serde(rename = "L")]
    l: usize,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 0.15)]
    c2: f64,
    /// `K'` for the upper Calderón bound and for the interference term, as `a,b`.
    #[arg(long, value_parser = parse_pair, conflicts_with = "search")]
    kprime_pair: Option<(usize, usize)>,
    /// Search every admissible pair; the default when no pair is given.
    #[arg(long)]
    search: bool,
    /// Certify the ten-row reference grid and write `table1.csv`.
    #[arg(long, conflicts_with_all = ["kprime_pair", "search"])]
    table1: bool,
    /// Minimise over this many log-spaced gamma' values.
    #[arg(long, default_value_t = 64)]
    gamma_points: usize,
    /// Use one fixed gamma' instead of the grid.
    #[arg(long)]
    gamma_prime: Option<f64>,
    #[arg(long)]
    j0: Option<u32>,
    #[arg(long)]
    j1: Option<u32>,
    /// Write JSON (the default when neither format is chosen).
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl CertifyArgs {
    fn options(&self) -> Result<CertifyOptions, Failure> {
        let gamma_prime = match self.gamma_prime {
            Some(g) => GammaPrimeRule::Fixed(g),
            None if self.gamma_points >= 1 => GammaPrimeRule::Grid { points: self.gamma_points },
            None => return Err(Failure::params("--gamma-points must be at least 1")),
        };
        Ok(CertifyOptions {
            envelope: EnvelopeOptions { j0: self.j0, j1: self.j1 },
            gamma_prime,
            ..CertifyOptions::default()
        })
    }
}

fn print_cert(c: &FrameCertificate) {
    println!(
        "K={} L={} c=({}, {}) Kprime=({},{}) A={:e} B={:e} ratio={:.6} valid={}",
        c.k, c.l, c.c1, c.c2, c.kprime_pair.0, c.kprime_pair.1, c.a_low, c.b_high, c.ratio, c.valid
    );
}

pub fn certify(a: &CertifyArgs) -> Result<(), Failure> {
    let run = RunConfig::new("certify", a);
    let opts = a.options()?;
    let json_out = a.json || !a.csv;
    ensure_dir(&a.out)?;
    let mut written = Vec::new();

    if a.table1 {
        let certs = reference_table(&opts)?;
        let rows: Vec<TableRow> = certs.iter().map(TableRow::from).collect();
        written.push(write_csv(&a.out.join("table1.csv"), &run, |w| write_table_csv(w, &rows))?);
        if a.json {
            let body = json!({ "certificates": certs, "options": opts });
            written.push(write_json(&a.out.join("table1.json"), &run, &body)?);
        }
        certs.iter().for_each(print_cert);
        written.iter().for_each(|p| println!("wrote {}", p.display()));
        if let Some(bad) = certs.iter().find(|c| !c.valid) {
            return Err(Failure { code: 3, message: format!("row c=({}, {}) is not certifiable", bad.c1, bad.c2) });
        }
        return Ok(());
    }

    let set = FeasibleParamSet::regular(a.c1, a.c2);
    let cert = match a.kprime_pair {
        Some(pair) => certify_pair(a.k, a.l, pair, &set, &opts)?,
        None => kprime_search(a.k, a.l, &set, &opts)?,
    };
    let input = json!({
        "K": a.k, "L": a.l, "c1": a.c1, "c2": a.c2,
        "kprime_pair": a.kprime_pair, "search": a.kprime_pair.is_none(),
        "mu": set.mu, "p": set.p,
    });
    if json_out {
        let body = json!({ "certificate": cert, "input": input, "options": opts });
        written.push(write_json(&a.out.join("certificate.json"), &run, &body)?);
    }
    if a.csv {
        let rows = [TableRow::from(&cert)];
        written.push(write_csv(&a.out.join("certificate.csv"), &run, |w| write_table_csv(w, &rows))?);
    }
    print_cert(&cert);
    written.iter().for_each(|p| println!("wrote {}", p.display()));
    cert.ensure_valid()?;
    Ok(())
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum SamplingArg {
    Full,
    Decimated,
}

/// Options shared by the commands that build a digital system.
#[derive(Args, Debug, Serialize)]
pub struct SystemArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    k: Option<usize>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<usize>,
    /// Finest scale; defaults to log2(N) - 3.
    #[arg(long)]
    jmax: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 0.15)]
    c2: f64,
    #[arg(long, value_enum)]
    sampling: Option<SamplingArg>,
    /// Relative spectral level allowed to alias under decimation.
    #[arg(long, default_value_t = DEFAULT_ALIAS_THRESHOLD)]
    threshold: f64,
}

impl SystemArgs {
    fn sampling(&self, default: SamplingArg) -> Sampling {
        match self.sampling.unwrap_or(default) {
            SamplingArg::Full => Sampling::Full,
            SamplingArg::Decimated => Sampling::Decimated { threshold: self.threshold },
        }
    }

    fn build(&self, n: usize, defaults: (usize, usize), sampling: SamplingArg) -> Result<ShearletSystem, Failure> {
        let params = FilterParams::new(self.k.unwrap_or(defaults.0), self.l.unwrap_or(defaults.1), 0);
        let set = FeasibleParamSet::regular(self.c1, self.c2);
        let j_max = self.jmax.unwrap_or_else(|| default_j_max(n));
        Ok(build_system_with(&params, &set, n, j_max, self.sampling(sampling))?)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct TransformArgs {
    /// PGM input (P2 or P5, square, power-of-two side).
    #[arg(long)]
    image: Option<PathBuf>,
    /// Side of the random test image used when no `--image` is given.
    #[arg(long, default_value_t = 128)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    system: SystemArgs,
    /// Coefficient container to write.
    #[arg(long)]
    out: PathBuf,
}

pub fn transform(a: &TransformArgs) -> Result<(), Failure> {
    let run = RunConfig::new("transform", a);
    let img = match &a.image {
        Some(p) => io::read_pgm(p).map_err(|e| {
            let f = Failure::from(e);
            Failure { message: format!("{}: {}", p.display(), f.message), ..f }
        })?,
        None => Image::random(a.size, a.seed),
    };
    let sys = a.system.build(img.n, (39, 18), SamplingArg::Full)?;
    let coeffs = sys.analyze(&img)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    io::save_coefficients(&a.out, &coeffs, &json!({ "run": run_value(&run), "version": conelet::VERSION }))?;
    println!(
        "N={} subbands={} coefficients={} energy={:e}",
        img.n,
        coeffs.bands.len(),
        coeffs.len(),
        coeffs.energy()
    );
    println!("wrote {}", a.out.display());
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct RoundtripArgs {
    #[arg(long, default_value_t = 128)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    ntrials: usize,
    /// Relative residual tolerance of the conjugate-gradient solve.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    system: SystemArgs,
    /// Directory for `roundtrip.json`; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Trial {
    seed: u64,
    relative_error: f64,
    iterations: usize,
    relative_residual: f64,
}

pub fn roundtrip(a: &RoundtripArgs) -> Result<(), Failure> {
    let run = RunConfig::new("roundtrip", a);
    if a.ntrials == 0 {
        return Err(Failure::params("--ntrials must be at least 1"));
    }
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Failure::params(format!("--tol must lie in (0, 1), got {}", a.tol)));
    }
    let sys = a.system.build(a.size, (39, 18), SamplingArg::Full)?;
    let mut trials = Vec::with_capacity(a.ntrials);
    for t in 0..a.ntrials as u64 {
        let seed = a.seed + t;
        let f = Image::random(a.size, seed);
        let (g, rep) = reconstruct(&sys, &sys.analyze(&f)?, a.tol)?;
        let diff: f64 = f.data.iter().zip(&g.data).map(|(x, y)| (x - y) * (x - y)).sum();
        let relative_error = diff.sqrt() / f.norm();
        println!("trial {t} seed {seed} iterations {} relative_error {relative_error:e}", rep.iterations);
        trials.push(Trial { seed, relative_error, iterations: rep.iterations, relative_residual: rep.relative_residual });
    }
    let worst = trials.iter().map(|t| t.relative_error).fold(0.0, f64::max);
    println!("relative_error {worst:e}");
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        let body = json!({ "system": sys.info, "trials": trials, "max_relative_error": worst });
        let p = write_json(&dir.join("roundtrip.json"), &run, &body)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 256)]
    size: usize,
    /// First cartoon seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    nseeds: usize,
    #[command(flatten)]
    #[serde(flatten)]
    system: SystemArgs,
    /// Term counts, comma separated; defaults to powers of two from 64 to 16384.
    #[arg(long)]
    n_list: Option<String>,
    /// Fit window `lo,hi` on the term count.
    #[arg(long, value_parser = parse_pair, default_value = "256,8192")]
    fit: (usize, usize),
    #[arg(long, default_value_t = 19)]
    wavelet_order: usize,
    #[arg(long)]
    wavelet_levels: Option<u32>,
    /// Curvature budget of the boundary.
    #[arg(long, default_value_t = 10.0)]
    nu: f64,
    #[arg(long, default_value_t = 0.35)]
    rho0: f64,
    /// Drop the edge so the image is the smooth part only.
    #[arg(long)]
    no_edge: bool,
    /// Also write `decay.svg`.
    #[arg(long)]
    svg: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn bench(a: &BenchArgs) -> Result<(), Failure> {
    let run = RunConfig::new("bench", a);
    if a.nseeds == 0 {
        return Err(Failure::params("--nseeds must be at least 1"));
    }
    let n_list = match &a.n_list {
        Some(s) => parse_list(s).map_err(Failure::params)?,
        None => (6..=14).map(|e| 1usize << e).collect(),
    };
    if n_list.contains(&0) {
        return Err(Failure::params("--n-list entries must be positive"));
    }
    let defaults = BenchConfig::default();
    let sampling = a.system.sampling(SamplingArg::Decimated);
    let cfg = BenchConfig {
        k: a.system.k.unwrap_or(defaults.k),
        l: a.system.l.unwrap_or(defaults.l),
        size: a.size,
        j_max: a.system.jmax,
        c: (a.system.c1, a.system.c2),
        sampling,
        seeds: (a.seed..a.seed + a.nseeds as u64).collect(),
        n_list,
        fit_range: a.fit,
        wavelet_order: a.wavelet_order,
        wavelet_levels: a.wavelet_levels,
        cartoon: CartoonSpec { nu: a.nu, rho0: a.rho0, edge: !a.no_edge, ..CartoonSpec::default() },
    };
    let report = run_bench(&cfg)?;

    ensure_dir(&a.out)?;
    let mut written = vec![write_csv(&a.out.join("decay.csv"), &run, |w| write_decay_csv(w, &report))?];
    written.push(write_csv(&a.out.join("slopes.csv"), &run, |w| {
        writeln!(w, "seed,system,slope,intercept,deflated_slope,deflated_intercept,points")?;
        for r in &report.results {
            for (name, f) in [("shearlet", &r.shearlet_fit), ("wavelet", &r.wavelet_fit)] {
                writeln!(
                    w,
                    "{},{},{:e},{:e},{:e},{:e},{}",
                    r.seed, name, f.slope, f.intercept, f.deflated_slope, f.deflated_intercept, f.points
                )?;
            }
        }
        Ok(())
    })?);
    let seeds: Vec<_> = report
        .results
        .iter()
        .map(|r| json!({ "seed": r.seed, "cartoon": r.cartoon, "shearlet_fit": r.shearlet_fit, "wavelet_fit": r.wavelet_fit }))
        .collect();
    let manifest = json!({
        "config": report.config,
        "system": { "K": cfg.k, "L": cfg.l, "N": cfg.size, "j_max": report.j_max, "subbands": report.subbands, "c": cfg.c, "sampling": cfg.sampling },
        "seeds": seeds,
    });
    written.push(write_json(&a.out.join("manifest.json"), &run, &manifest)?);
    if a.svg {
        written.push(write_text(&a.out.join("decay.svg"), &svg::decay_chart(&report))?);
    }

    for r in &report.results {
        println!(
            "seed {} shearlet slope {:.4} deflated {:.4} | wavelet slope {:.4} deflated {:.4}",
            r.seed, r.shearlet_fit.slope, r.shearlet_fit.deflated_slope, r.wavelet_fit.slope, r.wavelet_fit.deflated_slope
        );
    }
    written.iter().for_each(|p| println!("wrote {}", p.display()));
    Ok(())
}
