//! Log-log line chart of the decay curves.

use std::fmt::Write;

use conelet::cartoon_bench::{BenchReport, DecayPoint};

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn log_points(curve: &[DecayPoint]) -> Vec<(f64, f64)> {
    curve
        .iter()
        .filter(|p| p.err > 0.0 && p.n_terms > 0)
        .map(|p| ((p.n_terms as f64).log10(), p.err.log10()))
        .collect()
}

pub fn decay_chart(report: &BenchReport) -> String {
    let series: Vec<(&str, u64, Vec<(f64, f64)>)> = report
        .results
        .iter()
        .flat_map(|r| [("shearlet", r.seed, log_points(&r.shearlet)), ("wavelet", r.seed, log_points(&r.wavelet))])
        .collect();
    let all = series.iter().flat_map(|s| s.2.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() || x1 <= x0 {
        (x0, x1) = (0.0, 1.0);
    }
    if !y0.is_finite() || y1 <= y0 {
        (y0, y1) = (0.0, 1.0);
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">log10 N ({x0:.2} to {x1:.2})</text>"#,
        W / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">log10 err ({y0:.2} to {y1:.2})</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (name, seed, pts) in &series {
        if pts.is_empty() {
            continue;
        }
        let colour = if *name == "shearlet" { "#1f77b4" } else { "#d62728" };
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"><title>{name} seed {seed}</title></path>"#,
            d.join(" ")
        );
    }
    let _ = writeln!(s, r##"<text x="{}" y="{}" font-size="12" fill="#1f77b4">shearlet</text>"##, W - MARGIN - 70.0, MARGIN);
    let _ = writeln!(s, r##"<text x="{}" y="{}" font-size="12" fill="#d62728">wavelet</text>"##, W - MARGIN - 70.0, MARGIN + 16.0);
    s.push_str("</svg>\n");
    s
}
