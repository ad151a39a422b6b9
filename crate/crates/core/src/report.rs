//! CSV, JSON and SVG writers.
//!
//! CSV floats are written in scientific notation with 17 significant digits.
//! JSON uses the shortest representation that parses back to the same bits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::phase::PhaseDiagram;
use crate::simulate::Record;

pub const PHASE_CSV_HEADER: &str = "beta,mu,is_rs,criterion_gap";
pub const STREAM_CSV_HEADER: &str = "step,site,radius_sq,overlap";

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn phase_csv(diagram: &PhaseDiagram) -> String {
    let mut s = String::with_capacity(64 * (diagram.grid.len() + 1));
    s.push_str(PHASE_CSV_HEADER);
    s.push('\n');
    for p in &diagram.grid {
        let _ = writeln!(s, "{},{},{},{}", float(p.beta), float(p.mu), p.is_rs, float(p.criterion_gap));
    }
    s
}

pub fn stream_csv(records: &[Record]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(STREAM_CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{},{},{},{}", r.step, r.site, float(r.radius_sq), float(r.overlap));
    }
    s
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

/// Curves of a phase diagram, without the grid.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct PhaseCurves {
    pub at_line: Vec<(f64, f64)>,
    pub larkin_curve: Vec<(f64, f64)>,
    pub beta_dw: Option<f64>,
    pub mu_larkin_zero_t: f64,
}

impl From<&PhaseDiagram> for PhaseCurves {
    fn from(d: &PhaseDiagram) -> Self {
        Self {
            at_line: d.at_line.clone(),
            larkin_curve: d.larkin_curve.clone(),
            beta_dw: d.beta_dw,
            mu_larkin_zero_t: d.mu_larkin_zero_t,
        }
    }
}

// Log axis mapping [lo, hi] onto [a, b] in pixels.
struct Axis {
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
}

impl Axis {
    fn map(&self, x: f64) -> f64 {
        let t = (x.ln() - self.lo.ln()) / (self.hi.ln() - self.lo.ln());
        self.a + t * (self.b - self.a)
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.lo * (1.0 - 1e-12) && x <= self.hi * (1.0 + 1e-12)
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

// Cell edges at the geometric midpoints of consecutive grid values.
fn edges(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut e = Vec::with_capacity(n + 1);
    if n == 1 {
        return vec![v[0] / 1.1, v[0] * 1.1];
    }
    e.push(v[0] * (v[0] / v[1]).sqrt());
    for w in v.windows(2) {
        e.push((w[0] * w[1]).sqrt());
    }
    e.push(v[n - 1] * (v[n - 1] / v[n - 2]).sqrt());
    e
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut decade = 10f64.powf(lo.log10().floor());
    while decade <= hi * 10.0 {
        for m in [1.0, 2.0, 5.0] {
            let t = m * decade;
            if t >= lo * (1.0 - 1e-9) && t <= hi * (1.0 + 1e-9) {
                out.push(t);
            }
        }
        decade *= 10.0;
    }
    out
}

/// 900×600 plot with logarithmic axes, RS/RSB shading and the three curves.
pub fn phase_svg(diagram: &PhaseDiagram) -> String {
    let betas = sorted_unique(diagram.grid.iter().map(|p| p.beta).collect());
    let mus = sorted_unique(diagram.grid.iter().map(|p| p.mu).collect());
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"##
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if betas.is_empty() || mus.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let (be, me) = (edges(&betas), edges(&mus));
    let x = Axis { lo: be[0], hi: be[be.len() - 1], a: LEFT, b: WIDTH - RIGHT };
    let y = Axis { lo: me[0], hi: me[me.len() - 1], a: HEIGHT - BOTTOM, b: TOP };

    svg.push_str("<g shape-rendering=\"crispEdges\">\n");
    for p in &diagram.grid {
        let i = betas.partition_point(|&b| b < p.beta);
        let j = mus.partition_point(|&m| m < p.mu);
        let (x0, x1) = (x.map(be[i]), x.map(be[i + 1]));
        let (y0, y1) = (y.map(me[j + 1]), y.map(me[j]));
        let fill = if p.is_rs { "#dbe9f6" } else { "#8c8c8c" };
        let _ = writeln!(
            svg,
            r##"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"##,
            x1 - x0,
            y1 - y0
        );
    }
    svg.push_str("</g>\n");

    let dots = |svg: &mut String, pts: &[(f64, f64)], colour: &str, r: f64| {
        for &(b, m) in pts {
            if x.contains(b) && y.contains(m) {
                let _ = writeln!(svg, r##"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{colour}"/>"##, x.map(b), y.map(m));
            }
        }
    };
    dots(&mut svg, &diagram.larkin_curve, "#ff8c00", 2.2);
    dots(&mut svg, &diagram.at_line, "#1a9641", 1.6);
    if let Some(bdw) = diagram.beta_dw.filter(|b| x.contains(*b)) {
        let px = x.map(bdw);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#d7191c" stroke-width="2"/>"##,
            HEIGHT - BOTTOM
        );
    }

    // Frame and ticks.
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"##,
        WIDTH - RIGHT - LEFT,
        HEIGHT - BOTTOM - TOP
    );
    for t in ticks(x.lo, x.hi) {
        let px = x.map(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{t}</text>"##,
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 5.0,
            HEIGHT - BOTTOM + 20.0
        );
    }
    for t in ticks(y.lo, y.hi) {
        let py = y.map(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">β (inverse temperature)</text>"##,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">μ (mass)</text>"##,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0
    );

    let lx = WIDTH - RIGHT + 20.0;
    let entries = [
        ("rect", "#dbe9f6", "RS phase"),
        ("rect", "#8c8c8c", "RSB phase"),
        ("circle", "#ff8c00", "Larkin mass"),
        ("circle", "#1a9641", "AT-line"),
        ("line", "#d7191c", "β_DW"),
    ];
    for (k, (shape, colour, label)) in entries.iter().enumerate() {
        let ly = TOP + 20.0 + 24.0 * k as f64;
        let mark = match *shape {
            "rect" => format!(r##"<rect x="{lx}" y="{:.2}" width="14" height="14" fill="{colour}" stroke="black" stroke-width="0.5"/>"##, ly - 11.0),
            "circle" => format!(r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{colour}"/>"##, lx + 7.0, ly - 4.0),
            _ => format!(r##"<line x1="{lx}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"/>"##, ly - 4.0, lx + 14.0, ly - 4.0),
        };
        let _ = writeln!(svg, r##"{mark}<text x="{:.2}" y="{ly:.2}">{label}</text>"##, lx + 22.0);
    }
    svg.push_str("</svg>\n");
    svg
}
