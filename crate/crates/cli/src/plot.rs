//! Log-scale convergence plots as self-contained SVG.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::output::CSV_HEADER;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    Iter,
    LfoTotal,
    CommRounds,
    TimeUnits,
}

impl XAxis {
    pub const ALL: [XAxis; 4] = [XAxis::Iter, XAxis::LfoTotal, XAxis::CommRounds, XAxis::TimeUnits];

    pub fn name(self) -> &'static str {
        CSV_HEADER[self.column()]
    }

    fn column(self) -> usize {
        match self {
            Self::Iter => 0,
            Self::LfoTotal => 1,
            Self::CommRounds => 2,
            Self::TimeUnits => 3,
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Self::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            CliError::Usage(format!("unknown x axis `{s}`; use iter, lfo_total, comm_rounds or time_units"))
        })
    }
}

/// One curve: x values of the chosen axis against the gap.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Gaps are relative to the best value seen (the `Phi` column is empty).
    pub relative: bool,
}

const GAP_COLUMN: usize = 4;
const PHI_COLUMN: usize = 10;

pub fn read_series(path: &Path, x: XAxis) -> Result<Series, CliError> {
    let shown = path.display();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Failed(format!("{shown}: {e}")))?;
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(CliError::Failed(format!("{shown}: schema mismatch; expected columns {}", CSV_HEADER.join(","))));
    }
    let mut points = Vec::new();
    let mut relative = true;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |col: usize| -> Result<f64, CliError> {
            rec.get(col)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| CliError::Failed(format!("{shown}: row {}: bad {}", i + 1, CSV_HEADER[col])))
        };
        points.push((num(x.column())?, num(GAP_COLUMN)?));
        relative &= rec.get(PHI_COLUMN).is_none_or(str::is_empty);
    }
    if points.is_empty() {
        return Err(CliError::Failed(format!("{shown}: no data rows")));
    }
    let name = path.file_stem().map_or_else(|| shown.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Series { name, points, relative })
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Step of about a fifth of `range`, rounded to 1, 2 or 5 times a power of ten.
fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

/// Renders the series on a log-scale gap axis. Points with non-positive gaps
/// (the best row of a relative-gap run) are left out.
pub fn render_svg(series: &[Series], x: XAxis) -> Result<String, CliError> {
    let visible: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().copied().filter(|&(a, g)| a.is_finite() && g.is_finite() && g > 0.0).collect())
        .collect();
    let all = visible.iter().flatten();
    let (mut x_lo, mut x_hi, mut g_lo, mut g_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    for &(a, g) in all {
        x_lo = x_lo.min(a);
        x_hi = x_hi.max(a);
        g_lo = g_lo.min(g);
        g_hi = g_hi.max(g);
    }
    if !x_lo.is_finite() {
        return Err(CliError::Failed("no positive gap values to plot".into()));
    }
    if x_hi <= x_lo {
        x_hi = x_lo + 1.0;
    }
    let d_lo = g_lo.log10().floor();
    let mut d_hi = g_hi.log10().ceil();
    if d_hi <= d_lo {
        d_hi = d_lo + 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |a: f64| LEFT + (a - x_lo) / (x_hi - x_lo) * pw;
    let py = |g: f64| TOP + (d_hi - g.log10()) / (d_hi - d_lo) * ph;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(w, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    // Decades on the gap axis; thin out labels when there are many.
    let decades = (d_hi - d_lo) as i64;
    let every = (decades / 10 + 1) as usize;
    for (i, d) in (d_lo as i64..=d_hi as i64).enumerate() {
        let y = py(10f64.powi(d as i32));
        let _ = writeln!(w, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        if i % every == 0 {
            let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, y + 4.0);
        }
    }
    let step = nice_step(x_hi - x_lo);
    let mut t = (x_lo / step).ceil() * step;
    while t <= x_hi + 1e-9 * step {
        let xp = px(t);
        let _ = writeln!(w, r##"<line x1="{xp:.2}" y1="{TOP}" x2="{xp:.2}" y2="{:.2}" stroke="#eee"/>"##, TOP + ph);
        let _ = writeln!(
            w,
            r#"<text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            tick_label(t)
        );
        t += step;
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        x.name()
    );
    let y_label = if series.iter().all(|s| s.relative) {
        "gap (relative)"
    } else if series.iter().any(|s| s.relative) {
        "gap (absolute / relative)"
    } else {
        "gap"
    };
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{y_label}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, (ser, pts)) in series.iter().zip(&visible).enumerate() {
        let color = COLORS[i % COLORS.len()];
        if !pts.is_empty() {
            let coords: Vec<String> = pts.iter().map(|&(a, g)| format!("{:.2},{:.2}", px(a), py(g))).collect();
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = TOP + 16.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#,
            lx + 24.0
        );
        let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&ser.name));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Reads every CSV, renders, and only then writes `out`.
pub fn plot_files(paths: &[PathBuf], x: XAxis, out: &Path) -> Result<(), CliError> {
    if paths.is_empty() {
        return Err(CliError::Usage("plot needs at least one CSV".into()));
    }
    let series = paths.iter().map(|p| read_series(p, x)).collect::<Result<Vec<_>, _>>()?;
    let svg = render_svg(&series, x)?;
    std::fs::write(out, svg).map_err(|e| CliError::io(out, e))
}
