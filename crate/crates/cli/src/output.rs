//! Report serialization: CSV tables, pretty JSON and SVG convergence plots.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use quasimass::mass::MassReport;
use quasimass::Chart;

use crate::failure::{CliResult, Failure};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// RFC-4180 table: a `rho` column followed by `columns`; skipped values are
/// empty fields.
pub fn reports_csv(reports: &[MassReport], columns: &[String]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let mut header = vec!["rho".to_string()];
    header.extend(columns.iter().cloned());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in reports {
        let mut row = vec![fmt_num(r.rho)];
        row.extend(columns.iter().map(|c| r.get(c).map(fmt_num).unwrap_or_default()));
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// One error curve: `(ρ, |v − limit|)` with non-positive errors dropped.
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static error plot: log-log for AF sweeps, semi-log (linear ρ) for AH.
pub fn convergence_svg(curves: &[Curve], chart: Chart, title: &str) -> String {
    let log_x = chart == Chart::CartesianAF;
    let xmap = |r: f64| if log_x { r.log10() } else { r };
    let pts: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|c| c.points.iter())
        .filter(|p| p.1 > 0.0 && p.1.is_finite())
        .map(|&(r, e)| (xmap(r), e.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{LEFT}" y="18" font-size="14">{}</text>"#, escape(title));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    if pts.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">all errors below resolution</text>"#,
            LEFT + pw / 2.0,
            TOP + ph / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    y0 = y0.floor();
    y1 = y1.ceil().max(y0 + 1.0);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    // decade ticks on y
    let step = ((y1 - y0) / 8.0).ceil().max(1.0);
    let mut d = y0;
    while d <= y1 + 1e-9 {
        let y = sy(d);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
        d += step;
    }
    // x ticks at the sample radii
    let mut rhos: Vec<f64> = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)).collect();
    rhos.sort_by(f64::total_cmp);
    rhos.dedup();
    for r in rhos {
        let x = sx(xmap(r));
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{:.1}" stroke="#eee"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{r}</text>"##,
            TOP + ph,
            TOP + ph + 16.0
        );
    }
    let xlabel = if log_x { "ρ (log scale)" } else { "ρ" };
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xlabel}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">|value − limit|</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = c
            .points
            .iter()
            .filter(|p| p.1 > 0.0 && p.1.is_finite())
            .map(|&(r, e)| format!("{:.1},{:.1}", sx(xmap(r)), sy(e.log10())))
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
            for p in &coords {
                let (x, y) = p.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
            }
        }
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&c.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use quasimass::mass::ReportEntry;
    use quasimass::Precision;

    fn report(rho: f64, vals: &[(&str, Option<f64>)]) -> MassReport {
        MassReport {
            rho,
            resolution: 8,
            precision: Precision::Double,
            entries: vals
                .iter()
                .map(|(n, v)| ReportEntry {
                    name: n.to_string(),
                    value: *v,
                    skipped: v.is_none().then(|| "not round".to_string()),
                })
                .collect(),
            embedding: None,
        }
    }

    #[test]
    fn csv_round_trips_values_and_leaves_skips_empty() {
        let v = 1.0 / 3.0;
        let reps = [report(10.0, &[("adm_flux", Some(v)), ("by_af", None)])];
        let cols = vec!["adm_flux".to_string(), "by_af".to_string()];
        let text = String::from_utf8(reports_csv(&reps, &cols).unwrap()).unwrap();
        let lines: Vec<&str> = text.split("\r\n").collect();
        assert_eq!(lines[0], "rho,adm_flux,by_af");
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), v);
        assert_eq!(fields[2], "");
    }

    #[test]
    fn csv_quotes_awkward_headers() {
        let cols = vec!["a,b".to_string()];
        let text = String::from_utf8(reports_csv(&[], &cols).unwrap()).unwrap();
        assert_eq!(text, "rho,\"a,b\"\r\n");
    }

    #[test]
    fn svg_is_well_formed_for_empty_and_full_inputs() {
        let empty = convergence_svg(&[], Chart::BallAH, "t");
        assert!(empty.starts_with("<svg") && empty.trim_end().ends_with("</svg>"));
        let c = Curve {
            label: "ch_mass[0]".into(),
            points: vec![(4.0, 1e-5), (5.0, 1e-6), (6.0, 0.0)],
        };
        let s = convergence_svg(&[c], Chart::BallAH, "a<b");
        assert!(s.contains("a&lt;b"));
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
