//! Deterministic SVG line plots of a study record.

use std::fmt::Write;

use crate::record::StudyRecord;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyRecord;

impl std::fmt::Display for EmptyRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("cannot plot a record without finite rows")
    }
}

impl std::error::Error for EmptyRecord {}

/// Reference lines drawn horizontally: `mu1` dashed, `min_z` dotted.
fn reference_style(name: &str) -> Option<&'static str> {
    match name {
        "mu1" => Some("8,5"),
        "min_z" => Some("2,4"),
        _ => None,
    }
}

/// Round step of about `span / 5`.
fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        let pad = 0.05 * lo.abs().max(1.0);
        (lo - pad, hi + pad)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = nice_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), decimals)
}

/// First value of every row against its parameter, one polyline per series.
pub fn render_svg(record: &StudyRecord) -> Result<String, EmptyRecord> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &record.rows {
        let (Some(&y), x) = (r.values.first(), r.parameter) else { continue };
        if !(y.is_finite() && x.is_finite()) {
            continue;
        }
        match series.iter_mut().find(|(n, _)| *n == r.series) {
            Some((_, pts)) => pts.push((x, y)),
            None => series.push((r.series.clone(), vec![(x, y)])),
        }
    }
    if series.is_empty() {
        return Err(EmptyRecord);
    }
    let refs: Vec<(&str, f64, &str)> = record
        .references
        .iter()
        .filter_map(|r| reference_style(&r.name).map(|s| (r.name.as_str(), r.value, s)))
        .filter(|(_, v, _)| v.is_finite())
        .collect();
    let xs = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0));
    let ys = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).chain(refs.iter().map(|r| r.1));
    let (x0, x1) = padded_range(
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = padded_range(
        ys.clone().fold(f64::INFINITY, f64::min),
        ys.fold(f64::NEG_INFINITY, f64::max),
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&format!("{} ({})", record.id, record.kind))
    );
    let _ = writeln!(
        w,
        r#"<g id="axes" stroke="black" stroke-width="1"><line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}"/></g>"#,
        TOP + ph,
        LEFT + pw,
        TOP + ph,
        TOP + ph
    );
    let (xt, xd) = ticks(x0, x1);
    for t in xt {
        let _ = writeln!(
            w,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4:.5$}</text>"#,
            sx(t),
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            t,
            xd
        );
    }
    let (yt, yd) = ticks(y0, y1);
    for t in yt {
        let _ = writeln!(
            w,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{5:.6$}</text>"#,
            LEFT - 5.0,
            sy(t),
            LEFT,
            LEFT - 8.0,
            sy(t) + 4.0,
            t,
            yd
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        escape(&record.parameter_name)
    );
    let ylabel = record.value_names.first().cloned().unwrap_or_default();
    let _ = writeln!(
        w,
        r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&ylabel)
    );
    for (name, v, dash) in &refs {
        let _ = writeln!(
            w,
            r##"<line class="reference" data-name="{0}" x1="{1:.2}" y1="{2:.2}" x2="{3:.2}" y2="{2:.2}" stroke="#555555" stroke-dasharray="{4}"/><text x="{5:.2}" y="{6:.2}" text-anchor="end" fill="#555555">{0}</text>"##,
            escape(name),
            LEFT,
            sy(*v),
            LEFT + pw,
            dash,
            LEFT + pw - 4.0,
            sy(*v) - 4.0
        );
    }
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        if pts.len() > 1 {
            let _ = writeln!(
                w,
                r#"<polyline class="series" data-name="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                escape(name),
                coords.join(" ")
            );
        }
        for (x, y) in pts {
            let _ = writeln!(
                w,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                sx(*x),
                sy(*y)
            );
        }
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
            LEFT + 10.0,
            TOP + 16.0 + 16.0 * i as f64,
            escape(name)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(nice_step(0.05), 0.01);
        let (t, d) = ticks(9.8, 10.02);
        assert_eq!(d, 2);
        assert!(t.len() >= 3);
    }
}
