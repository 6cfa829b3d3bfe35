//! Self-contained SVG rate-memory chart.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::table::RateMemoryTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#000000", "#ff7f0e", "#8c564b", "#17becf"];

fn dash_for(series: &str) -> &'static str {
    if series.ends_with("bound") {
        "6,4"
    } else {
        "none"
    }
}

/// Round axis maximum with a 1-2-5 tick step.
fn nice_axis(max: f64) -> (f64, f64) {
    if max <= 0.0 {
        return (1.0, 0.2);
    }
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|k| k * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    ((max / step).ceil() * step, step)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders every series of `table` as one polyline (a marker for
/// single-point series), x = cache size M, y = rate.
pub fn render_svg(table: &RateMemoryTable) -> Result<String> {
    let series = table.series();
    if series.is_empty() {
        return Err(Error::Config("plot: table has no series".into()));
    }
    let x_max_data = table.rows.iter().map(|r| r.memory).fold(0.0, f64::max);
    let y_max_data = table.rows.iter().map(|r| r.mean_rate).fold(0.0, f64::max);
    let (x_max, x_step) = nice_axis(x_max_data);
    let (y_max, y_step) = nice_axis(y_max_data);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / x_max * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // grid and ticks
    let mut k = 0.0;
    while k <= x_max + 1e-9 {
        let x = sx(k);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 18.0,
            k
        );
        k += x_step;
    }
    let mut k = 0.0;
    while k <= y_max + 1e-9 {
        let y = sy(k);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            (k * 1e6).round() / 1e6
        );
        k += y_step;
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#000"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Cache size M (files)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">Expected rate R (file transmissions)</text>"#,
        TOP + plot_h / 2.0
    );

    for (i, name) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts = table.points(name);
        if pts.len() == 1 {
            let (x, y) = pts[0];
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"><title>{}</title></circle>"#,
                sx(x),
                sy(y),
                escape(name)
            );
        } else {
            let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" stroke-dasharray="{}" points="{}"><title>{}</title></polyline>"#,
                dash_for(name),
                coords.join(" "),
                escape(name)
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2" stroke-dasharray="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            dash_for(name),
            lx + 30.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn plot_svg(table: &RateMemoryTable, path: &Path) -> Result<()> {
    let svg = render_svg(table)?;
    fs::write(path, svg).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}
