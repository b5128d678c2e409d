//! Minimal static SVG rendering: scatter/line panels and heatmap grids.

use std::fmt::Write;

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 50.0;

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#111111", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Cross,
    Line,
    DashedLine,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub marker: Marker,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ScatterPanel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone)]
pub struct HeatmapPanel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// `values[row][col]`, row indexed by `y_values`.
    pub values: Vec<Vec<f64>>,
}

pub enum Panel {
    Scatter(ScatterPanel),
    Heatmap(HeatmapPanel),
}

/// Lays panels out in a grid with `columns` panels per row.
pub fn render(panels: &[Panel], columns: usize) -> String {
    let columns = columns.max(1);
    let rows = panels.len().div_ceil(columns).max(1);
    let width = PANEL_W * columns.min(panels.len().max(1)) as f64;
    let height = PANEL_H * rows as f64;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    for (idx, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * (idx % columns) as f64;
        let oy = PANEL_H * (idx / columns) as f64;
        match panel {
            Panel::Scatter(p) => scatter(&mut svg, p, ox, oy),
            Panel::Heatmap(h) => heatmap(&mut svg, h, ox, oy),
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn frame(svg: &mut String, title: &str, x_label: &str, y_label: &str, ox: f64, oy: f64) {
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);
    let (w, h) = plot_area();
    writeln!(
        svg,
        r##"<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#444"/>"##
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
        x0 + w / 2.0,
        oy + 22.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        x0 + w / 2.0,
        y0 + h + 38.0,
        escape(x_label)
    )
    .unwrap();
    let (lx, ly) = (ox + 16.0, y0 + h / 2.0);
    writeln!(
        svg,
        r#"<text x="{lx}" y="{ly}" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#,
        escape(y_label)
    )
    .unwrap();
}

fn plot_area() -> (f64, f64) {
    (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B)
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 100.0).round() / 100.0)
    }
}

fn scatter(svg: &mut String, p: &ScatterPanel, ox: f64, oy: f64) {
    frame(svg, &p.title, &p.x_label, &p.y_label, ox, oy);
    let (w, h) = plot_area();
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);
    let ty = |v: f64| if p.log_y { v.max(1e-12).log10() } else { v };
    let pts = p.series.iter().flat_map(|s| s.points.iter()).filter(|(_, y)| !p.log_y || *y > 0.0);
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(ty(y));
        ymax = ymax.max(ty(y));
    }
    if !xmin.is_finite() {
        return;
    }
    if !p.log_y {
        ymin = ymin.min(0.0);
    }
    if xmax <= xmin {
        xmax = xmin + 1.0;
    }
    if ymax <= ymin {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| x0 + (x - xmin) / (xmax - xmin) * w;
    let sy = |y: f64| y0 + h - (ty(y) - ymin) / (ymax - ymin) * h;

    for t in 0..=4 {
        let fx = xmin + (xmax - xmin) * t as f64 / 4.0;
        let fy = ymin + (ymax - ymin) * t as f64 / 4.0;
        let label_y = if p.log_y { 10f64.powf(fy) } else { fy };
        let py = y0 + h - h * t as f64 / 4.0;
        writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, sx(fx), y0 + h + 16.0, fmt_tick(fx)).unwrap();
        writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, x0 - 6.0, py + 4.0, fmt_tick(label_y)).unwrap();
    }

    for (si, s) in p.series.iter().enumerate() {
        let visible: Vec<(f64, f64)> = s.points.iter().copied().filter(|(_, y)| !p.log_y || *y > 0.0).collect();
        match s.marker {
            Marker::Line | Marker::DashedLine => {
                let path: Vec<String> = visible.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let dash = if s.marker == Marker::DashedLine { r#" stroke-dasharray="6 4""# } else { "" };
                writeln!(
                    svg,
                    r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"{dash}/>"#,
                    path.join(" "),
                    s.color
                )
                .unwrap();
            }
            Marker::Circle => {
                for &(x, y) in &visible {
                    writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="{}"/>"#, sx(x), sy(y), s.color).unwrap();
                }
            }
            Marker::Cross => {
                for &(x, y) in &visible {
                    let (cx, cy) = (sx(x), sy(y));
                    writeln!(
                        svg,
                        r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{}"/>"#,
                        cx - 3.0, cy - 3.0, cx + 3.0, cy + 3.0, cx - 3.0, cy + 3.0, cx + 3.0, cy - 3.0, s.color
                    )
                    .unwrap();
                }
            }
        }
        let ly = y0 + 12.0 + 14.0 * si as f64;
        writeln!(svg, r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/>"#, x0 + w - 150.0, ly - 9.0, s.color).unwrap();
        writeln!(svg, r#"<text x="{}" y="{ly}">{}</text>"#, x0 + w - 135.0, escape(&s.name)).unwrap();
    }
}

/// Linear white-to-red ramp.
fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let g = (255.0 * (1.0 - t)).round() as u8;
    let r = (255.0 - 80.0 * t).round() as u8;
    format!("#{r:02x}{g:02x}{g:02x}")
}

fn heatmap(svg: &mut String, p: &HeatmapPanel, ox: f64, oy: f64) {
    frame(svg, &p.title, &p.x_label, &p.y_label, ox, oy);
    let (w, h) = plot_area();
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);
    let cols = p.x_values.len().max(1);
    let rows = p.y_values.len().max(1);
    let finite = p.values.iter().flatten().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (cw, ch) = (w / cols as f64, h / rows as f64);
    for (r, row) in p.values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let fill = if v.is_finite() { ramp((v - lo) / span) } else { "#cccccc".into() };
            writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"><title>{}</title></rect>"#,
                x0 + c as f64 * cw,
                y0 + h - (r + 1) as f64 * ch,
                cw + 0.3,
                ch + 0.3,
                v
            )
            .unwrap();
        }
    }
    let xstep = cols.div_ceil(6).max(1);
    for c in (0..cols).step_by(xstep) {
        writeln!(svg, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, x0 + (c as f64 + 0.5) * cw, y0 + h + 16.0, fmt_tick(p.x_values[c])).unwrap();
    }
    let ystep = rows.div_ceil(6).max(1);
    for r in (0..rows).step_by(ystep) {
        writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, y0 + h - (r as f64 + 0.5) * ch + 4.0, fmt_tick(p.y_values[r])).unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="10">range {} .. {}</text>"#,
        x0 + w,
        oy + MARGIN_T - 4.0,
        fmt_tick(lo),
        fmt_tick(hi)
    )
    .unwrap();
}
