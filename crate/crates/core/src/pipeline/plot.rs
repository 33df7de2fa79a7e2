use std::path::Path;

use crate::analysis::ScanResult;
use crate::error::Result;

use super::svg::{ramp, Axis, Panel, Svg, PURPLE};

const WIDTH: f64 = 960.0;
const ROW: f64 = 300.0;
const LEFT: f64 = 80.0;
const TOP: f64 = 40.0;
const PANEL_H: f64 = 200.0;
const BLUE: &str = "#1f5fa8";
const ORANGE: &str = "#d9731a";

/// Renders the three-row scan summary as an SVG document.
///
/// Row 1: best quality and community count. Row 2: ensemble NVI and the
/// cross-scale NVI heatmap. Row 3: Block NVI with basins shaded and the
/// selected scales marked (`class="selected-scale"`).
pub fn render_summary(scan: &ScanResult) -> String {
    let mut svg = Svg::new(WIDTH, 3.0 * ROW + 20.0);
    let logs: Vec<f64> = scan.scales.iter().map(|s| s.log_scale).collect();
    let xr = range(&logs);
    let xlabel = "log10 t";
    let full = WIDTH - LEFT - 100.0;

    // row 1
    let q: Vec<f64> = scan.scales.iter().map(|s| s.best_quality).collect();
    let p = Panel::new(LEFT, TOP, full, PANEL_H, xr, range(&q));
    p.frame(&mut svg, "Markov Stability and number of communities", xlabel, "Q_gen");
    for &i in &scan.selection.selected {
        let x = p.x.map(logs[i]);
        svg.line(x, p.top, x, p.top + p.height, &format!(r#"class="selected-line" stroke="{PURPLE}" stroke-dasharray="4 3""#));
    }
    svg.polyline(&points(&p, &logs, &q), &format!(r#"stroke="{BLUE}" stroke-width="1.5""#));
    let counts: Vec<f64> = scan.scales.iter().map(|s| s.n_communities() as f64).collect();
    let ca = Axis::new(0.0, counts.iter().cloned().fold(1.0, f64::max), p.top + p.height, p.top);
    let count_pts: Vec<(f64, f64)> = logs.iter().zip(&counts).map(|(&x, &c)| (p.x.map(x), ca.map(c))).collect();
    svg.polyline(&count_pts, &format!(r#"stroke="{ORANGE}" stroke-width="1.5""#));
    p.right_axis(&mut svg, &ca, "communities", ORANGE);

    // row 2
    let half = (full - 80.0) / 2.0;
    let nvi = scan.nvi_t();
    let p = Panel::new(LEFT, TOP + ROW, half, PANEL_H, xr, (0.0, range(&nvi).1.max(1e-3)));
    p.frame(&mut svg, "Ensemble NVI(t)", xlabel, "NVI(t)");
    svg.polyline(&points(&p, &logs, &nvi), r#"stroke="black" stroke-width="1.5""#);
    for (&x, &v) in logs.iter().zip(&nvi) {
        let (px, py) = p.point(x, v);
        svg.circle(px, py, 2.0, r#"fill="black""#);
    }
    let n = scan.cross_nvi.len();
    let heat = Panel::new(LEFT + half + 80.0, TOP + ROW, half, PANEL_H, xr, xr);
    heat.frame(&mut svg, "NVI(t, t')", xlabel, "log10 t'");
    if n > 0 {
        let (cw, ch) = (heat.width / n as f64, heat.height / n as f64);
        for (a, row) in scan.cross_nvi.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                svg.rect(
                    heat.left + b as f64 * cw,
                    heat.top + heat.height - (a + 1) as f64 * ch,
                    cw,
                    ch,
                    &format!(r#"fill="{}" stroke="none""#, ramp(v)),
                );
            }
        }
    }

    // row 3
    let curve = &scan.block_nvi;
    let p = Panel::new(LEFT, TOP + 2.0 * ROW, full, PANEL_H, xr, (0.0, range(curve).1.max(1e-3)));
    p.frame(&mut svg, "Block NVI and selected scales", xlabel, "Block NVI");
    let step = if logs.len() > 1 { (xr.1 - xr.0) / (logs.len() - 1) as f64 } else { 0.0 };
    for &(lo, hi) in &scan.selection.basins {
        let x0 = p.x.map(logs[lo] - step / 2.0).max(p.left);
        let x1 = p.x.map(logs[hi] + step / 2.0).min(p.left + p.width);
        svg.rect(x0, p.top, x1 - x0, p.height, r##"class="basin" fill="#cccccc" fill-opacity="0.5" stroke="none""##);
    }
    if curve.len() == logs.len() {
        svg.polyline(&points(&p, &logs, curve), r#"stroke="black" stroke-width="1.5""#);
        for &i in &scan.selection.selected {
            let (px, py) = p.point(logs[i], curve[i]);
            svg.circle(px, py, 5.0, &format!(r#"class="selected-scale" fill="{PURPLE}""#));
        }
    }
    let note = if scan.selection.selected.is_empty() {
        Some("no scales selected".to_string())
    } else if scan.selection.fallback {
        Some("fallback: Block NVI has no local minimum; global NVI(t) minimum shown".to_string())
    } else {
        None
    };
    if let Some(note) = note {
        svg.text(p.left + 10.0, p.top + 18.0, &note, r##"class="selection-note" fill="#555555""##);
    }
    svg.finish()
}

pub fn plot_summary(scan: &ScanResult, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_summary(scan))?;
    Ok(())
}

fn range(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

fn points(p: &Panel, xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().zip(ys).filter(|(_, y)| y.is_finite()).map(|(&x, &y)| p.point(x, y)).collect()
}
