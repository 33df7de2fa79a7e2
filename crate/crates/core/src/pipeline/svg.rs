//! Minimal SVG 1.1 writer for the summary and benchmark figures.

use std::fmt::Write as _;

pub(crate) const PURPLE: &str = "#7b2d8e";

pub(crate) struct Svg {
    width: f64,
    height: f64,
    body: String,
}

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn raw(&mut self, element: &str) {
        self.body.push_str(element);
        self.body.push('\n');
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
        self.raw(&format!(
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#
        ));
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, style: &str) {
        self.raw(&format!(
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" {style}/>"#
        ));
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, style: &str) {
        self.raw(&format!(r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" {style}/>"#));
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], style: &str) {
        if points.is_empty() {
            return;
        }
        let mut p = String::new();
        for (x, y) in points {
            let _ = write!(p, "{x:.2},{y:.2} ");
        }
        self.raw(&format!(r#"<polyline points="{}" fill="none" {style}/>"#, p.trim_end()));
    }

    pub fn text(&mut self, x: f64, y: f64, content: &str, style: &str) {
        self.raw(&format!(
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" {style}>{}</text>"#,
            escape(content)
        ));
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Linear map from a data range onto a pixel range.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub from: f64,
    pub to: f64,
}

impl Axis {
    /// Pads degenerate or non-finite ranges so the map stays defined.
    pub fn new(lo: f64, hi: f64, from: f64, to: f64) -> Self {
        let (mut lo, mut hi) = if lo.is_finite() && hi.is_finite() { (lo, hi) } else { (0.0, 1.0) };
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Axis { lo, hi, from, to }
    }

    pub fn fit(values: impl IntoIterator<Item = f64>, from: f64, to: f64) -> Self {
        let (lo, hi) = values
            .into_iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        Axis::new(lo, hi, from, to)
    }

    pub fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }

    /// About five round tick values inside the range.
    pub fn ticks(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let magnitude = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .into_iter()
            .map(|m| m * magnitude)
            .find(|s| span / s <= 6.0)
            .unwrap_or(10.0 * magnitude);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

pub(crate) fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e4 || v.abs() < 1e-2 {
        return format!("{v:.0e}");
    }
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// A rectangular plotting area with its two axes.
pub(crate) struct Panel {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: Axis,
    pub y: Axis,
}

impl Panel {
    pub fn new(left: f64, top: f64, width: f64, height: f64, xs: (f64, f64), ys: (f64, f64)) -> Self {
        Panel {
            left,
            top,
            width,
            height,
            x: Axis::new(xs.0, xs.1, left, left + width),
            y: Axis::new(ys.0, ys.1, top + height, top),
        }
    }

    pub fn point(&self, x: f64, y: f64) -> (f64, f64) {
        (self.x.map(x), self.y.map(y))
    }

    pub fn frame(&self, svg: &mut Svg, title: &str, xlabel: &str, ylabel: &str) {
        svg.rect(self.left, self.top, self.width, self.height, r#"fill="none" stroke="black""#);
        let bottom = self.top + self.height;
        for t in self.x.ticks() {
            let px = self.x.map(t);
            svg.line(px, bottom, px, bottom + 4.0, r#"stroke="black""#);
            svg.text(px, bottom + 15.0, &format_tick(t), r#"text-anchor="middle""#);
        }
        for t in self.y.ticks() {
            let py = self.y.map(t);
            svg.line(self.left - 4.0, py, self.left, py, r#"stroke="black""#);
            svg.text(self.left - 6.0, py + 4.0, &format_tick(t), r#"text-anchor="end""#);
        }
        svg.text(self.left + self.width / 2.0, self.top - 8.0, title, r#"text-anchor="middle" font-weight="bold""#);
        svg.text(self.left + self.width / 2.0, bottom + 30.0, xlabel, r#"text-anchor="middle""#);
        let (lx, ly) = (self.left - 42.0, self.top + self.height / 2.0);
        svg.text(lx, ly, ylabel, &format!(r#"text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})""#));
    }

    /// Ticks and label for a second y axis on the right edge.
    pub fn right_axis(&self, svg: &mut Svg, axis: &Axis, label: &str, color: &str) {
        let right = self.left + self.width;
        for t in axis.ticks() {
            let py = axis.map(t);
            svg.line(right, py, right + 4.0, py, &format!(r#"stroke="{color}""#));
            svg.text(right + 6.0, py + 4.0, &format_tick(t), &format!(r#"fill="{color}""#));
        }
        let (lx, ly) = (right + 40.0, self.top + self.height / 2.0);
        svg.text(lx, ly, label, &format!(r#"text-anchor="middle" fill="{color}" transform="rotate(90 {lx:.2} {ly:.2})""#));
    }
}

/// Perceptually ordered colour ramp from dark blue (0) to yellow (1).
pub(crate) fn ramp(v: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.25, [59.0, 82.0, 139.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (0.75, [94.0, 201.0, 98.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let k = STOPS.iter().position(|s| s.0 >= v).unwrap_or(4).max(1);
    let (a, ca) = STOPS[k - 1];
    let (b, cb) = STOPS[k];
    let f = (v - a) / (b - a);
    let c: Vec<u8> = (0..3).map(|i| (ca[i] + f * (cb[i] - ca[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn axis_mapping_and_ticks() {
        let a = Axis::new(0.0, 10.0, 100.0, 200.0);
        assert_eq!(a.map(5.0), 150.0);
        assert_eq!(a.ticks(), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        let d = Axis::new(3.0, 3.0, 0.0, 1.0);
        assert!(d.map(3.0).is_finite());
    }

    #[test]
    fn colour_ramp_ends() {
        assert_eq!(ramp(0.0), "#440154");
        assert_eq!(ramp(1.0), "#fde725");
        assert_eq!(ramp(f64::NAN), "#440154");
    }
}
