//! Deterministic SVG 1.1 drawings: bases with dashed cuts and crossed nodes, tropical graphs, staircases.

use std::fmt::Write as _;

use atf_core::atbd::AlmostToricBase;
use atf_core::lattice::PlanePoint;
use atf_core::staircase::StaircaseStep;
use atf_core::tropical::TropicalGraph;

const PANEL: f64 = 260.0;
const MARGIN: f64 = 24.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    pub cuts: bool,
    pub nodes: bool,
    pub labels: bool,
    /// Vertex drawn with a ring.
    pub frozen: Option<usize>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { cuts: true, nodes: true, labels: true, frozen: None }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// Affine map from base coordinates to a square panel with `y` pointing up.
struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    left: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)], left: f64) -> Self {
        let min_x = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let max_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let min_y = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let max_y = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        Self { min_x, max_y, scale: (PANEL - 2.0 * MARGIN) / span, left }
    }

    fn map(&self, p: &PlanePoint) -> (f64, f64) {
        let (x, y) = p.to_f64();
        (self.left + MARGIN + (x - self.min_x) * self.scale, MARGIN + (self.max_y - y) * self.scale)
    }
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
        w = num(width),
        h = num(height)
    )
}

fn base_points(base: &AlmostToricBase) -> Vec<(f64, f64)> {
    base.vertices.iter().map(|v| v.to_f64()).collect()
}

fn draw_base(out: &mut String, base: &AlmostToricBase, opts: &RenderOptions, frame: &Frame) -> atf_core::Result<()> {
    let pts: Vec<String> = base.vertices.iter().map(|v| frame.map(v)).map(|(x, y)| format!("{},{}", num(x), num(y))).collect();
    writeln!(out, "<polygon points=\"{}\" fill=\"#eef3fb\" stroke=\"black\" stroke-width=\"1.5\"/>", pts.join(" ")).ok();
    for i in 0..base.len() {
        if base.cuts[i].nodes == 0 {
            continue;
        }
        let nodes = base.node_positions(i)?;
        if opts.cuts {
            let end = base.node_point(i, nodes.len() - 1)?;
            let (x1, y1) = frame.map(&base.vertices[i]);
            let (x2, y2) = frame.map(&end);
            writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-dasharray=\"5 3\"/>",
                num(x1),
                num(y1),
                num(x2),
                num(y2)
            )
            .ok();
        }
        if opts.nodes {
            for j in 0..nodes.len() {
                let (x, y) = frame.map(&base.node_point(i, j)?);
                writeln!(
                    out,
                    "<path d=\"M{} {}L{} {}M{} {}L{} {}\" stroke=\"black\" stroke-width=\"1.5\"/>",
                    num(x - 4.0),
                    num(y - 4.0),
                    num(x + 4.0),
                    num(y + 4.0),
                    num(x - 4.0),
                    num(y + 4.0),
                    num(x + 4.0),
                    num(y - 4.0)
                )
                .ok();
            }
        }
    }
    if let Some(f) = opts.frozen.filter(|&f| f < base.len()) {
        let (x, y) = frame.map(&base.vertices[f]);
        writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"7\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>", num(x), num(y)).ok();
    }
    if opts.labels {
        for (i, v) in base.vertices.iter().enumerate() {
            let (x, y) = frame.map(v);
            writeln!(out, "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\">{i}</text>", num(x + 5.0), num(y - 5.0)).ok();
        }
    }
    Ok(())
}

pub fn atbd_svg(base: &AlmostToricBase, opts: &RenderOptions) -> atf_core::Result<String> {
    let frame = Frame::fit(&base_points(base), 0.0);
    let mut out = header(PANEL, PANEL);
    draw_base(&mut out, base, opts, &frame)?;
    out.push_str("</svg>\n");
    Ok(out)
}

/// Graph over its host; multiplicities other than 1 are written next to the edge.
pub fn stc_svg(g: &TropicalGraph, opts: &RenderOptions) -> atf_core::Result<String> {
    let mut pts = base_points(&g.host);
    pts.extend(g.vertices.iter().map(|v| v.position.to_f64()));
    let frame = Frame::fit(&pts, 0.0);
    let mut out = header(PANEL, PANEL);
    draw_base(&mut out, &g.host, opts, &frame)?;
    for e in &g.edges {
        let line: Vec<String> = e.polyline.iter().map(|p| frame.map(p)).map(|(x, y)| format!("{},{}", num(x), num(y))).collect();
        writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\"/>", line.join(" ")).ok();
        if e.multiplicity != 1 && e.polyline.len() >= 2 {
            let (x1, y1) = frame.map(&e.polyline[0]);
            let (x2, y2) = frame.map(&e.polyline[1]);
            writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\" fill=\"#1f6fb2\">{}</text>",
                num((x1 + x2) / 2.0 + 4.0),
                num((y1 + y2) / 2.0 - 4.0),
                e.multiplicity
            )
            .ok();
        }
    }
    for v in &g.vertices {
        let (x, y) = frame.map(&v.position);
        writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#1f6fb2\"/>", num(x), num(y)).ok();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One panel per step, left to right, each captioned with its weights.
pub fn staircase_svg(steps: &[StaircaseStep]) -> atf_core::Result<String> {
    let mut out = header(PANEL * steps.len().max(1) as f64, PANEL + 20.0);
    for (k, s) in steps.iter().enumerate() {
        let left = PANEL * k as f64;
        let frame = Frame::fit(&base_points(&s.base), left);
        let opts = RenderOptions { frozen: Some(s.frozen_vertex), labels: false, ..RenderOptions::default() };
        draw_base(&mut out, &s.base, &opts, &frame)?;
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">({},{},{})</text>",
            num(left + PANEL / 2.0),
            num(PANEL + 8.0),
            s.weights[0],
            s.weights[1],
            s.weights[2]
        )
        .ok();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Sharp points against `n` with the accumulation value as a dashed line.
pub fn chart_svg(points: &[(usize, f64)], accumulation: Option<f64>) -> String {
    let (w, h) = (480.0, 300.0);
    let mut out = header(w, h);
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    ys.extend(accumulation);
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(lo + 1.0);
    let n_max = points.iter().map(|p| p.0).max().unwrap_or(1).max(1) as f64;
    let px = |n: f64| MARGIN + n / n_max * (w - 2.0 * MARGIN);
    let py = |y: f64| h - MARGIN - (y - lo) / (hi - lo) * (h - 2.0 * MARGIN);
    writeln!(
        out,
        "<path d=\"M{} {}L{} {}L{} {}\" fill=\"none\" stroke=\"black\"/>",
        num(MARGIN),
        num(MARGIN),
        num(MARGIN),
        num(h - MARGIN),
        num(w - MARGIN),
        num(h - MARGIN)
    )
    .ok();
    if let Some(a) = accumulation {
        writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c0392b\" stroke-dasharray=\"6 4\"/>",
            num(MARGIN),
            num(py(a)),
            num(w - MARGIN),
            num(py(a))
        )
        .ok();
    }
    if !points.is_empty() {
        let line: Vec<String> = points.iter().map(|&(n, y)| format!("{},{}", num(px(n as f64)), num(py(y)))).collect();
        writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>", line.join(" ")).ok();
        for &(n, y) in points {
            writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1f6fb2\"/>", num(px(n as f64)), num(py(y))).ok();
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use atf_core::staircase::{symington_sequence, ManifoldPreset, PresetName};

    #[test]
    fn cp2_drawing() {
        let p = ManifoldPreset::get(PresetName::Cp2);
        let opts = RenderOptions { frozen: Some(0), ..RenderOptions::default() };
        let svg = atbd_svg(&p.initial_base, &opts).unwrap();
        assert_eq!(svg.matches("stroke-dasharray").count(), 3);
        assert_eq!(svg.matches("<path").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg, atbd_svg(&p.initial_base, &opts).unwrap());
    }

    #[test]
    fn staircase_row() {
        let steps = symington_sequence(&ManifoldPreset::get(PresetName::Cp2), 2).unwrap();
        let svg = staircase_svg(&steps).unwrap();
        assert!(svg.contains("(1,1,1)") && svg.contains("(1,4,1)") && svg.contains("(1,4,25)"));
        assert_eq!(svg.matches("<polygon").count(), 3);
    }

    #[test]
    fn chart_has_asymptote() {
        let svg = chart_svg(&[(0, 1.0), (1, 4.0), (2, 6.25)], Some(6.854));
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}
