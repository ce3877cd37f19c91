use std::fmt::Write;

use super::{Axis, PolygonLayout, Rect, Side, SidePair};

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

struct View {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl View {
    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.min_x) * self.scale
    }

    // SVG's y axis points down
    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.max_y - y) * self.scale
    }
}

fn side_segment(r: &Rect, side: Side) -> (f64, f64, f64, f64) {
    let (x0, y0, x1, y1) = (r.x, r.y, r.x + r.width, r.y + r.height);
    match side {
        Side::Left => (x0, y0, x0, y1),
        Side::Right => (x1, y0, x1, y1),
        Side::Bottom => (x0, y0, x1, y0),
        Side::Top => (x0, y1, x1, y1),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('\'', "&apos;")
}

/// Renders the layout as a standalone SVG 1.1 document. The output depends
/// only on the layout, so identical input gives identical bytes.
pub fn layout_svg(layout: &PolygonLayout) -> String {
    let (min_x, min_y, max_x, max_y) = layout.bounds();
    let extent = (max_x - min_x).max(max_y - min_y).max(f64::MIN_POSITIVE);
    let v = View {
        min_x,
        max_y,
        scale: (CANVAS - 2.0 * MARGIN) / extent,
    };
    let width = 2.0 * MARGIN + (max_x - min_x) * v.scale;
    let height = 2.0 * MARGIN + (max_y - min_y) * v.scale;

    let mut s = String::new();
    let _ = writeln!(s, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.4}" height="{height:.4}" viewBox="0 0 {width:.4} {height:.4}">"##
    );
    let _ = writeln!(
        s,
        "<title>Staircase polygon, genus {}</title>",
        layout.genus
    );

    let _ = writeln!(
        s,
        r##"<g class="rectangles" fill="#f4f4f4" stroke="#222222" stroke-width="1">"##
    );
    for r in &layout.rects {
        let _ = writeln!(
            s,
            r##"<rect id="{}" x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}"/>"##,
            escape(&r.label),
            v.x(r.x),
            v.y(r.y + r.height),
            r.width * v.scale,
            r.height * v.scale
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r##"<g class="labels" font-family="sans-serif" font-size="14" text-anchor="middle">"##
    );
    for r in &layout.rects {
        let _ = writeln!(
            s,
            r##"<text x="{:.4}" y="{:.4}">{}</text>"##,
            v.x(r.x + 0.5 * r.width),
            v.y(r.y + 0.75 * r.height),
            escape(&r.label)
        );
    }
    let _ = writeln!(s, "</g>");

    let l = &layout.reflection_line;
    let _ = writeln!(
        s,
        r##"<line class="reflection-line" x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}" stroke="#555555" stroke-dasharray="6 4"/>"##,
        v.x(l.x1),
        v.y(l.y1),
        v.x(l.x2),
        v.y(l.y2)
    );

    let _ = writeln!(s, r##"<g class="identifications" stroke-width="3">"##);
    for (i, pair) in layout.identifications.iter().enumerate() {
        write_pair(&mut s, layout, &v, i, pair);
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r##"<g class="marked-points" font-family="sans-serif" font-size="11">"##
    );
    for m in &layout.marked_points {
        let (x, y) = (v.x(m.x), v.y(m.y));
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.4}" cy="{y:.4}" r="3" fill="#000000"/>"##
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.4}" y="{:.4}">{}</text>"##,
            x + 4.0,
            y - 4.0,
            escape(&m.label)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn write_pair(s: &mut String, layout: &PolygonLayout, v: &View, index: usize, pair: &SidePair) {
    let color = PALETTE[index % PALETTE.len()];
    let kind = match pair.cylinder {
        Axis::Horizontal => "horizontal",
        Axis::Vertical => "vertical",
    };
    for side in [&pair.first, &pair.second] {
        let Some(r) = layout.rect(&side.rect) else {
            continue;
        };
        let (x1, y1, x2, y2) = side_segment(r, side.side);
        let _ = writeln!(
            s,
            r##"<line class="side-pair" data-pair="{index}" data-cylinder="{kind}" x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}" stroke="{color}"/>"##,
            v.x(x1),
            v.y(y1),
            v.x(x2),
            v.y(y2)
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::layout_from_lengths;

    #[test]
    fn counts_and_determinism() {
        let lay = layout_from_lengths(&[0.467709, 0.351534, 0.187799, 0.0716244]).unwrap();
        let a = layout_svg(&lay);
        assert_eq!(a, layout_svg(&lay));
        assert_eq!(a.matches("<rect ").count(), 5);
        assert_eq!(a.matches("class=\"reflection-line\"").count(), 1);
        assert_eq!(
            a.matches("class=\"side-pair\"").count(),
            2 * lay.identifications.len()
        );
        assert!(a.trim_end().ends_with("</svg>"));
    }
}
