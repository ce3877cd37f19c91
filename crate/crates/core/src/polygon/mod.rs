//! The staircase polygon `P = P₀ ∪ ⋃ (P_i ∪ Q_i)` built from the interval
//! lengths `I_m = ∫_{a_{m−1}}^{a_m} dz/√|f|`, with the flat-metric constant
//! normalized to 1.
//!
//! Rectangle dimensions come from a backward recurrence. Seed with
//! `h(P_{g−1}) = 2I_{g−1}` and `w(P_{g−1}) = 2I_g`; then for `m = g−2, …, 0`
//! one dimension of `P_m` is `2I_m` minus the same dimension of `P_{m+1}` and
//! the other is copied from `P_{m+1}`. For even `g`, even `m` updates widths;
//! for odd `g`, even `m` updates heights. Telescoping gives
//! `w(P₀) − h(P₀) = ±2 Σ (−1)^{⌊(j+1)/2⌋} I_j`, so `P₀` is a square exactly
//! when that sum vanishes.
//!
//! Placement: `P₀ = [0, w₀] × [0, h₀]`. For even `g`, `P₁` sits right of `P₀`,
//! `P₂` above `P₁`, and so on alternately; for odd `g` the first step goes up.
//! `Q_i` is the mirror image of `P_i` in the line `x + y = (w₀ + h₀)/2`, which
//! passes through the upper-left and lower-right corners of the square `P₀`.

mod invert;
mod svg;

pub use invert::{invert_moduli, moduli, InvertOptions, InvertOutcome, ModuliTarget};
pub use svg::layout_svg;

use serde::{Deserialize, Serialize};

use crate::curve::CurveParams;
use crate::error::{Error, Result};
use crate::quadrature::{interval_integral, QuadratureConfig};
use crate::scalar::Real;

/// Relative tolerance for calling `P₀` a square.
pub const SQUARE_TOLERANCE: f64 = 1e-9;

/// `I₀ … I_g`, all strictly positive.
pub fn interval_lengths<T: Real>(p: &CurveParams<T>, cfg: &QuadratureConfig) -> Result<Vec<T>> {
    (0..=p.genus())
        .map(|m| {
            let r = interval_integral(p, 1, m, cfg)?;
            if !r.converged {
                return Err(Error::IntervalNotConverged {
                    interval: m,
                    estimate: r.abs_error_estimate,
                    nodes: r.nodes_used,
                });
            }
            Ok(r.value)
        })
        .collect()
}

/// `(−1)^{⌊(j+1)/2⌋}` for `j = 0..=g`.
pub fn square_signs(genus: usize) -> Vec<i8> {
    (0..=genus)
        .map(|j| if j.div_ceil(2) % 2 == 0 { 1 } else { -1 })
        .collect()
}

/// `|Σ (−1)^{⌊(j+1)/2⌋} I_j| / Σ I_j`.
pub fn square_residual_of<T: Real>(lengths: &[T]) -> f64 {
    let signs = square_signs(lengths.len() - 1);
    let mut signed = T::zero();
    let mut total = T::zero();
    for (&l, &s) in lengths.iter().zip(&signs) {
        signed += if s > 0 { l } else { -l };
        total += l;
    }
    (signed.abs() / total).approx_f64()
}

pub fn square_condition_residual<T: Real>(
    p: &CurveParams<T>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(square_residual_of(&interval_lengths(p, cfg)?))
}

/// Whether step `m` of the recurrence updates the width (else the height).
fn updates_width(genus: usize, m: usize) -> bool {
    m.is_multiple_of(2) == genus.is_multiple_of(2)
}

/// Whether `P_{i+1}` is attached to the right of `P_i` (else on top).
fn attaches_right(genus: usize, i: usize) -> bool {
    updates_width(genus, i)
}

/// `(w, h)` of `P₀ … P_{g−1}` from the lengths `I₀ … I_g`. Nothing is checked.
pub fn dims_from_lengths<T: Real>(lengths: &[T]) -> Vec<(T, T)> {
    let g = lengths.len() - 1;
    let two = T::two();
    let mut dims = vec![(T::zero(), T::zero()); g];
    dims[g - 1] = (two * lengths[g], two * lengths[g - 1]);
    for m in (0..g - 1).rev() {
        let (w, h) = dims[m + 1];
        dims[m] = if updates_width(g, m) {
            (two * lengths[m] - w, h)
        } else {
            (w, two * lengths[m] - h)
        };
    }
    dims
}

/// Axis-aligned rectangle with its lower-left corner at `(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    fn center(&self) -> (f64, f64) {
        (self.x + 0.5 * self.width, self.y + 0.5 * self.height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideRef {
    pub rect: String,
    pub side: Side,
}

/// Direction of the cylinder a side pair closes up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Left side glued to right side.
    Horizontal,
    /// Bottom side glued to top side.
    Vertical,
}

/// Two boundary sides glued by translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidePair {
    pub first: SideRef,
    pub second: SideRef,
    pub cylinder: Axis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

/// Geometry of the polygon together with its gluing data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonLayout {
    pub genus: usize,
    /// Flat-metric normalization constant; always 1.
    pub scale_c: f64,
    /// `I₀ … I_g`.
    pub lengths: Vec<f64>,
    /// `P₀ … P_{g−1}` followed by `Q₁ … Q_{g−1}`.
    pub rects: Vec<Rect>,
    pub identifications: Vec<SidePair>,
    pub marked_points: Vec<MarkedPoint>,
    /// The mirror line `l`, clipped to the bounding box.
    pub reflection_line: Segment,
    /// `|w(P₀) − h(P₀)| / w(P₀)`.
    pub square_residual: f64,
    pub square: bool,
}

impl PolygonLayout {
    pub fn rect(&self, label: &str) -> Option<&Rect> {
        self.rects.iter().find(|r| r.label == label)
    }

    /// `area(P₀) + Σ_{i ≥ 1} (area(P_i) + area(Q_i))`.
    pub fn total_area(&self) -> f64 {
        self.rects.iter().map(Rect::area).sum()
    }

    /// `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.rects.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |b, r| {
                (
                    b.0.min(r.x),
                    b.1.min(r.y),
                    b.2.max(r.x + r.width),
                    b.3.max(r.y + r.height),
                )
            },
        )
    }

    /// Rectangles in staircase order `Q_{g−1}, …, Q₁, P₀, …, P_{g−1}` with the
    /// kind of contact between each consecutive pair.
    pub fn chain(&self) -> (Vec<String>, Vec<Axis>) {
        staircase(self.genus)
    }
}

fn p_label(i: usize) -> String {
    format!("P{i}")
}

fn q_label(i: usize) -> String {
    format!("Q{i}")
}

/// Labels in staircase order and the contact between neighbours:
/// `Horizontal` means the second rectangle is to the right of the first,
/// `Vertical` that it is on top.
fn staircase(genus: usize) -> (Vec<String>, Vec<Axis>) {
    let mut labels: Vec<String> = (1..genus).rev().map(q_label).collect();
    labels.extend((0..genus).map(p_label));
    let p_contact = |i: usize| {
        if attaches_right(genus, i) {
            Axis::Horizontal
        } else {
            Axis::Vertical
        }
    };
    let swap = |a: Axis| match a {
        Axis::Horizontal => Axis::Vertical,
        Axis::Vertical => Axis::Horizontal,
    };
    // Q_{i+1} relates to Q_i as the mirror of P_i to P_{i+1}
    let mut contacts: Vec<Axis> = (0..genus - 1).rev().map(|i| swap(p_contact(i))).collect();
    contacts.extend((0..genus - 1).map(p_contact));
    (labels, contacts)
}

/// Boundary gluings: every maximal run of rectangles in contact along one
/// axis forms a cylinder whose two end sides are identified.
fn identifications(genus: usize) -> Vec<SidePair> {
    let (labels, contacts) = staircase(genus);
    let n = labels.len();
    let mut out = Vec::new();
    for axis in [Axis::Horizontal, Axis::Vertical] {
        let (start_side, end_side) = match axis {
            Axis::Horizontal => (Side::Left, Side::Right),
            Axis::Vertical => (Side::Bottom, Side::Top),
        };
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && contacts[j] == axis {
                j += 1;
            }
            out.push(SidePair {
                first: SideRef {
                    rect: labels[i].clone(),
                    side: start_side,
                },
                second: SideRef {
                    rect: labels[j].clone(),
                    side: end_side,
                },
                cylinder: axis,
            });
            i = j + 1;
        }
    }
    out
}

/// Builds the layout from precomputed lengths `I₀ … I_g`.
pub fn layout_from_lengths<T: Real>(lengths: &[T]) -> Result<PolygonLayout> {
    let g = lengths.len() - 1;
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    let dims = dims_from_lengths(lengths);
    for (i, &(w, h)) in dims.iter().enumerate() {
        for (name, v) in [("width", w), ("height", h)] {
            if !(v > T::zero()) {
                return Err(Error::NonPositiveDimension {
                    label: p_label(i),
                    dimension: name,
                    value: v.approx_f64(),
                });
            }
        }
    }
    let dims: Vec<(f64, f64)> = dims
        .iter()
        .map(|&(w, h)| (w.approx_f64(), h.approx_f64()))
        .collect();

    let mut ps = Vec::with_capacity(g);
    let (mut x, mut y) = (0.0, 0.0);
    for (i, &(w, h)) in dims.iter().enumerate() {
        if i > 0 {
            let prev: &Rect = &ps[i - 1];
            if attaches_right(g, i - 1) {
                x = prev.x + prev.width;
            } else {
                y = prev.y + prev.height;
            }
        }
        ps.push(Rect {
            label: p_label(i),
            x,
            y,
            width: w,
            height: h,
        });
    }

    let (w0, h0) = dims[0];
    let s = 0.5 * (w0 + h0);
    let reflect = |r: &Rect, label: String| Rect {
        label,
        x: s - (r.y + r.height),
        y: s - (r.x + r.width),
        width: r.height,
        height: r.width,
    };
    let qs: Vec<Rect> = (1..g).map(|i| reflect(&ps[i], q_label(i))).collect();

    let last = &ps[g - 1];
    let mut marked = vec![MarkedPoint {
        label: "o".into(),
        x: last.x + last.width,
        y: last.y + last.height,
    }];
    marked.push(MarkedPoint {
        label: "o'".into(),
        x: s - marked[0].y,
        y: s - marked[0].x,
    });
    for (i, r) in ps.iter().enumerate() {
        let (cx, cy) = r.center();
        marked.push(MarkedPoint {
            label: format!("p{i}"),
            x: cx,
            y: cy,
        });
    }
    let (pgx, pgy) = if g.is_multiple_of(2) {
        (last.x + 0.5 * last.width, last.y + last.height)
    } else {
        (last.x + last.width, last.y + 0.5 * last.height)
    };
    marked.push(MarkedPoint {
        label: format!("p{g}"),
        x: pgx,
        y: pgy,
    });
    for (i, r) in qs.iter().enumerate() {
        let (cx, cy) = r.center();
        marked.push(MarkedPoint {
            label: format!("q{}", i + 1),
            x: cx,
            y: cy,
        });
    }
    marked.push(MarkedPoint {
        label: format!("q{g}"),
        x: s - pgy,
        y: s - pgx,
    });

    let mut rects = ps;
    rects.extend(qs);
    let square_residual = (w0 - h0).abs() / w0;
    let mut layout = PolygonLayout {
        genus: g,
        scale_c: 1.0,
        lengths: lengths.iter().map(|l| l.approx_f64()).collect(),
        rects,
        identifications: identifications(g),
        marked_points: marked,
        reflection_line: Segment {
            x1: 0.0,
            y1: 0.0,
            x2: 0.0,
            y2: 0.0,
        },
        square_residual,
        square: square_residual <= SQUARE_TOLERANCE,
    };
    // x + y = s across the bounding box
    let (min_x, min_y, max_x, max_y) = layout.bounds();
    let lo = min_x.max(s - max_y);
    let hi = max_x.min(s - min_y);
    layout.reflection_line = Segment {
        x1: lo,
        y1: s - lo,
        x2: hi,
        y2: s - hi,
    };
    Ok(layout)
}

pub fn rectangle_dims<T: Real>(
    p: &CurveParams<T>,
    cfg: &QuadratureConfig,
) -> Result<PolygonLayout> {
    layout_from_lengths(&interval_lengths(p, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn curve_lengths(g: usize) -> Vec<f64> {
        let a: Vec<f64> = (1..g).map(|k| 1.0 + 0.7 * k as f64).collect();
        interval_lengths(
            &CurveParams::new(g, a).unwrap(),
            &QuadratureConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn signs_for_genus_four() {
        assert_eq!(square_signs(4), vec![1, -1, -1, 1, 1]);
    }

    #[test]
    fn recurrence_telescopes_to_square_sum() {
        for g in 2..=9 {
            let l: Vec<f64> = (0..=g).map(|j| 3.0 + (j as f64 * 0.37).sin()).collect();
            let d = dims_from_lengths(&l);
            let signed: f64 = l
                .iter()
                .zip(square_signs(g))
                .map(|(x, s)| s as f64 * x)
                .sum();
            let (w0, h0) = d[0];
            assert!(
                ((w0 - h0).abs() - 2.0 * signed.abs()).abs() < 1e-12,
                "g = {g}"
            );
        }
    }

    #[test]
    fn shared_sides_are_exact() {
        for g in 2..=8 {
            let d = dims_from_lengths(&curve_lengths(g));
            for i in 0..g - 1 {
                if attaches_right(g, i) {
                    assert_eq!(d[i].1, d[i + 1].1);
                } else {
                    assert_eq!(d[i].0, d[i + 1].0);
                }
            }
        }
    }

    #[test]
    fn genus_two_formulas() {
        let l = [3.0, 1.25, 1.75];
        let d = dims_from_lengths(&l);
        assert_eq!(d[1], (2.0 * 1.75, 2.0 * 1.25));
        assert_eq!(d[0], (2.0 * 3.0 - 2.0 * 1.75, 2.0 * 1.25));
    }

    #[test]
    fn nonpositive_dimension_is_an_error() {
        let err = layout_from_lengths(&[0.1, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDimension { .. }));
    }

    #[test]
    fn reflection_swaps_dimensions() {
        for g in 2..=7 {
            let lay = layout_from_lengths(&curve_lengths(g)).unwrap();
            assert!(lay.square, "g = {g}: {}", lay.square_residual);
            assert_eq!(lay.rects.len(), 2 * g - 1);
            for i in 1..g {
                let p = lay.rect(&format!("P{i}")).unwrap();
                let q = lay.rect(&format!("Q{i}")).unwrap();
                assert_eq!((q.width, q.height), (p.height, p.width));
            }
        }
    }

    // corners of a rectangle, counterclockwise from lower-left
    fn corners(r: &Rect) -> [(f64, f64); 4] {
        [
            (r.x, r.y),
            (r.x + r.width, r.y),
            (r.x + r.width, r.y + r.height),
            (r.x, r.y + r.height),
        ]
    }

    fn side_ends(side: Side) -> (usize, usize) {
        // start, end oriented left→right or bottom→top
        match side {
            Side::Bottom => (0, 1),
            Side::Top => (3, 2),
            Side::Left => (0, 3),
            Side::Right => (1, 2),
        }
    }

    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }

    #[test]
    fn gluing_gives_a_genus_g_surface() {
        for g in 2..=8 {
            let lay = layout_from_lengths(&curve_lengths(g)).unwrap();
            let idx: HashMap<&str, usize> = lay
                .rects
                .iter()
                .enumerate()
                .map(|(i, r)| (r.label.as_str(), i))
                .collect();
            let f = lay.rects.len();
            let mut parent: Vec<usize> = (0..4 * f).collect();
            let mut union = |a: usize, b: usize, parent: &mut Vec<usize>| {
                let (ra, rb) = (find(parent, a), find(parent, b));
                parent[ra] = rb;
            };
            let glue =
                |ra: usize,
                 sa: Side,
                 rb: usize,
                 sb: Side,
                 parent: &mut Vec<usize>,
                 union: &mut dyn FnMut(usize, usize, &mut Vec<usize>)| {
                    let (a0, a1) = side_ends(sa);
                    let (b0, b1) = side_ends(sb);
                    union(4 * ra + a0, 4 * rb + b0, parent);
                    union(4 * ra + a1, 4 * rb + b1, parent);
                };
            // interior contacts
            let (labels, contacts) = lay.chain();
            for (k, axis) in contacts.iter().enumerate() {
                let (a, b) = (idx[labels[k].as_str()], idx[labels[k + 1].as_str()]);
                let (sa, sb) = match axis {
                    Axis::Horizontal => (Side::Right, Side::Left),
                    Axis::Vertical => (Side::Top, Side::Bottom),
                };
                // the two sides must coincide geometrically
                let (ca, cb) = (corners(&lay.rects[a]), corners(&lay.rects[b]));
                let ((a0, a1), (b0, b1)) = (side_ends(sa), side_ends(sb));
                for (p, q) in [(ca[a0], cb[b0]), (ca[a1], cb[b1])] {
                    assert!(
                        (p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12,
                        "g={g} {} {}",
                        labels[k],
                        labels[k + 1]
                    );
                }
                glue(a, sa, b, sb, &mut parent, &mut union);
            }
            let mut edges = contacts.len();
            for pair in &lay.identifications {
                let (a, b) = (
                    idx[pair.first.rect.as_str()],
                    idx[pair.second.rect.as_str()],
                );
                // glued sides have equal length
                let len = |r: &Rect, s: Side| match s {
                    Side::Left | Side::Right => r.height,
                    Side::Top | Side::Bottom => r.width,
                };
                let (la, lb) = (
                    len(&lay.rects[a], pair.first.side),
                    len(&lay.rects[b], pair.second.side),
                );
                assert!((la - lb).abs() < 1e-12);
                glue(
                    a,
                    pair.first.side,
                    b,
                    pair.second.side,
                    &mut parent,
                    &mut union,
                );
                edges += 1;
            }
            assert_eq!(edges, 2 * f);
            let v = (0..4 * f).filter(|&c| find(&mut parent, c) == c).count();
            assert_eq!(
                v as i64 - edges as i64 + f as i64,
                2 - 2 * g as i64,
                "g = {g}"
            );
            assert_eq!(v, 1);
        }
    }

    #[test]
    fn marked_points_mirror() {
        let lay = layout_from_lengths(&curve_lengths(4)).unwrap();
        let get = |l: &str| {
            lay.marked_points
                .iter()
                .find(|m| m.label == l)
                .unwrap()
                .clone()
        };
        let p3 = lay.rect("P3").unwrap();
        let o = get("o");
        assert_eq!((o.x, o.y), (p3.x + p3.width, p3.y + p3.height));
        let q3 = lay.rect("Q3").unwrap();
        let o2 = get("o'");
        assert!((o2.x - q3.x).abs() < 1e-12 && (o2.y - q3.y).abs() < 1e-12);
        assert_eq!(lay.marked_points.len(), 2 + 5 + 4);
    }
}
