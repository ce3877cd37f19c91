use std::collections::HashSet;

use periodica::pipeline::{run_invert, run_polygon};
use periodica::polygon::{moduli, Axis};
use periodica::quadrature::oracle::{cutoff_for_bound, truncated_tail};
use periodica::{
    interval_lengths, tail_integral, CurveParams64, InvertOptions, PolygonLayout, QuadratureConfig,
};

fn layout(g: usize, a: &[&str]) -> PolygonLayout {
    run_polygon(g, a, &QuadratureConfig::default())
        .unwrap()
        .layout
}

#[test]
fn genus_four_layout() {
    let l = layout(4, &["2", "3", "4"]);
    assert_eq!(l.rects.len(), 7);
    assert!(l.rects.iter().all(|r| r.width > 0.0 && r.height > 0.0));
    assert!(l.square);
    assert!(l.square_residual <= 1e-9);
    let p0 = l.rect("P0").unwrap();
    assert!((p0.width - p0.height).abs() <= 1e-9 * p0.width);
}

#[test]
fn mirror_rectangles_swap_dimensions() {
    let l = layout(5, &["1.5", "2.5", "4", "7"]);
    for i in 1..5 {
        let p = l.rect(&format!("P{i}")).unwrap();
        let q = l.rect(&format!("Q{i}")).unwrap();
        assert!((p.width - q.height).abs() <= 1e-15 * p.width.max(1.0));
        assert!((p.height - q.width).abs() <= 1e-15 * p.height.max(1.0));
    }
}

#[test]
fn area_counts_mirrors_once() {
    let l = layout(4, &["2", "3", "4"]);
    let p_area: f64 = (0..4)
        .map(|i| l.rect(&format!("P{i}")).unwrap().area())
        .sum();
    let p0 = l.rect("P0").unwrap().area();
    assert!((l.total_area() - (2.0 * p_area - p0)).abs() <= 1e-14);
}

#[test]
fn rectangles_do_not_overlap() {
    let l = layout(6, &["2", "3", "5", "8", "13"]);
    for (i, a) in l.rects.iter().enumerate() {
        for b in &l.rects[i + 1..] {
            let dx = (a.x + a.width).min(b.x + b.width) - a.x.max(b.x);
            let dy = (a.y + a.height).min(b.y + b.height) - a.y.max(b.y);
            assert!(
                dx <= 1e-12 || dy <= 1e-12,
                "{} overlaps {}",
                a.label,
                b.label
            );
        }
    }
}

#[test]
fn every_side_is_glued_exactly_once() {
    for g in 2..=7 {
        let a: Vec<String> = (1..g)
            .map(|k| format!("{}", 1.0 + 0.9 * k as f64))
            .collect();
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        let l = layout(g, &a);
        let mut seen = HashSet::new();
        for pair in &l.identifications {
            for s in [&pair.first, &pair.second] {
                assert!(
                    seen.insert((s.rect.clone(), s.side)),
                    "g = {g}: {s:?} glued twice"
                );
            }
        }
        let (labels, contacts) = l.chain();
        assert_eq!(labels.len(), 2 * g - 1);
        assert!(contacts.windows(2).all(|w| w[0] != w[1]));
        assert!(contacts.iter().any(|&c| c == Axis::Horizontal));
    }
}

#[test]
fn truncated_tail_brackets_the_tail() {
    let cfg = QuadratureConfig::default();
    for (g, a) in [
        (2, vec![2.0]),
        (3, vec![2.0, 3.0]),
        (4, vec![2.0, 3.0, 4.0]),
    ] {
        let p = CurveParams64::new(g, a).unwrap();
        for j in 1..=g {
            let cutoff = cutoff_for_bound(&p, j, 1e-9);
            let t = truncated_tail(&p, j, cutoff);
            assert!(t.converged && t.bound <= 1e-9);
            let full = tail_integral(&p, j, &cfg).unwrap().value;
            let slack = 1e-12 * full;
            assert!(
                t.value - slack <= full && full <= t.value + t.bound + slack,
                "g = {g}, j = {j}"
            );
        }
    }
}

#[test]
fn lengths_decrease_for_spread_parameters() {
    let p = CurveParams64::new(4, vec![2.0, 3.0, 4.0]).unwrap();
    let l = interval_lengths(&p, &QuadratureConfig::default()).unwrap();
    assert!(l.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn invert_round_trip_genus_three() {
    let cfg = QuadratureConfig::default();
    let truth = CurveParams64::new(3, vec![1.7, 4.2]).unwrap();
    let rho = moduli(&truth, &cfg).unwrap();
    let r = run_invert(3, &rho, &["2", "3"], &InvertOptions::default()).unwrap();
    assert!(
        (r.a[0] - 1.7).abs() < 1e-6 && (r.a[1] - 4.2).abs() < 1e-6,
        "{:?}",
        r.a
    );
    assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
}
