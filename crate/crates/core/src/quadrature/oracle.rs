//! Independent reference values in `f64`.
//!
//! Nothing here shares code with the tanh–sinh path. Endpoint singularities
//! are removed analytically and the smooth remainder goes to adaptive
//! Gauss–Kronrod:
//!
//! * finite `[lo, hi]`: `z = mid + hw·sin θ` turns `dz/√((z−lo)(hi−z))` into
//!   `dθ`, leaving `z^{j−1}/√R(z)` on `[−π/2, π/2]`;
//! * tail `[A, ∞)`: `z = A + (t/(1−t))²` leaves
//!   `2 z^{j−1} / ((1−t)² √R(z))` on `[0, 1]`, bounded at `t = 1`.

use std::f64::consts::FRAC_PI_2;

use crate::curve::CurveParams;

use super::kronrod::{self, KronrodResult};

pub const REL_TOL: f64 = 1e-13;
pub const MAX_PANELS: usize = 2000;

/// `1/√∏|z − r|` over the roots other than `skip`, one factor at a time so
/// that large `z` cannot overflow.
fn inv_sqrt_rest(roots: &[f64], skip: &[f64], z: f64) -> f64 {
    let mut v = 1.0;
    for &r in roots {
        if !skip.contains(&r) {
            v /= (z - r).abs().sqrt();
        }
    }
    v
}

/// `∫_{lo}^{hi} z^{j−1}/√|f(z)| dz` for consecutive finite branch points.
pub fn finite(p: &CurveParams<f64>, j: usize, lo: f64, hi: f64) -> KronrodResult {
    let roots = p.roots();
    let mid = 0.5 * (lo + hi);
    let hw = 0.5 * (hi - lo);
    let power = (j - 1) as i32;
    kronrod::integrate(
        |theta: f64| {
            let z = mid + hw * theta.sin();
            z.powi(power) * inv_sqrt_rest(&roots, &[lo, hi], z)
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        0.0,
        REL_TOL,
        MAX_PANELS,
    )
}

/// `∫_{a_{g−1}}^{∞} z^{j−1}/√|f(z)| dz`.
pub fn tail(p: &CurveParams<f64>, j: usize) -> KronrodResult {
    let roots = p.roots();
    let big_a = largest(p);
    let power = (j - 1) as i32;
    kronrod::integrate(
        |t: f64| {
            let u = t / (1.0 - t);
            let z = big_a + u * u;
            let w = 1.0 - t;
            2.0 * z.powi(power) / (w * w) * inv_sqrt_rest(&roots, &[big_a], z)
        },
        0.0,
        1.0,
        0.0,
        REL_TOL,
        MAX_PANELS,
    )
}

fn largest(p: &CurveParams<f64>) -> f64 {
    p.a().last().copied().unwrap_or(1.0)
}

/// Tail integral cut off at `cutoff`, with a rigorous bound on the part
/// beyond. The true value lies in `[value, value + bound]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedTail {
    pub value: f64,
    pub bound: f64,
    pub cutoff: f64,
    pub converged: bool,
}

/// `∫_{A}^{T} z^{j−1}/√|f|` through `z = A + u²`, plus the bound
/// `(1 − A²/T²)^{−g/2} · T^{j−g−1/2} / (g − j + 1/2)` on `∫_T^∞`, which
/// follows from `|f(z)| ≥ z^{2g+1}(1 − A²/z²)^g` for `z ≥ T > A`.
pub fn truncated_tail(p: &CurveParams<f64>, j: usize, cutoff: f64) -> TruncatedTail {
    let g = p.genus() as f64;
    let roots = p.roots();
    let big_a = largest(p);
    assert!(
        cutoff > big_a,
        "cutoff must exceed the largest branch point"
    );
    let power = (j - 1) as i32;
    let r = kronrod::integrate(
        |u: f64| {
            let z = big_a + u * u;
            2.0 * z.powi(power) * inv_sqrt_rest(&roots, &[big_a], z)
        },
        0.0,
        (cutoff - big_a).sqrt(),
        0.0,
        REL_TOL,
        MAX_PANELS,
    );
    let jf = j as f64;
    let bound = (1.0 - (big_a / cutoff).powi(2)).powf(-g / 2.0) * cutoff.powf(jf - g - 0.5)
        / (g - jf + 0.5);
    TruncatedTail {
        value: r.value,
        bound,
        cutoff,
        converged: r.converged,
    }
}

/// Smallest power of ten (at least `10·A`) whose truncation bound is below
/// `target`.
pub fn cutoff_for_bound(p: &CurveParams<f64>, j: usize, target: f64) -> f64 {
    let g = p.genus() as f64;
    let big_a = largest(p);
    let jf = j as f64;
    let mut t = 10f64.powf((10.0 * big_a).log10().ceil());
    loop {
        let bound =
            (1.0 - (big_a / t).powi(2)).powf(-g / 2.0) * t.powf(jf - g - 0.5) / (g - jf + 0.5);
        if bound < target {
            return t;
        }
        t *= 10.0;
    }
}
