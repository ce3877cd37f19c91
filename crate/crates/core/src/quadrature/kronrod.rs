//! Adaptive 7/15-point Gauss–Kronrod with global bisection, in `f64`.
//!
//! Used as the independent reference for the tanh–sinh path. The error of a
//! panel is the raw `|K15 − G7|`, which is pessimistic for smooth integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive Gauss–Kronrod run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KronrodResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// One 15-point panel: `(kronrod, |kronrod − gauss|)`.
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // largest error first; ties broken by position so the order is total
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrates `f` over `[a, b]` until the summed panel error is at most
/// `max(abs_tol, rel_tol · |value|)` or `max_panels` is reached.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> KronrodResult {
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
    });
    let mut evaluations = 15;
    loop {
        let value: f64 = sorted_sum(heap.iter().map(|p| p.value));
        let error: f64 = sorted_sum(heap.iter().map(|p| p.error));
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return KronrodResult {
                value,
                error,
                evaluations,
                converged: true,
            };
        }
        if heap.len() >= max_panels {
            return KronrodResult {
                value,
                error,
                evaluations,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel can no longer be split in f64
            heap.push(worst);
            let value = sorted_sum(heap.iter().map(|p| p.value));
            return KronrodResult {
                value,
                error,
                evaluations,
                converged: false,
            };
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gk15(&f, lo, hi);
            heap.push(Panel {
                a: lo,
                b: hi,
                value: v,
                error: e,
            });
            evaluations += 15;
        }
    }
}

// the heap's iteration order depends on insertion history; sum in a fixed
// order so results do not
fn sorted_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = it.collect();
    v.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    v.into_iter().sum()
}
