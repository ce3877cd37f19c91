//! Tanh–sinh (double exponential) rule with level doubling.
//!
//! With `x = tanh(π/2 · sinh t)` the trapezoid rule in `t` converges
//! exponentially even for integrands with algebraic endpoint singularities.
//! Level `ℓ` uses step `2^{−ℓ}`; each level only adds the odd multiples of
//! the new step, so the estimate is refined in place.
//!
//! Abscissae are handed to the integrand together with their distances to
//! both ends of the interval, computed from `1 − |x|` directly rather than by
//! subtraction. Near an endpoint the distance then keeps full relative
//! precision, which is what lets `1/√(z − lo)`-type factors be evaluated
//! accurately down to distances of `1e−300`.

use std::sync::OnceLock;

use crate::scalar::Real;

use super::IntegralResult;

/// Nodes whose distance to the endpoint drops below this are dropped; the
/// neglected mass of an inverse-square-root singularity is then about `1e−150`.
const MIN_COMPLEMENT: f64 = 1e-300;

/// Levels below this are never accepted as converged.
pub(crate) const MIN_LEVEL: usize = 3;

/// A point of the interval `[lo, hi]` with its exact-ish offsets.
#[derive(Clone, Copy, Debug)]
pub struct Abscissa<T> {
    pub z: T,
    /// `z − lo`, never computed by cancellation near `lo`.
    pub from_lo: T,
    /// `hi − z`, never computed by cancellation near `hi`.
    pub from_hi: T,
}

#[derive(Clone, Copy, Debug)]
struct Node<T> {
    /// `1 − |x|`.
    comp: T,
    /// `dx/dt`.
    weight: T,
}

/// Lazily built node tables, shareable across threads.
#[derive(Debug)]
pub struct TanhSinh<T> {
    levels: Vec<OnceLock<Vec<Node<T>>>>,
}

impl<T: Real> TanhSinh<T> {
    pub fn new(max_level: usize) -> Self {
        TanhSinh {
            levels: (0..=max_level).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    fn step(level: usize) -> f64 {
        0.5f64.powi(level as i32)
    }

    /// Nodes with `t ≥ 0` that are new at `level`. The `t = 0` node belongs to
    /// level 0 and is stored once; every other node stands for `±t`.
    fn nodes(&self, level: usize) -> &[Node<T>] {
        self.levels[level].get_or_init(|| {
            let h = Self::step(level);
            let half_pi = T::pi() * T::half();
            let mut out = Vec::new();
            let mut k: u64 = if level == 0 { 0 } else { 1 };
            loop {
                // dyadic, hence exact in any binary format
                let t = T::of_f64(k as f64 * h);
                let et = t.exp();
                let inv = T::one() / et;
                let sinh = (et - inv) * T::half();
                let cosh = (et + inv) * T::half();
                let e = (-(T::pi() * sinh)).exp();
                let onepe = T::one() + e;
                let comp = T::two() * e / onepe;
                if comp.approx_f64() < MIN_COMPLEMENT {
                    break;
                }
                let weight = half_pi * cosh * T::of_f64(4.0) * e / (onepe * onepe);
                out.push(Node { comp, weight });
                k += if level == 0 { 1 } else { 2 };
            }
            out
        })
    }

    /// Integrates `f` over `[lo, hi]`. Convergence is declared once two
    /// successive levels (the later one at least [`MIN_LEVEL`]) agree within
    /// `rel_tol · |value|`.
    pub fn integrate<F>(&self, lo: T, hi: T, rel_tol: f64, f: F) -> IntegralResult<T>
    where
        F: Fn(Abscissa<T>) -> T,
    {
        let width = hi - lo;
        let hw = width * T::half();
        let mut nodes_used = 0usize;
        let mut estimate = T::zero();
        let mut prev = T::zero();
        let mut error = f64::INFINITY;

        for level in 0..=self.max_level() {
            let mut sum = T::zero();
            for (idx, node) in self.nodes(level).iter().enumerate() {
                let d = hw * node.comp;
                if level == 0 && idx == 0 {
                    let mid = Abscissa {
                        z: lo + hw,
                        from_lo: hw,
                        from_hi: hw,
                    };
                    sum += node.weight * f(mid);
                    nodes_used += 1;
                    continue;
                }
                let left = Abscissa {
                    z: lo + d,
                    from_lo: d,
                    from_hi: width - d,
                };
                let right = Abscissa {
                    z: hi - d,
                    from_lo: width - d,
                    from_hi: d,
                };
                sum += node.weight * (f(left) + f(right));
                nodes_used += 2;
            }
            let h = T::of_f64(Self::step(level));
            estimate = if level == 0 {
                h * hw * sum
            } else {
                prev * T::half() + h * hw * sum
            };

            if level > 0 {
                error = (estimate - prev).abs().approx_f64();
                let scale = estimate.abs().approx_f64();
                if level >= MIN_LEVEL && error <= rel_tol * scale {
                    return IntegralResult {
                        value: estimate,
                        abs_error_estimate: error,
                        nodes_used,
                        converged: true,
                    };
                }
            }
            prev = estimate;
        }
        IntegralResult {
            value: estimate,
            abs_error_estimate: error,
            nodes_used,
            converged: false,
        }
    }
}
