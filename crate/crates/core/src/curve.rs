//! The curve family `w² = z(z²−1)(z²−a₁²)···(z²−a_{g−1}²)` with
//! `1 < a₁ < ⋯ < a_{g−1}`.
//!
//! Branch points on the positive real axis are `0, 1, a₁, …, a_{g−1}` and ∞.
//! Interval `m` (for `m = 0..=g`) is `[a_{m−1}, a_m]` with the conventions
//! `a₋₁ = 0`, `a₀ = 1`, `a_g = ∞`; only interval `g` is unbounded. The two
//! implicit entries are never stored in [`CurveParams::a`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum gap among `(1, a₁, …)` below which standard precision is expected
/// to lose the five-digit level of agreement.
pub const CLUSTER_THRESHOLD: f64 = 1e-3;

/// Validated genus and branch parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveParams<T> {
    genus: usize,
    a: Vec<T>,
}

/// Advisory raised for nearly coincident branch points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterAdvisory {
    pub min_gap: f64,
    pub threshold: f64,
}

impl std::fmt::Display for ClusterAdvisory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "clustered branch points: minimum gap {:e} is below {:e}; extended precision recommended",
            self.min_gap, self.threshold
        )
    }
}

/// Upper end of an interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Endpoint<T> {
    Finite(T),
    Infinity,
}

/// One of the `g + 1` intervals between consecutive nonnegative branch points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalSpec<T> {
    /// Interval index `m`, meaning `[a_{m−1}, a_m]`.
    pub m: usize,
    pub lo: T,
    pub hi: Endpoint<T>,
}

/// Recipe for one entry `I_{j,k}` of the real period matrix Π₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntrySpec {
    /// Row index, 1-based; the integrand is `z^{j−1}`.
    pub j: usize,
    /// Column index, 1-based.
    pub k: usize,
    /// Interval index in `0..g`.
    pub m: usize,
    /// `+1` or `−1`.
    pub sign: i8,
}

impl<T: Real> CurveParams<T> {
    /// Checks `genus ≥ 2`, `a.len() == genus − 1`, finiteness and
    /// `1 < a₁ < ⋯ < a_{g−1}`.
    pub fn new(genus: usize, a: Vec<T>) -> Result<Self> {
        if genus < 2 {
            return Err(Error::GenusTooSmall(genus));
        }
        if a.len() != genus - 1 {
            return Err(Error::WrongParamCount {
                genus,
                expected: genus - 1,
                got: a.len(),
            });
        }
        for (i, &x) in a.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite {
                    index: i + 1,
                    value: x.approx_f64(),
                });
            }
        }
        if !(a[0] > T::one()) {
            return Err(Error::NotAboveOne {
                index: 1,
                value: a[0].approx_f64(),
            });
        }
        for i in 1..a.len() {
            if !(a[i] > a[i - 1]) {
                return Err(Error::NotIncreasing {
                    index: i + 1,
                    value: a[i].approx_f64(),
                    prev_index: i,
                    prev: a[i - 1].approx_f64(),
                });
            }
        }
        Ok(CurveParams { genus, a })
    }

    /// Parses decimal literals in the working precision and validates.
    pub fn parse(genus: usize, literals: &[&str]) -> Result<Self> {
        let a = literals
            .iter()
            .map(|s| {
                T::parse_decimal(s)
                    .ok_or_else(|| Error::InvalidConfig(format!("`{s}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(genus, a)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// The stored parameters `a₁ … a_{g−1}`.
    pub fn a(&self) -> &[T] {
        &self.a
    }

    /// Finite nonnegative branch points `0, 1, a₁, …, a_{g−1}`.
    pub fn branch_points(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.genus + 1);
        v.push(T::zero());
        v.push(T::one());
        v.extend_from_slice(&self.a);
        v
    }

    /// All finite roots of `f`: `0, ±1, ±a_k`.
    pub fn roots(&self) -> Vec<T> {
        let mut v = vec![T::zero(), T::one(), -T::one()];
        for &x in &self.a {
            v.push(x);
            v.push(-x);
        }
        v
    }

    /// `a_m` with the implicit conventions; `None` stands for `a_g = ∞`.
    pub fn a_ext(&self, m: isize) -> Option<T> {
        match m {
            -1 => Some(T::zero()),
            0 => Some(T::one()),
            m if m >= 1 && (m as usize) < self.genus => Some(self.a[m as usize - 1]),
            m if m as usize == self.genus => None,
            _ => panic!("branch index {m} outside -1..={}", self.genus),
        }
    }

    /// Interval `m` in `0..=g`.
    pub fn interval(&self, m: usize) -> IntervalSpec<T> {
        assert!(
            m <= self.genus,
            "interval index {m} outside 0..={}",
            self.genus
        );
        let lo = self.a_ext(m as isize - 1).expect("lower end is finite");
        let hi = match self.a_ext(m as isize) {
            Some(x) => Endpoint::Finite(x),
            None => Endpoint::Infinity,
        };
        IntervalSpec { m, lo, hi }
    }

    pub fn intervals(&self) -> Vec<IntervalSpec<T>> {
        (0..=self.genus).map(|m| self.interval(m)).collect()
    }

    /// Index of the interval `[lo, hi]` if its ends are consecutive finite
    /// branch points.
    pub fn interval_index(&self, lo: T, hi: T) -> Option<usize> {
        let bp = self.branch_points();
        bp.windows(2).position(|w| w[0] == lo && w[1] == hi)
    }

    /// Advisory when the smallest gap in `(1, a₁, …, a_{g−1})` is below
    /// [`CLUSTER_THRESHOLD`].
    pub fn advisory(&self) -> Option<ClusterAdvisory> {
        let mut prev = T::one();
        let mut min_gap = f64::INFINITY;
        for &x in &self.a {
            min_gap = min_gap.min((x - prev).approx_f64());
            prev = x;
        }
        (min_gap < CLUSTER_THRESHOLD).then_some(ClusterAdvisory {
            min_gap,
            threshold: CLUSTER_THRESHOLD,
        })
    }

    /// Smallest gap between consecutive finite branch points `0, 1, a₁, …`.
    pub fn min_gap(&self) -> f64 {
        self.branch_points()
            .windows(2)
            .map(|w| (w[1] - w[0]).approx_f64())
            .fold(f64::INFINITY, f64::min)
    }

    /// `f(z) = z(z²−1)∏(z²−a_k²)`.
    pub fn f_eval(&self, z: T) -> T {
        let z2 = z * z;
        let mut v = z * (z2 - T::one());
        for &x in &self.a {
            v *= z2 - x * x;
        }
        v
    }

    /// Converts the parameters to another scalar type.
    pub fn convert<U: Real>(&self) -> CurveParams<U> {
        CurveParams {
            genus: self.genus,
            a: self.a.iter().map(|x| U::of_f64(x.approx_f64())).collect(),
        }
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(|x| x.approx_f64()).collect()
    }

    /// Column → interval table for Π₀, one entry per `(j, k)` in row-major order.
    pub fn entry_table(&self) -> Vec<EntrySpec> {
        entry_table(self.genus)
    }
}

/// `⌈g/2⌉`: columns up to this index use reflected intervals and carry the
/// sign `(−1)^{j−1}`.
pub fn signed_columns(genus: usize) -> usize {
    genus.div_ceil(2)
}

/// Interval index used by column `k` (1-based).
pub fn column_interval(genus: usize, k: usize) -> usize {
    assert!((1..=genus).contains(&k));
    if k <= signed_columns(genus) {
        genus + 1 - 2 * k
    } else {
        2 * k - genus - 2
    }
}

/// Sign of entry `(j, k)`.
pub fn entry_sign(genus: usize, j: usize, k: usize) -> i8 {
    if k <= signed_columns(genus) && j.is_multiple_of(2) {
        -1
    } else {
        1
    }
}

/// All `g²` entry recipes, row-major.
pub fn entry_table(genus: usize) -> Vec<EntrySpec> {
    let mut out = Vec::with_capacity(genus * genus);
    for j in 1..=genus {
        for k in 1..=genus {
            out.push(EntrySpec {
                j,
                k,
                m: column_interval(genus, k),
                sign: entry_sign(genus, j, k),
            });
        }
    }
    out
}
