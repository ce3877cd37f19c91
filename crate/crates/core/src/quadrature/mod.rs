//! Integrals `∫ z^{j−1}/√|f(z)| dz` between consecutive branch points.
//!
//! The primary scheme is tanh–sinh ([`TanhSinh`]). Each finite interval has
//! inverse-square-root singularities at both ends; the integrand is written
//! as `z^{j−1} / (√(z−lo) · √(hi−z) · √R(z))` with `R` the product of the
//! distances to the remaining roots, and every distance is formed from the
//! exact offsets the quadrature hands over, so nothing cancels near a
//! clustered root. The unbounded interval `[a_{g−1}, ∞)` is mapped to
//! `s ∈ (0, 1]` by `z = a_{g−1}/s²` first.
//!
//! With `oracle_mode` set, the same quantities come from the substitution
//! oracle in [`oracle`] instead.

pub mod kronrod;
pub mod oracle;
mod tanh_sinh;

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::curve::{CurveParams, EntrySpec};
use crate::error::{Error, Result};
use crate::scalar::{Precision, Real};

pub use tanh_sinh::{Abscissa, TanhSinh};

/// Knobs of the integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Successive levels must agree to this relative tolerance.
    pub target_rel_tol: f64,
    /// Finest level; level `ℓ` uses step `2^{−ℓ}`.
    pub max_level: usize,
    pub precision: Precision,
    /// Use the Gauss–Kronrod substitution oracle instead of tanh–sinh.
    pub oracle_mode: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            target_rel_tol: 1e-12,
            max_level: 12,
            precision: Precision::Standard,
            oracle_mode: false,
        }
    }
}

impl QuadratureConfig {
    /// Defaults matched to a precision.
    pub fn for_precision(precision: Precision) -> Self {
        match precision {
            Precision::Standard => Self::default(),
            Precision::Extended => QuadratureConfig {
                target_rel_tol: 1e-24,
                max_level: 12,
                precision,
                oracle_mode: false,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_tol > 0.0 && self.target_rel_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "target relative tolerance must be positive, got {}",
                self.target_rel_tol
            )));
        }
        if self.max_level < tanh_sinh::MIN_LEVEL {
            return Err(Error::InvalidConfig(format!(
                "max_level must be at least {}, got {}",
                tanh_sinh::MIN_LEVEL,
                self.max_level
            )));
        }
        if self.max_level > 24 {
            return Err(Error::InvalidConfig(format!(
                "max_level {} is unreasonably large (limit 24)",
                self.max_level
            )));
        }
        if self.oracle_mode && self.precision == Precision::Extended {
            return Err(Error::InvalidConfig(
                "the oracle is only available in standard precision".into(),
            ));
        }
        Ok(())
    }
}

/// Value of one integral together with its convergence record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

impl<T: Real> IntegralResult<T> {
    fn negate(self) -> Self {
        IntegralResult {
            value: -self.value,
            ..self
        }
    }
}

/// Shared node tables, one per scalar type and maximum level.
fn tables<T: Real>(max_level: usize) -> Arc<TanhSinh<T>> {
    type Cache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    let entry = map
        .entry((TypeId::of::<T>(), max_level))
        .or_insert_with(|| Arc::new(TanhSinh::<T>::new(max_level)) as Arc<dyn Any + Send + Sync>)
        .clone();
    entry
        .downcast::<TanhSinh<T>>()
        .expect("cache is keyed by type")
}

fn check_power<T: Real>(p: &CurveParams<T>, j: usize) -> Result<()> {
    if j == 0 || j > p.genus() {
        return Err(Error::InvalidPower {
            j,
            genus: p.genus(),
        });
    }
    Ok(())
}

/// `∫_{lo}^{hi} z^{j−1}/√|f(z)| dz` over an interval between consecutive
/// finite branch points. Non-convergence is reported through
/// [`IntegralResult::converged`], not as an error.
pub fn integrate_endpoint_singular<T: Real>(
    p: &CurveParams<T>,
    j: usize,
    lo: T,
    hi: T,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>> {
    cfg.validate()?;
    check_power(p, j)?;
    if p.interval_index(lo, hi).is_none() {
        return Err(Error::InvalidInterval {
            lo: lo.approx_f64(),
            hi: hi.approx_f64(),
        });
    }
    if cfg.oracle_mode {
        let pf = p.convert::<f64>();
        return Ok(from_f64_result(oracle::finite(
            &pf,
            j,
            lo.approx_f64(),
            hi.approx_f64(),
        )));
    }
    let roots = p.roots();
    let power = (j - 1) as i32;
    let rule = tables::<T>(cfg.max_level);
    Ok(
        rule.integrate(lo, hi, cfg.target_rel_tol, |x: Abscissa<T>| {
            let mut rest = T::one();
            for &r in &roots {
                if r == lo || r == hi {
                    continue;
                }
                let d = if r < T::zero() {
                    x.z - r
                } else if r < lo {
                    (lo - r) + x.from_lo
                } else {
                    (r - hi) + x.from_hi
                };
                rest *= d;
            }
            x.z.powi(power) / (x.from_lo.sqrt() * x.from_hi.sqrt() * rest.sqrt())
        }),
    )
}

/// `∫_{a_{g−1}}^{∞} z^{j−1}/√|f(z)| dz`.
///
/// After `z = A/s²` with `A = a_{g−1}` the integrand becomes
/// `2 A^{j−g−1/2} s^{2g−2j} / ∏_{r ≠ 0} √|1 − r s²/A|`, which is bounded at
/// `s = 0` because `j ≤ g` and has the usual inverse square root at `s = 1`
/// from the factor `r = A`.
pub fn tail_integral<T: Real>(
    p: &CurveParams<T>,
    j: usize,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>> {
    cfg.validate()?;
    check_power(p, j)?;
    let g = p.genus();
    let big_a = p.a_ext(g as isize - 1).expect("a_{g-1} is finite");
    if cfg.oracle_mode {
        let pf = p.convert::<f64>();
        return Ok(from_f64_result(oracle::tail(&pf, j)));
    }
    let roots = p.roots();
    // A^{j−g−1/2} = A^{j−g} / √A
    let scale = T::two() * big_a.powi(j as i32 - g as i32) / big_a.sqrt();
    let power = 2 * (g - j) as i32;
    let rule = tables::<T>(cfg.max_level);
    Ok(
        rule.integrate(T::zero(), T::one(), cfg.target_rel_tol, |x: Abscissa<T>| {
            let s = x.z;
            let s2 = s * s;
            // 1 − s², kept accurate near s = 1
            let one_minus_s2 = x.from_hi * (T::two() - x.from_hi);
            let mut prod = T::one();
            for &r in &roots {
                if r == T::zero() {
                    continue;
                }
                let factor = if r == big_a {
                    one_minus_s2
                } else if r > T::zero() {
                    let q = r / big_a;
                    (T::one() - q) + q * one_minus_s2
                } else {
                    T::one() - r * s2 / big_a
                };
                prod *= factor;
            }
            scale * s.powi(power) / prod.sqrt()
        }),
    )
}

/// Unsigned integral over interval `m ∈ 0..=g`.
pub fn interval_integral<T: Real>(
    p: &CurveParams<T>,
    j: usize,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>> {
    if m > p.genus() {
        return Err(Error::InvalidConfig(format!(
            "interval index {m} outside 0..={}",
            p.genus()
        )));
    }
    if m == p.genus() {
        return tail_integral(p, j, cfg);
    }
    let iv = p.interval(m);
    let hi = match iv.hi {
        crate::curve::Endpoint::Finite(x) => x,
        crate::curve::Endpoint::Infinity => unreachable!("only interval g is unbounded"),
    };
    integrate_endpoint_singular(p, j, iv.lo, hi, cfg)
}

/// Signed integral of one Π₀ entry, with its convergence record.
pub fn entry_result<T: Real>(
    p: &CurveParams<T>,
    e: &EntrySpec,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>> {
    let r = interval_integral(p, e.j, e.m, cfg)?;
    Ok(if e.sign < 0 { r.negate() } else { r })
}

/// Signed value of one Π₀ entry; non-convergence is an error here.
pub fn entry_value<T: Real>(
    p: &CurveParams<T>,
    e: &EntrySpec,
    cfg: &QuadratureConfig,
) -> Result<T> {
    let r = entry_result(p, e, cfg)?;
    if !r.converged {
        return Err(Error::EntryNotConverged {
            j: e.j,
            k: e.k,
            estimate: r.abs_error_estimate,
            nodes: r.nodes_used,
        });
    }
    Ok(r.value)
}

fn from_f64_result<T: Real>(r: kronrod::KronrodResult) -> IntegralResult<T> {
    IntegralResult {
        value: T::of_f64(r.value),
        abs_error_estimate: r.error,
        nodes_used: r.evaluations,
        converged: r.converged,
    }
}

/// A built-in integrand whose exact value is π.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalibrationCase {
    /// `∫_0^1 dz / √(z(1−z))`.
    UnitBeta,
    /// `∫_{−1}^{1} dz / √(1−z²)`.
    Chebyshev,
    /// `∫_1^∞ dz / (z √(z−1))`, through the same `z = 1/s²` map as the tail.
    Tail,
}

impl CalibrationCase {
    pub const ALL: [CalibrationCase; 3] = [
        CalibrationCase::UnitBeta,
        CalibrationCase::Chebyshev,
        CalibrationCase::Tail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CalibrationCase::UnitBeta => "beta-unit",
            CalibrationCase::Chebyshev => "chebyshev",
            CalibrationCase::Tail => "tail",
        }
    }

    /// Runs the primary scheme on this integrand.
    pub fn run<T: Real>(self, cfg: &QuadratureConfig) -> Result<IntegralResult<T>> {
        cfg.validate()?;
        let rule = tables::<T>(cfg.max_level);
        let tol = cfg.target_rel_tol;
        Ok(match self {
            CalibrationCase::UnitBeta => rule.integrate(T::zero(), T::one(), tol, |x| {
                T::one() / (x.from_lo * x.from_hi).sqrt()
            }),
            CalibrationCase::Chebyshev => rule.integrate(-T::one(), T::one(), tol, |x| {
                T::one() / (x.from_lo * x.from_hi).sqrt()
            }),
            CalibrationCase::Tail => rule.integrate(T::zero(), T::one(), tol, |x| {
                T::two() / (x.from_hi * (T::two() - x.from_hi)).sqrt()
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DoubleDouble;

    fn g2(a: f64) -> CurveParams<f64> {
        CurveParams::new(2, vec![a]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig {
            target_rel_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().unwrap_err().is_validation());
        let shallow = QuadratureConfig {
            max_level: 2,
            ..Default::default()
        };
        assert!(shallow.validate().is_err());
        let mixed = QuadratureConfig {
            oracle_mode: true,
            ..QuadratureConfig::for_precision(Precision::Extended)
        };
        assert!(mixed.validate().is_err());
    }

    #[test]
    fn calibration_standard() {
        for case in CalibrationCase::ALL {
            let r = case.run::<f64>(&QuadratureConfig::default()).unwrap();
            assert!(r.converged, "{}", case.name());
            assert!(
                (r.value - std::f64::consts::PI).abs() < 1e-13,
                "{}: {}",
                case.name(),
                r.value
            );
        }
    }

    #[test]
    fn calibration_extended() {
        let cfg = QuadratureConfig::for_precision(Precision::Extended);
        for case in CalibrationCase::ALL {
            let r = case.run::<DoubleDouble>(&cfg).unwrap();
            assert!(r.converged, "{}", case.name());
            assert!(
                (r.value - DoubleDouble::pi()).abs().hi() < 1e-28,
                "{}",
                case.name()
            );
        }
    }

    #[test]
    fn rejects_non_adjacent_interval() {
        let p = g2(2.0);
        let err =
            integrate_endpoint_singular(&p, 1, 0.0, 2.0, &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidInterval { .. }));
        let err =
            integrate_endpoint_singular(&p, 3, 0.0, 1.0, &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidPower { .. }));
    }

    #[test]
    fn raw_integrals_are_positive() {
        let p = CurveParams::new(4, vec![1.5, 2.5, 7.0]).unwrap();
        let cfg = QuadratureConfig::default();
        for j in 1..=4 {
            for m in 0..=4 {
                let r = interval_integral(&p, j, m, &cfg).unwrap();
                assert!(r.converged && r.value > 0.0, "j={j} m={m}: {r:?}");
            }
        }
    }

    #[test]
    fn entry_signs_follow_table() {
        let p = g2(2.0);
        let cfg = QuadratureConfig::default();
        let table = p.entry_table();
        // (j=1,k=2) is q > 0, (j=2,k=1) is r < 0
        let q = entry_value(&p, &table[1], &cfg).unwrap();
        let r = entry_value(&p, &table[2], &cfg).unwrap();
        assert!(q > 0.0 && r < 0.0);
        let p3 = CurveParams::new(3, vec![2.0, 3.0]).unwrap();
        let e = p3.entry_table()[4];
        assert_eq!((e.j, e.k), (2, 2));
        assert!(entry_value(&p3, &e, &cfg).unwrap() < 0.0);
    }

    #[test]
    fn finite_interval_matches_oracle() {
        let p = g2(2.0);
        let cfg = QuadratureConfig::default();
        let ocfg = QuadratureConfig {
            oracle_mode: true,
            ..cfg
        };
        for (j, lo, hi) in [(1, 0.0, 1.0), (2, 1.0, 2.0), (2, 0.0, 1.0)] {
            let a = integrate_endpoint_singular(&p, j, lo, hi, &cfg).unwrap();
            let b = integrate_endpoint_singular(&p, j, lo, hi, &ocfg).unwrap();
            assert!(a.converged && b.converged);
            assert!(
                (a.value - b.value).abs() <= 1e-10 * a.value.abs().max(1.0),
                "{a:?} {b:?}"
            );
        }
    }

    #[test]
    fn tail_closes_square_condition_genus_two() {
        // I₀ − I₁ − I₂ = 0
        let p = g2(2.0);
        let cfg = QuadratureConfig::default();
        let i: Vec<f64> = (0..=2)
            .map(|m| interval_integral(&p, 1, m, &cfg).unwrap().value)
            .collect();
        assert!((i[0] - i[1] - i[2]).abs() < 1e-10, "{i:?}");
    }

    #[test]
    fn tail_highest_power_converges() {
        for (g, a) in [
            (2, vec![1.3]),
            (3, vec![1.2, 5.0]),
            (5, vec![1.1, 1.5, 2.0, 40.0]),
        ] {
            let p = CurveParams::new(g, a).unwrap();
            let r = tail_integral(&p, g, &QuadratureConfig::default()).unwrap();
            assert!(r.converged && r.value.is_finite() && r.value > 0.0);
        }
    }

    #[test]
    fn raising_max_level_keeps_converged_error() {
        let p = CurveParams::new(3, vec![1.7, 4.0]).unwrap();
        let lo = QuadratureConfig::default();
        let hi = QuadratureConfig {
            max_level: 16,
            ..lo
        };
        let a = tail_integral(&p, 2, &lo).unwrap();
        let b = tail_integral(&p, 2, &hi).unwrap();
        assert!(a.converged && b.converged);
        assert!(b.abs_error_estimate <= a.abs_error_estimate);
    }

    #[test]
    fn extended_agrees_with_standard() {
        let pd = CurveParams::<DoubleDouble>::parse(3, &["2", "3"]).unwrap();
        let pf = CurveParams::new(3, vec![2.0, 3.0]).unwrap();
        let cd = QuadratureConfig::for_precision(Precision::Extended);
        let cf = QuadratureConfig::default();
        for m in 0..=3 {
            let d = interval_integral(&pd, 2, m, &cd).unwrap();
            let f = interval_integral(&pf, 2, m, &cf).unwrap();
            assert!(d.converged);
            assert!((d.value.hi() - f.value).abs() < 1e-13 * f.value);
        }
    }
}
