//! End-to-end runs with the scalar type picked from the requested precision.
//!
//! Branch parameters arrive as decimal text and are parsed directly in the
//! working precision, so `1.00001` in extended mode is not first rounded to
//! a double.

use crate::curve::CurveParams;
use crate::error::{Error, Result};
use crate::periods::{self, ResidualGates};
use crate::polygon::{self, InvertOptions, ModuliTarget};
use crate::quadrature::{CalibrationCase, QuadratureConfig};
use crate::report::{
    CalibrationRow, IdentityRow, InvertReport, PeriodReport, PolygonReport, SelftestReport,
    VerifyReport,
};
use crate::scalar::{Precision, Real};
use crate::DoubleDouble;

/// Largest genus covered by the integer identity checks.
pub const IDENTITY_MAX_GENUS: usize = 12;

/// Absolute tolerance for the π calibration integrals.
pub const CALIBRATION_TOLERANCE: f64 = 1e-13;

fn period_generic<T: Real>(
    genus: usize,
    a: &[&str],
    cfg: &QuadratureConfig,
) -> Result<PeriodReport> {
    let p = CurveParams::<T>::parse(genus, a)?;
    if let Some(adv) = p.advisory() {
        if T::PRECISION == Precision::Standard {
            log::warn!("{adv}");
        }
    }
    let ps = periods::period_matrix(&p, cfg)?;
    let res = periods::residuals(&ps, &p, cfg)?;
    Ok(PeriodReport::new(&p, &ps, res))
}

/// Π₀, M, N, Y and the residual report.
pub fn run_period(genus: usize, a: &[&str], cfg: &QuadratureConfig) -> Result<PeriodReport> {
    match cfg.precision {
        Precision::Standard => period_generic::<f64>(genus, a, cfg),
        Precision::Extended => period_generic::<DoubleDouble>(genus, a, cfg),
    }
}

/// [`run_period`] plus gate evaluation and, for genus 2, the `p, q, r, s`
/// identity.
pub fn run_verify(
    genus: usize,
    a: &[&str],
    cfg: &QuadratureConfig,
    gates: &ResidualGates,
) -> Result<VerifyReport> {
    let period = run_period(genus, a, cfg)?;
    let genus2_identity = (genus == 2).then(|| {
        let pi0 = crate::linalg::Matrix::from_rows(&period.pi0).expect("square");
        periods::genus2_identity_residual(&pi0)
    });
    let outcomes = gates.evaluate(&period.residuals);
    let passed = outcomes.iter().all(|o| o.passed);
    Ok(VerifyReport {
        period,
        genus2_identity,
        gates: outcomes,
        passed,
    })
}

fn polygon_generic<T: Real>(
    genus: usize,
    a: &[&str],
    cfg: &QuadratureConfig,
) -> Result<PolygonReport> {
    let p = CurveParams::<T>::parse(genus, a)?;
    let layout = polygon::rectangle_dims(&p, cfg)?;
    Ok(PolygonReport {
        genus,
        a: p.a_f64(),
        precision: T::PRECISION,
        layout,
    })
}

pub fn run_polygon(genus: usize, a: &[&str], cfg: &QuadratureConfig) -> Result<PolygonReport> {
    match cfg.precision {
        Precision::Standard => polygon_generic::<f64>(genus, a, cfg),
        Precision::Extended => polygon_generic::<DoubleDouble>(genus, a, cfg),
    }
}

/// Default starting point `a_k = k + 1`.
pub fn default_guess(genus: usize) -> Vec<String> {
    (1..genus).map(|k| (k + 1).to_string()).collect()
}

fn invert_generic<T: Real>(
    genus: usize,
    rho: &[f64],
    guess: &[&str],
    opts: &InvertOptions,
) -> Result<InvertReport> {
    let target = ModuliTarget::new(rho.to_vec())?;
    let guess = CurveParams::<T>::parse(genus, guess)?;
    let out = polygon::invert_moduli(genus, &target, &guess, opts)?;
    let achieved = polygon::moduli(&out.params, &opts.quadrature)?;
    Ok(InvertReport {
        genus,
        rho: rho.to_vec(),
        guess: guess.a_f64(),
        a: out.params.a_f64(),
        rho_achieved: achieved.iter().map(|x| x.approx_f64()).collect(),
        iterations: out.iterations,
        residual: out.residual,
        trace: out.trace,
    })
}

/// Solves for the branch parameters whose polygon has aspect ratios `rho`.
pub fn run_invert(
    genus: usize,
    rho: &[f64],
    guess: &[&str],
    opts: &InvertOptions,
) -> Result<InvertReport> {
    if genus < 2 {
        return Err(Error::GenusTooSmall(genus));
    }
    match opts.quadrature.precision {
        Precision::Standard => invert_generic::<f64>(genus, rho, guess, opts),
        Precision::Extended => invert_generic::<DoubleDouble>(genus, rho, guess, opts),
    }
}

fn calibrate<T: Real>(cfg: &QuadratureConfig) -> Result<Vec<CalibrationRow>> {
    CalibrationCase::ALL
        .iter()
        .map(|case| {
            let r = case.run::<T>(cfg)?;
            let error = (r.value - T::pi()).abs().approx_f64();
            Ok(CalibrationRow {
                name: case.name().into(),
                value: r.value.approx_f64(),
                error,
                nodes: r.nodes_used,
                passed: r.converged && error <= CALIBRATION_TOLERANCE,
            })
        })
        .collect()
}

/// Exact integer identities among `M`, `N`, `J` and `T` for one genus.
pub fn identity_row(genus: usize) -> IdentityRow {
    let m = periods::build_m(genus);
    let n = periods::build_n(genus);
    let t = periods::gamma_coeffs(genus).t;
    let n_pattern = (0..genus).all(|i| {
        (0..genus).all(|j| {
            let expect = if i + j + 2 > genus + 1 {
                0
            } else if (genus + 1 - (i + j + 2)).is_multiple_of(2) {
                1
            } else {
                -1
            };
            n[(i, j)] == expect
        })
    });
    IdentityRow {
        genus,
        m_squared_identity: &m * &m == crate::linalg::Matrix::identity(genus),
        n_pattern,
        flip_gamma_equals_n: &periods::flip(genus) * &t == n,
        gamma_unimodular: t.det_exact().abs() == 1,
    }
}

/// π calibration integrals and the integer identities for `g ≤ 12`.
pub fn run_selftest(cfg: &QuadratureConfig) -> Result<SelftestReport> {
    let calibration = match cfg.precision {
        Precision::Standard => calibrate::<f64>(cfg)?,
        Precision::Extended => calibrate::<DoubleDouble>(cfg)?,
    };
    let identities: Vec<IdentityRow> = (2..=IDENTITY_MAX_GENUS).map(identity_row).collect();
    let passed = calibration.iter().all(|c| c.passed) && identities.iter().all(IdentityRow::passed);
    Ok(SelftestReport {
        precision: cfg.precision,
        calibration,
        identities,
        passed,
    })
}
