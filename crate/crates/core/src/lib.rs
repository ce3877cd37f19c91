//! Period matrices of the hyperelliptic curves
//! `w² = z(z²−1)(z²−a₁²)···(z²−a_{g−1}²)`, `1 < a₁ < ⋯ < a_{g−1}`, and the
//! staircase polygons of their translation surfaces.
//!
//! The period matrix is purely imaginary, `Π = i·Y` with
//! `Y = Π₀⁻¹ M Π₀ N`, where Π₀ holds real integrals of `z^{j−1}/√|f|`
//! between consecutive branch points. The same integrals, for `j = 1`, give
//! the rectangle dimensions of the polygon.
//!
//! All numerics are generic over [`Real`]; `f64` gives standard precision and
//! [`DoubleDouble`] about 32 digits for nearly coincident branch points.
//!
//! ```
//! use periodica::{period_matrix, CurveParams64, QuadratureConfig};
//!
//! let p = CurveParams64::new(2, vec![2.0]).unwrap();
//! let ps = period_matrix(&p, &QuadratureConfig::default()).unwrap();
//! assert!((ps.y[(0, 0)] - 1.25352).abs() < 5e-5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod dd;
pub mod error;
pub mod linalg;
pub mod periods;
pub mod pipeline;
pub mod polygon;
pub mod quadrature;
pub mod report;
pub mod scalar;

pub use curve::{entry_table, ClusterAdvisory, CurveParams, EntrySpec};
pub use dd::DoubleDouble;
pub use error::{Error, Result};
pub use linalg::{IntMatrix, Matrix};
pub use periods::{
    build_abc, build_m, build_n, build_pi0, gamma_coeffs, genus2_closed_form, period_matrix,
    residuals, GammaCoeffs, PeriodSet, ResidualGates, ResidualReport,
};
pub use polygon::{
    interval_lengths, invert_moduli, layout_svg, rectangle_dims, square_condition_residual,
    InvertOptions, ModuliTarget, PolygonLayout,
};
pub use quadrature::{
    entry_value, integrate_endpoint_singular, tail_integral, CalibrationCase, IntegralResult,
    QuadratureConfig,
};
pub use scalar::{Precision, Real};

pub type Dd = DoubleDouble;

pub type CurveParams64 = CurveParams<f64>;
pub type CurveParamsDd = CurveParams<DoubleDouble>;
pub type PeriodSet64 = PeriodSet<f64>;
pub type PeriodSetDd = PeriodSet<DoubleDouble>;
pub type Matrix64 = Matrix<f64>;
pub type MatrixDd = Matrix<DoubleDouble>;
