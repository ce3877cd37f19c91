//! Scalar abstraction shared by the quadrature, linear algebra and polygon code.
//!
//! Everything numeric in the crate is generic over [`Real`]. Two
//! implementations ship: `f64` (standard precision, about 16 digits) and
//! [`DoubleDouble`](crate::DoubleDouble) (extended precision, about 32 digits).

use std::fmt::{self, Debug, Display};
use std::iter::Sum;
use std::ops::Neg;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num, NumAssign, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Working precision of a computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE double, about 16 significant digits.
    #[default]
    Standard,
    /// Software double-double, about 32 significant digits.
    Extended,
}

impl Precision {
    /// Approximate number of significant decimal digits.
    pub fn digits(self) -> usize {
        match self {
            Precision::Standard => 16,
            Precision::Extended => 31,
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Standard => "standard",
            Precision::Extended => "extended",
        })
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "double" | "f64" => Ok(Precision::Standard),
            "extended" | "dd" | "double-double" => Ok(Precision::Extended),
            other => Err(format!(
                "unknown precision `{other}` (expected standard or extended)"
            )),
        }
    }
}

/// Real scalar used throughout the crate.
pub trait Real:
    Num
    + NumAssign
    + Neg<Output = Self>
    + FromPrimitive
    + ToPrimitive
    + Copy
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + Sum
    + 'static
{
    /// The precision tag this scalar implements.
    const PRECISION: Precision;

    /// Unit roundoff of the format.
    fn epsilon() -> Self;
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn is_finite(self) -> bool;

    /// Exact conversion from a double.
    fn of_f64(x: f64) -> Self;
    /// Nearest double.
    fn approx_f64(self) -> f64;

    /// Parses a decimal literal such as `1.00001` or `-2.5e3` directly in this
    /// precision, so that the value is not first rounded to a double.
    fn parse_decimal(s: &str) -> Option<Self>;

    /// Scientific notation with `digits` significant digits.
    fn to_sci(self, digits: usize) -> String;

    fn of_i64(n: i64) -> Self {
        Self::of_f64(n as f64)
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn half() -> Self {
        Self::of_f64(0.5)
    }

    fn two() -> Self {
        Self::of_f64(2.0)
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Standard;

    fn epsilon() -> Self {
        f64::EPSILON
    }

    fn pi() -> Self {
        std::f64::consts::PI
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn exp(self) -> Self {
        f64::exp(self)
    }

    fn ln(self) -> Self {
        f64::ln(self)
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    fn of_f64(x: f64) -> Self {
        x
    }

    fn approx_f64(self) -> f64 {
        self
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    fn to_sci(self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
}

/// Formats a value with the given number of significant digits in plain
/// notation when the exponent is moderate, scientific otherwise.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits.saturating_sub(1), x)
    }
}
