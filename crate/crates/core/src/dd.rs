//! Double-double arithmetic: an unevaluated sum `hi + lo` of two doubles with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of significand.
//!
//! The error-free transformations follow Dekker and Knuth; products use a
//! fused multiply-add for the exact low part.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

use crate::scalar::{Precision, Real};

/// Extended-precision real number stored as a non-overlapping pair of doubles.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};
const PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};
const EPS: f64 = 4.930380657631324e-32; // 2^-104

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    /// Builds a value from a leading and trailing part, renormalizing.
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::renorm(p, e + self.lo * b)
    }

    /// Multiplies by `2^k` exactly (barring overflow or underflow).
    pub fn ldexp(self, k: i32) -> Self {
        // split so that the scale factor itself never overflows
        let half = k / 2;
        let a = 2f64.powi(half);
        let b = 2f64.powi(k - half);
        DoubleDouble {
            hi: self.hi * a * b,
            lo: self.lo * a * b,
        }
    }

    pub fn floor(self) -> Self {
        let f = self.hi.floor();
        if f == self.hi {
            Self::renorm(f, self.lo.floor())
        } else {
            DoubleDouble { hi: f, lo: 0.0 }
        }
    }

    pub fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            -(-self).floor()
        }
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * s);
        Self::renorm(s, r)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.78 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(k)).ldexp(-10);
        // expm1 of the reduced argument by Taylor series
        let mut term = r;
        let mut sum = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * r / Self::from_f64(n);
            sum += term;
            if term.hi.abs() <= EPS * sum.hi.abs() * 1e-2 || n > 40.0 {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s^2, applied ten times undoes the 2^-10 scaling
        for _ in 0..10 {
            sum = sum.ldexp(1) + sum * sum;
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        // Newton on exp(y) = x; each step doubles the number of correct digits
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    pub fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::ONE / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn abs(self) -> Self {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    /// Parses a decimal literal exactly up to the 31 leading digits.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        let (neg, body) = match s.as_bytes()[0] {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let mut acc = Self::ZERO;
        let mut scale = exponent;
        let mut seen_digit = false;
        let mut seen_dot = false;
        let mut used = 0;
        for c in mantissa.chars() {
            match c {
                '0'..='9' => {
                    seen_digit = true;
                    let d = f64::from(c as u8 - b'0');
                    if used < 32 {
                        acc = acc.mul_f64(10.0) + Self::from_f64(d);
                        if acc.hi != 0.0 {
                            used += 1;
                        }
                        if seen_dot {
                            scale -= 1;
                        }
                    } else if !seen_dot {
                        scale += 1;
                    }
                }
                '.' if !seen_dot => seen_dot = true,
                _ => return None,
            }
        }
        if !seen_digit {
            return None;
        }
        let ten = Self::from_f64(10.0);
        let value = match scale.cmp(&0) {
            Ordering::Equal => acc,
            Ordering::Greater => acc * ten.powi(scale),
            Ordering::Less => acc / ten.powi(-scale),
        };
        Some(if neg { -value } else { value })
    }

    /// Scientific notation with `digits` significant digits.
    pub fn to_sci(self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.hi == 0.0 {
            return format!("{:.*e}", digits - 1, 0.0);
        }
        if !self.hi.is_finite() {
            return format!("{}", self.hi);
        }
        let neg = self.is_sign_negative();
        let x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        let ten = Self::from_f64(10.0);
        let mut r = if e >= 0 {
            x / ten.powi(e)
        } else {
            x * ten.powi(-e)
        };
        if r.hi >= 10.0 {
            r /= ten;
            e += 1;
        } else if r.hi < 1.0 {
            r *= ten;
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = r.floor().hi.clamp(0.0, 9.0);
            ds.push(d as u8);
            r = (r - Self::from_f64(d)).mul_f64(10.0);
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut out = String::with_capacity(digits + 8);
        if neg {
            out.push('-');
        }
        out.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            out.push('.');
            for d in &ds[1..] {
                out.push((b'0' + d) as char);
            }
        }
        out.push_str(&format!("e{e}"));
        out
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({})", self.to_sci(32))
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map(|p| p + 1).unwrap_or(32);
        f.write_str(&self.to_sci(digits))
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::renorm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Self::from_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        Self::renorm(q1, q2) + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;

    fn rem(self, b: Self) -> Self {
        self - (self / b).trunc() * b
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            fn $m(&mut self, b: Self) {
                *self = *self $op b;
            }
        }
    };
}

assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);
assign_op!(RemAssign, rem_assign, %);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }

    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseDoubleDoubleError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(ParseDoubleDoubleError);
        }
        Self::parse(s).ok_or(ParseDoubleDoubleError)
    }
}

impl std::str::FromStr for DoubleDouble {
    type Err = ParseDoubleDoubleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s).ok_or(ParseDoubleDoubleError)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseDoubleDoubleError;

impl fmt::Display for ParseDoubleDoubleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid decimal literal")
    }
}

impl std::error::Error for ParseDoubleDoubleError {}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        (t.hi + t.lo).to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        let t = self.trunc();
        (t.hi + t.lo).to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        Some(self.hi)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Some(Self::new(hi, lo))
    }

    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::new(hi, lo))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Some(DoubleDouble::from_f64(x))
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl Real for DoubleDouble {
    const PRECISION: Precision = Precision::Extended;

    fn epsilon() -> Self {
        Self::from_f64(EPS)
    }

    fn pi() -> Self {
        PI
    }

    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }

    fn exp(self) -> Self {
        DoubleDouble::exp(self)
    }

    fn ln(self) -> Self {
        DoubleDouble::ln(self)
    }

    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }

    fn powi(self, n: i32) -> Self {
        DoubleDouble::powi(self, n)
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn of_f64(x: f64) -> Self {
        Self::from_f64(x)
    }

    fn approx_f64(self) -> f64 {
        self.hi
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        Self::parse(s)
    }

    fn to_sci(self, digits: usize) -> String {
        DoubleDouble::to_sci(self, digits)
    }
}
