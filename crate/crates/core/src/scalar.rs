//! Arithmetic abstraction shared by the solver and the decomposition code.
//!
//! Everything numeric in this crate is generic over [`Scalar`], with two
//! implementations: exact rationals ([`Rat`]) for oracle-grade comparisons,
//! and `f64` for larger experiments where exact pivoting is too slow.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used throughout the core data model.
pub type Rat = num_rational::BigRational;

/// Rational from an integer.
pub fn rint(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Rational from numerator and denominator.
pub fn rfrac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "3", "-2", "3/4", or a plain decimal like "0.25" into an exact rational.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac: BigInt = frac_part.parse().ok()?;
        let abs = Rat::new(int.abs() * &scale + frac, scale);
        return Some(if negative { -abs } else { abs });
    }
    let int: BigInt = s.parse().ok()?;
    Some(Rat::from_integer(int))
}

/// Number type the LP machinery runs on.
///
/// `EXACT` mode uses zero tolerances; float mode uses the fixed tolerances
/// below. Operations are by value; callers clone where they need to keep
/// the original.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn from_rat(r: &Rat) -> Self;
    fn from_int(v: i64) -> Self;
    /// Exact conversion of an `f64` (used for randomly drawn objectives).
    fn from_f64_exact(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Threshold for "strictly positive" tests (flow peeling, pivot entries).
    fn zero_tol() -> Self;
    /// Feasibility residual tolerance.
    fn feas_tol() -> Self;

    fn abs(&self) -> Self;

    fn is_positive_tol(&self) -> bool {
        *self > Self::zero_tol()
    }

    /// Distance to the nearest of 0 and 1.
    fn binary_gap(&self) -> Self {
        let a = self.abs();
        let b = (self.clone() - Self::one()).abs();
        if a < b {
            a
        } else {
            b
        }
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn from_int(v: i64) -> Self {
        rint(v)
    }

    fn from_f64_exact(v: f64) -> Self {
        Rat::from_float(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }

    fn zero_tol() -> Self {
        Rat::zero()
    }

    fn feas_tol() -> Self {
        Rat::zero()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rat(r: &Rat) -> Self {
        Scalar::to_f64(r)
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_f64_exact(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn zero_tol() -> Self {
        1e-9
    }

    fn feas_tol() -> Self {
        1e-7
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}
