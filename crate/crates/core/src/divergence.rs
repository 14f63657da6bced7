//! Extended nonnegative reals for divergence values.
//!
//! Every divergence functional returns a [`Divergence`]: either a finite
//! nonnegative number or `+inf`. NaN is never a value; producing one is an
//! error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Rounding slack below zero that is clipped to exactly zero.
pub const NEGATIVE_CLIP: f64 = 1e-12;

/// A finite nonnegative value or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence(f64);

impl Divergence {
    pub const ZERO: Divergence = Divergence(0.0);
    pub const INFINITY: Divergence = Divergence(f64::INFINITY);

    /// Wraps a computed value, clipping `-1e-12 < v < 0` to zero.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::NotANumber { context: "divergence" });
        }
        if value < 0.0 {
            if value > -NEGATIVE_CLIP {
                return Ok(Divergence(0.0));
            }
            return Err(Error::NegativeDivergence { value });
        }
        Ok(Divergence(value))
    }

    /// Wraps a value after clipping with a caller-chosen tolerance.
    pub fn clipped(value: f64, tol: f64) -> Result<Self> {
        if value < 0.0 && value > -tol {
            Ok(Divergence(0.0))
        } else {
            Self::new(value)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `self - other`, as a plain real. Fails when both sides are infinite.
    pub fn gap(self, other: Divergence) -> Result<f64> {
        if self.is_infinite() && other.is_infinite() {
            return Err(Error::Indeterminate("inf - inf"));
        }
        Ok(self.0 - other.0)
    }

    /// Multiplies by a nonnegative finite factor; `0 * inf` is an error.
    pub fn scale(self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::InvalidArgument {
                name: "factor",
                reason: format!("scale factor must be finite and nonnegative, got {factor}"),
            });
        }
        if self.is_infinite() {
            if factor == 0.0 {
                return Err(Error::Indeterminate("0 * inf"));
            }
            return Ok(Self::INFINITY);
        }
        Ok(Divergence(self.0 * factor))
    }

    /// `self <= other + tol`, with `inf <= inf` true.
    pub fn le_with_slack(self, other: Divergence, tol: f64) -> bool {
        if other.is_infinite() {
            return true;
        }
        if self.is_infinite() {
            return false;
        }
        self.0 <= other.0 + tol
    }
}

impl Add for Divergence {
    type Output = Divergence;

    fn add(self, rhs: Divergence) -> Divergence {
        Divergence(self.0 + rhs.0)
    }
}

impl Mul<Divergence> for f64 {
    type Output = Divergence;

    /// Panics on `0 * inf` or a negative factor; use [`Divergence::scale`] for a fallible form.
    fn mul(self, rhs: Divergence) -> Divergence {
        rhs.scale(self).expect("invalid divergence scaling")
    }
}

impl PartialOrd for Divergence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

impl TryFrom<f64> for Divergence {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Divergence::new(value)
    }
}
