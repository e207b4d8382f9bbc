//! Nonnegative reals stored as their natural logarithm.
//!
//! Radii such as `exp(-n^19)` underflow every floating-point format, but their
//! logarithms are ordinary numbers. Products, quotients and powers are exact
//! additions in the log domain; sums go through a max-shifted log-sum-exp.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};

use serde::{Deserialize, Serialize};

/// A nonnegative real `exp(log_value)`; `-inf` encodes zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogScalar(f64);

/// `log(exp(a) + exp(b))` with the larger exponent factored out.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(sum exp(x_i))` over a slice, shifting by the maximum once.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    let s: f64 = xs.iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar(f64::NEG_INFINITY);
    pub const ONE: LogScalar = LogScalar(0.0);
    pub const INFINITY: LogScalar = LogScalar(f64::INFINITY);

    /// Wraps a natural logarithm. NaN is rejected.
    pub fn from_log(log_value: f64) -> Self {
        assert!(!log_value.is_nan(), "LogScalar from NaN");
        LogScalar(log_value)
    }

    /// Converts a nonnegative float.
    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogScalar requires a nonnegative value, got {x}");
        LogScalar(x.ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    /// The represented value; underflows to 0 or overflows to inf as f64 does.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            return LogScalar::ONE;
        }
        LogScalar(self.0 * e)
    }

    pub fn powi(self, e: i32) -> Self {
        self.powf(e as f64)
    }

    pub fn sqrt(self) -> Self {
        LogScalar(0.5 * self.0)
    }

    pub fn recip(self) -> Self {
        LogScalar(-self.0)
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(self, other: LogScalar) -> Option<LogScalar> {
        match self.0.partial_cmp(&other.0)? {
            Ordering::Less => None,
            Ordering::Equal => Some(LogScalar::ZERO),
            Ordering::Greater => {
                if other.is_zero() {
                    return Some(self);
                }
                // log(e^a - e^b) = a + log(1 - e^(b-a))
                Some(LogScalar(self.0 + (-(other.0 - self.0).exp_m1()).ln()))
            }
        }
    }

    pub fn max(self, other: LogScalar) -> LogScalar {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: LogScalar) -> LogScalar {
        if self.0 <= other.0 {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: Self) -> Self {
        LogScalar(log_add_exp(self.0, rhs.0))
    }
}

impl AddAssign for LogScalar {
    fn add_assign(&mut self, rhs: Self) {
        self.0 = log_add_exp(self.0, rhs.0);
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: Self) -> Self {
        // 0 * inf stays NaN-free only if neither side is infinite
        if self.is_zero() || rhs.is_zero() {
            return LogScalar::ZERO;
        }
        LogScalar(self.0 + rhs.0)
    }
}

impl MulAssign for LogScalar {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Mul<f64> for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: f64) -> Self {
        self * LogScalar::from_f64(rhs)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return LogScalar::ZERO;
        }
        LogScalar(self.0 - rhs.0)
    }
}

impl Sum for LogScalar {
    fn sum<I: Iterator<Item = LogScalar>>(iter: I) -> Self {
        let logs: Vec<f64> = iter.map(|x| x.0).collect();
        LogScalar(log_sum_exp(&logs))
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 > -700.0 && self.0 < 700.0 {
            write!(f, "{:e}", self.to_f64())
        } else {
            // mantissa/exponent in base 10
            let l10 = self.0 / std::f64::consts::LN_10;
            let e = l10.floor();
            write!(f, "{:.6}e{}", 10f64.powf(l10 - e), e as i64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn huge_exponents_multiply_exactly() {
        let r = LogScalar::from_log(-524288.0);
        let p = r * r;
        assert_eq!(p.ln(), -1048576.0);
        assert!(p.is_finite());
        assert_eq!((p / r).ln(), -524288.0);
    }

    #[test]
    fn sum_spanning_many_orders() {
        let tiny = LogScalar::from_log(-1.0e6);
        let one = LogScalar::ONE;
        assert_eq!((one + tiny).ln(), 0.0);
        let s: LogScalar = [tiny, tiny].into_iter().sum();
        assert!((s.ln() - (-1.0e6 + 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn checked_sub_cases() {
        let a = LogScalar::from_f64(3.0);
        let b = LogScalar::from_f64(1.0);
        assert!((a.checked_sub(b).unwrap().to_f64() - 2.0).abs() < 1e-15);
        assert!(b.checked_sub(a).is_none());
        assert!(a.checked_sub(a).unwrap().is_zero());
    }

    #[test]
    fn zero_is_absorbing() {
        assert!((LogScalar::ZERO * LogScalar::from_log(1e300)).is_zero());
        assert_eq!((LogScalar::ZERO + LogScalar::ONE).ln(), 0.0);
    }

    proptest! {
        #[test]
        fn round_trip_within_ulp(x in 1e-300f64..1e300) {
            let back = LogScalar::from_f64(x).to_f64();
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }

        #[test]
        fn addition_commutes_and_is_monotone(a in -800.0f64..800.0, b in -800.0f64..800.0) {
            let x = LogScalar::from_log(a);
            let y = LogScalar::from_log(b);
            let s1 = (x + y).ln();
            let s2 = (y + x).ln();
            prop_assert!((s1 - s2).abs() <= f64::EPSILON * s1.abs().max(1.0));
            prop_assert!(s1 >= a.max(b));
        }
    }
}
