//! Log-scale magnitudes and log-scaled complex values.
//!
//! Quantities like characteristic determinants and norm products grow like
//! e^{πτ} in the spectral parameter, which leaves linear f64 range around
//! τ ≈ 225. Everything size-like in this crate is therefore carried as a
//! natural-log magnitude, with zero represented by −∞.

use crate::Complex;
use serde::{Deserialize, Serialize};

/// A non-negative magnitude stored as its natural logarithm.
/// `log_value == f64::NEG_INFINITY` encodes exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMagnitude {
    pub log_value: f64,
}

impl LogMagnitude {
    pub const ZERO: LogMagnitude = LogMagnitude {
        log_value: f64::NEG_INFINITY,
    };

    pub fn from_log(log_value: f64) -> Self {
        LogMagnitude { log_value }
    }

    /// Log of a linear-scale value. Negative input is a caller bug.
    pub fn from_linear(value: f64) -> Self {
        debug_assert!(value >= 0.0, "magnitude must be non-negative");
        LogMagnitude {
            log_value: value.ln(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_value == f64::NEG_INFINITY
    }

    /// Linear-scale value. Overflows to +∞ only above log 700, which callers
    /// that stay in log scale never hit.
    pub fn to_linear(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn mul(self, other: LogMagnitude) -> LogMagnitude {
        if self.is_zero() || other.is_zero() {
            return LogMagnitude::ZERO;
        }
        LogMagnitude::from_log(self.log_value + other.log_value)
    }

    pub fn div(self, other: LogMagnitude) -> LogMagnitude {
        if self.is_zero() {
            return LogMagnitude::ZERO;
        }
        LogMagnitude::from_log(self.log_value - other.log_value)
    }

    /// Sum of two magnitudes, computed as logsumexp so neither side is
    /// exponentiated at full size.
    pub fn add(self, other: LogMagnitude) -> LogMagnitude {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.log_value >= other.log_value {
            (self.log_value, other.log_value)
        } else {
            (other.log_value, self.log_value)
        };
        LogMagnitude::from_log(hi + (lo - hi).exp().ln_1p())
    }

    pub fn powi(self, n: i32) -> LogMagnitude {
        if self.is_zero() {
            return if n == 0 {
                LogMagnitude::from_log(0.0)
            } else {
                LogMagnitude::ZERO
            };
        }
        LogMagnitude::from_log(self.log_value * f64::from(n))
    }

    pub fn sqrt(self) -> LogMagnitude {
        if self.is_zero() {
            return LogMagnitude::ZERO;
        }
        LogMagnitude::from_log(0.5 * self.log_value)
    }
}

impl PartialOrd for LogMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.log_value.partial_cmp(&other.log_value)
    }
}

/// logsumexp over a slice of log-scale values: log Σ e^{v_i}.
/// Empty input and all-(−∞) input both yield −∞.
pub fn logsumexp(log_values: &[f64]) -> f64 {
    let hi = log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = log_values.iter().map(|&v| (v - hi).exp()).sum();
    hi + sum.ln()
}

/// A complex value stored as a unit-modulus mantissa and a log magnitude,
/// so products and quotients never overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    /// Unimodular direction; meaningless when `log_abs` is −∞.
    pub mantissa: Complex,
    pub log_abs: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        mantissa: Complex::new(1.0, 0.0),
        log_abs: f64::NEG_INFINITY,
    };

    pub fn from_complex(z: Complex) -> Self {
        let r = z.norm();
        if r == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex {
            mantissa: z / r,
            log_abs: r.ln(),
        }
    }

    /// z = m · e^{log_abs} with any nonzero m; m is renormalized here.
    pub fn from_parts(mantissa: Complex, log_abs: f64) -> Self {
        let r = mantissa.norm();
        if r == 0.0 || log_abs == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        LogComplex {
            mantissa: mantissa / r,
            log_abs: log_abs + r.ln(),
        }
    }

    /// e^z without overflow: unit direction e^{i·Im z}, magnitude Re z.
    pub fn exp_of(z: Complex) -> Self {
        LogComplex {
            mantissa: Complex::from_polar(1.0, z.im),
            log_abs: z.re,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    pub fn abs(&self) -> LogMagnitude {
        LogMagnitude::from_log(self.log_abs)
    }

    pub fn to_complex(&self) -> Complex {
        if self.is_zero() {
            return Complex::new(0.0, 0.0);
        }
        self.mantissa * self.log_abs.exp()
    }

    pub fn mul(self, other: LogComplex) -> LogComplex {
        if self.is_zero() || other.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::from_parts(self.mantissa * other.mantissa, self.log_abs + other.log_abs)
    }

    pub fn div(self, other: LogComplex) -> LogComplex {
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::from_parts(self.mantissa / other.mantissa, self.log_abs - other.log_abs)
    }

    pub fn neg(self) -> LogComplex {
        LogComplex {
            mantissa: -self.mantissa,
            log_abs: self.log_abs,
        }
    }

    pub fn conj(self) -> LogComplex {
        LogComplex {
            mantissa: self.mantissa.conj(),
            log_abs: self.log_abs,
        }
    }

    /// Sum that rescales both terms by the larger magnitude first.
    pub fn add(self, other: LogComplex) -> LogComplex {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let hi = self.log_abs.max(other.log_abs);
        let z = self.mantissa * (self.log_abs - hi).exp() + other.mantissa * (other.log_abs - hi).exp();
        let r = z.norm();
        if r == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex {
            mantissa: z / r,
            log_abs: hi + r.ln(),
        }
    }

    pub fn sub(self, other: LogComplex) -> LogComplex {
        self.add(other.neg())
    }

    /// Argument of the value in (−π, π].
    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }
}

/// Sum of complex terms given as (direction, log magnitude) pairs, rescaled
/// by the largest magnitude so intermediate values stay O(1).
pub fn scaled_complex_sum(terms: &[(Complex, f64)]) -> LogComplex {
    let hi = terms
        .iter()
        .map(|&(_, l)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return LogComplex::ZERO;
    }
    let mut acc = Complex::new(0.0, 0.0);
    for &(dir, l) in terms {
        if l == f64::NEG_INFINITY {
            continue;
        }
        acc += dir * (l - hi).exp();
    }
    let r = acc.norm();
    if r == 0.0 {
        return LogComplex::ZERO;
    }
    LogComplex {
        mantissa: acc / r,
        log_abs: hi + r.ln(),
    }
}
