//! Log-domain scalars.
//!
//! Weights such as `e^{k α_n}` overflow `f64` long before the windows we probe
//! run out (`α_n = n`, `k = 1` already overflows at `n ≈ 710`), so every
//! nonnegative quantity is carried as its natural logarithm and accumulated
//! with a streaming log-sum-exp.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative real stored as its natural logarithm.
///
/// Zero is `ln = -inf`; `+inf` is allowed and stands for an unbounded ratio
/// (e.g. `x / 0` with `x > 0`). NaN is never stored.
#[derive(Clone, Copy, PartialEq)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);
    pub const INFINITY: LogValue = LogValue(f64::INFINITY);

    /// Wraps a natural logarithm. Panics on NaN.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogValue::from_ln(NaN)");
        LogValue(ln)
    }

    /// `ln |x|`.
    pub fn from_abs(x: f64) -> Self {
        LogValue::from_ln(x.abs().ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0 < f64::INFINITY
    }

    /// `self + other` in the linear domain.
    pub fn add(self, other: LogValue) -> LogValue {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return LogValue(hi);
        }
        if hi == f64::INFINITY {
            return LogValue::INFINITY;
        }
        LogValue(hi + (lo - hi).exp().ln_1p())
    }

    /// `self * other` in the linear domain.
    pub fn mul(self, other: LogValue) -> LogValue {
        LogValue(ln_add(self.0, other.0))
    }

    /// `self / other`, with `x / 0 = +inf` for `x > 0` and `0 / y = 0` for every `y`.
    pub fn div(self, other: LogValue) -> LogValue {
        LogValue(ln_ratio(self.0, other.0))
    }

    pub fn max(self, other: LogValue) -> LogValue {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }
}

/// Adds two logarithms (multiplication in the linear domain), with `0 · ∞ = 0`.
pub(crate) fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        a + b
    }
}

/// `ln(x / y)` from `ln x` and `ln y` with the zero-weight convention of the
/// ratio tests: `0 / y = 0` and `x / 0 = +inf` for `x > 0`.
pub(crate) fn ln_ratio(num: f64, den: f64) -> f64 {
    if num == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if den == f64::NEG_INFINITY || num == f64::INFINITY {
        f64::INFINITY
    } else if den == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        num - den
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.abs() < 700.0 {
            write!(f, "{:.6e}", self.0.exp())
        } else {
            write!(f, "exp({:.6})", self.0)
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for LogValue {}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Serializes a logarithm as a JSON number, or as the strings `"-inf"` /
/// `"+inf"` when it is not finite.
pub(crate) fn serialize_ln<S: Serializer>(ln: f64, s: S) -> Result<S::Ok, S::Error> {
    if ln == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else if ln == f64::INFINITY {
        s.serialize_str("+inf")
    } else {
        s.serialize_f64(ln)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum WireLn {
    Num(f64),
    Text(String),
}

impl WireLn {
    pub(crate) fn into_ln(self) -> Result<f64, String> {
        match self {
            WireLn::Num(x) => Ok(x),
            WireLn::Text(s) => match s.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "+inf" => Ok(f64::INFINITY),
                other => Err(format!("expected a number, \"-inf\" or \"+inf\", got {other:?}")),
            },
        }
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_ln(self.0, s)
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ln = WireLn::deserialize(d)?.into_ln().map_err(serde::de::Error::custom)?;
        Ok(LogValue(ln))
    }
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum { max: f64::NEG_INFINITY, scaled: 0.0 }
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, ln: f64) {
        if ln == f64::NEG_INFINITY {
            return;
        }
        if ln == f64::INFINITY || self.max == f64::INFINITY {
            self.max = f64::INFINITY;
            self.scaled = 1.0;
            return;
        }
        if ln > self.max {
            self.scaled = self.scaled * (self.max - ln).exp() + 1.0;
            self.max = ln;
        } else {
            self.scaled += (ln - self.max).exp();
        }
    }

    pub fn value(&self) -> LogValue {
        if self.max == f64::NEG_INFINITY {
            LogValue::ZERO
        } else if self.max == f64::INFINITY {
            LogValue::INFINITY
        } else {
            LogValue(self.max + self.scaled.ln())
        }
    }
}

impl FromIterator<f64> for LogSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSum::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// A signed real stored as sign plus log-magnitude; used for sequence
/// coordinates whose magnitudes underflow `f64` (e.g. `e^{-n²}`).
#[derive(Clone, Copy, PartialEq)]
pub struct Coord {
    negative: bool,
    magnitude: LogValue,
}

impl Coord {
    pub const ZERO: Coord = Coord { negative: false, magnitude: LogValue::ZERO };

    pub fn from_f64(x: f64) -> Self {
        Coord { negative: x < 0.0, magnitude: LogValue::from_abs(x) }
    }

    /// A coordinate with the given sign and `ln |x|`.
    pub fn from_ln(negative: bool, ln_abs: f64) -> Self {
        let magnitude = LogValue::from_ln(ln_abs);
        Coord { negative: negative && !magnitude.is_zero(), magnitude }
    }

    pub fn to_f64(self) -> f64 {
        let m = self.magnitude.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }

    pub fn abs(self) -> LogValue {
        self.magnitude
    }

    pub fn ln_abs(self) -> f64 {
        self.magnitude.ln()
    }

    pub fn is_negative(self) -> bool {
        self.negative
    }

    pub fn is_zero(self) -> bool {
        self.magnitude.is_zero()
    }

    /// Multiplies by a positive scale given as a logarithm.
    pub fn scale_ln(self, ln_scale: f64) -> Coord {
        Coord::from_ln(self.negative, ln_add(self.magnitude.ln(), ln_scale))
    }

    pub fn mul(self, other: Coord) -> Coord {
        Coord::from_ln(self.negative != other.negative, ln_add(self.ln_abs(), other.ln_abs()))
    }

    pub fn neg(self) -> Coord {
        Coord::from_ln(!self.negative, self.magnitude.ln())
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}exp({})", if self.negative { "-" } else { "" }, self.magnitude.ln())
    }
}

/// Accumulates signed coordinates by keeping separate log-sums for the
/// positive and negative parts.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignedSum {
    pos: LogSum,
    neg: LogSum,
}

impl SignedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Coord) {
        if c.is_negative() {
            self.neg.push(c.ln_abs());
        } else {
            self.pos.push(c.ln_abs());
        }
    }

    pub fn value(&self) -> Coord {
        let p = self.pos.value().ln();
        let n = self.neg.value().ln();
        if p == n {
            return Coord::ZERO;
        }
        if p > n {
            Coord::from_ln(false, ln_sub(p, n))
        } else {
            Coord::from_ln(true, ln_sub(n, p))
        }
    }
}

/// `ln(e^a - e^b)` for `a > b`.
fn ln_sub(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        a
    } else {
        a + (-(b - a).exp()).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_linear_sum() {
        let a = LogValue::from_abs(3.0);
        let b = LogValue::from_abs(4.5);
        assert!((a.add(b).exp() - 7.5).abs() < 1e-14);
        assert_eq!(a.add(LogValue::ZERO), a);
    }

    #[test]
    fn division_conventions() {
        assert!(LogValue::ZERO.div(LogValue::ZERO).is_zero());
        assert_eq!(LogValue::ONE.div(LogValue::ZERO), LogValue::INFINITY);
        assert!((LogValue::from_abs(6.0).div(LogValue::from_abs(3.0)).exp() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn logsum_survives_overflow_scale() {
        let s: LogSum = [1000.0, 1000.0].into_iter().collect();
        assert!((s.value().ln() - (1000.0 + 2f64.ln())).abs() < 1e-12);
        let s: LogSum = [-1e6, f64::NEG_INFINITY].into_iter().collect();
        assert_eq!(s.value().ln(), -1e6);
    }

    #[test]
    fn signed_sum_cancels() {
        let mut s = SignedSum::new();
        s.push(Coord::from_f64(2.0));
        s.push(Coord::from_f64(-0.5));
        assert!((s.value().to_f64() - 1.5).abs() < 1e-15);
        let mut z = SignedSum::new();
        z.push(Coord::from_f64(1.0));
        z.push(Coord::from_f64(-1.0));
        assert!(z.value().is_zero());
    }

    #[test]
    fn serde_round_trip_non_finite() {
        let v = vec![LogValue::ZERO, LogValue::INFINITY, LogValue::from_ln(-2.5)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-inf","+inf",-2.5]"#);
        let back: Vec<LogValue> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
