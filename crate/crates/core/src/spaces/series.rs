//! Truncated weighted series with certified geometric tails.

use serde::{Serialize, Serializer};

use crate::logval::{serialize_ln, LogSum, LogValue};

/// Absolute log-domain tolerance of the divergence test.
pub const DIVERGENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reduce {
    Sum,
    Sup,
}

/// A truncated seminorm together with what is known about the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeminormResult {
    /// Contribution of the indices `n ≤ J`.
    pub value: LogValue,
    pub truncation: usize,
    /// Bound on the omitted part (`Σ_{n>J}` or `sup_{n>J}`); `None` when the
    /// envelope does not support a certified tail.
    #[serde(serialize_with = "ser_tail")]
    pub tail_bound: Option<LogValue>,
    pub diverged_at_scale: bool,
}

fn ser_tail<S: Serializer>(t: &Option<LogValue>, s: S) -> Result<S::Ok, S::Error> {
    match t {
        Some(v) => serialize_ln(v.ln(), s),
        None => s.serialize_str("unavailable"),
    }
}

impl SeminormResult {
    pub fn exact(value: LogValue, truncation: usize) -> Self {
        SeminormResult { value, truncation, tail_bound: Some(LogValue::ZERO), diverged_at_scale: false }
    }

    /// Certified upper bound: `value ⊕ tail` for sums, `max` for sups, `+inf`
    /// when no tail is available.
    pub fn upper(&self, reduce: Reduce) -> LogValue {
        match (self.diverged_at_scale, self.tail_bound) {
            (true, _) | (_, None) => LogValue::INFINITY,
            (false, Some(t)) => match reduce {
                Reduce::Sum => self.value.add(t),
                Reduce::Sup => self.value.max(t),
            },
        }
    }

    pub fn is_certified_finite(&self) -> bool {
        !self.diverged_at_scale && self.tail_bound.is_some() && self.value.is_finite()
    }
}

/// Evaluates `Σ_{n=start}^{J}` (or `max`) of `e^{term(n)}` and certifies the
/// tail from `bound`, which must dominate `term` for every `n > J`.
///
/// `available` is the largest index at which `term` and `bound` may be
/// evaluated (tables); the tail is unavailable when `[J+1, 2J+2]` exceeds it.
pub(crate) fn evaluate(
    term: &dyn Fn(usize) -> f64,
    bound: &dyn Fn(usize) -> f64,
    start: usize,
    truncation: usize,
    available: usize,
    reduce: Reduce,
) -> SeminormResult {
    let j = truncation;
    let start = start.max(1);
    let value = reduce_range(term, start, j, reduce);
    let mut result = SeminormResult { value, truncation: j, tail_bound: None, diverged_at_scale: false };
    if j == 0 || 2 * j + 2 > available {
        return result;
    }
    if diverges(term, value, j, reduce) {
        result.diverged_at_scale = true;
        return result;
    }
    result.tail_bound = geometric_tail(bound, j, reduce);
    result
}

fn reduce_range(term: &dyn Fn(usize) -> f64, lo: usize, hi: usize, reduce: Reduce) -> LogValue {
    match reduce {
        Reduce::Sum => (lo..=hi).map(term).collect::<LogSum>().value(),
        Reduce::Sup => LogValue::from_ln((lo..=hi).map(term).fold(f64::NEG_INFINITY, f64::max)),
    }
}

/// Terms nondecreasing on `[J, 2J]` and the partial reduction moved by more
/// than [`DIVERGENCE_TOL`] between `J` and `2J`.
fn diverges(term: &dyn Fn(usize) -> f64, at_j: LogValue, j: usize, reduce: Reduce) -> bool {
    let mut prev = term(j);
    let mut extra = Vec::with_capacity(j);
    for n in j + 1..=2 * j {
        let t = term(n);
        if t < prev {
            return false;
        }
        extra.push(t);
        prev = t;
    }
    let tail = match reduce {
        Reduce::Sum => extra.into_iter().collect::<LogSum>().value(),
        Reduce::Sup => LogValue::from_ln(extra.into_iter().fold(f64::NEG_INFINITY, f64::max)),
    };
    let at_2j = match reduce {
        Reduce::Sum => at_j.add(tail),
        Reduce::Sup => at_j.max(tail),
    };
    if at_2j.is_zero() {
        return false;
    }
    at_2j.ln() - at_j.ln() > DIVERGENCE_TOL || !at_j.is_finite()
}

/// Ratio-test tail: with `h = bound` and decrements `d(n) = h(n) − h(n+1)` on
/// `[J+1, 2J+1]`, require `c = min d > 0` and decrements that do not shrink
/// from the first half of the window to the second. The sum tail is then at
/// most `e^{h(J+1)} / (1 − e^{−c})`, the sup tail `e^{h(J+1)}`.
fn geometric_tail(bound: &dyn Fn(usize) -> f64, j: usize, reduce: Reduce) -> Option<LogValue> {
    let h: Vec<f64> = (j + 1..=2 * j + 2).map(bound).collect();
    if h.iter().all(|&v| v == f64::NEG_INFINITY) {
        return Some(LogValue::ZERO);
    }
    if h.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let d: Vec<f64> = h.windows(2).map(|w| w[0] - w[1]).collect();
    let half = d.len() / 2;
    let min_of = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let c = min_of(&d);
    if !(c > 0.0) {
        return None;
    }
    if half > 0 {
        let (a, b) = (min_of(&d[..half]), min_of(&d[half..]));
        if b < a - (1e-9 * a.abs() + 1e-12) {
            return None;
        }
    }
    let head = h[0];
    match reduce {
        Reduce::Sum => Some(LogValue::from_ln(head - (-(-c).exp_m1()).ln())),
        Reduce::Sup => Some(LogValue::from_ln(head)),
    }
}

/// Exact reduction of finitely many log-terms.
pub(crate) fn exact(terms: impl Iterator<Item = f64>, truncation: usize, reduce: Reduce) -> SeminormResult {
    let value = match reduce {
        Reduce::Sum => terms.collect::<LogSum>().value(),
        Reduce::Sup => LogValue::from_ln(terms.fold(f64::NEG_INFINITY, f64::max)),
    };
    SeminormResult::exact(value, truncation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_tail_is_sound() {
        // Σ_{n≥1} e^{-n} = 1/(e-1)
        let t = |n: usize| -(n as f64);
        let r = evaluate(&t, &t, 1, 10, usize::MAX, Reduce::Sum);
        let exact = 1.0 / (1f64.exp() - 1.0);
        assert!(r.value.exp() <= exact);
        assert!(r.upper(Reduce::Sum).exp() >= exact * (1.0 - 1e-15));
        assert!(r.upper(Reduce::Sum).exp() - exact < 1e-4);
    }

    #[test]
    fn increasing_terms_diverge() {
        let t = |n: usize| n as f64;
        let r = evaluate(&t, &t, 1, 8, usize::MAX, Reduce::Sum);
        assert!(r.diverged_at_scale);
        assert_eq!(r.upper(Reduce::Sum), LogValue::INFINITY);
    }

    #[test]
    fn power_decay_has_no_certified_tail() {
        let t = |n: usize| -2.0 * (n as f64).ln();
        let r = evaluate(&t, &t, 1, 64, usize::MAX, Reduce::Sum);
        assert!(!r.diverged_at_scale);
        assert!(r.tail_bound.is_none());
    }

    #[test]
    fn gaussian_tail_is_tiny() {
        let t = |n: usize| -((n * n) as f64) + n as f64;
        let r = evaluate(&t, &t, 1, 40, usize::MAX, Reduce::Sum);
        assert!(r.tail_bound.unwrap().ln() <= -1600.0 + 41.0);
    }

    #[test]
    fn table_limit_blocks_tail() {
        let t = |n: usize| -(n as f64);
        let r = evaluate(&t, &t, 1, 10, 15, Reduce::Sum);
        assert!(r.tail_bound.is_none() && !r.diverged_at_scale);
    }
}
