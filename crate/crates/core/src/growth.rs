//! Doubling-window heuristics shared by every at-scale verdict.
//!
//! A quantity indexed by `n ∈ [first, last]` is summarised by its prefix
//! suprema at the doubling checkpoints `first, 2·first, 4·first, …, last`.
//! All values are natural logarithms, so "grows by a factor ≥ 2" is an
//! additive step of at least `ln 2`.

use std::f64::consts::LN_2;

/// Relative tolerance used when locating the first index attaining the sup.
pub const ARGMAX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupVerdict {
    /// Flat across the last three doublings and attained in the first half.
    Bounded,
    /// Grew by a factor ≥ 2 at each of the last three doublings.
    Growing,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingProfile {
    pub first: usize,
    pub last: usize,
    /// `ln` of the supremum over the whole window.
    pub sup: f64,
    /// First index whose value is within [`ARGMAX_TOL`] of the sup.
    pub argmax: usize,
    /// `(checkpoint, ln prefix sup)` pairs.
    pub checkpoints: Vec<(usize, f64)>,
}

/// Log-domain growth from `a` to `b`, treating `-inf → -inf` as no growth.
pub fn log_step(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if a == f64::NEG_INFINITY || b == f64::INFINITY {
        f64::INFINITY
    } else if b == f64::NEG_INFINITY || a == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        b - a
    }
}

impl DoublingProfile {
    /// Builds the profile of `values[i]`, which belongs to index `first + i`.
    ///
    /// # Panics
    /// Panics on an empty slice.
    pub fn new(values: &[f64], first: usize) -> Self {
        assert!(!values.is_empty(), "doubling profile of an empty window");
        let first = first.max(1);
        let last = first + values.len() - 1;

        let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let argmax = if sup == f64::NEG_INFINITY {
            first
        } else {
            let tol = ARGMAX_TOL * sup.abs().max(1.0);
            let pos = values.iter().position(|&v| v >= sup - tol).unwrap_or(0);
            first + pos
        };

        let mut checkpoints = Vec::new();
        let mut running = f64::NEG_INFINITY;
        let mut next = first;
        for (i, &v) in values.iter().enumerate() {
            running = running.max(v);
            let n = first + i;
            if n == next || n == last {
                checkpoints.push((n, running));
                next = (2 * next).min(last);
                if next == n {
                    break;
                }
            }
        }

        DoublingProfile { first, last, sup, argmax, checkpoints }
    }

    fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.checkpoints.windows(2).map(|w| log_step(w[0].1, w[1].1))
    }

    /// The prefix sup grew by at least `ln 2` at each of the last three
    /// doublings.
    pub fn growing(&self) -> bool {
        let steps: Vec<f64> = self.steps().collect();
        steps.len() >= 3 && steps[steps.len() - 3..].iter().all(|&s| s >= LN_2)
    }

    /// The prefix sup grew by less than a factor 2 over the last three
    /// doublings combined.
    pub fn flat(&self) -> bool {
        let t = self.checkpoints.len() - 1;
        let s = t.saturating_sub(3);
        log_step(self.checkpoints[s].1, self.checkpoints[t].1) < LN_2
    }

    pub fn argmax_interior(&self) -> bool {
        self.argmax <= self.first + (self.last - self.first) / 2
    }

    /// Acceptance rule for `sup_n r_n < ∞`.
    pub fn verdict(&self) -> SupVerdict {
        if self.sup < f64::INFINITY && self.flat() && self.argmax_interior() {
            SupVerdict::Bounded
        } else if self.growing() {
            SupVerdict::Growing
        } else {
            SupVerdict::Undecided
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoints_double_up_to_last() {
        let v = vec![0.0; 10];
        let p = DoublingProfile::new(&v, 1);
        let idx: Vec<usize> = p.checkpoints.iter().map(|c| c.0).collect();
        assert_eq!(idx, vec![1, 2, 4, 8, 10]);
    }

    #[test]
    fn exponential_growth_is_growing() {
        let v: Vec<f64> = (1..=64).map(|n| n as f64).collect();
        let p = DoublingProfile::new(&v, 1);
        assert!(p.growing());
        assert_eq!(p.verdict(), SupVerdict::Growing);
    }

    #[test]
    fn decaying_is_bounded() {
        let v: Vec<f64> = (1..=512).map(|n| -(n as f64)).collect();
        let p = DoublingProfile::new(&v, 1);
        assert_eq!(p.argmax, 1);
        assert_eq!(p.verdict(), SupVerdict::Bounded);
    }

    #[test]
    fn constant_with_noise_has_first_argmax() {
        let v: Vec<f64> = (1..=512).map(|n| 0.5 + if n % 7 == 0 { 1e-15 } else { 0.0 }).collect();
        let p = DoublingProfile::new(&v, 1);
        assert_eq!(p.argmax, 1);
        assert_eq!(p.verdict(), SupVerdict::Bounded);
    }

    #[test]
    fn all_zero_is_bounded() {
        let v = vec![f64::NEG_INFINITY; 32];
        assert_eq!(DoublingProfile::new(&v, 1).verdict(), SupVerdict::Bounded);
    }

    #[test]
    fn slow_increase_to_limit_is_undecided() {
        // ln(n/(n+1)) increases to 0 with the sup at the boundary.
        let v: Vec<f64> = (1..=512).map(|n| (n as f64 / (n as f64 + 1.0)).ln()).collect();
        assert_eq!(DoublingProfile::new(&v, 1).verdict(), SupVerdict::Undecided);
    }
}
