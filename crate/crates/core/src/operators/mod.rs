//! Hankel, lower Toeplitz and shift operators acting on sequence elements.
//!
//! Columns are the primary objects: `H_θ e_n = (θ_{n−1}, θ_n, …)` and
//! `T̂_θ e_n = (0, …, 0, θ_0, θ_1, …)` with `θ_0` in row `n`.

mod fast;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

pub use fast::{fast_apply, FAST_APPLY_THRESHOLD};

use crate::error::{SequenceError, SpaceError};
use crate::logval::{Coord, LogSum, LogValue, SignedSum};
use crate::spaces::{evaluate, Enveloped, FiniteSupport, KotheMatrix, Reduce, SequenceElement, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OperatorKind {
    Hankel,
    ToeplitzLower,
    BackwardShift,
    ForwardShift,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Hankel => "hankel",
            OperatorKind::ToeplitzLower => "toeplitz",
            OperatorKind::BackwardShift => "backward",
            OperatorKind::ForwardShift => "forward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ShiftKind {
    /// `B(x) = (x_2, x_3, …)`
    Backward,
    /// `F(x) = (0, x_1, x_2, …)`
    Forward,
}

impl FromStr for ShiftKind {
    type Err = SequenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "backward" | "b" => Ok(ShiftKind::Backward),
            "forward" | "f" => Ok(ShiftKind::Forward),
            _ => Err(SequenceError::Parse { input: s.into(), reason: "expected backward or forward".into() }),
        }
    }
}

impl fmt::Display for ShiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftKind::Backward => "backward",
            ShiftKind::Forward => "forward",
        })
    }
}

/// An operator together with its symbol (shifts carry none).
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    kind: OperatorKind,
    symbol: Option<Symbol>,
}

impl OperatorSpec {
    pub fn hankel(theta: Symbol) -> Self {
        OperatorSpec { kind: OperatorKind::Hankel, symbol: Some(theta) }
    }

    pub fn toeplitz(theta: Symbol) -> Self {
        OperatorSpec { kind: OperatorKind::ToeplitzLower, symbol: Some(theta) }
    }

    pub fn shift(kind: ShiftKind) -> Self {
        let kind = match kind {
            ShiftKind::Backward => OperatorKind::BackwardShift,
            ShiftKind::Forward => OperatorKind::ForwardShift,
        };
        OperatorSpec { kind, symbol: None }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        self.symbol.as_ref()
    }

    /// `T e_n`.
    pub fn column(&self, n: usize) -> SequenceElement {
        match (&self.kind, &self.symbol) {
            (OperatorKind::Hankel, Some(t)) => hankel_column(t, n),
            (OperatorKind::ToeplitzLower, Some(t)) => toeplitz_column(t, n),
            (OperatorKind::BackwardShift, _) => shift(ShiftKind::Backward, &unit(n)),
            (OperatorKind::ForwardShift, _) => shift(ShiftKind::Forward, &unit(n)),
            _ => unreachable!("symbol operators are built with a symbol"),
        }
    }

    /// Matrix entry `(T)_{i,j}` as a coordinate.
    fn entry(&self, i: usize, j: usize) -> Coord {
        match (&self.kind, &self.symbol) {
            (OperatorKind::Hankel, Some(t)) => t.get(i + j - 2),
            (OperatorKind::ToeplitzLower, Some(t)) if i >= j => t.get(i - j),
            (OperatorKind::BackwardShift, _) if j == i + 1 => Coord::from_f64(1.0),
            (OperatorKind::ForwardShift, _) if i == j + 1 => Coord::from_f64(1.0),
            _ => Coord::ZERO,
        }
    }

    /// Canonical text used in input digests.
    pub fn describe(&self) -> String {
        match &self.symbol {
            Some(t) => format!("{}[{}]", self.kind.name(), t.describe()),
            None => self.kind.name().to_string(),
        }
    }
}

fn unit(n: usize) -> SequenceElement {
    SequenceElement::Finite(FiniteSupport::new(vec![(n, 1.0)]).expect("n >= 1"))
}

/// Re-indexes an element: coordinate `i` of the result is `x_{map(i)}`, or 0
/// when `map(i)` is `None`.
fn reindex(x: &SequenceElement, label: String, map: impl Fn(usize) -> Option<usize> + Send + Sync + Clone + 'static, inverse: impl Fn(usize) -> Option<usize>) -> SequenceElement {
    match x {
        SequenceElement::Finite(f) => {
            let entries = f.entries().iter().filter_map(|&(p, v)| inverse(p).map(|i| (i, v))).collect();
            SequenceElement::Finite(FiniteSupport::new(entries).expect("reindexing preserves order"))
        }
        SequenceElement::Enveloped(e) => {
            let (ec, eb) = (e.clone(), e.clone());
            let (mc, mb) = (map.clone(), map);
            SequenceElement::Enveloped(Enveloped::new_unchecked(
                label,
                Arc::new(move |i| mc(i).map_or(Coord::ZERO, |p| ec.coord(p))),
                Arc::new(move |i| mb(i).map_or(f64::NEG_INFINITY, |p| eb.bound_at(p))),
                1,
            ))
        }
    }
}

fn label_of(x: &SequenceElement) -> String {
    match x {
        SequenceElement::Enveloped(e) => e.label().to_string(),
        SequenceElement::Finite(_) => String::new(),
    }
}

/// `H_θ e_n`: coordinate `i` is `θ_{i+n−2}`.
pub fn hankel_column(theta: &Symbol, n: usize) -> SequenceElement {
    assert!(n >= 1, "columns are indexed from 1");
    let x = theta.as_element();
    reindex(x, format!("H[{}]e{n}", label_of(x)), move |i| Some(i + n - 1), move |p| (p >= n).then(|| p + 1 - n))
}

/// `T̂_θ e_n`: coordinate `i` is `θ_{i−n}` for `i ≥ n`, else 0.
pub fn toeplitz_column(theta: &Symbol, n: usize) -> SequenceElement {
    assert!(n >= 1, "columns are indexed from 1");
    let x = theta.as_element();
    reindex(x, format!("T[{}]e{n}", label_of(x)), move |i| (i >= n).then(|| i + 1 - n), move |p| Some(p + n - 1))
}

/// One backward or forward shift.
pub fn shift(kind: ShiftKind, x: &SequenceElement) -> SequenceElement {
    shift_pow(kind, x, 1)
}

/// `B^p x` or `F^p x`.
pub fn shift_pow(kind: ShiftKind, x: &SequenceElement, p: usize) -> SequenceElement {
    let label = format!("{kind}^{p}[{}]", label_of(x));
    match kind {
        ShiftKind::Backward => reindex(x, label, move |i| Some(i + p), move |q| (q > p).then(|| q - p)),
        ShiftKind::Forward => reindex(x, label, move |i| (i > p).then(|| i - p), move |q| Some(q + p)),
    }
}

/// What is known about the part of `Tx` that [`apply`] did not compute.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Residual {
    /// All rows beyond `R` vanish and no column was dropped.
    Exact,
    /// `(k, bound)` on the codomain seminorm of the omitted rows; `None`
    /// where no tail could be certified.
    Bounds(Vec<(usize, Option<LogValue>)>),
    /// The input or symbol is infinite and no bound was requested.
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApplyResult {
    /// Rows `1..=R` in the log domain.
    pub rows: Vec<Coord>,
    /// Rows `1..=R` as floats; exact sums for finitely supported inputs.
    pub values: Vec<f64>,
    pub column_truncation: usize,
    pub row_truncation: usize,
    pub residual: Residual,
}

impl ApplyResult {
    pub fn coordinates(&self) -> SequenceElement {
        SequenceElement::from_dense(&self.values)
    }

    /// `row,value` lines after a header.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", "value"]).expect("in-memory csv");
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([(i + 1).to_string(), format!("{v:?}")]).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }
}

fn check_apply(x: &SequenceElement, j: usize, r: usize) -> Result<(), SpaceError> {
    if r == 0 || j == 0 {
        return Err(SpaceError::InvalidBounds("row and column truncations must be >= 1".into()));
    }
    if let SequenceElement::Finite(f) = x {
        if f.max_index() > j {
            return Err(SpaceError::TruncationTooSmall { support: f.max_index(), truncation: j });
        }
    }
    Ok(())
}

/// Largest row index that can be nonzero in `T x` (None when unbounded).
fn output_support(op: &OperatorSpec, x: &SequenceElement) -> Option<usize> {
    let xs = x.as_finite()?.max_index();
    let ts = match op.symbol() {
        Some(t) => t.as_element().as_finite()?.max_index(),
        None => 0,
    };
    if xs == 0 || (op.symbol().is_some() && ts == 0) {
        return Some(0);
    }
    Some(match op.kind() {
        OperatorKind::Hankel => ts,
        OperatorKind::ToeplitzLower => xs + ts - 1,
        OperatorKind::BackwardShift => xs - 1,
        OperatorKind::ForwardShift => xs + 1,
    })
}

/// Rows `1..=R` of `Σ_{n ≤ J} x_n T e_n`.
pub fn apply(op: &OperatorSpec, x: &SequenceElement, j: usize, r: usize) -> Result<ApplyResult, SpaceError> {
    check_apply(x, j, r)?;
    let finite_symbol = op.symbol().map_or(true, |t| t.as_element().as_finite().is_some());
    let (rows, values) = match (x, finite_symbol) {
        (SequenceElement::Finite(f), true) => {
            let dense_len = r + f.max_index();
            let theta: Vec<f64> = match op.symbol() {
                Some(t) => (0..dense_len).map(|q| t.value(q)).collect(),
                None => Vec::new(),
            };
            let values: Vec<f64> = (1..=r)
                .map(|i| {
                    f.entries()
                        .iter()
                        .map(|&(n, v)| {
                            let e = match op.kind() {
                                OperatorKind::Hankel => theta[i + n - 2],
                                OperatorKind::ToeplitzLower if i >= n => theta[i - n],
                                OperatorKind::BackwardShift if n == i + 1 => 1.0,
                                OperatorKind::ForwardShift if i == n + 1 => 1.0,
                                _ => 0.0,
                            };
                            v * e
                        })
                        .sum()
                })
                .collect();
            (values.iter().map(|&v| Coord::from_f64(v)).collect::<Vec<_>>(), values)
        }
        _ => {
            let support: Vec<(usize, Coord)> = match x {
                SequenceElement::Finite(f) => f.entries().iter().map(|&(n, v)| (n, Coord::from_f64(v))).collect(),
                SequenceElement::Enveloped(e) => (1..=j).map(|n| (n, e.coord(n))).filter(|c| !c.1.is_zero()).collect(),
            };
            let rows: Vec<Coord> = (1..=r)
                .map(|i| {
                    let mut s = SignedSum::new();
                    for &(n, c) in &support {
                        s.push(c.mul(op.entry(i, n)));
                    }
                    s.value()
                })
                .collect();
            let values = rows.iter().map(|c| c.to_f64()).collect();
            (rows, values)
        }
    };
    let residual = match output_support(op, x) {
        Some(s) if s <= r => Residual::Exact,
        _ => Residual::Truncated,
    };
    Ok(ApplyResult { rows, values, column_truncation: j, row_truncation: r, residual })
}

/// [`apply`] plus per-grade bounds `Σ_n |x_n| ‖(T e_n)|_{i>R}‖_k` on the
/// omitted rows, for finitely supported `x`.
pub fn apply_with_residual(
    op: &OperatorSpec,
    x: &SequenceElement,
    j: usize,
    r: usize,
    codomain: &KotheMatrix,
    grades: &[usize],
) -> Result<ApplyResult, SpaceError> {
    let mut out = apply(op, x, j, r)?;
    if out.residual == Residual::Exact {
        return Ok(out);
    }
    let Some(f) = x.as_finite() else {
        return Ok(out);
    };
    let mut bounds = Vec::with_capacity(grades.len());
    for &k in grades {
        codomain.check_range(2 * r + 2, k)?;
        let mut acc = LogSum::new();
        let mut ok = true;
        for &(n, v) in f.entries() {
            let col = op.column(n);
            let lw = |i: usize| codomain.lw(i, k);
            let term = |i: usize| crate::logval::ln_add(col.coord(i).ln_abs(), lw(i));
            let bound = |i: usize| match &col {
                SequenceElement::Enveloped(e) => crate::logval::ln_add(e.bound_at(i), lw(i)),
                SequenceElement::Finite(_) => term(i),
            };
            let tail = match &col {
                SequenceElement::Finite(c) if c.max_index() <= r => Some(LogValue::ZERO),
                SequenceElement::Finite(c) => Some(
                    c.entries()
                        .iter()
                        .filter(|e| e.0 > r)
                        .map(|&(i, w)| crate::logval::ln_add(w.abs().ln(), lw(i)))
                        .collect::<LogSum>()
                        .value(),
                ),
                SequenceElement::Enveloped(_) => {
                    let s = evaluate(&term, &bound, r + 1, 2 * r, codomain.rows(), Reduce::Sum);
                    s.tail_bound.filter(|_| !s.diverged_at_scale).map(|t| s.value.add(t))
                }
            };
            match tail {
                Some(t) => acc.push(crate::logval::ln_add(v.abs().ln(), t.ln())),
                None => ok = false,
            }
        }
        bounds.push((k, ok.then(|| acc.value())));
    }
    out.residual = Residual::Bounds(bounds);
    Ok(out)
}

/// Max absolute coordinate discrepancy of the two shift identities on rows
/// `1..=depth`: `F^p θ` vs `T̂_θ e_{p+1}` and `B^p θ` vs `H_θ e_{p+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftIdentityReport {
    pub power: usize,
    pub depth: usize,
    pub forward_discrepancy: f64,
    pub backward_discrepancy: f64,
}

pub fn iterated_shift_vs_column(theta: &Symbol, p: usize, depth: usize) -> ShiftIdentityReport {
    let base = theta.as_element();
    let (mut fw, mut bw) = (base.clone(), base.clone());
    for _ in 0..p {
        fw = shift(ShiftKind::Forward, &fw);
        bw = shift(ShiftKind::Backward, &bw);
    }
    let tc = toeplitz_column(theta, p + 1);
    let hc = hankel_column(theta, p + 1);
    let gap = |a: &SequenceElement, b: &SequenceElement| (1..=depth).map(|i| (a.value(i) - b.value(i)).abs()).fold(0.0, f64::max);
    ShiftIdentityReport { power: p, depth, forward_discrepancy: gap(&fw, &tc), backward_discrepancy: gap(&bw, &hc) }
}

/// `(1/n) Σ_{m=1}^{n} S^m θ` through the column identities: the Toeplitz
/// (forward) or Hankel (backward) operator of `θ` applied to
/// `(1/n) Σ_{m=1}^{n} e_{m+1}`.
pub fn cesaro_mean(kind: ShiftKind, theta: &Symbol, n: usize) -> SequenceElement {
    assert!(n >= 1, "Cesàro means start at n = 1");
    let ln_n = (n as f64).ln();
    let column = move |t: &Symbol, c: usize| match kind {
        ShiftKind::Forward => toeplitz_column(t, c),
        ShiftKind::Backward => hankel_column(t, c),
    };
    if let Some(f) = theta.as_element().as_finite() {
        let len = f.max_index() + n + 1;
        let mut acc = vec![0.0; len];
        for m in 1..=n {
            let col = column(theta, m + 1);
            for (i, a) in acc.iter_mut().enumerate() {
                *a += col.value(i + 1);
            }
        }
        let values: Vec<f64> = acc.into_iter().map(|a| a / n as f64).collect();
        return SequenceElement::from_dense(&values);
    }
    let cols: Arc<Vec<SequenceElement>> = Arc::new((1..=n).map(|m| column(theta, m + 1)).collect());
    let (cc, cb) = (cols.clone(), cols);
    SequenceElement::Enveloped(Enveloped::new_unchecked(
        format!("cesaro[{kind},{n},{}]", theta.describe()),
        Arc::new(move |i| {
            let mut s = SignedSum::new();
            for c in cc.iter() {
                s.push(c.coord(i));
            }
            s.value().scale_ln(-ln_n)
        }),
        Arc::new(move |i| {
            cb.iter()
                .map(|c| match c {
                    SequenceElement::Enveloped(e) => e.bound_at(i),
                    SequenceElement::Finite(_) => c.coord(i).ln_abs(),
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }),
        1,
    ))
}

/// Cesàro mean by literal iteration of the shift on a dense window, rows
/// `1..=depth`.
pub fn cesaro_mean_direct(kind: ShiftKind, theta: &Symbol, n: usize, depth: usize) -> Vec<Coord> {
    assert!(n >= 1, "Cesàro means start at n = 1");
    let len = depth + n + 1;
    let mut cur: Vec<Coord> = (1..=len).map(|i| theta.as_element().coord(i)).collect();
    let mut sums = vec![SignedSum::new(); depth];
    for _ in 0..n {
        match kind {
            ShiftKind::Backward => {
                cur.remove(0);
                cur.push(Coord::ZERO);
            }
            ShiftKind::Forward => {
                cur.pop();
                cur.insert(0, Coord::ZERO);
            }
        }
        for (s, c) in sums.iter_mut().zip(&cur) {
            s.push(*c);
        }
    }
    let ln_n = (n as f64).ln();
    sums.iter().map(|s| s.value().scale_ln(-ln_n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::basis_element;

    fn dense(x: &SequenceElement, len: usize) -> Vec<f64> {
        (1..=len).map(|i| x.value(i)).collect()
    }

    #[test]
    fn delta_columns() {
        let delta = Symbol::finite(&[1.0]);
        assert_eq!(dense(&hankel_column(&delta, 1), 4), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(hankel_column(&delta, 2).is_zero());
        assert_eq!(dense(&toeplitz_column(&delta, 3), 4), vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn index_arithmetic_columns() {
        let t = Symbol::finite(&(0..20).map(|j| j as f64).collect::<Vec<_>>());
        assert_eq!(dense(&hankel_column(&t, 3), 4), vec![2.0, 3.0, 4.0, 5.0]);
        let t = Symbol::finite(&(0..20).map(|j| (j + 1) as f64).collect::<Vec<_>>());
        assert_eq!(dense(&toeplitz_column(&t, 2), 4), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn shifts() {
        let x = SequenceElement::from_dense(&[1.0, 2.0, 3.0]);
        assert_eq!(dense(&shift(ShiftKind::Backward, &x), 3), vec![2.0, 3.0, 0.0]);
        assert_eq!(dense(&shift(ShiftKind::Forward, &x), 4), vec![0.0, 1.0, 2.0, 3.0]);
        let e1 = basis_element(1).unwrap();
        assert!(shift(ShiftKind::Forward, &shift(ShiftKind::Backward, &e1)).is_zero());
    }

    #[test]
    fn apply_small_cases() {
        let x = SequenceElement::from_dense(&[1.0, 1.0]);
        let op = OperatorSpec::hankel(Symbol::finite(&[1.0, 1.0, 1.0, 1.0]));
        assert_eq!(apply(&op, &x, 2, 4).unwrap().values, vec![2.0, 2.0, 2.0, 1.0]);
        let op = OperatorSpec::hankel(Symbol::finite(&[1.0, 1.0, 1.0]));
        assert_eq!(apply(&op, &x, 2, 4).unwrap().values, vec![2.0, 2.0, 1.0, 0.0]);
        let f = apply(&OperatorSpec::shift(ShiftKind::Forward), &SequenceElement::from_dense(&[4.0, 5.0, 6.0]), 3, 5).unwrap();
        assert_eq!(f.values, vec![0.0, 4.0, 5.0, 6.0, 0.0]);
        assert_eq!(f.residual, Residual::Exact);
    }

    #[test]
    fn shift_identities() {
        let t = Symbol::finite(&[1.0, 2.0, 3.0]);
        let r = iterated_shift_vs_column(&t, 2, 10);
        assert_eq!((r.forward_discrepancy, r.backward_discrepancy), (0.0, 0.0));
        let b2 = shift_pow(ShiftKind::Backward, t.as_element(), 2);
        assert_eq!(dense(&b2, 3), vec![3.0, 0.0, 0.0]);
    }

    #[test]
    fn cesaro_forward_delta() {
        let delta = Symbol::finite(&[1.0]);
        assert_eq!(dense(&cesaro_mean(ShiftKind::Forward, &delta, 2), 4), vec![0.0, 0.5, 0.5, 0.0]);
        let direct = cesaro_mean_direct(ShiftKind::Forward, &delta, 2, 4);
        assert_eq!(direct.iter().map(|c| c.to_f64()).collect::<Vec<_>>(), vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn cesaro_paths_agree_on_infinite_symbol() {
        let t = Symbol::closed_form("e^-j", |j| -(j as f64)).unwrap();
        for kind in [ShiftKind::Backward, ShiftKind::Forward] {
            let id = cesaro_mean(kind, &t, 4);
            let direct = cesaro_mean_direct(kind, &t, 4, 30);
            for (i, d) in direct.iter().enumerate() {
                let a = id.coord(i + 1);
                if d.is_zero() {
                    assert!(a.is_zero());
                } else {
                    assert!((a.ln_abs() - d.ln_abs()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn residual_bounds_cover_omitted_rows() {
        let t = Symbol::closed_form("e^-j", |j| -(j as f64)).unwrap();
        let op = OperatorSpec::hankel(t);
        let x = SequenceElement::from_dense(&[1.0, -0.5]);
        let space = KotheMatrix::finite_type(crate::sequences::ExponentSequence::linear(1.0).unwrap());
        let r = apply_with_residual(&op, &x, 2, 10, &space, &[1, 2]).unwrap();
        match r.residual {
            Residual::Bounds(b) => {
                for (k, bound) in b {
                    let bound = bound.unwrap().exp();
                    let actual: f64 = (11..400)
                        .map(|i| ((-(i as f64 - 1.0)).exp() - 0.5 * (-(i as f64)).exp()).abs() * (-(i as f64) / k as f64).exp())
                        .sum();
                    assert!(actual <= bound * (1.0 + 1e-12), "k={k}: {actual} > {bound}");
                }
            }
            other => panic!("expected bounds, got {other:?}"),
        }
    }
}
