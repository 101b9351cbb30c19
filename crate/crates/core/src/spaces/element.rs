//! Sequence elements `x = (x_n)_{n ≥ 1}` and symbol sequences `θ = (θ_j)_{j ≥ 0}`.
//!
//! Symbols are stored as elements under the single mapping `θ_j ↔ x_{j+1}`,
//! so the first Hankel column of `θ` is literally the element behind it.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SpaceError;
use crate::logval::Coord;

pub type CoordFn = Arc<dyn Fn(usize) -> Coord + Send + Sync>;
pub type EnvelopeFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Number of indices spot-checked against the envelope at construction.
pub const ENVELOPE_SPOT_CHECKS: usize = 100;
/// Width of the range `[N₀, N₀ + width]` the spot checks are drawn from.
pub const ENVELOPE_SPOT_RANGE: usize = 10_000;
const ENVELOPE_SEED: u64 = 0x6b6f_7468_655f_656e;

/// Finitely supported sequence with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteSupport {
    entries: Vec<(usize, f64)>,
}

impl FiniteSupport {
    /// Validates `entries`; zero values are dropped.
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self, SpaceError> {
        let mut prev = 0;
        for &(n, v) in &entries {
            if n <= prev || !v.is_finite() {
                return Err(SpaceError::BadSupport);
            }
            prev = n;
        }
        Ok(FiniteSupport { entries: entries.into_iter().filter(|e| e.1 != 0.0).collect() })
    }

    /// `values[i]` becomes coordinate `i + 1`.
    pub fn from_dense(values: &[f64]) -> Self {
        FiniteSupport {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i + 1, *v))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Largest index carrying a nonzero value (0 for the zero element).
    pub fn max_index(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0)
    }

    pub fn get(&self, n: usize) -> f64 {
        self.entries
            .binary_search_by_key(&n, |e| e.0)
            .map_or(0.0, |i| self.entries[i].1)
    }

    /// Dense coordinates `1..=len`.
    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(n, v) in &self.entries {
            if n <= len {
                out[n - 1] = v;
            }
        }
        out
    }
}

/// Infinite sequence given by a coordinate generator and a log-envelope
/// `g` with `|x_n| ≤ e^{g(n)}` for every `n ≥ start`.
#[derive(Clone)]
pub struct Enveloped {
    label: String,
    coord: CoordFn,
    envelope: EnvelopeFn,
    start: usize,
}

impl fmt::Debug for Enveloped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Enveloped({}, N0={})", self.label, self.start)
    }
}

impl Enveloped {
    /// Builds the element and spot-checks the envelope on a deterministic
    /// sample of indices from `[start, start + 10⁴]`.
    pub fn new(label: impl Into<String>, coord: CoordFn, envelope: EnvelopeFn, start: usize) -> Result<Self, SpaceError> {
        let e = Self::new_unchecked(label, coord, envelope, start);
        let mut rng = ChaCha8Rng::seed_from_u64(ENVELOPE_SEED);
        for _ in 0..ENVELOPE_SPOT_CHECKS {
            let n = rng.gen_range(e.start..=e.start + ENVELOPE_SPOT_RANGE);
            e.check_at(n)?;
        }
        Ok(e)
    }

    /// For elements derived from an already checked one (shifts, columns).
    pub(crate) fn new_unchecked(label: impl Into<String>, coord: CoordFn, envelope: EnvelopeFn, start: usize) -> Self {
        Enveloped { label: label.into(), coord, envelope, start: start.max(1) }
    }

    fn check_at(&self, n: usize) -> Result<(), SpaceError> {
        let log_abs = (self.coord)(n).ln_abs();
        let envelope = (self.envelope)(n);
        if log_abs > envelope + 1e-12 * envelope.abs().max(1.0) {
            return Err(SpaceError::EnvelopeViolated { index: n, log_abs, envelope });
        }
        Ok(())
    }

    pub fn coord(&self, n: usize) -> Coord {
        (self.coord)(n)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// A valid bound on `ln |x_n|` for every `n ≥ 1`: the envelope from
    /// `start` on, the exact magnitude before it.
    pub fn bound_at(&self, n: usize) -> f64 {
        if n >= self.start {
            (self.envelope)(n)
        } else {
            (self.coord)(n).ln_abs()
        }
    }
}

/// A coordinate vector in a Köthe space (1-based).
#[derive(Debug, Clone)]
pub enum SequenceElement {
    Finite(FiniteSupport),
    Enveloped(Enveloped),
}

impl SequenceElement {
    pub fn zero() -> Self {
        SequenceElement::Finite(FiniteSupport::default())
    }

    pub fn finite(entries: Vec<(usize, f64)>) -> Result<Self, SpaceError> {
        Ok(SequenceElement::Finite(FiniteSupport::new(entries)?))
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SequenceElement::Finite(FiniteSupport::from_dense(values))
    }

    /// Closed-form element `n ↦ sign · exp(ln_abs(n))` whose envelope is the
    /// exact magnitude.
    pub fn closed_form(label: impl Into<String>, negative: bool, ln_abs: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Result<Self, SpaceError> {
        let ln_abs = Arc::new(ln_abs);
        let env = ln_abs.clone();
        Ok(SequenceElement::Enveloped(Enveloped::new(
            label,
            Arc::new(move |n| Coord::from_ln(negative, ln_abs(n))),
            Arc::new(move |n| env(n)),
            1,
        )?))
    }

    /// Reads `index,value` rows (1-based; an optional header is skipped).
    pub fn from_csv(path: &Path) -> Result<Self, SpaceError> {
        let mut entries = read_pairs(path)?;
        entries.sort_by_key(|e| e.0);
        if entries.iter().any(|e| e.0 == 0) {
            return Err(SpaceError::BadSupport);
        }
        Self::finite(entries)
    }

    pub fn coord(&self, n: usize) -> Coord {
        match self {
            SequenceElement::Finite(f) => Coord::from_f64(f.get(n)),
            SequenceElement::Enveloped(e) => e.coord(n),
        }
    }

    /// `x_n` as a float; exact for finitely supported elements.
    pub fn value(&self, n: usize) -> f64 {
        match self {
            SequenceElement::Finite(f) => f.get(n),
            SequenceElement::Enveloped(e) => e.coord(n).to_f64(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSupport> {
        match self {
            SequenceElement::Finite(f) => Some(f),
            SequenceElement::Enveloped(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SequenceElement::Finite(f) if f.entries.is_empty())
    }

    /// Canonical text used in input digests.
    pub fn describe(&self) -> String {
        match self {
            SequenceElement::Finite(f) => {
                let parts: Vec<String> = f.entries.iter().map(|(n, v)| format!("{n}:{:016x}", v.to_bits())).collect();
                format!("finite[{}]", parts.join(","))
            }
            SequenceElement::Enveloped(e) => format!("enveloped[{};N0={}]", e.label, e.start),
        }
    }
}

pub(crate) fn read_pairs(path: &Path) -> Result<Vec<(usize, f64)>, SpaceError> {
    let bad = || SpaceError::BadSupport;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|_| bad())?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|_| bad())?;
        let (a, b) = (rec.get(0).unwrap_or(""), rec.get(1).unwrap_or(""));
        match (a.parse::<usize>(), b.parse::<f64>()) {
            (Ok(n), Ok(v)) => out.push((n, v)),
            _ if i == 0 => continue,
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

/// `e_n`: 1 in coordinate `n`, 0 elsewhere.
pub fn basis_element(n: usize) -> Result<SequenceElement, SpaceError> {
    if n == 0 {
        return Err(SpaceError::BadSupport);
    }
    SequenceElement::finite(vec![(n, 1.0)])
}

/// A symbol `θ = (θ_0, θ_1, …)`, stored as the element with `x_{j+1} = θ_j`.
#[derive(Debug, Clone)]
pub struct Symbol {
    elem: SequenceElement,
}

impl Symbol {
    pub fn from_element(elem: SequenceElement) -> Self {
        Symbol { elem }
    }

    /// `values[j] = θ_j`.
    pub fn finite(values: &[f64]) -> Self {
        Symbol { elem: SequenceElement::from_dense(values) }
    }

    /// `(j, θ_j)` pairs, strictly increasing in `j`.
    pub fn from_entries(entries: Vec<(usize, f64)>) -> Result<Self, SpaceError> {
        let shifted = entries.into_iter().map(|(j, v)| (j + 1, v)).collect();
        Ok(Symbol { elem: SequenceElement::finite(shifted)? })
    }

    /// Infinite symbol from generators in the 0-based index `j`; the envelope
    /// must hold for `j ≥ start_j`.
    pub fn enveloped(
        label: impl Into<String>,
        coord: impl Fn(usize) -> Coord + Send + Sync + 'static,
        envelope: impl Fn(usize) -> f64 + Send + Sync + 'static,
        start_j: usize,
    ) -> Result<Self, SpaceError> {
        let e = Enveloped::new(
            label,
            Arc::new(move |n: usize| coord(n - 1)),
            Arc::new(move |n: usize| envelope(n - 1)),
            start_j + 1,
        )?;
        Ok(Symbol { elem: SequenceElement::Enveloped(e) })
    }

    /// Positive closed-form symbol `θ_j = exp(ln_abs(j))`.
    pub fn closed_form(label: impl Into<String>, ln_abs: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Result<Self, SpaceError> {
        let ln_abs = Arc::new(ln_abs);
        let env = ln_abs.clone();
        Self::enveloped(label, move |j| Coord::from_ln(false, ln_abs(j)), move |j| env(j), 0)
    }

    /// Reads `j,value` rows with 0-based `j`.
    pub fn from_csv(path: &Path) -> Result<Self, SpaceError> {
        let mut entries = read_pairs(path)?;
        entries.sort_by_key(|e| e.0);
        Self::from_entries(entries)
    }

    /// `θ_j`.
    pub fn get(&self, j: usize) -> Coord {
        self.elem.coord(j + 1)
    }

    /// `θ_j` as a float; exact for finitely supported symbols.
    pub fn value(&self, j: usize) -> f64 {
        self.elem.value(j + 1)
    }

    /// The element `(θ_0, θ_1, …)` as 1-based coordinates.
    pub fn as_element(&self) -> &SequenceElement {
        &self.elem
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    pub fn describe(&self) -> String {
        format!("symbol:{}", self.elem.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_support_validation() {
        assert!(FiniteSupport::new(vec![(2, 1.0), (1, 1.0)]).is_err());
        assert!(FiniteSupport::new(vec![(0, 1.0)]).is_err());
        assert!(FiniteSupport::new(vec![(1, 1.0), (1, 2.0)]).is_err());
        let f = FiniteSupport::new(vec![(1, 0.0), (3, 2.0)]).unwrap();
        assert_eq!(f.entries(), &[(3, 2.0)]);
        assert_eq!(f.get(3), 2.0);
        assert_eq!(f.get(2), 0.0);
    }

    #[test]
    fn basis_elements() {
        let e1 = basis_element(1).unwrap();
        assert_eq!(e1.value(1), 1.0);
        assert_eq!(e1.value(2), 0.0);
        let e3 = basis_element(3).unwrap();
        assert_eq!((e3.value(1), e3.value(2), e3.value(3), e3.value(4)), (0.0, 0.0, 1.0, 0.0));
        assert!(basis_element(0).is_err());
    }

    #[test]
    fn symbol_index_mapping() {
        let t = Symbol::finite(&[5.0, 6.0, 7.0]);
        assert_eq!(t.value(0), 5.0);
        assert_eq!(t.as_element().value(1), 5.0);
        assert_eq!(t.value(2), 7.0);
        let g = Symbol::closed_form("gauss", |j| -(((j + 1) * (j + 1)) as f64)).unwrap();
        assert_eq!(g.get(0).ln_abs(), -1.0);
        assert_eq!(g.as_element().coord(3).ln_abs(), -9.0);
    }

    #[test]
    fn envelope_violation_detected() {
        let bad = Enveloped::new(
            "bad",
            Arc::new(|n| Coord::from_ln(false, n as f64)),
            Arc::new(|n| n as f64 - if n > 5000 { 1.0 } else { 0.0 }),
            1,
        );
        assert!(matches!(bad, Err(SpaceError::EnvelopeViolated { .. })));
    }

    #[test]
    fn csv_elements() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        std::fs::write(&p, "index,value\n3,0.5\n1,-2\n").unwrap();
        let x = SequenceElement::from_csv(&p).unwrap();
        assert_eq!(x.value(1), -2.0);
        assert_eq!(x.value(3), 0.5);
        let t = Symbol::from_csv(&p).unwrap();
        assert_eq!(t.value(1), -2.0);
    }
}
