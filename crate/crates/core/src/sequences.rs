//! Exponent sequences and the scalar inequalities between them.
//!
//! An exponent sequence `α = (α_n)_{n ≥ 1}` is nonnegative, nondecreasing and
//! divergent. Every check here is evaluated on a finite [`IndexWindow`] and
//! reports an `…AtScale` verdict; nothing is claimed beyond the window.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::SequenceError;
use crate::growth::DoublingProfile;

/// How a [`ExponentSequence::Table`] is continued past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableExtension {
    None,
    /// Repeat the last ratio `α_len / α_{len-1}`.
    LastRatio,
    /// Repeat the last difference `α_len - α_{len-1}`.
    LastDifference,
}

/// A closed-form exponent sequence, or an explicit table.
#[derive(Clone)]
pub enum ExponentSequence {
    /// `α_n = c·n`
    Linear { c: f64 },
    /// `α_n = n^p`
    Power { p: f64 },
    /// `α_n = ln(n + 1)`
    Log,
    /// `α_n = values[n - 1]`; divergence is asserted, never checked.
    Table { values: Arc<[f64]>, extension: TableExtension },
    /// Caller-supplied closed form; must be nonnegative and nondecreasing.
    Custom { name: String, f: Arc<dyn Fn(usize) -> f64 + Send + Sync> },
}

impl fmt::Debug for ExponentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExponentSequence({self})")
    }
}

impl fmt::Display for ExponentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentSequence::Linear { c } => write!(f, "linear:c={c}"),
            ExponentSequence::Power { p } => write!(f, "power:p={p}"),
            ExponentSequence::Log => write!(f, "log"),
            ExponentSequence::Table { values, extension } => {
                let mut h = Sha256::new();
                for v in values.iter() {
                    h.update(v.to_bits().to_le_bytes());
                }
                let digest = hex::encode(&h.finalize()[..8]);
                write!(f, "table:len={},sha256={digest},ext={extension:?}", values.len())
            }
            ExponentSequence::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

impl ExponentSequence {
    pub fn linear(c: f64) -> Result<Self, SequenceError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(SequenceError::InvalidParameter(format!("linear family needs c > 0, got {c}")));
        }
        Ok(ExponentSequence::Linear { c })
    }

    pub fn power(p: f64) -> Result<Self, SequenceError> {
        if !(p.is_finite() && p > 0.0) {
            return Err(SequenceError::InvalidParameter(format!("power family needs p > 0, got {p}")));
        }
        Ok(ExponentSequence::Power { p })
    }

    /// A table of `α_1, α_2, …`; rejects negative or decreasing entries.
    pub fn table(values: Vec<f64>, extension: TableExtension) -> Result<Self, SequenceError> {
        if values.is_empty() {
            return Err(SequenceError::InvalidParameter("empty table".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 || (i > 0 && v < values[i - 1]) {
                return Err(SequenceError::NotMonotone(i + 1));
            }
        }
        if extension == TableExtension::LastRatio && values.len() >= 2 && values[values.len() - 2] == 0.0 {
            return Err(SequenceError::InvalidParameter("last-ratio extension needs a positive penultimate entry".into()));
        }
        if extension != TableExtension::None && values.len() < 2 {
            return Err(SequenceError::InvalidParameter("extension rules need at least two entries".into()));
        }
        Ok(ExponentSequence::Table { values: values.into(), extension })
    }

    /// Reads a table with one value per line (line `n` is `α_n`).
    pub fn table_from_csv(path: &Path, extension: TableExtension) -> Result<Self, SequenceError> {
        let parse_err = |reason: String| SequenceError::Parse { input: path.display().to_string(), reason };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| parse_err(e.to_string()))?;
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| parse_err(e.to_string()))?;
            let field = record.get(0).unwrap_or("");
            if field.is_empty() {
                continue;
            }
            values.push(field.parse::<f64>().map_err(|e| parse_err(format!("{field:?}: {e}")))?);
        }
        Self::table(values, extension)
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        ExponentSequence::Custom { name: name.into(), f: Arc::new(f) }
    }

    /// `α_n` for `n ≥ 1`.
    pub fn eval(&self, n: usize) -> Result<f64, SequenceError> {
        if n == 0 {
            return Err(SequenceError::ZeroIndex(n));
        }
        let x = n as f64;
        Ok(match self {
            ExponentSequence::Linear { c } => c * x,
            ExponentSequence::Power { p } => x.powf(*p),
            ExponentSequence::Log => (x + 1.0).ln(),
            ExponentSequence::Custom { f, .. } => f(n),
            ExponentSequence::Table { values, extension } => {
                let len = values.len();
                if n <= len {
                    values[n - 1]
                } else {
                    let last = values[len - 1];
                    let steps = (n - len) as f64;
                    match extension {
                        TableExtension::None => return Err(SequenceError::IndexOutOfRange { index: n, len }),
                        TableExtension::LastRatio => last * (last / values[len - 2]).powf(steps),
                        TableExtension::LastDifference => last + (last - values[len - 2]) * steps,
                    }
                }
            }
        })
    }

    /// Largest evaluable index (`usize::MAX` unless a table has no extension).
    pub fn evaluable_up_to(&self) -> usize {
        match self {
            ExponentSequence::Table { values, extension: TableExtension::None } => values.len(),
            _ => usize::MAX,
        }
    }

    /// Evaluates `α_n` for every `n` in `[lo, hi]`.
    pub fn eval_range(&self, lo: usize, hi: usize) -> Result<Vec<f64>, SequenceError> {
        (lo..=hi).map(|n| self.eval(n)).collect()
    }
}

impl FromStr for ExponentSequence {
    type Err = SequenceError;

    /// Parses `linear:c=1`, `linear`, `power:p=0.5`, `log` or `table:@file.csv`
    /// (optionally `table:@file.csv:ext=ratio|diff`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| SequenceError::Parse { input: s.to_string(), reason: reason.to_string() };
        let (family, rest) = match s.split_once(':') {
            Some((f, r)) => (f.trim(), Some(r.trim())),
            None => (s.trim(), None),
        };
        let param = |key: &str, default: Option<f64>| -> Result<f64, SequenceError> {
            match rest {
                None | Some("") => default.ok_or_else(|| err(&format!("missing parameter {key}="))),
                Some(r) => {
                    let (k, v) = r.split_once('=').ok_or_else(|| err("expected key=value"))?;
                    if k.trim() != key {
                        return Err(err(&format!("unknown parameter {k}")));
                    }
                    v.trim().parse::<f64>().map_err(|_| err("parameter is not a number"))
                }
            }
        };
        match family {
            "linear" => Self::linear(param("c", Some(1.0))?),
            "power" => Self::power(param("p", None)?),
            "log" if rest.is_none() => Ok(ExponentSequence::Log),
            "table" => {
                let r = rest.ok_or_else(|| err("table needs @path"))?;
                let path = r.strip_prefix('@').ok_or_else(|| err("table needs @path"))?;
                let (path, ext) = match path.rsplit_once(":ext=") {
                    Some((p, "ratio")) => (p, TableExtension::LastRatio),
                    Some((p, "diff")) => (p, TableExtension::LastDifference),
                    Some((_, other)) => return Err(err(&format!("unknown extension {other}"))),
                    None => (path, TableExtension::None),
                };
                Self::table_from_csv(Path::new(path), ext)
            }
            _ => Err(err("unknown exponent family")),
        }
    }
}

/// Inclusive index range `[lo, hi]` with `lo ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub lo: usize,
    pub hi: usize,
}

impl IndexWindow {
    pub fn new(lo: usize, hi: usize) -> Result<Self, SequenceError> {
        if lo == 0 {
            return Err(SequenceError::InvalidWindow { lo, hi, reason: "indices start at 1" });
        }
        if hi < lo {
            return Err(SequenceError::InvalidWindow { lo, hi, reason: "empty window" });
        }
        Ok(IndexWindow { lo, hi })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FromStr for IndexWindow {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| SequenceError::Parse { input: s.to_string(), reason: reason.to_string() };
        let (a, b) = s.split_once(':').ok_or_else(|| err("expected lo:hi"))?;
        let lo = a.trim().parse().map_err(|_| err("bad lower bound"))?;
        let hi = b.trim().parse().map_err(|_| err("bad upper bound"))?;
        IndexWindow::new(lo, hi)
    }
}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityVerdict {
    StableAtScale,
    RefutedAtScale,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Max of the tested ratio over the window.
    pub window_sup: f64,
    /// Index attaining `window_sup`.
    pub argmax: usize,
    /// Certified constant `min(2·sup, sup + 1)`.
    pub m_const: f64,
    pub verdict: StabilityVerdict,
    /// Indices `n` at which the ratio was evaluated (after zero-skipping).
    pub window: IndexWindow,
}

fn ratio_report(ratios_ln: Vec<f64>, window: IndexWindow) -> StabilityReport {
    let profile = DoublingProfile::new(&ratios_ln, window.lo);
    let window_sup = profile.sup.exp();
    let verdict = if profile.growing() {
        StabilityVerdict::RefutedAtScale
    } else if profile.flat() {
        StabilityVerdict::StableAtScale
    } else {
        StabilityVerdict::Inconclusive
    };
    StabilityReport {
        window_sup,
        argmax: profile.argmax,
        m_const: (2.0 * window_sup).min(window_sup + 1.0),
        verdict,
        window,
    }
}

/// Skips leading zeros of `α` on `[lo, hi]`; returns the first positive index.
fn first_positive(alpha: &ExponentSequence, lo: usize, hi: usize) -> Result<usize, SequenceError> {
    for n in lo..=hi {
        if alpha.eval(n)? > 0.0 {
            return Ok(n);
        }
    }
    Err(SequenceError::EmptyWindow)
}

fn check_ratio_window(window: IndexWindow) -> Result<(), SequenceError> {
    if window.hi < 2 * window.lo {
        return Err(SequenceError::InvalidWindow {
            lo: window.lo,
            hi: window.hi,
            reason: "upper bound must be at least twice the lower bound",
        });
    }
    Ok(())
}

/// Stability `sup α_{2n}/α_n < ∞`, tested for `n ∈ [lo, hi/2]` so that every
/// evaluated index stays inside the window.
pub fn check_stability(alpha: &ExponentSequence, window: IndexWindow) -> Result<StabilityReport, SequenceError> {
    check_ratio_window(window)?;
    let top = window.hi / 2;
    let start = first_positive(alpha, window.lo, top)?;
    let ratios = (start..=top)
        .map(|n| Ok((alpha.eval(2 * n)? / alpha.eval(n)?).ln()))
        .collect::<Result<Vec<_>, SequenceError>>()?;
    Ok(ratio_report(ratios, IndexWindow { lo: start, hi: top }))
}

/// Weak stability `limsup α_{n+1}/α_n < ∞`, tested for `n ∈ [lo, hi - 1]`.
pub fn check_weak_stability(alpha: &ExponentSequence, window: IndexWindow) -> Result<StabilityReport, SequenceError> {
    check_ratio_window(window)?;
    let top = window.hi - 1;
    let start = first_positive(alpha, window.lo, top)?;
    let ratios = (start..=top)
        .map(|n| Ok((alpha.eval(n + 1)? / alpha.eval(n)?).ln()))
        .collect::<Result<Vec<_>, SequenceError>>()?;
    Ok(ratio_report(ratios, IndexWindow { lo: start, hi: top }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominationKind {
    /// `α_n ≤ A β_n + B`
    C1,
    /// `β_n ≤ A α_n + B`
    C2,
    /// `n α_n ≤ β_n`
    NAlphaLeBeta,
    /// `β_{j+n-1} ≤ M (β_n + β_j)` on a square grid; `A` holds `M`.
    ShiftedSubadditive,
}

impl FromStr for DominationKind {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(DominationKind::C1),
            "c2" => Ok(DominationKind::C2),
            "nalpha" | "nalphalebeta" | "n-alpha-le-beta" => Ok(DominationKind::NAlphaLeBeta),
            _ => Err(SequenceError::Parse { input: s.to_string(), reason: "expected C1, C2 or nalpha".into() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominationVerdict {
    HoldsAtScale,
    RefutedAtScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationCertificate {
    pub kind: DominationKind,
    pub a: f64,
    pub b: f64,
    pub window: IndexWindow,
    pub verdict: DominationVerdict,
    /// First index where the inequality fails with the stored constants.
    pub first_violation: Option<usize>,
}

/// Largest power of two tried for `A` when the constants are searched.
pub const DOMINATION_A_GRID_MAX_EXP: u32 = 10;

/// Checks `(C1)`, `(C2)` or `n α_n ≤ β_n` on the window.
///
/// With `a`/`b` supplied the inequality is checked pointwise. Otherwise `A`
/// runs over `1, 2, …, 2^10` with `B` back-solved as the largest deficit; a
/// candidate is accepted only when that deficit is nonpositive or peaks in the
/// first half of the window, so a deficit still growing at the window edge is
/// not papered over by a large `B`.
pub fn check_domination(
    kind: DominationKind,
    alpha: &ExponentSequence,
    beta: &ExponentSequence,
    a: Option<f64>,
    b: Option<f64>,
    window: IndexWindow,
) -> Result<DominationCertificate, SequenceError> {
    let al = alpha.eval_range(window.lo, window.hi)?;
    let be = beta.eval_range(window.lo, window.hi)?;
    // lhs_n ≤ A·rhs_n + B
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = match kind {
        DominationKind::C1 => (al, be),
        DominationKind::C2 => (be, al),
        DominationKind::NAlphaLeBeta => {
            let lhs: Vec<f64> = al.iter().enumerate().map(|(i, x)| (window.lo + i) as f64 * x).collect();
            return Ok(pointwise(kind, &lhs, &be, 1.0, 0.0, window));
        }
        DominationKind::ShiftedSubadditive => {
            return Err(SequenceError::InvalidParameter("use check_shifted_subadditivity".into()))
        }
    };

    if a.is_some() || b.is_some() {
        return Ok(pointwise(kind, &lhs, &rhs, a.unwrap_or(1.0), b.unwrap_or(0.0), window));
    }

    let mut last = None;
    for e in 0..=DOMINATION_A_GRID_MAX_EXP {
        let a = f64::from(1u32 << e);
        let deficit: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l - a * r).collect();
        let (arg, max) = deficit
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
        let b = max.max(0.0);
        let cert = pointwise(kind, &lhs, &rhs, a, b, window);
        if max <= 0.0 || arg < window.len() / 2 {
            return Ok(cert);
        }
        last = Some(DominationCertificate { verdict: DominationVerdict::RefutedAtScale, first_violation: Some(window.lo + arg), ..cert });
    }
    Ok(last.expect("grid is nonempty"))
}

fn pointwise(kind: DominationKind, lhs: &[f64], rhs: &[f64], a: f64, b: f64, window: IndexWindow) -> DominationCertificate {
    let violation = lhs
        .iter()
        .zip(rhs)
        .position(|(l, r)| *l > a * r + b)
        .map(|i| window.lo + i);
    DominationCertificate {
        kind,
        a,
        b,
        window,
        verdict: if violation.is_none() { DominationVerdict::HoldsAtScale } else { DominationVerdict::RefutedAtScale },
        first_violation: violation,
    }
}

/// `β_{j+n-1} ≤ M (β_n + β_j)` for all `(j, n)` in `window × window`.
pub fn check_shifted_subadditivity(
    beta: &ExponentSequence,
    m: f64,
    window: IndexWindow,
) -> Result<DominationCertificate, SequenceError> {
    if !(m >= 1.0) {
        return Err(SequenceError::InvalidParameter(format!("M must be >= 1, got {m}")));
    }
    let vals = beta.eval_range(window.lo, 2 * window.hi - 1)?;
    let at = |n: usize| vals[n - window.lo];
    let mut violation = None;
    'outer: for j in window.lo..=window.hi {
        for n in window.lo..=window.hi {
            if at(j + n - 1) > m * (at(n) + at(j)) {
                violation = Some(j.min(n));
                break 'outer;
            }
        }
    }
    Ok(DominationCertificate {
        kind: DominationKind::ShiftedSubadditive,
        a: m,
        b: 0.0,
        window,
        verdict: if violation.is_none() { DominationVerdict::HoldsAtScale } else { DominationVerdict::RefutedAtScale },
        first_violation: violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lo: usize, hi: usize) -> IndexWindow {
        IndexWindow::new(lo, hi).unwrap()
    }

    fn exp_table(len: usize) -> ExponentSequence {
        ExponentSequence::table((1..=len).map(|n| (n as f64).exp()).collect(), TableExtension::None).unwrap()
    }

    #[test]
    fn eval_closed_forms() {
        assert_eq!(ExponentSequence::linear(1.0).unwrap().eval(5).unwrap(), 5.0);
        assert!((ExponentSequence::Log.eval(1).unwrap() - 0.693147).abs() < 1e-6);
        assert_eq!(ExponentSequence::power(0.5).unwrap().eval(9).unwrap(), 3.0);
    }

    #[test]
    fn eval_errors() {
        assert_eq!(ExponentSequence::Log.eval(0), Err(SequenceError::ZeroIndex(0)));
        let t = ExponentSequence::table(vec![1.0, 2.0], TableExtension::None).unwrap();
        assert_eq!(t.eval(3), Err(SequenceError::IndexOutOfRange { index: 3, len: 2 }));
        let t = ExponentSequence::table(vec![1.0, 2.0], TableExtension::LastDifference).unwrap();
        assert_eq!(t.eval(4).unwrap(), 4.0);
        let t = ExponentSequence::table(vec![1.0, 2.0], TableExtension::LastRatio).unwrap();
        assert_eq!(t.eval(4).unwrap(), 8.0);
        assert!(ExponentSequence::table(vec![2.0, 1.0], TableExtension::None).is_err());
        assert!(ExponentSequence::linear(0.0).is_err());
    }

    #[test]
    fn parse_grammar() {
        assert!(matches!("linear:c=2".parse::<ExponentSequence>().unwrap(), ExponentSequence::Linear { c } if c == 2.0));
        assert!(matches!("power:p=0.5".parse::<ExponentSequence>().unwrap(), ExponentSequence::Power { p } if p == 0.5));
        assert!(matches!("log".parse::<ExponentSequence>().unwrap(), ExponentSequence::Log));
        assert!("power".parse::<ExponentSequence>().is_err());
        assert!("linear:d=1".parse::<ExponentSequence>().is_err());
        assert!("cubic".parse::<ExponentSequence>().is_err());
        assert_eq!("3:40".parse::<IndexWindow>().unwrap(), w(3, 40));
        assert!("0:4".parse::<IndexWindow>().is_err());
    }

    #[test]
    fn table_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "0.5\n1.5\n\n4\n").unwrap();
        let t: ExponentSequence = format!("table:@{}", p.display()).parse().unwrap();
        assert_eq!(t.eval_range(1, 3).unwrap(), vec![0.5, 1.5, 4.0]);
        let t: ExponentSequence = format!("table:@{}:ext=diff", p.display()).parse().unwrap();
        assert_eq!(t.eval(4).unwrap(), 6.5);
    }

    #[test]
    fn stability_linear() {
        let r = check_stability(&ExponentSequence::linear(1.0).unwrap(), w(1, 512)).unwrap();
        assert_eq!(r.window_sup, 2.0);
        assert_eq!(r.verdict, StabilityVerdict::StableAtScale);
        assert_eq!(r.m_const, 3.0);
    }

    #[test]
    fn stability_log() {
        let r = check_stability(&ExponentSequence::Log, w(1, 512)).unwrap();
        // Direct evaluation of the ratio over n ∈ [1, 256].
        let oracle = (1..=256)
            .map(|n| ((2 * n + 1) as f64).ln() / ((n + 1) as f64).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((oracle - 3f64.ln() / 2f64.ln()).abs() < 1e-15);
        assert!((r.window_sup - oracle).abs() < 1e-12);
        assert_eq!(r.argmax, 1);
        assert_eq!(r.verdict, StabilityVerdict::StableAtScale);
    }

    #[test]
    fn stability_exponential_refuted() {
        let r = check_stability(&exp_table(64), w(1, 64)).unwrap();
        assert_eq!(r.verdict, StabilityVerdict::RefutedAtScale);
    }

    #[test]
    fn stability_window_errors() {
        assert!(check_stability(&ExponentSequence::Log, w(10, 15)).is_err());
        let zeros = ExponentSequence::table(vec![0.0; 8], TableExtension::None).unwrap();
        assert_eq!(check_stability(&zeros, w(1, 8)), Err(SequenceError::EmptyWindow));
    }

    #[test]
    fn stability_skips_leading_zeros() {
        let t = ExponentSequence::table(vec![0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0], TableExtension::None).unwrap();
        let r = check_stability(&t, w(1, 12)).unwrap();
        assert_eq!(r.window.lo, 3);
    }

    #[test]
    fn weak_stability_examples() {
        let r = check_weak_stability(&ExponentSequence::linear(1.0).unwrap(), w(1, 512)).unwrap();
        assert_eq!((r.window_sup, r.argmax, r.verdict), (2.0, 1, StabilityVerdict::StableAtScale));

        let r = check_weak_stability(&ExponentSequence::power(2.0).unwrap(), w(1, 512)).unwrap();
        let oracle = (1..512).map(|n| ((n + 1) as f64 / n as f64).powi(2)).fold(0.0, f64::max);
        assert_eq!(oracle, 4.0);
        assert!((r.window_sup - 4.0).abs() < 1e-12);
        assert_eq!((r.argmax, r.verdict), (1, StabilityVerdict::StableAtScale));

        let t = ExponentSequence::table((1..=8).map(|n| 2f64.powi(1 << n)).collect(), TableExtension::None).unwrap();
        let r = check_weak_stability(&t, w(1, 8)).unwrap();
        assert_eq!(r.verdict, StabilityVerdict::RefutedAtScale);
    }

    #[test]
    fn domination_examples() {
        let lin = ExponentSequence::linear(1.0).unwrap();
        let sq = ExponentSequence::power(2.0).unwrap();
        let c = check_domination(DominationKind::C1, &ExponentSequence::Log, &lin, Some(1.0), Some(1.0), w(1, 1000)).unwrap();
        assert_eq!(c.verdict, DominationVerdict::HoldsAtScale);

        let c = check_domination(DominationKind::NAlphaLeBeta, &ExponentSequence::Log, &sq, None, None, w(1, 1000)).unwrap();
        assert!((1..=1000).all(|n| n as f64 * ((n + 1) as f64).ln() <= (n * n) as f64));
        assert_eq!(c.verdict, DominationVerdict::HoldsAtScale);

        // β = n², α = n: n² ≤ 4n fails first at n = 5.
        let c = check_domination(DominationKind::C2, &lin, &sq, Some(4.0), Some(0.0), w(1, 1000)).unwrap();
        assert_eq!(c.verdict, DominationVerdict::RefutedAtScale);
        assert_eq!(c.first_violation, Some(5));
    }

    #[test]
    fn domination_search() {
        let lin = ExponentSequence::linear(1.0).unwrap();
        let c = check_domination(DominationKind::C1, &ExponentSequence::Log, &lin, None, None, w(1, 1000)).unwrap();
        assert_eq!((c.a, c.b, c.verdict), (1.0, 0.0, DominationVerdict::HoldsAtScale));
        // n ≤ A log(n+1) + B has a deficit growing at the edge of [1, 2^16] for every A ≤ 2^10.
        let c = check_domination(DominationKind::C2, &ExponentSequence::Log, &lin, None, None, w(1, 1 << 16)).unwrap();
        assert_eq!(c.verdict, DominationVerdict::RefutedAtScale);
    }

    #[test]
    fn subadditivity_examples() {
        let lin = ExponentSequence::linear(1.0).unwrap();
        let c = check_shifted_subadditivity(&lin, 2.0, w(1, 64)).unwrap();
        assert_eq!(c.verdict, DominationVerdict::HoldsAtScale);
        let c = check_shifted_subadditivity(&ExponentSequence::Log, 2.0, w(1, 64)).unwrap();
        assert_eq!(c.verdict, DominationVerdict::HoldsAtScale);
        let c = check_shifted_subadditivity(&exp_table(31), 4.0, w(1, 16)).unwrap();
        assert_eq!(c.verdict, DominationVerdict::RefutedAtScale);
        assert!(check_shifted_subadditivity(&lin, 0.5, w(1, 4)).is_err());
    }
}
