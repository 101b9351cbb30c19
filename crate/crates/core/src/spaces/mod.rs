//! Köthe matrices, power series spaces, seminorms, dual membership and nuclearity.

mod element;
mod series;

use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

pub use element::{basis_element, CoordFn, Enveloped, EnvelopeFn, FiniteSupport, SequenceElement, Symbol, ENVELOPE_SPOT_CHECKS, ENVELOPE_SPOT_RANGE};
pub(crate) use series::{evaluate, exact};
pub use series::{Reduce, SeminormResult, DIVERGENCE_TOL};

use crate::certificate::{inputs_digest, Certificate, CertificateKind, EvidenceRow, SearchBounds, Status};
use crate::error::SpaceError;
use crate::growth::{DoublingProfile, SupVerdict};
use crate::logval::{ln_add, ln_ratio, LogValue};
use crate::sequences::{ExponentSequence, IndexWindow};

/// Explicit log-weights `ln a_{n,k}` for `1 ≤ n ≤ rows`, `1 ≤ k ≤ grades`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    rows: usize,
    grades: usize,
    ln: Vec<f64>,
}

impl WeightTable {
    /// `ln[(n-1)·grades + (k-1)] = ln a_{n,k}`. Checks both Köthe conditions
    /// on the whole table.
    pub fn new(rows: usize, grades: usize, ln: Vec<f64>) -> Result<Self, SpaceError> {
        if rows == 0 || grades == 0 || ln.len() != rows * grades {
            return Err(SpaceError::NotKothe(format!("expected a full {rows}×{grades} table, got {} entries", ln.len())));
        }
        for n in 1..=rows {
            let row = &ln[(n - 1) * grades..n * grades];
            if row.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
                return Err(SpaceError::NotKothe(format!("row {n} has a NaN or infinite weight")));
            }
            if row.iter().all(|w| *w == f64::NEG_INFINITY) {
                return Err(SpaceError::NotKothe(format!("row {n} has no positive weight")));
            }
            if let Some(k) = row.windows(2).position(|w| w[1] < w[0]) {
                return Err(SpaceError::NotKothe(format!("row {n} decreases from grade {} to {}", k + 1, k + 2)));
            }
        }
        Ok(WeightTable { rows, grades, ln })
    }

    /// Reads `n,k,logweight` rows; `-inf` marks a zero weight. A header row is
    /// skipped.
    pub fn from_csv(path: &Path) -> Result<Self, SpaceError> {
        let bad = |m: String| SpaceError::NotKothe(format!("{}: {m}", path.display()));
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| bad(e.to_string()))?;
        let mut cells = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let f = |j: usize| rec.get(j).unwrap_or("");
            let w = match f(2) {
                "-inf" => Ok(f64::NEG_INFINITY),
                s => s.parse::<f64>(),
            };
            match (f(0).parse::<usize>(), f(1).parse::<usize>(), w) {
                (Ok(n), Ok(k), Ok(w)) if n >= 1 && k >= 1 => cells.push((n, k, w)),
                _ if i == 0 => continue,
                _ => return Err(bad(format!("malformed row {}", i + 1))),
            }
        }
        let rows = cells.iter().map(|c| c.0).max().unwrap_or(0);
        let grades = cells.iter().map(|c| c.1).max().unwrap_or(0);
        let mut ln = vec![f64::NAN; rows * grades];
        for (n, k, w) in cells {
            ln[(n - 1) * grades + (k - 1)] = w;
        }
        if let Some(i) = ln.iter().position(|w| w.is_nan()) {
            return Err(bad(format!("missing weight at row {}, grade {}", i / grades + 1, i % grades + 1)));
        }
        Self::new(rows, grades, ln)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn grades(&self) -> usize {
        self.grades
    }

    pub fn get(&self, n: usize, k: usize) -> Result<f64, SpaceError> {
        if n == 0 || k == 0 || n > self.rows || k > self.grades {
            return Err(SpaceError::TableOutOfRange { n, k });
        }
        Ok(self.ln[(n - 1) * self.grades + (k - 1)])
    }

    fn digest(&self) -> String {
        let mut h = Sha256::new();
        for w in &self.ln {
            h.update(w.to_bits().to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// A Köthe matrix `a_{n,k}` in the log domain.
#[derive(Debug, Clone)]
pub enum KotheMatrix {
    /// `Λ₁(α)`: `a_{n,k} = e^{−α_n / k}`.
    PowerSeriesFinite(ExponentSequence),
    /// `Λ∞(α)`: `a_{n,k} = e^{k α_n}`.
    PowerSeriesInfinite(ExponentSequence),
    GeneralTable(Arc<WeightTable>),
}

impl KotheMatrix {
    pub fn finite_type(alpha: ExponentSequence) -> Self {
        KotheMatrix::PowerSeriesFinite(alpha)
    }

    pub fn infinite_type(alpha: ExponentSequence) -> Self {
        KotheMatrix::PowerSeriesInfinite(alpha)
    }

    pub fn table(table: WeightTable) -> Self {
        KotheMatrix::GeneralTable(Arc::new(table))
    }

    /// `ln a_{n,k}`.
    pub fn ln_weight(&self, n: usize, k: usize) -> Result<f64, SpaceError> {
        if k == 0 {
            return Err(SpaceError::ZeroGrade);
        }
        match self {
            KotheMatrix::PowerSeriesFinite(a) => Ok(-a.eval(n)? / k as f64),
            KotheMatrix::PowerSeriesInfinite(a) => Ok(k as f64 * a.eval(n)?),
            KotheMatrix::GeneralTable(t) => t.get(n, k),
        }
    }

    pub fn weight(&self, n: usize, k: usize) -> Result<LogValue, SpaceError> {
        Ok(LogValue::from_ln(self.ln_weight(n, k)?))
    }

    /// `ln a_{n,k}` for a pair already known to be in range.
    pub(crate) fn lw(&self, n: usize, k: usize) -> f64 {
        self.ln_weight(n, k).expect("weight index checked by caller")
    }

    /// Largest row index with a defined weight.
    pub fn rows(&self) -> usize {
        match self {
            KotheMatrix::PowerSeriesFinite(a) | KotheMatrix::PowerSeriesInfinite(a) => a.evaluable_up_to(),
            KotheMatrix::GeneralTable(t) => t.rows(),
        }
    }

    /// Largest grade with a defined weight.
    pub fn max_grade(&self) -> usize {
        match self {
            KotheMatrix::GeneralTable(t) => t.grades(),
            _ => usize::MAX,
        }
    }

    /// Power series spaces are Montel; nothing is asserted for tables.
    pub fn is_montel(&self) -> bool {
        !matches!(self, KotheMatrix::GeneralTable(_))
    }

    pub fn exponent(&self) -> Option<&ExponentSequence> {
        match self {
            KotheMatrix::PowerSeriesFinite(a) | KotheMatrix::PowerSeriesInfinite(a) => Some(a),
            KotheMatrix::GeneralTable(_) => None,
        }
    }

    /// Canonical spec string, also used in input digests.
    pub fn describe(&self) -> String {
        match self {
            KotheMatrix::PowerSeriesFinite(a) => format!("L1:{a}"),
            KotheMatrix::PowerSeriesInfinite(a) => format!("Linf:{a}"),
            KotheMatrix::GeneralTable(t) => format!("kothe:rows={},grades={},sha256={}", t.rows, t.grades, t.digest()),
        }
    }

    pub(crate) fn check_range(&self, n: usize, k: usize) -> Result<(), SpaceError> {
        if k == 0 {
            return Err(SpaceError::ZeroGrade);
        }
        if n > self.rows() || k > self.max_grade() {
            return Err(SpaceError::TableOutOfRange { n, k });
        }
        Ok(())
    }
}

/// `‖x‖_k = Σ_n |x_n| a_{n,k}`, truncated at `J` with a certified tail.
pub fn seminorm(space: &KotheMatrix, x: &SequenceElement, k: usize, truncation: usize) -> Result<SeminormResult, SpaceError> {
    seminorm_with(space, x, k, truncation, Reduce::Sum)
}

/// `sup_n |x_n| a_{n,k}`, truncated at `J` with a certified tail.
pub fn seminorm_sup(space: &KotheMatrix, x: &SequenceElement, k: usize, truncation: usize) -> Result<SeminormResult, SpaceError> {
    seminorm_with(space, x, k, truncation, Reduce::Sup)
}

pub fn seminorm_with(
    space: &KotheMatrix,
    x: &SequenceElement,
    k: usize,
    truncation: usize,
    reduce: Reduce,
) -> Result<SeminormResult, SpaceError> {
    match x {
        SequenceElement::Finite(f) => {
            if f.max_index() > truncation {
                return Err(SpaceError::TruncationTooSmall { support: f.max_index(), truncation });
            }
            space.check_range(f.max_index(), k)?;
            let terms = f.entries().iter().map(|&(n, v)| ln_add(v.abs().ln(), space.lw(n, k)));
            Ok(exact(terms, truncation, reduce))
        }
        SequenceElement::Enveloped(e) => {
            space.check_range(truncation, k)?;
            let term = |n: usize| ln_add(e.coord(n).ln_abs(), space.lw(n, k));
            let bound = |n: usize| ln_add(e.bound_at(n), space.lw(n, k));
            Ok(evaluate(&term, &bound, 1, truncation, space.rows(), reduce))
        }
    }
}

fn verdict_status(v: SupVerdict) -> Status {
    match v {
        SupVerdict::Bounded => Status::CertifiedAtScale,
        SupVerdict::Growing => Status::RefutedAtScale,
        SupVerdict::Undecided => Status::Inconclusive,
    }
}

/// Searches the least `k ≤ K_max` with `sup_{n ∈ window} |θ_{n−1}| / a_{n,k}`
/// bounded at scale. The certificate stores the witness as `{k ↦ k}` and the
/// constant as the log of the window sup.
pub fn dual_membership(space: &KotheMatrix, theta: &Symbol, k_max: usize, window: IndexWindow) -> Result<Certificate, SpaceError> {
    if k_max == 0 {
        return Err(SpaceError::ZeroGrade);
    }
    let bounds = SearchBounds { k_max, m_max: k_max, n_max: window.hi, j_max: window.hi };
    let digest = inputs_digest(&["dual_membership", &space.describe(), &theta.describe(), &k_max.to_string(), &window.to_string()]);
    let mut cert = Certificate::new(CertificateKind::DualMembership, bounds, digest);
    let mut all_growing = true;
    for k in 1..=k_max {
        space.check_range(window.hi, k)?;
        let ratios: Vec<f64> = (window.lo..=window.hi)
            .map(|n| ln_ratio(theta.as_element().coord(n).ln_abs(), space.lw(n, k)))
            .collect();
        let profile = DoublingProfile::new(&ratios, window.lo);
        cert.evidence.push(EvidenceRow { k, m: k, n_star: profile.argmax, log_ratio: profile.sup });
        match verdict_status(profile.verdict()) {
            Status::CertifiedAtScale => {
                cert.status = Status::CertifiedAtScale;
                cert.witness.insert(k, k);
                cert.constants.insert(k, profile.sup);
                return Ok(cert);
            }
            Status::RefutedAtScale => {}
            Status::Inconclusive => all_growing = false,
        }
    }
    cert.status = if all_growing { Status::RefutedAtScale } else { Status::Inconclusive };
    Ok(cert)
}

/// The series `Σ_{n ≤ J} a_{n,k} / a_{n,l}` with its tail report.
pub fn gp_ratio_series(space: &KotheMatrix, k: usize, l: usize, truncation: usize) -> Result<SeminormResult, SpaceError> {
    space.check_range(truncation, k.max(l))?;
    let term = |n: usize| ln_ratio(space.lw(n, k), space.lw(n, l));
    Ok(evaluate(&term, &term, 1, truncation, space.rows(), Reduce::Sum))
}

/// For each `k ≤ K_max`, the least `l ∈ (k, L_max]` whose ratio series has a
/// certified tail. Witness `{k ↦ l}`; constants and evidence hold the log
/// partial sums at `J`.
pub fn nuclearity(space: &KotheMatrix, k_max: usize, l_max: usize, truncation: usize) -> Result<Certificate, SpaceError> {
    if k_max == 0 || l_max <= k_max || truncation == 0 {
        return Err(SpaceError::InvalidBounds(format!("need L_max > K_max >= 1 and J >= 1, got K_max={k_max}, L_max={l_max}, J={truncation}")));
    }
    let bounds = SearchBounds { k_max, m_max: l_max, n_max: truncation, j_max: truncation };
    let digest = inputs_digest(&["nuclearity", &space.describe(), &format!("{k_max},{l_max},{truncation}")]);
    let mut cert = Certificate::new(CertificateKind::Nuclearity, bounds, digest);
    let mut status = Status::CertifiedAtScale;
    for k in 1..=k_max {
        let mut found = false;
        let mut all_diverged = true;
        for l in k + 1..=l_max {
            let r = gp_ratio_series(space, k, l, truncation)?;
            cert.evidence.push(EvidenceRow { k, m: l, n_star: truncation, log_ratio: r.value.ln() });
            if r.is_certified_finite() {
                cert.witness.insert(k, l);
                cert.constants.insert(k, r.value.ln());
                found = true;
                break;
            }
            all_diverged &= r.diverged_at_scale;
        }
        if !found {
            status = match (status, all_diverged) {
                (Status::RefutedAtScale, _) | (_, true) => Status::RefutedAtScale,
                _ => Status::Inconclusive,
            };
        }
    }
    cert.status = status;
    Ok(cert)
}
