//! Column-criterion certification of continuity and compactness.
//!
//! For `T: K(a) → K(b)` the ratio `r_{k,m}(n) = ‖T e_n‖_k / ‖e_n‖_m` is
//! evaluated for `n ≤ N_max`. A grade pair is accepted when its doubling
//! profile is flat with an interior argmax; continuity searches an `m` per
//! `k`, compactness a single `m` for every `k`.

mod conditions;
mod ergodic;
mod oracle;
mod suites;
mod tameness;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use conditions::{check_condition, ConditionInputs};
pub use ergodic::{ergodicity_check, ErgodicityReport, ProbeRow, SampleRow};
pub use oracle::{dense_oracle, dense_product, OracleCase, OracleReport, ORACLE_FAST_ROWS, ORACLE_FAST_TOL, ORACLE_ROWS, ORACLE_ROW_TOL};
pub use suites::{ergodic_cases, hankel_family, theorem_suite, CaseOutcome, CaseReport, CheckRow, SuiteInstance, SuiteReport, TheoremSuite};
pub use tameness::{tameness_scan, Gauge, OperatorTameness, TamenessReport, TamenessVerdict};

use crate::certificate::{inputs_digest, Certificate, CertificateKind, EvidenceRow, SearchBounds, Status};
use crate::error::CertifyError;
use crate::growth::{DoublingProfile, SupVerdict};
use crate::logval::ln_ratio;
use crate::operators::OperatorSpec;
use crate::spaces::{seminorm, KotheMatrix, Reduce, SeminormResult, SequenceElement};

/// `‖T e_n‖_k` in the codomain. Finite columns are summed exactly even when
/// their support exceeds `J`.
pub fn column_seminorm(codomain: &KotheMatrix, op: &OperatorSpec, n: usize, k: usize, truncation: usize) -> Result<SeminormResult, CertifyError> {
    let col = op.column(n);
    let j = match &col {
        SequenceElement::Finite(f) => truncation.max(f.max_index()),
        SequenceElement::Enveloped(_) => truncation,
    };
    Ok(seminorm(codomain, &col, k, j)?)
}

/// Column seminorms `‖T e_n‖_k` for `n ≤ N_max`, computed per grade on demand
/// (columns in parallel) and cached.
pub struct ColumnTable<'a> {
    op: &'a OperatorSpec,
    codomain: &'a KotheMatrix,
    n_max: usize,
    truncation: usize,
    grades: BTreeMap<usize, Vec<SeminormResult>>,
}

impl<'a> ColumnTable<'a> {
    pub fn new(op: &'a OperatorSpec, codomain: &'a KotheMatrix, n_max: usize, truncation: usize) -> Self {
        ColumnTable { op, codomain, n_max, truncation, grades: BTreeMap::new() }
    }

    pub fn grade(&mut self, k: usize) -> Result<&[SeminormResult], CertifyError> {
        if !self.grades.contains_key(&k) {
            let (op, codomain, j) = (self.op, self.codomain, self.truncation);
            let row: Vec<SeminormResult> = (1..=self.n_max)
                .into_par_iter()
                .map(|n| column_seminorm(codomain, op, n, k, j))
                .collect::<Result<_, _>>()?;
            self.grades.insert(k, row);
        }
        Ok(&self.grades[&k])
    }

    /// First column that diverged at scale among grades `1..=k_max`.
    pub fn first_divergent(&mut self, k_max: usize) -> Result<Option<usize>, CertifyError> {
        let mut first: Option<usize> = None;
        for k in 1..=k_max {
            if let Some(i) = self.grade(k)?.iter().position(|r| r.diverged_at_scale) {
                first = Some(first.map_or(i + 1, |f| f.min(i + 1)));
            }
        }
        Ok(first)
    }
}

/// Doubling profile of `ln ‖T e_n‖_k − ln a_{n,m}` over `n ≤ N_max`, using the
/// certified upper bound of each column seminorm.
fn ratio_profile(table: &mut ColumnTable<'_>, domain: &KotheMatrix, k: usize, m: usize) -> Result<DoublingProfile, CertifyError> {
    let n_max = table.n_max;
    let cols = table.grade(k)?;
    let ratios: Vec<f64> = (1..=n_max)
        .map(|n| ln_ratio(cols[n - 1].upper(Reduce::Sum).ln(), domain.lw(n, m)))
        .collect();
    Ok(DoublingProfile::new(&ratios, 1))
}

fn row(k: usize, m: usize, p: &DoublingProfile) -> EvidenceRow {
    EvidenceRow { k, m, n_star: p.argmax, log_ratio: p.sup }
}

fn prepare(kind: CertificateKind, op: &OperatorSpec, domain: &KotheMatrix, codomain: &KotheMatrix, bounds: SearchBounds) -> Result<Certificate, CertifyError> {
    bounds.validate()?;
    let top = bounds.k_max.max(bounds.m_max + 1);
    domain.check_range(bounds.n_max, bounds.m_max)?;
    codomain.check_range(bounds.j_max, top.min(codomain.max_grade()))?;
    let digest = inputs_digest(&[
        &kind.to_string(),
        &op.describe(),
        &domain.describe(),
        &codomain.describe(),
        &format!("{},{},{},{}", bounds.k_max, bounds.m_max, bounds.n_max, bounds.j_max),
    ]);
    Ok(Certificate::new(kind, bounds, digest))
}

/// Sets the compact witness when every grade received the same `m`.
fn note_uniform_witness(cert: &mut Certificate) {
    let mut ms = cert.witness.values();
    if let Some(&first) = ms.next() {
        if ms.all(|&m| m == first) && cert.witness.len() == cert.bounds.k_max {
            cert.compact_witness = Some(first);
        }
    }
}

/// `∀k ≤ K_max ∃m ≤ M_max: sup_n ‖T e_n‖_k / ‖e_n‖_m < ∞` at scale.
pub fn certify_continuity(op: &OperatorSpec, domain: &KotheMatrix, codomain: &KotheMatrix, bounds: SearchBounds) -> Result<Certificate, CertifyError> {
    let mut cert = prepare(CertificateKind::Continuity, op, domain, codomain, bounds)?;
    let mut table = ColumnTable::new(op, codomain, bounds.n_max, bounds.j_max);
    continuity_with(&mut cert, &mut table, domain)?;
    Ok(cert)
}

fn continuity_with(cert: &mut Certificate, table: &mut ColumnTable<'_>, domain: &KotheMatrix) -> Result<(), CertifyError> {
    let b = cert.bounds;
    if let Some(n) = table.first_divergent(b.k_max)? {
        cert.status = Status::RefutedAtScale;
        cert.divergent_column = Some(n);
        return Ok(());
    }
    let mut refuted = false;
    let mut open = false;
    for k in 1..=b.k_max {
        let mut all_growing = true;
        let mut found = false;
        for m in 1..=b.m_max {
            let p = ratio_profile(table, domain, k, m)?;
            cert.evidence.push(row(k, m, &p));
            match p.verdict() {
                SupVerdict::Bounded => {
                    cert.witness.insert(k, m);
                    cert.constants.insert(k, p.sup);
                    found = true;
                    break;
                }
                SupVerdict::Growing => {}
                SupVerdict::Undecided => all_growing = false,
            }
        }
        if !found {
            if all_growing {
                refuted = true;
            } else {
                open = true;
            }
        }
    }
    cert.status = if refuted {
        Status::RefutedAtScale
    } else if open {
        Status::Inconclusive
    } else {
        note_uniform_witness(cert);
        Status::CertifiedAtScale
    };
    Ok(())
}

/// `∃m ≤ M_max ∀k: sup_n ‖T e_n‖_k / ‖e_n‖_m < ∞` at scale. Each candidate
/// `m` is probed on grades `1..=max(K_max, m+1)`; only power series
/// codomains are accepted.
pub fn certify_compactness(op: &OperatorSpec, domain: &KotheMatrix, codomain: &KotheMatrix, bounds: SearchBounds) -> Result<Certificate, CertifyError> {
    if !codomain.is_montel() {
        return Err(CertifyError::NonMontel);
    }
    let mut cert = prepare(CertificateKind::Compactness, op, domain, codomain, bounds)?;
    let mut table = ColumnTable::new(op, codomain, bounds.n_max, bounds.j_max);
    if let Some(n) = table.first_divergent(bounds.k_max)? {
        cert.status = Status::RefutedAtScale;
        cert.divergent_column = Some(n);
        return Ok(cert);
    }
    let mut every_m_growing = true;
    for m in 1..=bounds.m_max {
        let top = bounds.k_max.max(m + 1);
        let mut accepted = true;
        let mut some_growing = false;
        let mut rows = Vec::new();
        for k in 1..=top {
            let p = ratio_profile(&mut table, domain, k, m)?;
            rows.push((k, p.clone()));
            cert.evidence.push(row(k, m, &p));
            match p.verdict() {
                SupVerdict::Bounded => {}
                SupVerdict::Growing => {
                    accepted = false;
                    some_growing = true;
                    break;
                }
                SupVerdict::Undecided => accepted = false,
            }
        }
        if accepted {
            for (k, p) in rows.into_iter().filter(|(k, _)| *k <= bounds.k_max) {
                cert.witness.insert(k, m);
                cert.constants.insert(k, p.sup);
            }
            cert.compact_witness = Some(m);
            cert.status = Status::CertifiedAtScale;
            return Ok(cert);
        }
        every_m_growing &= some_growing;
    }
    cert.status = if every_m_growing { Status::RefutedAtScale } else { Status::Inconclusive };
    Ok(cert)
}

/// `x ∈ K(a)` at scale: every grade `k ≤ K_max` has a certified finite
/// seminorm; refuted when some grade diverges.
pub fn membership(space: &KotheMatrix, x: &SequenceElement, k_max: usize, truncation: usize) -> Result<Status, CertifyError> {
    let mut status = Status::CertifiedAtScale;
    for k in 1..=k_max {
        let j = match x {
            SequenceElement::Finite(f) => truncation.max(f.max_index()),
            SequenceElement::Enveloped(_) => truncation,
        };
        let r = seminorm(space, x, k, j)?;
        if r.diverged_at_scale {
            return Ok(Status::RefutedAtScale);
        }
        if !r.is_certified_finite() {
            status = Status::Inconclusive;
        }
    }
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::parse_symbol;
    use crate::sequences::ExponentSequence;

    fn linf() -> KotheMatrix {
        KotheMatrix::infinite_type(ExponentSequence::linear(1.0).unwrap())
    }

    fn small() -> SearchBounds {
        SearchBounds { k_max: 4, m_max: 8, n_max: 128, j_max: 512 }
    }

    #[test]
    fn delta_hankel_is_continuous() {
        let op = OperatorSpec::hankel(parse_symbol("delta", None).unwrap());
        let c = certify_continuity(&op, &linf(), &linf(), small()).unwrap();
        assert_eq!(c.status, Status::CertifiedAtScale);
        for k in 1..=4 {
            assert_eq!(c.witness[&k], 1);
            assert!((c.constants[&k] - (k as f64 - 1.0)).abs() < 1e-12);
        }
        c.validate().unwrap();
    }

    #[test]
    fn ones_hankel_has_divergent_first_column() {
        let op = OperatorSpec::hankel(parse_symbol("ones", None).unwrap());
        let c = certify_continuity(&op, &linf(), &linf(), small()).unwrap();
        assert_eq!(c.status, Status::RefutedAtScale);
        assert_eq!(c.divergent_column, Some(1));
    }

    #[test]
    fn identity_toeplitz_not_compact() {
        let op = OperatorSpec::toeplitz(parse_symbol("delta", None).unwrap());
        let c = certify_compactness(&op, &linf(), &linf(), small()).unwrap();
        assert_eq!(c.status, Status::RefutedAtScale);
        let cont = certify_continuity(&op, &linf(), &linf(), small()).unwrap();
        assert_eq!(cont.status, Status::CertifiedAtScale);
        assert_eq!(cont.witness[&3], 3);
    }

    #[test]
    fn zero_symbol_compact() {
        let op = OperatorSpec::hankel(parse_symbol("zero", None).unwrap());
        let c = certify_compactness(&op, &linf(), &linf(), small()).unwrap();
        assert_eq!(c.status, Status::CertifiedAtScale);
        assert_eq!(c.compact_witness, Some(1));
        assert!(c.constants.values().all(|v| *v == f64::NEG_INFINITY));
    }

    #[test]
    fn gauss_hankel_compact() {
        let op = OperatorSpec::hankel(parse_symbol("gauss", None).unwrap());
        let c = certify_compactness(&op, &linf(), &linf(), small()).unwrap();
        assert_eq!(c.status, Status::CertifiedAtScale);
        let cont = certify_continuity(&op, &linf(), &linf(), small()).unwrap();
        assert_eq!(cont.compact_witness, c.compact_witness);
    }

    #[test]
    fn general_table_rejected_for_compactness() {
        let t = crate::spaces::WeightTable::new(1, 1, vec![0.0]).unwrap();
        let op = OperatorSpec::hankel(parse_symbol("delta", None).unwrap());
        let r = certify_compactness(&op, &linf(), &KotheMatrix::table(t), small());
        assert_eq!(r.unwrap_err(), CertifyError::NonMontel);
    }
}
