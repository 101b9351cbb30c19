//! S-tameness scans: `‖T x‖_k ≤ C ‖x‖_{S(k)}` for `k ≥ k₀`, per operator.

use serde::Serialize;

use super::{ratio_profile, ColumnTable};
use crate::certificate::{EvidenceRow, SearchBounds};
use crate::error::CertifyError;
use crate::growth::SupVerdict;
use crate::logval::LogValue;
use crate::operators::OperatorSpec;
use crate::spaces::KotheMatrix;

/// A nondecreasing grade map `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gauge {
    Identity,
    /// `S(k) = max(1, k − d)`.
    Lag(usize),
    /// `S(k) = values[k − 1]`, repeating the last entry.
    Table(Vec<usize>),
}

impl Gauge {
    pub fn apply(&self, k: usize) -> usize {
        match self {
            Gauge::Identity => k,
            Gauge::Lag(d) => k.saturating_sub(*d).max(1),
            Gauge::Table(v) => v.get(k - 1).or(v.last()).copied().unwrap_or(1).max(1),
        }
    }

    fn check(&self, k_max: usize) -> Result<(), CertifyError> {
        for k in 1..k_max {
            if self.apply(k + 1) < self.apply(k) {
                return Err(CertifyError::GaugeNotMonotone(k + 1));
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        match self {
            Gauge::Identity => "identity".into(),
            Gauge::Lag(d) => format!("lag:{d}"),
            Gauge::Table(v) => format!("table:{v:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TamenessVerdict {
    STameAtScale,
    NotSTameAtScale,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorTameness {
    pub operator: String,
    /// Least grade from which every probed `k` admits a constant.
    pub k0: Option<usize>,
    /// `max_{k ≥ k₀} C_k`.
    pub constant: Option<LogValue>,
    /// `(k, S(k), n*, ln sup)` rows.
    #[serde(skip)]
    pub evidence: Vec<EvidenceRow>,
    pub divergent_column: Option<usize>,
    pub verdict: TamenessVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TamenessReport {
    pub gauge: Vec<(usize, usize)>,
    pub operators: Vec<OperatorTameness>,
    pub verdict: TamenessVerdict,
}

/// Checks the gauge inequality on the basis vectors for each operator of the
/// family, grades `1..=K_max`.
pub fn tameness_scan(
    family: &[OperatorSpec],
    domain: &KotheMatrix,
    codomain: &KotheMatrix,
    gauge: &Gauge,
    bounds: SearchBounds,
) -> Result<TamenessReport, CertifyError> {
    bounds.validate()?;
    gauge.check(bounds.k_max)?;
    let mut operators = Vec::with_capacity(family.len());
    for op in family {
        operators.push(scan_one(op, domain, codomain, gauge, bounds)?);
    }
    let verdict = if operators.iter().any(|o| o.verdict == TamenessVerdict::NotSTameAtScale) {
        TamenessVerdict::NotSTameAtScale
    } else if operators.iter().all(|o| o.verdict == TamenessVerdict::STameAtScale) {
        TamenessVerdict::STameAtScale
    } else {
        TamenessVerdict::Inconclusive
    };
    Ok(TamenessReport { gauge: (1..=bounds.k_max).map(|k| (k, gauge.apply(k))).collect(), operators, verdict })
}

fn scan_one(op: &OperatorSpec, domain: &KotheMatrix, codomain: &KotheMatrix, gauge: &Gauge, bounds: SearchBounds) -> Result<OperatorTameness, CertifyError> {
    domain.check_range(bounds.n_max, gauge.apply(bounds.k_max))?;
    let mut table = ColumnTable::new(op, codomain, bounds.n_max, bounds.j_max);
    let mut out = OperatorTameness {
        operator: op.describe(),
        k0: None,
        constant: None,
        evidence: Vec::new(),
        divergent_column: None,
        verdict: TamenessVerdict::Inconclusive,
    };
    if let Some(n) = table.first_divergent(bounds.k_max)? {
        out.divergent_column = Some(n);
        out.verdict = TamenessVerdict::NotSTameAtScale;
        return Ok(out);
    }
    let mut verdicts = Vec::with_capacity(bounds.k_max);
    for k in 1..=bounds.k_max {
        let s = gauge.apply(k);
        let p = ratio_profile(&mut table, domain, k, s)?;
        out.evidence.push(EvidenceRow { k, m: s, n_star: p.argmax, log_ratio: p.sup });
        verdicts.push(p.verdict());
    }
    let top = *verdicts.last().expect("k_max >= 1");
    if top != SupVerdict::Bounded {
        out.verdict = if top == SupVerdict::Growing { TamenessVerdict::NotSTameAtScale } else { TamenessVerdict::Inconclusive };
        return Ok(out);
    }
    let k0 = verdicts.iter().rposition(|v| *v != SupVerdict::Bounded).map_or(1, |i| i + 2);
    let c = out.evidence[k0 - 1..].iter().map(|r| r.log_ratio).fold(f64::NEG_INFINITY, f64::max);
    out.k0 = Some(k0);
    out.constant = Some(LogValue::from_ln(c));
    out.verdict = TamenessVerdict::STameAtScale;
    Ok(out)
}
