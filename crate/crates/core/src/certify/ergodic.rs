//! Cesàro means of the shifts: decay tables, Cesàro bounds and the
//! single-iterate test.

use serde::Serialize;

use crate::error::CertifyError;
use crate::growth::{DoublingProfile, SupVerdict};
use crate::logval::{Coord, LogValue};
use crate::operators::{cesaro_mean, cesaro_mean_direct, shift_pow, ShiftKind};
use crate::sequences::{check_stability, check_weak_stability, IndexWindow, StabilityVerdict};
use crate::spaces::{seminorm, KotheMatrix, Reduce, SequenceElement, Symbol};

/// Rows compared between the identity path and direct iteration.
pub const PATH_CHECK_DEPTH: usize = 64;
const STABILITY_WINDOW: (usize, usize) = (1, 1024);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    /// `‖T^[n] θ‖_k` (certified upper bound).
    pub cesaro_norm: LogValue,
    /// `‖(1/n) T^n θ‖_k`.
    pub single_iterate: LogValue,
    /// Largest relative gap between the identity path and direct iteration.
    pub path_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub sample: String,
    /// `sup_n ‖T^[n] x‖_k / ‖x‖_m` over the probes.
    pub log_sup_ratio: LogValue,
    pub argmax_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicityReport {
    pub kind: ShiftKind,
    pub space: String,
    pub symbol: String,
    pub k: usize,
    pub m: usize,
    pub probes: Vec<ProbeRow>,
    pub cesaro_bound: Vec<SampleRow>,
    pub mean_ergodic_at_scale: bool,
    pub single_iterate_decays: bool,
    /// Doubling test applied to the per-sample sups in sample order.
    pub cesaro_bounded: String,
    pub max_path_discrepancy: f64,
    pub warnings: Vec<String>,
}

impl ErgodicityReport {
    /// `‖T^[n_max] θ‖_k / ‖T^[n_1] θ‖_k` as a plain ratio (0 when both vanish).
    pub fn decay_ratio(&self) -> f64 {
        let first = self.probes.first().map_or(LogValue::ZERO, |p| p.cesaro_norm);
        let last = self.probes.last().map_or(LogValue::ZERO, |p| p.cesaro_norm);
        if first.is_zero() && last.is_zero() {
            0.0
        } else {
            last.div(first).exp()
        }
    }
}

/// Mean-ergodic rule: the table drops at least 10× from the first to the last
/// probe and ends below `1e-3` of its first entry, or vanishes identically.
fn decays(values: &[LogValue]) -> bool {
    if values.iter().all(|v| v.is_zero()) {
        return true;
    }
    let (first, last) = (values[0], values[values.len() - 1]);
    first.is_finite() && last.div(first).ln() <= (1e-3f64).ln() && last.div(first).ln() <= -(10f64.ln())
}

fn truncation_for(n: usize) -> usize {
    2 * n + 66
}

fn norm_upper(space: &KotheMatrix, x: &SequenceElement, k: usize, n: usize) -> Result<LogValue, CertifyError> {
    let j = match x {
        SequenceElement::Finite(f) => truncation_for(n).max(f.max_index()),
        SequenceElement::Enveloped(_) => truncation_for(n),
    };
    Ok(seminorm(space, x, k, j)?.upper(Reduce::Sum))
}

fn relative_gap(a: Coord, b: Coord) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ if a.is_negative() != b.is_negative() => 2.0,
        _ => (a.ln_abs() - b.ln_abs()).abs().exp_m1(),
    }
}

/// Builds the ergodicity tables for the shift `kind` on `space` at grade `k`.
/// Cesàro bounds use `m = k`.
pub fn ergodicity_check(
    kind: ShiftKind,
    theta: &Symbol,
    space: &KotheMatrix,
    k: usize,
    probes: &[usize],
    samples: &[SequenceElement],
) -> Result<ErgodicityReport, CertifyError> {
    if probes.is_empty() || probes.contains(&0) {
        return Err(CertifyError::Space(crate::error::SpaceError::InvalidBounds("probes must be nonempty and >= 1".into())));
    }
    let mut warnings = Vec::new();
    match space.exponent() {
        Some(alpha) => {
            let w = IndexWindow::new(STABILITY_WINDOW.0, STABILITY_WINDOW.1)?;
            if check_stability(alpha, w)?.verdict != StabilityVerdict::StableAtScale {
                match check_weak_stability(alpha, w)?.verdict {
                    StabilityVerdict::RefutedAtScale => return Err(CertifyError::ShiftUndefined),
                    StabilityVerdict::StableAtScale => warnings.push(format!("exponent {alpha} is only weakly stable at scale")),
                    StabilityVerdict::Inconclusive => warnings.push(format!("stability of {alpha} is inconclusive at scale")),
                }
            }
        }
        None => warnings.push("no exponent sequence; stability not checked".into()),
    }

    let mut rows = Vec::with_capacity(probes.len());
    for &n in probes {
        let mean = cesaro_mean(kind, theta, n);
        let cesaro_norm = norm_upper(space, &mean, k, n)?;
        let iterate = shift_pow(kind, theta.as_element(), n);
        let single_iterate = norm_upper(space, &iterate, k, n)?.div(LogValue::from_abs(n as f64));
        let direct = cesaro_mean_direct(kind, theta, n, PATH_CHECK_DEPTH);
        let path_discrepancy = direct
            .iter()
            .enumerate()
            .map(|(i, d)| relative_gap(mean.coord(i + 1), *d))
            .fold(0.0, f64::max);
        if !cesaro_norm.is_finite() {
            warnings.push(format!("no certified tail for the Cesàro mean at n = {n}"));
        }
        rows.push(ProbeRow { n, cesaro_norm, single_iterate, path_discrepancy });
    }

    let mut cesaro_bound = Vec::with_capacity(samples.len());
    for x in samples {
        let base = norm_upper(space, x, k, 0)?;
        let mut best = (f64::NEG_INFINITY, probes[0]);
        for &n in probes {
            let sym = Symbol::from_element(x.clone());
            let r = norm_upper(space, &cesaro_mean(kind, &sym, n), k, n)?.div(base).ln();
            if r > best.0 {
                best = (r, n);
            }
        }
        cesaro_bound.push(SampleRow { sample: x.describe(), log_sup_ratio: LogValue::from_ln(best.0), argmax_n: best.1 });
    }
    let cesaro_bounded = if cesaro_bound.is_empty() {
        "Undecided".to_string()
    } else {
        let sups: Vec<f64> = cesaro_bound.iter().map(|s| s.log_sup_ratio.ln()).collect();
        match DoublingProfile::new(&sups, 1).verdict() {
            SupVerdict::Bounded => "BoundedAtScale".into(),
            SupVerdict::Growing => "UnboundedAtScale".into(),
            SupVerdict::Undecided => "Undecided".into(),
        }
    };

    let norms: Vec<LogValue> = rows.iter().map(|r| r.cesaro_norm).collect();
    let singles: Vec<LogValue> = rows.iter().map(|r| r.single_iterate).collect();
    let max_path_discrepancy = rows.iter().map(|r| r.path_discrepancy).fold(0.0, f64::max);
    Ok(ErgodicityReport {
        kind,
        space: space.describe(),
        symbol: theta.describe(),
        k,
        m: k,
        mean_ergodic_at_scale: decays(&norms),
        single_iterate_decays: decays(&singles),
        probes: rows,
        cesaro_bound,
        cesaro_bounded,
        max_path_discrepancy,
        warnings,
    })
}
