//! Numerical checks of the weight conditions used as theorem hypotheses.

use crate::certificate::{inputs_digest, Certificate, CertificateKind, Condition, EvidenceRow, SearchBounds, Status};
use crate::error::CertifyError;
use crate::growth::{DoublingProfile, SupVerdict};
use crate::sequences::{ExponentSequence, IndexWindow};
use crate::spaces::{seminorm, KotheMatrix, SequenceElement};

/// Objects a condition may refer to. `matrix` is the domain matrix `a` for
/// the weight conditions and the codomain matrix `b` for the membership
/// conditions.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConditionInputs<'a> {
    pub alpha: Option<&'a ExponentSequence>,
    pub beta: Option<&'a ExponentSequence>,
    pub matrix: Option<&'a KotheMatrix>,
}

impl<'a> ConditionInputs<'a> {
    fn need<T>(v: Option<T>, condition: Condition, what: &'static str) -> Result<T, CertifyError> {
        v.ok_or(CertifyError::MissingInput { condition: condition.name(), what })
    }
}

/// Runs the quantifier pattern of `condition` on `window` within `bounds`.
pub fn check_condition(condition: Condition, inputs: ConditionInputs<'_>, window: IndexWindow, bounds: SearchBounds) -> Result<Certificate, CertifyError> {
    bounds.validate()?;
    let matrix = ConditionInputs::need(inputs.matrix, condition, "a Köthe matrix")?;
    let digest = inputs_digest(&[
        &format!("condition:{condition}"),
        &inputs.alpha.map(|a| a.to_string()).unwrap_or_default(),
        &inputs.beta.map(|a| a.to_string()).unwrap_or_default(),
        &matrix.describe(),
        &window.to_string(),
        &format!("{},{},{},{}", bounds.k_max, bounds.m_max, bounds.n_max, bounds.j_max),
    ]);
    let mut cert = Certificate::new(CertificateKind::Condition(condition), bounds, digest);
    match condition {
        Condition::P2_11 => lower_bound(&mut cert, matrix, window)?,
        Condition::P3_E3 | Condition::P4_E4 | Condition::P5_E6 | Condition::P6_E7 => {
            let beta = ConditionInputs::need(inputs.beta, condition, "beta")?;
            let b = beta.eval_range(window.lo, window.hi)?;
            // ln of the left-hand side at grade k, index n
            let lhs = move |k: usize, n: usize| match condition {
                Condition::P3_E3 | Condition::P4_E4 => -(k as f64) * b[n - window.lo],
                _ => b[n - window.lo] / k as f64,
            };
            let profile = |k: usize, m: usize| -> Result<DoublingProfile, CertifyError> {
                matrix.check_range(window.hi, m)?;
                let r: Vec<f64> = (window.lo..=window.hi).map(|n| lhs(k, n) - matrix.lw(n, m)).collect();
                Ok(DoublingProfile::new(&r, window.lo))
            };
            if matches!(condition, Condition::P3_E3 | Condition::P5_E6) {
                for_each_k_exists_m(&mut cert, profile)?;
            } else {
                exists_m_for_each_k(&mut cert, profile)?;
            }
        }
        Condition::P7_E8 | Condition::P8_E9 => {
            let alpha = ConditionInputs::need(inputs.alpha, condition, "alpha")?.clone();
            membership_grid(&mut cert, matrix, condition, &alpha)?;
        }
    }
    Ok(cert)
}

/// `∃ m₀, C > 0: a_{n,m₀} ≥ C`; the constant stored is `ln inf_n a_{n,m₀}`.
fn lower_bound(cert: &mut Certificate, matrix: &KotheMatrix, window: IndexWindow) -> Result<(), CertifyError> {
    let mut all_growing = true;
    for m in 1..=cert.bounds.m_max.min(matrix.max_grade()) {
        matrix.check_range(window.hi, m)?;
        let r: Vec<f64> = (window.lo..=window.hi).map(|n| -matrix.lw(n, m)).collect();
        let p = DoublingProfile::new(&r, window.lo);
        cert.evidence.push(EvidenceRow { k: 1, m, n_star: p.argmax, log_ratio: p.sup });
        match p.verdict() {
            SupVerdict::Bounded => {
                cert.witness.insert(1, m);
                cert.constants.insert(1, -p.sup);
                cert.compact_witness = Some(m);
                cert.status = Status::CertifiedAtScale;
                return Ok(());
            }
            SupVerdict::Growing => {}
            SupVerdict::Undecided => all_growing = false,
        }
    }
    cert.status = if all_growing { Status::RefutedAtScale } else { Status::Inconclusive };
    Ok(())
}

fn for_each_k_exists_m(cert: &mut Certificate, profile: impl Fn(usize, usize) -> Result<DoublingProfile, CertifyError>) -> Result<(), CertifyError> {
    let b = cert.bounds;
    let (mut refuted, mut open) = (false, false);
    for k in 1..=b.k_max {
        let mut all_growing = true;
        let mut found = false;
        for m in 1..=b.m_max {
            let p = profile(k, m)?;
            cert.evidence.push(EvidenceRow { k, m, n_star: p.argmax, log_ratio: p.sup });
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
            refuted |= all_growing;
            open |= !all_growing;
        }
    }
    cert.status = if refuted {
        Status::RefutedAtScale
    } else if open {
        Status::Inconclusive
    } else {
        Status::CertifiedAtScale
    };
    Ok(())
}

fn exists_m_for_each_k(cert: &mut Certificate, profile: impl Fn(usize, usize) -> Result<DoublingProfile, CertifyError>) -> Result<(), CertifyError> {
    let b = cert.bounds;
    let mut every_m_growing = true;
    for m in 1..=b.m_max {
        let mut sups = Vec::new();
        let mut accepted = true;
        let mut growing = false;
        for k in 1..=b.k_max.max(m + 1) {
            let p = profile(k, m)?;
            cert.evidence.push(EvidenceRow { k, m, n_star: p.argmax, log_ratio: p.sup });
            match p.verdict() {
                SupVerdict::Bounded => sups.push((k, p.sup)),
                SupVerdict::Growing => {
                    accepted = false;
                    growing = true;
                    break;
                }
                SupVerdict::Undecided => accepted = false,
            }
        }
        if accepted {
            for (k, s) in sups.into_iter().filter(|(k, _)| *k <= b.k_max) {
                cert.witness.insert(k, m);
                cert.constants.insert(k, s);
            }
            cert.compact_witness = Some(m);
            cert.status = Status::CertifiedAtScale;
            return Ok(());
        }
        every_m_growing &= growing;
    }
    cert.status = if every_m_growing { Status::RefutedAtScale } else { Status::Inconclusive };
    Ok(())
}

/// `e^{m α_n}` (or `e^{−α_n/m}`) `∈ K(b)` for every `m ≤ M_max`, tested by the
/// seminorms of grades `k ≤ K_max`. Witness `{k ↦ M_max}` records the grades
/// at which every `m` passed; evidence rows hold `(k, m, J, ln ‖·‖_k)`.
fn membership_grid(cert: &mut Certificate, codomain: &KotheMatrix, condition: Condition, alpha: &ExponentSequence) -> Result<(), CertifyError> {
    let b = cert.bounds;
    let (mut refuted, mut open) = (false, false);
    for k in 1..=b.k_max {
        let mut ok = true;
        let mut worst = f64::NEG_INFINITY;
        for m in 1..=b.m_max {
            let a = alpha.clone();
            let scale = m as f64;
            let x = if condition == Condition::P7_E8 {
                SequenceElement::closed_form(format!("exp({m}·{a})"), false, move |n| scale * a.eval(n).unwrap_or(f64::INFINITY))?
            } else {
                SequenceElement::closed_form(format!("exp(-{a}/{m})"), false, move |n| -a.eval(n).unwrap_or(f64::INFINITY) / scale)?
            };
            let r = seminorm(codomain, &x, k, b.j_max)?;
            cert.evidence.push(EvidenceRow { k, m, n_star: b.j_max, log_ratio: r.value.ln() });
            if r.diverged_at_scale {
                refuted = true;
                ok = false;
                break;
            }
            if !r.is_certified_finite() {
                open = true;
                ok = false;
                break;
            }
            worst = worst.max(r.value.ln());
        }
        if ok {
            cert.witness.insert(k, b.m_max);
            cert.constants.insert(k, worst);
        }
    }
    cert.status = if refuted {
        Status::RefutedAtScale
    } else if open {
        Status::Inconclusive
    } else {
        Status::CertifiedAtScale
    };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window() -> IndexWindow {
        IndexWindow::new(1, 512).unwrap()
    }

    fn bounds() -> SearchBounds {
        SearchBounds { k_max: 4, m_max: 8, n_max: 512, j_max: 1024 }
    }

    #[test]
    fn p2_11_on_infinite_type() {
        let alpha = ExponentSequence::Log;
        let a = KotheMatrix::infinite_type(alpha);
        let inputs = ConditionInputs { matrix: Some(&a), ..Default::default() };
        let c = check_condition(Condition::P2_11, inputs, window(), bounds()).unwrap();
        assert_eq!(c.status, Status::CertifiedAtScale);
        assert_eq!(c.compact_witness, Some(1));
        assert!((c.constants[&1] - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn p2_11_fails_on_finite_type() {
        let a = KotheMatrix::finite_type(ExponentSequence::Linear { c: 1.0 });
        let inputs = ConditionInputs { matrix: Some(&a), ..Default::default() };
        let c = check_condition(Condition::P2_11, inputs, window(), bounds()).unwrap();
        assert_ne!(c.status, Status::CertifiedAtScale);
    }

    #[test]
    fn p3_e3_log_domain() {
        let a = KotheMatrix::finite_type(ExponentSequence::Log);
        let beta = ExponentSequence::Linear { c: 1.0 };
        let inputs = ConditionInputs { beta: Some(&beta), matrix: Some(&a), ..Default::default() };
        let c = check_condition(Condition::P3_E3, inputs, window(), bounds()).unwrap();
        assert_eq!(c.status, Status::CertifiedAtScale);
        let c = check_condition(Condition::P4_E4, inputs, window(), bounds()).unwrap();
        assert_eq!(c.status, Status::CertifiedAtScale);
    }

    #[test]
    fn p8_e9_geometric() {
        let alpha = ExponentSequence::Linear { c: 1.0 };
        let b = KotheMatrix::finite_type(alpha.clone());
        let inputs = ConditionInputs { alpha: Some(&alpha), matrix: Some(&b), ..Default::default() };
        let c = check_condition(Condition::P8_E9, inputs, window(), bounds()).unwrap();
        assert_eq!(c.status, Status::CertifiedAtScale);
        let c = check_condition(Condition::P7_E8, inputs, window(), bounds()).unwrap();
        assert_eq!(c.status, Status::RefutedAtScale);
    }

    #[test]
    fn missing_input_reported() {
        let a = KotheMatrix::finite_type(ExponentSequence::Log);
        let inputs = ConditionInputs { matrix: Some(&a), ..Default::default() };
        assert!(matches!(check_condition(Condition::P5_E6, inputs, window(), bounds()), Err(CertifyError::MissingInput { .. })));
    }
}
