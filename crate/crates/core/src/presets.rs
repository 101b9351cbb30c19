//! Text specs for symbols, elements and spaces.
//!
//! Symbols: `delta`, `zero`, `ones`, `geom:r`, `gauss`, `dualdecay:m`,
//! `rapid:c,p`, `poly:p`, `@file.csv` (rows `j,value`, 0-based).
//! Elements: `basis:n`, `ones`, `decay:<family>` (`e^{−α_n}`),
//! `grow:<family>` (`e^{α_n}`), `@file.csv` (rows `n,value`, 1-based).
//! Spaces: `L1:<family>`, `Linf:<family>`, `kothe:@file.csv`.

use std::path::Path;

use crate::error::{SequenceError, SpaceError};
use crate::logval::Coord;
use crate::sequences::ExponentSequence;
use crate::spaces::{basis_element, KotheMatrix, SequenceElement, Symbol, WeightTable};

fn parse_err(input: &str, reason: impl Into<String>) -> SpaceError {
    SpaceError::Sequence(SequenceError::Parse { input: input.to_string(), reason: reason.into() })
}

fn number(input: &str, s: &str) -> Result<f64, SpaceError> {
    s.trim().parse::<f64>().map_err(|e| parse_err(input, format!("{s:?}: {e}")))
}

/// Parses a symbol preset. `alpha` is the exponent used by `dualdecay`
/// (defaults to `α_n = n`).
pub fn parse_symbol(spec: &str, alpha: Option<&ExponentSequence>) -> Result<Symbol, SpaceError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        return Symbol::from_csv(Path::new(path));
    }
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let need = |what: &str| arg.ok_or_else(|| parse_err(spec, format!("{name} needs {what}")));
    match name {
        "delta" => Ok(Symbol::finite(&[1.0])),
        "zero" => Ok(Symbol::finite(&[])),
        "ones" => Symbol::closed_form("ones", |_| 0.0),
        "gauss" => Symbol::closed_form("gauss", |j| {
            let x = (j + 1) as f64;
            -x * x
        }),
        "geom" => {
            let r = number(spec, need("a ratio r")?)?;
            if !r.is_finite() {
                return Err(parse_err(spec, "ratio must be finite"));
            }
            if r == 0.0 {
                return Ok(Symbol::finite(&[1.0]));
            }
            let lr = r.abs().ln();
            Symbol::enveloped(format!("geom:{r}"), move |j| Coord::from_ln(r < 0.0 && j % 2 == 1, lr * j as f64), move |j| lr * j as f64, 0)
        }
        "dualdecay" => {
            let m = number(spec, need("a grade m")?)?;
            if !(m > 0.0) {
                return Err(parse_err(spec, "m must be positive"));
            }
            let a = alpha.cloned().unwrap_or(ExponentSequence::Linear { c: 1.0 });
            a.eval(1)?;
            let label = format!("dualdecay:{m}[{a}]");
            Symbol::closed_form(label, move |j| -a.eval(j + 1).unwrap_or(f64::INFINITY) / m)
        }
        "rapid" => {
            let (c, p) = need("c,p")?.split_once(',').ok_or_else(|| parse_err(spec, "expected rapid:c,p"))?;
            let (c, p) = (number(spec, c)?, number(spec, p)?);
            if !(c > 0.0 && c.is_finite() && p > 1.0 && p.is_finite()) {
                return Err(parse_err(spec, "rapid needs c > 0 and p > 1"));
            }
            let lc = c.ln();
            Symbol::closed_form(format!("rapid:{c},{p}"), move |j| lc - ((j + 1) as f64).powf(p))
        }
        "poly" => {
            let p = number(spec, need("an exponent p")?)?;
            if !p.is_finite() {
                return Err(parse_err(spec, "exponent must be finite"));
            }
            Symbol::closed_form(format!("poly:{p}"), move |j| p * ((j + 1) as f64).ln())
        }
        _ => Err(parse_err(spec, "unknown symbol preset")),
    }
}

/// Parses an element spec.
pub fn parse_element(spec: &str) -> Result<SequenceElement, SpaceError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        return SequenceElement::from_csv(Path::new(path));
    }
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    match (name, arg) {
        ("ones", None) => SequenceElement::closed_form("ones", false, |_| 0.0),
        ("basis", Some(n)) => {
            let n = n.trim().parse::<usize>().map_err(|e| parse_err(spec, e.to_string()))?;
            basis_element(n)
        }
        ("decay", Some(f)) | ("grow", Some(f)) => {
            let a: ExponentSequence = f.parse()?;
            a.eval(1)?;
            let sign = if name == "decay" { -1.0 } else { 1.0 };
            SequenceElement::closed_form(format!("{name}:{a}"), false, move |n| sign * a.eval(n).unwrap_or(f64::INFINITY))
        }
        _ => Err(parse_err(spec, "expected basis:n, ones, decay:<family>, grow:<family> or @file.csv")),
    }
}

/// Parses a space spec.
pub fn parse_space(spec: &str) -> Result<KotheMatrix, SpaceError> {
    let spec = spec.trim();
    let (kind, rest) = spec.split_once(':').ok_or_else(|| parse_err(spec, "expected L1:<family>, Linf:<family> or kothe:@file.csv"))?;
    match kind {
        "L1" => Ok(KotheMatrix::finite_type(rest.parse()?)),
        "Linf" => Ok(KotheMatrix::infinite_type(rest.parse()?)),
        "kothe" => {
            let path = rest.strip_prefix('@').ok_or_else(|| parse_err(spec, "expected kothe:@file.csv"))?;
            Ok(KotheMatrix::table(WeightTable::from_csv(Path::new(path))?))
        }
        _ => Err(parse_err(spec, "unknown space kind")),
    }
}
