//! Certificates produced by bounded quantifier searches, and their JSON form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CertifyError, SpaceError};
use crate::logval::{serialize_ln, WireLn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    CertifiedAtScale,
    RefutedAtScale,
    Inconclusive,
}

impl Status {
    /// CLI exit code: 0 certified, 1 refuted, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::CertifiedAtScale => 0,
            Status::RefutedAtScale => 1,
            Status::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Named sufficient conditions that can be checked numerically.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// `∃ m₀, C > 0: a_{n,m₀} ≥ C` for all n.
    P2_11,
    /// `∀k ∃m, C: e^{−kβ_n} ≤ C a_{n,m}`.
    P3_E3,
    /// `∃m ∀k, C: e^{−kβ_n} ≤ C a_{n,m}`.
    P4_E4,
    /// `∀k ∃m, C: e^{β_n / k} ≤ C a_{n,m}`.
    P5_E6,
    /// `∃m ∀k, C: e^{β_n / k} ≤ C a_{n,m}`.
    P6_E7,
    /// `e^{m α_n} ∈ K(b)` for every m.
    P7_E8,
    /// `e^{−α_n / m} ∈ K(b)` for every m.
    P8_E9,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::P2_11,
        Condition::P3_E3,
        Condition::P4_E4,
        Condition::P5_E6,
        Condition::P6_E7,
        Condition::P7_E8,
        Condition::P8_E9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::P2_11 => "P2_11",
            Condition::P3_E3 => "P3_E3",
            Condition::P4_E4 => "P4_E4",
            Condition::P5_E6 => "P5_E6",
            Condition::P6_E7 => "P6_E7",
            Condition::P7_E8 => "P7_E8",
            Condition::P8_E9 => "P8_E9",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = CertifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CertifyError::InvalidCertificate(format!("unknown condition {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    Continuity,
    Compactness,
    /// Witness `{k ↦ k}` for the least grade `k` with `sup |θ_{n−1}| / a_{n,k}` bounded.
    DualMembership,
    /// Witness `{k ↦ l}` with `Σ a_{n,k}/a_{n,l}` convergent; constants hold the
    /// log partial sums.
    Nuclearity,
    /// Witness layout follows the quantifier pattern of the condition;
    /// membership conditions store `{k ↦ m_max}` per grade.
    Condition(Condition),
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateKind::Continuity => f.write_str("continuity"),
            CertificateKind::Compactness => f.write_str("compactness"),
            CertificateKind::DualMembership => f.write_str("dual_membership"),
            CertificateKind::Nuclearity => f.write_str("nuclearity"),
            CertificateKind::Condition(c) => write!(f, "condition:{c}"),
        }
    }
}

impl FromStr for CertificateKind {
    type Err = CertifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "continuity" => CertificateKind::Continuity,
            "compactness" => CertificateKind::Compactness,
            "dual_membership" => CertificateKind::DualMembership,
            "nuclearity" => CertificateKind::Nuclearity,
            _ => match s.strip_prefix("condition:") {
                Some(c) => CertificateKind::Condition(c.parse()?),
                None => return Err(CertifyError::InvalidCertificate(format!("unknown kind {s:?}"))),
            },
        })
    }
}

/// Search limits `(K_max, M_max, N_max, J_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub k_max: usize,
    pub m_max: usize,
    pub n_max: usize,
    pub j_max: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { k_max: 8, m_max: 32, n_max: 512, j_max: 4096 }
    }
}

impl SearchBounds {
    pub fn validate(&self) -> Result<(), SpaceError> {
        if self.k_max == 0 || self.m_max == 0 || self.n_max == 0 || self.j_max == 0 {
            return Err(SpaceError::InvalidBounds(format!("{self:?}: all bounds must be positive")));
        }
        Ok(())
    }
}

/// One evidence row: at grades `(k, m)` the ratio sup `e^{log_ratio}` is
/// attained at `n_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceRow {
    pub k: usize,
    pub m: usize,
    pub n_star: usize,
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub status: Status,
    pub witness: BTreeMap<usize, usize>,
    /// `k ↦ ln C_k`.
    pub constants: BTreeMap<usize, f64>,
    pub compact_witness: Option<usize>,
    pub evidence: Vec<EvidenceRow>,
    pub bounds: SearchBounds,
    /// First column whose seminorm diverged at scale.
    pub divergent_column: Option<usize>,
    pub inputs_digest: String,
}

/// SHA-256 of the canonical input description, hex encoded.
pub fn inputs_digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            h.update(b"\n");
        }
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

struct Ln(f64);

impl Serialize for Ln {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_ln(self.0, s)
    }
}

fn ln_value(x: f64) -> Value {
    serde_json::to_value(Ln(x)).expect("log value serializes")
}

fn parse_ln(v: &Value) -> Result<f64, CertifyError> {
    WireLn::deserialize(v)
        .map_err(|e| CertifyError::InvalidCertificate(e.to_string()))?
        .into_ln()
        .map_err(CertifyError::InvalidCertificate)
}

impl Certificate {
    pub fn new(kind: CertificateKind, bounds: SearchBounds, inputs_digest: String) -> Self {
        Certificate {
            kind,
            status: Status::Inconclusive,
            witness: BTreeMap::new(),
            constants: BTreeMap::new(),
            compact_witness: None,
            evidence: Vec::new(),
            bounds,
            divergent_column: None,
            inputs_digest,
        }
    }

    /// The stable JSON form; `seed` is recorded when the run used one.
    pub fn to_json(&self, seed: Option<u64>) -> Value {
        json!({
            "kind": self.kind.to_string(),
            "status": self.status,
            "witness": self.witness.iter().map(|(k, m)| json!([k, m])).collect::<Vec<_>>(),
            "constants": self.constants.iter().map(|(k, c)| json!([k, ln_value(*c)])).collect::<Vec<_>>(),
            "compact_witness": self.compact_witness,
            "evidence": self.evidence.iter().map(|r| json!([r.k, r.m, r.n_star, ln_value(r.log_ratio)])).collect::<Vec<_>>(),
            "bounds": self.bounds,
            "divergent_column": self.divergent_column,
            "inputs_digest": self.inputs_digest,
            "seed": seed,
        })
    }

    pub fn to_json_string(&self, seed: Option<u64>) -> String {
        serde_json::to_string_pretty(&self.to_json(seed)).expect("certificate serializes")
    }

    /// Parses and validates a JSON certificate.
    pub fn from_json(text: &str) -> Result<Certificate, CertifyError> {
        let bad = |m: &str| CertifyError::InvalidCertificate(m.to_string());
        let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| bad("top level is not an object"))?;
        for key in ["status", "witness", "constants", "compact_witness", "evidence", "bounds", "inputs_digest"] {
            if !obj.contains_key(key) {
                return Err(bad(&format!("missing field {key}")));
            }
        }
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("kind must be a string"))?
            .parse()?;
        let status: Status = serde_json::from_value(obj["status"].clone()).map_err(|e| bad(&e.to_string()))?;
        let bounds: SearchBounds = serde_json::from_value(obj["bounds"].clone()).map_err(|e| bad(&e.to_string()))?;
        let pairs = |key: &str| -> Result<Vec<Vec<Value>>, CertifyError> {
            obj[key]
                .as_array()
                .ok_or_else(|| bad(&format!("{key} must be an array")))?
                .iter()
                .map(|e| e.as_array().cloned().ok_or_else(|| bad(&format!("{key} entries must be arrays"))))
                .collect()
        };
        let index = |v: &Value| v.as_u64().map(|x| x as usize).ok_or_else(|| bad("expected a nonnegative integer"));

        let mut witness = BTreeMap::new();
        for p in pairs("witness")? {
            if p.len() != 2 {
                return Err(bad("witness entries are [k, m]"));
            }
            witness.insert(index(&p[0])?, index(&p[1])?);
        }
        let mut constants = BTreeMap::new();
        for p in pairs("constants")? {
            if p.len() != 2 {
                return Err(bad("constants entries are [k, logC]"));
            }
            constants.insert(index(&p[0])?, parse_ln(&p[1])?);
        }
        let mut evidence = Vec::new();
        for p in pairs("evidence")? {
            if p.len() != 4 {
                return Err(bad("evidence entries are [k, m, n_star, log_ratio]"));
            }
            evidence.push(EvidenceRow { k: index(&p[0])?, m: index(&p[1])?, n_star: index(&p[2])?, log_ratio: parse_ln(&p[3])? });
        }
        let opt_index = |key: &str| -> Result<Option<usize>, CertifyError> {
            match obj.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(v) => index(v).map(Some),
            }
        };
        let cert = Certificate {
            kind,
            status,
            witness,
            constants,
            compact_witness: opt_index("compact_witness")?,
            evidence,
            bounds,
            divergent_column: opt_index("divergent_column")?,
            inputs_digest: obj["inputs_digest"].as_str().ok_or_else(|| bad("inputs_digest must be a string"))?.to_string(),
        };
        cert.validate()?;
        Ok(cert)
    }

    /// Checks the structural invariants of the certificate.
    pub fn validate(&self) -> Result<(), CertifyError> {
        let bad = |m: String| Err(CertifyError::InvalidCertificate(m));
        if self.inputs_digest.len() != 64 || !self.inputs_digest.bytes().all(|b| b.is_ascii_hexdigit()) {
            return bad("inputs_digest is not a sha256 hex string".into());
        }
        if let Some(m) = self.compact_witness {
            if let Some((k, w)) = self.witness.iter().find(|(_, w)| **w != m) {
                return bad(format!("witness({k}) = {w} differs from compact witness {m}"));
            }
        }
        let grade_search = matches!(self.kind, CertificateKind::Continuity | CertificateKind::Compactness);
        match self.status {
            Status::CertifiedAtScale => {
                if grade_search {
                    for k in 1..=self.bounds.k_max {
                        if !self.witness.contains_key(&k) {
                            return bad(format!("certified but no witness for k = {k}"));
                        }
                    }
                }
                if let Some((k, c)) = self.constants.iter().find(|(_, c)| !(**c < f64::INFINITY)) {
                    return bad(format!("certified with non-finite constant {c} at k = {k}"));
                }
            }
            Status::RefutedAtScale => {
                if grade_search && self.evidence.is_empty() && self.divergent_column.is_none() {
                    return bad("refuted without evidence or divergent column".into());
                }
            }
            Status::Inconclusive => {}
        }
        Ok(())
    }

    /// Evidence as CSV: header, then one `(k, m, n_star, log_ratio)` row each.
    pub fn evidence_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "m", "n_star", "log_ratio"]).expect("in-memory csv");
        for r in &self.evidence {
            w.write_record([r.k.to_string(), r.m.to_string(), r.n_star.to_string(), format_ln(r.log_ratio)])
                .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }
}

pub(crate) fn format_ln(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x == f64::INFINITY {
        "+inf".into()
    } else {
        format!("{x:?}")
    }
}
