//! Machine-readable reports: a versioned envelope with input hashes and
//! parameter stamps, atomic file output, and an independent re-checker for
//! the certificates a report embeds.

use crate::coprod::CoprodMorphism;
use crate::sobj::SimpMorphism;
use crate::sset::{FinSimplicialSet, SSetMap};
use crate::wfs::WfsError;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const SCHEMA: &str = "wfskit/1";

/// Exit-code discipline shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Verdict positive or value computed.
    Positive,
    /// Verdict negative, with a witness in the report.
    Negative,
    /// Budget or stage bound ran out before a verdict.
    Inconclusive,
    /// Inputs failed to parse or validate.
    InputError,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 1,
            Outcome::Inconclusive => 2,
            Outcome::InputError => 3,
        }
    }

    pub fn verdict(self) -> &'static str {
        match self {
            Outcome::Positive => "positive",
            Outcome::Negative => "negative",
            Outcome::Inconclusive => "inconclusive",
            Outcome::InputError => "input-error",
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// Run parameters stamped into every report.
#[derive(Debug, Clone)]
pub struct Params {
    pub trunc: usize,
    pub stages: usize,
    pub budget: usize,
    pub seed: u64,
}

impl Params {
    pub fn to_json(&self) -> Value {
        json!({
            "trunc": self.trunc,
            "stages": self.stages,
            "budget": self.budget,
            "seed": self.seed,
        })
    }
}

/// Assembles the report envelope. `inputs` pairs each path with the raw
/// bytes that were read from it.
pub fn envelope(
    command: &str,
    params: &Params,
    inputs: &[(String, Vec<u8>)],
    outcome: Outcome,
    body: Value,
    certificates: Vec<Value>,
    warnings: Vec<String>,
) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "params": params.to_json(),
        "inputs": inputs
            .iter()
            .map(|(p, bytes)| json!({"path": p, "sha256": sha256_hex(bytes)}))
            .collect::<Vec<_>>(),
        "verdict": outcome.verdict(),
        "exit_code": outcome.code(),
        "body": body,
        "certificates": certificates,
        "warnings": warnings,
    })
}

/// Writes the report atomically: temporary file in the same directory,
/// then rename.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().and_then(|f| f.to_str()).unwrap_or("report")
        )),
        None => Path::new(&format!(
            ".{}.tmp",
            path.file_name().and_then(|f| f.to_str()).unwrap_or("report")
        ))
        .to_path_buf(),
    };
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

// ---------------------------------------------------------------------------
// self-contained certificates
// ---------------------------------------------------------------------------

/// A simplicial map together with its endpoints, so a certificate can be
/// re-checked without the original inputs.
pub fn sset_map_with_objects(m: &SSetMap) -> Value {
    json!({
        "source": m.source().to_json(),
        "target": m.target().to_json(),
        "map": m.to_json(),
    })
}

pub fn sset_map_from_objects(v: &Value) -> Result<SSetMap, WfsError> {
    let source = FinSimplicialSet::from_json(
        v.get("source")
            .ok_or_else(|| WfsError::Other("certificate map lacks a source".into()))?,
    )
    .map_err(WfsError::Sset)?
    .shared();
    let target = FinSimplicialSet::from_json(
        v.get("target")
            .ok_or_else(|| WfsError::Other("certificate map lacks a target".into()))?,
    )
    .map_err(WfsError::Sset)?
    .shared();
    SSetMap::from_json(
        v.get("map")
            .ok_or_else(|| WfsError::Other("certificate map lacks an assignment".into()))?,
        source,
        target,
    )
    .map_err(WfsError::Map)
}

// morphisms of simplicial objects serialize with their endpoints already,
// so no wrapper is needed for them

/// A solved lifting square: `lift . left = top` and `right . lift =
/// bottom` are both re-checked.
pub fn lift_certificate(left: &SSetMap, top: &SSetMap, right: &SSetMap, bottom: &SSetMap, lift: &SSetMap) -> Value {
    json!({
        "type": "lift",
        "left": sset_map_with_objects(left),
        "top": sset_map_with_objects(top),
        "right": sset_map_with_objects(right),
        "bottom": sset_map_with_objects(bottom),
        "lift": sset_map_with_objects(lift),
    })
}

/// A factorization `right . left = of`, with an optional completeness
/// stamp.
pub fn factorization_certificate(of: &SSetMap, left: &SSetMap, right: &SSetMap, complete: bool) -> Value {
    json!({
        "type": "factorization",
        "of": sset_map_with_objects(of),
        "left": sset_map_with_objects(left),
        "right": sset_map_with_objects(right),
        "complete": complete,
    })
}

/// A Reedy factorization of a morphism of simplicial objects, with the
/// corner sections that witness the right leg's class.
pub fn reedy_certificate(
    of: &SimpMorphism,
    left: &SimpMorphism,
    right: &SimpMorphism,
    corner_sections: &[(CoprodMorphism, CoprodMorphism)],
) -> Value {
    json!({
        "type": "reedy",
        "of": of.to_json(),
        "left": left.to_json(),
        "right": right.to_json(),
        "corners": corner_sections
            .iter()
            .map(|(corner, section)| json!({
                "corner": corner.to_json(),
                "corner_source": corner.source.to_json(),
                "corner_target": corner.target.to_json(),
                "section": section.to_json(),
            }))
            .collect::<Vec<_>>(),
    })
}

/// An isomorphism witness between two simplicial sets.
pub fn iso_certificate(map: &SSetMap) -> Value {
    json!({
        "type": "iso",
        "map": sset_map_with_objects(map),
    })
}

// ---------------------------------------------------------------------------
// the re-checker
// ---------------------------------------------------------------------------

/// Where and why a certificate failed.
#[derive(Debug)]
pub struct VerifyFailure {
    pub index: usize,
    pub reason: String,
}

/// Re-checks every certificate in a report independently of the search
/// code: maps are re-validated, triangles re-composed, sections
/// re-multiplied. Returns the exit outcome `verify` should report.
pub fn verify_report(report: &Value) -> Result<Outcome, VerifyFailure> {
    let fail = |index: usize, reason: &str| VerifyFailure {
        index,
        reason: reason.to_string(),
    };
    if report.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
        return Err(fail(0, "unknown or missing schema tag"));
    }
    let certs = report
        .get("certificates")
        .and_then(Value::as_array)
        .cloned()
        .unwrap_or_default();
    for (k, cert) in certs.iter().enumerate() {
        let kind = cert.get("type").and_then(Value::as_str).unwrap_or("");
        match kind {
            "lift" => {
                let get = |field: &str| -> Result<SSetMap, VerifyFailure> {
                    sset_map_from_objects(
                        cert.get(field).ok_or_else(|| fail(k, "missing square leg"))?,
                    )
                    .map_err(|e| fail(k, &e.to_string()))
                };
                let (left, top, right, bottom, lift) =
                    (get("left")?, get("top")?, get("right")?, get("bottom")?, get("lift")?);
                for m in [&left, &top, &right, &bottom, &lift] {
                    m.validate().map_err(|e| fail(k, &e.to_string()))?;
                }
                let upper = left.then(&lift).map_err(|e| fail(k, &e.to_string()))?;
                if upper != top {
                    return Err(fail(k, "upper lift triangle does not commute"));
                }
                let lower = lift.then(&right).map_err(|e| fail(k, &e.to_string()))?;
                if lower != bottom {
                    return Err(fail(k, "lower lift triangle does not commute"));
                }
            }
            "factorization" => {
                let get = |field: &str| -> Result<SSetMap, VerifyFailure> {
                    sset_map_from_objects(
                        cert.get(field).ok_or_else(|| fail(k, "missing factor leg"))?,
                    )
                    .map_err(|e| fail(k, &e.to_string()))
                };
                let (of, left, right) = (get("of")?, get("left")?, get("right")?);
                for m in [&of, &left, &right] {
                    m.validate().map_err(|e| fail(k, &e.to_string()))?;
                }
                let composite = left.then(&right).map_err(|e| fail(k, &e.to_string()))?;
                if composite != of {
                    return Err(fail(k, "factorization legs do not compose to the input"));
                }
            }
            "reedy" => {
                let get = |field: &str| -> Result<SimpMorphism, VerifyFailure> {
                    SimpMorphism::from_json(
                        cert.get(field).ok_or_else(|| fail(k, "missing factor leg"))?,
                    )
                    .map_err(|e| fail(k, &e.to_string()))
                };
                let (of, left, right) = (get("of")?, get("left")?, get("right")?);
                for m in [&of, &left, &right] {
                    m.validate().map_err(|e| fail(k, &e.to_string()))?;
                }
                let composite = left.then(&right).map_err(|e| fail(k, &e.to_string()))?;
                if composite.levels != of.levels {
                    return Err(fail(k, "factorization legs do not compose to the input"));
                }
                for lvl in &left.levels {
                    if !crate::coprod::is_coprod_injection(lvl) {
                        return Err(fail(k, "left leg is not a levelwise coproduct injection"));
                    }
                }
                let corners = cert
                    .get("corners")
                    .and_then(Value::as_array)
                    .cloned()
                    .unwrap_or_default();
                for c in &corners {
                    let source = crate::coprod::CoprodObject::from_json(
                        c.get("corner_source").ok_or_else(|| fail(k, "missing corner source"))?,
                    )
                    .map_err(|e| fail(k, &e.to_string()))?;
                    let target = crate::coprod::CoprodObject::from_json(
                        c.get("corner_target").ok_or_else(|| fail(k, "missing corner target"))?,
                    )
                    .map_err(|e| fail(k, &e.to_string()))?;
                    let corner = CoprodMorphism::from_json(
                        c.get("corner").ok_or_else(|| fail(k, "missing corner"))?,
                    )
                    .map_err(|e| fail(k, &e.to_string()))?;
                    let section = CoprodMorphism::from_json(
                        c.get("section").ok_or_else(|| fail(k, "missing corner section"))?,
                    )
                    .map_err(|e| fail(k, &e.to_string()))?;
                    if corner.source != source || corner.target != target {
                        return Err(fail(k, "corner endpoints do not match the stated objects"));
                    }
                    let round = section
                        .then(&corner)
                        .map_err(|e| fail(k, &e.to_string()))?;
                    let identity = CoprodMorphism::identity(&target);
                    if round.index_map != identity.index_map || round.components != identity.components
                    {
                        return Err(fail(k, "corner section is not a section"));
                    }
                }
            }
            "iso" => {
                let map = sset_map_from_objects(
                    cert.get("map").ok_or_else(|| fail(k, "missing iso witness"))?,
                )
                .map_err(|e| fail(k, &e.to_string()))?;
                map.validate().map_err(|e| fail(k, &e.to_string()))?;
                // bijective on cells in every relevant dimension
                let top = map.source().dim_bound().max(map.target().dim_bound());
                for n in 0..=top {
                    let mut images: Vec<String> =
                        map.source().cells(n).iter().map(|c| map.eval(c).to_string()).collect();
                    images.sort();
                    images.dedup();
                    if images.len() != map.target().cells(n).len() {
                        return Err(fail(k, "iso witness is not bijective on cells"));
                    }
                }
            }
            other => {
                return Err(fail(k, &format!("unknown certificate type {other:?}")));
            }
        }
    }
    // partial results stay partial under verification
    match report.get("verdict").and_then(Value::as_str) {
        Some("inconclusive") => Ok(Outcome::Inconclusive),
        Some(_) => Ok(Outcome::Positive),
        None => Err(fail(0, "report lacks a verdict")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sset::maps::Budget;
    use crate::sset::lifting::LiftingSquare;

    fn sample_lift_report() -> Value {
        let d2 = FinSimplicialSet::delta(2).shared();
        let horn = FinSimplicialSet::horn(2, 1).unwrap().shared();
        let pt = FinSimplicialSet::delta(0).shared();
        let square = LiftingSquare::new(
            SSetMap::inclusion(horn.clone(), d2.clone()).unwrap(),
            SSetMap::inclusion(horn, d2.clone()).unwrap(),
            SSetMap::terminal_map(d2.clone(), pt.clone()),
            SSetMap::terminal_map(d2, pt),
        )
        .unwrap();
        let lift = square.solve(&mut Budget::standard()).unwrap().unwrap();
        let cert = lift_certificate(&square.left, &square.top, &square.right, &square.bottom, &lift);
        envelope(
            "lift",
            &Params {
                trunc: 3,
                stages: 5,
                budget: 1_000_000,
                seed: 0,
            },
            &[("square.json".into(), b"{}".to_vec())],
            Outcome::Positive,
            json!({}),
            vec![cert],
            Vec::new(),
        )
    }

    #[test]
    fn valid_lift_report_verifies() {
        let report = sample_lift_report();
        assert_eq!(verify_report(&report).unwrap(), Outcome::Positive);
    }

    #[test]
    fn tampered_lift_report_fails_with_location() {
        let mut report = sample_lift_report();
        // replace the lift by a constant map: still simplicial, but the
        // triangle identities break
        let d2 = FinSimplicialSet::delta(2).shared();
        let vertex = d2.cells(0)[0].nd.clone();
        let constant = crate::sset::lifting::constant_map(d2.clone(), d2, &vertex);
        report["certificates"][0]["lift"] = sset_map_with_objects(&constant);
        let err = verify_report(&report).unwrap_err();
        assert_eq!(err.index, 0);
        assert!(err.reason.contains("triangle"));
    }

    #[test]
    fn partiality_is_preserved() {
        let mut report = sample_lift_report();
        report["verdict"] = json!("inconclusive");
        assert_eq!(verify_report(&report).unwrap(), Outcome::Inconclusive);
    }

    #[test]
    fn atomic_write_round_trips() {
        let dir = std::env::temp_dir().join("wfskit-report-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        write_atomic(&path, "{\"schema\":\"wfskit/1\"}").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"schema\":\"wfskit/1\"}");
    }
}
