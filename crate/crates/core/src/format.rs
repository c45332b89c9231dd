//! JSON file formats for patterns and instances.
//!
//! Every file carries `"version": "pattern-csp/1"`. Points are always
//! strings. A pattern file may name a library pattern instead of listing
//! it: `{"version": "pattern-csp/1", "pattern": "$T4"}`.
//!
//! ```json
//! {"version": "pattern-csp/1",
//!  "points": [{"id": "a", "var": "x"}, {"id": "b", "var": "y"}],
//!  "edges": [{"p": "a", "q": "b", "compat": false}],
//!  "distinct_any": []}
//! ```
//!
//! Instance files list domains and, per constrained scope, the allowed pairs;
//! scopes not listed are trivial.
//!
//! ```json
//! {"version": "pattern-csp/1",
//!  "variables": [{"name": "x", "domain": ["x0", "x1"]}, {"name": "y", "domain": ["y0"]}],
//!  "constraints": [{"scope": ["x", "y"], "allowed": [["x0", "y0"]]}]}
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::model::{Instance, ModelError, Pattern, Relation, Structure};
use crate::reduction::library::PatternName;

pub const VERSION: &str = "pattern-csp/1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported version `{0}`, expected `{VERSION}`")]
    Version(String),
    #[error("unknown library pattern `{0}`")]
    UnknownPattern(String),
    #[error("a pattern reference must stand alone, without points or edges")]
    MixedReference,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointEntry {
    pub id: String,
    pub var: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EdgeEntry {
    pub p: String,
    pub q: String,
    pub compat: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub version: String,
    /// `$NAME` of a library pattern.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub distinct_any: Vec<Vec<(String, String)>>,
}

impl PatternFile {
    pub fn from_pattern(p: &Pattern) -> Self {
        PatternFile {
            version: VERSION.to_string(),
            pattern: None,
            points: (0..p.num_points())
                .map(|i| PointEntry {
                    id: p.point_name(i).to_string(),
                    var: p.var_name(p.var_of(i)).to_string(),
                })
                .collect(),
            edges: p
                .edges()
                .into_iter()
                .map(|(a, b, compat)| EdgeEntry {
                    p: p.point_name(a).to_string(),
                    q: p.point_name(b).to_string(),
                    compat,
                })
                .collect(),
            distinct_any: p
                .distinct()
                .iter()
                .map(|d| {
                    d.iter()
                        .map(|&(a, b)| (p.point_name(a).to_string(), p.point_name(b).to_string()))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_pattern(&self) -> Result<Pattern, FormatError> {
        check_version(&self.version)?;
        if let Some(r) = &self.pattern {
            if !self.points.is_empty() || !self.edges.is_empty() || !self.distinct_any.is_empty() {
                return Err(FormatError::MixedReference);
            }
            let name = r
                .strip_prefix('$')
                .and_then(|n| n.parse::<PatternName>().ok())
                .ok_or_else(|| FormatError::UnknownPattern(r.clone()))?;
            return Ok(name.pattern());
        }
        let mut b = Pattern::builder();
        for pt in &self.points {
            b = b.point(&pt.id, &pt.var);
        }
        for e in &self.edges {
            b = b.edge(&e.p, &e.q, e.compat);
        }
        for d in &self.distinct_any {
            b = b.distinct_any(d.iter().cloned());
        }
        Ok(b.build()?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VariableEntry {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstraintEntry {
    pub scope: (String, String),
    pub allowed: Vec<(String, String)>,
}

/// Where a generated instance came from: generator name, its parameters and
/// the seed, enough to regenerate it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub variables: Vec<VariableEntry>,
    #[serde(default)]
    pub constraints: Vec<ConstraintEntry>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance, provenance: Option<Provenance>) -> Self {
        let (domains, relations) = inst.to_parts();
        InstanceFile {
            version: VERSION.to_string(),
            provenance,
            variables: domains
                .into_iter()
                .map(|(name, domain)| VariableEntry { name, domain })
                .collect(),
            constraints: relations
                .into_iter()
                .map(|r| ConstraintEntry {
                    scope: r.scope,
                    allowed: r.allowed,
                })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        check_version(&self.version)?;
        let domains: Vec<(String, Vec<String>)> = self
            .variables
            .iter()
            .map(|v| (v.name.clone(), v.domain.clone()))
            .collect();
        let relations: Vec<Relation> = self
            .constraints
            .iter()
            .map(|c| Relation {
                scope: c.scope.clone(),
                allowed: c.allowed.clone(),
            })
            .collect();
        Ok(Instance::build(&domains, &relations)?)
    }
}

fn check_version(v: &str) -> Result<(), FormatError> {
    if v == VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v.to_string()))
    }
}

pub fn read_pattern(text: &str) -> Result<Pattern, FormatError> {
    serde_json::from_str::<PatternFile>(text)?.to_pattern()
}

pub fn read_instance(text: &str) -> Result<Instance, FormatError> {
    serde_json::from_str::<InstanceFile>(text)?.to_instance()
}

/// Also returns the provenance block, if any.
pub fn read_instance_with_provenance(text: &str) -> Result<(Instance, Option<Provenance>), FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    Ok((file.to_instance()?, file.provenance))
}

pub fn write_pattern(p: &Pattern) -> String {
    serde_json::to_string_pretty(&PatternFile::from_pattern(p)).expect("serializable")
}

pub fn write_instance(inst: &Instance, provenance: Option<Provenance>) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst, provenance)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occurrence::pattern_isomorphic;

    #[test]
    fn library_reference() {
        let p = read_pattern(r#"{"version": "pattern-csp/1", "pattern": "$T4"}"#).unwrap();
        assert_eq!(p, PatternName::T4.pattern());
    }

    #[test]
    fn unknown_reference() {
        let e = read_pattern(r#"{"version": "pattern-csp/1", "pattern": "$T9"}"#).unwrap_err();
        assert!(matches!(e, FormatError::UnknownPattern(_)));
        let e = read_pattern(r#"{"version": "pattern-csp/1", "pattern": "T4"}"#).unwrap_err();
        assert!(matches!(e, FormatError::UnknownPattern(_)));
    }

    #[test]
    fn reference_with_points_is_rejected() {
        let e = read_pattern(
            r#"{"version": "pattern-csp/1", "pattern": "$T4", "points": [{"id": "a", "var": "x"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(e, FormatError::MixedReference));
    }

    #[test]
    fn wrong_version() {
        let e = read_pattern(r#"{"version": "2", "points": []}"#).unwrap_err();
        assert!(matches!(e, FormatError::Version(_)));
    }

    #[test]
    fn library_patterns_round_trip() {
        for name in PatternName::ALL {
            let p = name.pattern();
            let q = read_pattern(&write_pattern(&p)).unwrap();
            assert_eq!(p, q, "{name}");
            assert!(pattern_isomorphic(&p, &q));
        }
    }

    #[test]
    fn instance_round_trip_with_provenance() {
        let inst = Instance::build(
            &[("x", vec!["x0", "x1"]), ("y", vec!["y0"])],
            &[Relation::new("x", "y", [("x0", "y0")])],
        )
        .unwrap();
        let prov = Provenance {
            generator: "random-free".into(),
            params: serde_json::json!({"n": 2}),
            seed: Some(7),
        };
        let (back, p) = read_instance_with_provenance(&write_instance(&inst, Some(prov.clone()))).unwrap();
        assert_eq!(back, inst);
        assert_eq!(p, Some(prov));
    }

    #[test]
    fn bad_instance_reports_model_error() {
        let e = read_instance(
            r#"{"version": "pattern-csp/1", "variables": [{"name": "x", "domain": ["a"]}],
                "constraints": [{"scope": ["x", "z"], "allowed": []}]}"#,
        )
        .unwrap_err();
        assert!(matches!(e, FormatError::Model(ModelError::UnknownVariable(_))));
    }
}
