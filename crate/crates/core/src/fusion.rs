//! Simple and complex fusion of two variables.
//!
//! A fusion replaces `v1` and `v2` by a single variable (keeping the name of
//! `v1`) whose points stand for pairs of original points: `u` stands for
//! `(u, f(u))`, and in a complex fusion each `p` of `v2` stands for
//! `(hinge, p)`. Solvability is preserved when the fusion function satisfies
//! the premise "whenever `u` is in a solution, some solution contains both `u`
//! and `f(u)`". That premise is the caller's obligation; [`fuse_checked`]
//! verifies it with the oracle.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{Assignment, Instance, Structure};
use crate::solvers::oracle;
use crate::solvers::SolveError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionKind {
    Simple,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FusionSpec {
    pub kind: FusionKind,
    pub v1: String,
    pub v2: String,
    /// Defined on every point of `v1` except the hinge.
    pub fusion_fn: BTreeMap<String, String>,
    pub hinge: Option<String>,
}

impl FusionSpec {
    pub fn simple(v1: impl Into<String>, v2: impl Into<String>, f: BTreeMap<String, String>) -> Self {
        FusionSpec {
            kind: FusionKind::Simple,
            v1: v1.into(),
            v2: v2.into(),
            fusion_fn: f,
            hinge: None,
        }
    }

    pub fn complex(
        v1: impl Into<String>,
        v2: impl Into<String>,
        hinge: impl Into<String>,
        f: BTreeMap<String, String>,
    ) -> Self {
        FusionSpec {
            kind: FusionKind::Complex,
            v1: v1.into(),
            v2: v2.into(),
            fusion_fn: f,
            hinge: Some(hinge.into()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FusionError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("cannot fuse variable `{0}` with itself")]
    SameVariable(String),
    #[error("a complex fusion needs a hinge and a simple fusion must not have one")]
    HingeMismatch,
    #[error("hinge `{0}` is not a point of the first variable")]
    BadHinge(String),
    #[error("fusion function is undefined on `{0}`")]
    NotTotal(String),
    #[error("fusion function is defined on `{0}`, which is outside its domain")]
    ExtraKey(String),
    #[error("fusion function maps `{point}` to `{image}`, which is not a point of the second variable")]
    BadImage { point: String, image: String },
    #[error("fusion premise fails: `{0}` is in a solution but never together with its image")]
    PremiseViolated(String),
    #[error(transparent)]
    Oracle(#[from] SolveError),
}

/// Everything needed to map solutions of the fused instance back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FusionRecord {
    pub spec: FusionSpec,
    /// Points of `v2` before fusion.
    pub v2_points: BTreeSet<String>,
    /// Points left out because the pair they would stand for is incompatible.
    pub dropped: Vec<String>,
}

impl FusionRecord {
    /// Turns a solution of the fused instance into one of the original.
    pub fn expand_solution(&self, solution: &Assignment) -> Assignment {
        let mut out = solution.clone();
        let Some(x) = solution.get(&self.spec.v1).map(str::to_string) else {
            return out;
        };
        if self.v2_points.contains(&x) {
            let hinge = self.spec.hinge.clone().expect("v2 points survive only in complex fusions");
            out.insert(self.spec.v1.clone(), hinge);
            out.insert(self.spec.v2.clone(), x);
        } else {
            let image = self.spec.fusion_fn[&x].clone();
            out.insert(self.spec.v2.clone(), image);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fused {
    pub instance: Instance,
    pub record: FusionRecord,
}

/// Replays fusion records, most recent first, over a solution of the final instance.
pub fn expand_through(records: &[FusionRecord], solution: &Assignment) -> Assignment {
    records
        .iter()
        .rev()
        .fold(solution.clone(), |s, r| r.expand_solution(&s))
}

pub fn simple_fusion(instance: &Instance, spec: &FusionSpec) -> Result<Fused, FusionError> {
    if spec.kind != FusionKind::Simple {
        return Err(FusionError::HingeMismatch);
    }
    fuse(instance, spec)
}

pub fn complex_fusion(instance: &Instance, spec: &FusionSpec) -> Result<Fused, FusionError> {
    if spec.kind != FusionKind::Complex {
        return Err(FusionError::HingeMismatch);
    }
    fuse(instance, spec)
}

/// Either kind of fusion, dispatched on `spec.kind`.
pub fn fuse(instance: &Instance, spec: &FusionSpec) -> Result<Fused, FusionError> {
    let (v1, v2, hinge, f) = validate(instance, spec)?;
    let inside = |p: usize| instance.var_of(p) == v1 || instance.var_of(p) == v2;

    // The pair each surviving point of the fused variable stands for.
    let mut pair: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut dropped = Vec::new();
    for &u in instance.domain(v1) {
        if Some(u) == hinge {
            continue;
        }
        pair.insert(u, (u, f[&u]));
    }
    if let Some(a) = hinge {
        for &p in instance.domain(v2) {
            pair.insert(p, (a, p));
        }
    }
    pair.retain(|&x, &mut (a, b)| {
        let ok = instance.compatible(a, b);
        if !ok {
            dropped.push(instance.point_name(x).to_string());
        }
        ok
    });

    let var_names: Vec<String> = (0..instance.num_vars())
        .filter(|&v| v != v2)
        .map(|v| instance.var_name(v).to_string())
        .collect();
    let new_var = |v: usize| if v > v2 { v - 1 } else { v };
    let fused_index = if v1 > v2 { v1 - 1 } else { v1 };
    let kept: Vec<usize> = (0..instance.num_points())
        .filter(|&p| !inside(p) || pair.contains_key(&p))
        .collect();
    let points = kept
        .iter()
        .map(|&p| {
            let v = if inside(p) { fused_index } else { new_var(instance.var_of(p)) };
            (instance.point_name(p).to_string(), v)
        })
        .collect();
    let fused = Instance::from_parts(var_names, points, |i, j| {
        let (p, q) = (kept[i], kept[j]);
        match (pair.get(&p), pair.get(&q)) {
            (Some(&(a, b)), None) => instance.compatible(a, q) && instance.compatible(b, q),
            (None, Some(&(a, b))) => instance.compatible(a, p) && instance.compatible(b, p),
            _ => instance.compatible(p, q),
        }
    });
    Ok(Fused {
        instance: fused,
        record: FusionRecord {
            spec: spec.clone(),
            v2_points: instance
                .domain(v2)
                .iter()
                .map(|&p| instance.point_name(p).to_string())
                .collect(),
            dropped,
        },
    })
}

/// Verifies the fusion premise with the oracle, then fuses.
pub fn fuse_checked(instance: &Instance, spec: &FusionSpec, budget: u64) -> Result<Fused, FusionError> {
    let (v1, v2, hinge, f) = validate(instance, spec)?;
    for &u in instance.domain(v1) {
        if Some(u) == hinge {
            continue;
        }
        let only_u = pin(instance, &[(v1, u)]);
        if oracle::find_solution(&only_u, budget)?.is_some() {
            let both = pin(instance, &[(v1, u), (v2, f[&u])]);
            if oracle::find_solution(&both, budget)?.is_none() {
                return Err(FusionError::PremiseViolated(instance.point_name(u).to_string()));
            }
        }
    }
    fuse(instance, spec)
}

/// Restricts the given variables to the given single points.
fn pin(instance: &Instance, fixed: &[(usize, usize)]) -> Instance {
    let keep: Vec<bool> = (0..instance.num_points())
        .map(|p| {
            fixed
                .iter()
                .all(|&(v, q)| instance.var_of(p) != v || p == q)
        })
        .collect();
    instance.restrict(&keep, &vec![true; instance.num_vars()])
}

type Validated = (usize, usize, Option<usize>, BTreeMap<usize, usize>);

fn validate(instance: &Instance, spec: &FusionSpec) -> Result<Validated, FusionError> {
    let var = |name: &str| {
        instance
            .var_index(name)
            .ok_or_else(|| FusionError::UnknownVariable(name.to_string()))
    };
    let (v1, v2) = (var(&spec.v1)?, var(&spec.v2)?);
    if v1 == v2 {
        return Err(FusionError::SameVariable(spec.v1.clone()));
    }
    let hinge = match (spec.kind, &spec.hinge) {
        (FusionKind::Simple, None) => None,
        (FusionKind::Complex, Some(h)) => {
            let a = instance
                .point_index(h)
                .filter(|&a| instance.var_of(a) == v1)
                .ok_or_else(|| FusionError::BadHinge(h.clone()))?;
            Some(a)
        }
        _ => return Err(FusionError::HingeMismatch),
    };
    let mut f = BTreeMap::new();
    for &u in instance.domain(v1) {
        if Some(u) == hinge {
            continue;
        }
        let name = instance.point_name(u);
        let image = spec
            .fusion_fn
            .get(name)
            .ok_or_else(|| FusionError::NotTotal(name.to_string()))?;
        let b = instance
            .point_index(image)
            .filter(|&b| instance.var_of(b) == v2)
            .ok_or_else(|| FusionError::BadImage {
                point: name.to_string(),
                image: image.clone(),
            })?;
        f.insert(u, b);
    }
    for key in spec.fusion_fn.keys() {
        let inside = instance
            .point_index(key)
            .is_some_and(|u| instance.var_of(u) == v1 && Some(u) != hinge);
        if !inside {
            return Err(FusionError::ExtraKey(key.clone()));
        }
    }
    Ok((v1, v2, hinge, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relation;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn single_points_fuse_to_one_point() {
        let inst = Instance::build(
            &[("v1", vec!["u"]), ("v2", vec!["p"]), ("x", vec!["q"])],
            &[],
        )
        .unwrap();
        let out = simple_fusion(&inst, &FusionSpec::simple("v1", "v2", map(&[("u", "p")]))).unwrap();
        assert_eq!(out.instance.var_names(), ["v1", "x"]);
        assert_eq!(out.instance.num_points(), 2);
        let (u, q) = (
            out.instance.point_index("u").unwrap(),
            out.instance.point_index("q").unwrap(),
        );
        assert!(out.instance.compatible(u, q));
    }

    #[test]
    fn simple_label_is_conjunction() {
        // u ~ q but f(u) = p is incompatible with q.
        let inst = Instance::build(
            &[("v1", vec!["u"]), ("v2", vec!["p", "p2"]), ("x", vec!["q", "q2"])],
            &[Relation::new("v2", "x", [("p", "q2"), ("p2", "q"), ("p2", "q2")])],
        )
        .unwrap();
        let out = simple_fusion(&inst, &FusionSpec::simple("v1", "v2", map(&[("u", "p")]))).unwrap();
        let fi = &out.instance;
        assert!(!fi.compatible(fi.point_index("u").unwrap(), fi.point_index("q").unwrap()));
        assert!(fi.compatible(fi.point_index("u").unwrap(), fi.point_index("q2").unwrap()));
        assert_eq!(fi.num_points(), inst.num_points() - 2);
    }

    #[test]
    fn complex_with_only_hinge_renames_v2() {
        let inst = Instance::build(
            &[("v1", vec!["a"]), ("v2", vec!["p", "r"]), ("x", vec!["q", "s"])],
            &[Relation::new("v1", "x", [("a", "s")])],
        )
        .unwrap();
        let out = complex_fusion(&inst, &FusionSpec::complex("v1", "v2", "a", BTreeMap::new())).unwrap();
        let fi = &out.instance;
        assert_eq!(fi.domain_size(fi.var_index("v1").unwrap()), 2);
        // a is incompatible with q, so every v2 point is too.
        for p in ["p", "r"] {
            assert!(!fi.compatible(fi.point_index(p).unwrap(), fi.point_index("q").unwrap()));
            assert!(fi.compatible(fi.point_index(p).unwrap(), fi.point_index("s").unwrap()));
        }
        let sol: Assignment = [("v1", "r"), ("x", "s")].into_iter().collect();
        let back = out.record.expand_solution(&sol);
        assert_eq!(back.get("v1"), Some("a"));
        assert_eq!(back.get("v2"), Some("r"));
        assert!(inst.is_solution(&back).unwrap());
    }

    #[test]
    fn incompatible_pair_is_dropped() {
        let inst = Instance::build(
            &[("v1", vec!["u"]), ("v2", vec!["p"])],
            &[Relation::empty("v1", "v2")],
        )
        .unwrap();
        let out = fuse(&inst, &FusionSpec::simple("v1", "v2", map(&[("u", "p")]))).unwrap();
        assert_eq!(out.record.dropped, ["u"]);
        assert_eq!(out.instance.domain_size(0), 0);
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let inst = Instance::build(&[("v1", vec!["u", "w"]), ("v2", vec!["p"])], &[]).unwrap();
        assert_eq!(
            fuse(&inst, &FusionSpec::simple("v1", "v2", map(&[("u", "p")]))),
            Err(FusionError::NotTotal("w".into()))
        );
        assert!(matches!(
            fuse(&inst, &FusionSpec::simple("v1", "v2", map(&[("u", "p"), ("w", "u")]))),
            Err(FusionError::BadImage { .. })
        ));
        let mut spec = FusionSpec::simple("v1", "v2", map(&[("u", "p"), ("w", "p")]));
        spec.hinge = Some("u".into());
        assert_eq!(fuse(&inst, &spec), Err(FusionError::HingeMismatch));
        assert_eq!(
            fuse(&inst, &FusionSpec::complex("v1", "v2", "u", map(&[("u", "p"), ("w", "p")]))),
            Err(FusionError::ExtraKey("u".into()))
        );
    }

    #[test]
    fn checked_fusion_detects_bad_premise() {
        // u only works with p2.
        let inst = Instance::build(
            &[("v1", vec!["u"]), ("v2", vec!["p", "p2"])],
            &[Relation::new("v1", "v2", [("u", "p2")])],
        )
        .unwrap();
        let bad = FusionSpec::simple("v1", "v2", map(&[("u", "p")]));
        assert_eq!(
            fuse_checked(&inst, &bad, 1000),
            Err(FusionError::PremiseViolated("u".into()))
        );
        let good = FusionSpec::simple("v1", "v2", map(&[("u", "p2")]));
        assert!(fuse_checked(&inst, &good, 1000).is_ok());
    }
}
