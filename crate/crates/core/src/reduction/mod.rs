//! Pattern reduction and the dichotomy classifier.
//!
//! A pattern `P` reduces to `Q` when `Q` can be reached from `P` by merging
//! points, eliminating dangling points and extension. The search first closes
//! `P` under the two shrinking operations, then looks for a reached pattern
//! that occurs in `Q` (the extension step).

pub mod library;

use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::canon::canonical_form;
use crate::model::{Pattern, Structure};
use crate::occurrence::{find_embedding, validate_witness, OccurrenceWitness};

pub use library::{make_named, NamedPattern, PatternName, UnknownPatternName};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("cannot merge `{0}` with itself")]
    SamePoint(String),
    #[error("points `{0}` and `{1}` belong to different variables")]
    DifferentVariables(String, String),
    #[error("points `{a}` and `{b}` disagree on their edge to `{c}`")]
    ConflictingEdges { a: String, b: String, c: String },
    #[error("merging `{0}` and `{1}` would violate a distinctness constraint")]
    DistinctViolation(String, String),
    #[error("point `{0}` is not dangling")]
    NotDangling(String),
    #[error("removing `{0}` would empty a distinctness constraint")]
    DistinctRemoval(String),
    #[error("pattern has {0} constraints; at most two are supported")]
    Unsupported(usize),
    #[error("reduction trace does not replay: {0}")]
    BadTrace(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ReductionStep {
    /// `removed` is identified with `kept`.
    Merge { kept: String, removed: String },
    /// A point joined to the rest by a single compatibility edge, or by no
    /// edge at all, is deleted. A variable left without points goes too.
    DanglingElim { point: String },
}

/// Shrinking steps followed by an occurrence of the result in the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub embedding: WitnessView,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessView {
    pub var_map: std::collections::BTreeMap<String, String>,
    pub point_map: std::collections::BTreeMap<String, String>,
}

impl From<OccurrenceWitness> for WitnessView {
    fn from(w: OccurrenceWitness) -> Self {
        WitnessView {
            var_map: w.var_map,
            point_map: w.point_map,
        }
    }
}

impl ReductionTrace {
    /// Re-applies the steps to `from` and checks the embedding into `to`.
    pub fn replay(&self, from: &Pattern, to: &Pattern) -> Result<Pattern, ReductionError> {
        let mut p = from.clone();
        for step in &self.steps {
            p = apply_step(&p, step)?;
        }
        let witness = OccurrenceWitness {
            var_map: self.embedding.var_map.clone(),
            point_map: self.embedding.point_map.clone(),
        };
        if validate_witness(&p, to, &witness) {
            Ok(p)
        } else {
            Err(ReductionError::BadTrace("final embedding is not an occurrence".into()))
        }
    }
}

pub fn apply_step(p: &Pattern, step: &ReductionStep) -> Result<Pattern, ReductionError> {
    match step {
        ReductionStep::Merge { kept, removed } => merge_points(p, kept, removed),
        ReductionStep::DanglingElim { point } => eliminate_point(p, point),
    }
}

fn point(p: &Pattern, name: &str) -> Result<usize, ReductionError> {
    p.point_index(name)
        .ok_or_else(|| ReductionError::UnknownPoint(name.to_string()))
}

/// Merges `b` into `a`.
pub fn merge_points(p: &Pattern, a: &str, b: &str) -> Result<Pattern, ReductionError> {
    merge_idx(p, point(p, a)?, point(p, b)?)
}

fn merge_idx(p: &Pattern, a: usize, b: usize) -> Result<Pattern, ReductionError> {
    let name = |x: usize| p.point_name(x).to_string();
    if a == b {
        return Err(ReductionError::SamePoint(name(a)));
    }
    if p.var_of(a) != p.var_of(b) {
        return Err(ReductionError::DifferentVariables(name(a), name(b)));
    }
    for c in 0..p.num_points() {
        if let (Some(x), Some(y)) = (p.label(a, c), p.label(b, c)) {
            if x != y {
                return Err(ReductionError::ConflictingEdges {
                    a: name(a),
                    b: name(b),
                    c: name(c),
                });
            }
        }
    }
    let rename = |x: usize| if x == b { a } else { x };
    let mut distinct = Vec::new();
    for d in p.distinct() {
        let kept: Vec<(usize, usize)> = d
            .iter()
            .map(|&(x, y)| (rename(x), rename(y)))
            .filter(|&(x, y)| x != y)
            .collect();
        if kept.is_empty() {
            return Err(ReductionError::DistinctViolation(name(a), name(b)));
        }
        distinct.push(kept);
    }
    let keep: Vec<usize> = (0..p.num_points()).filter(|&x| x != b).collect();
    let mut index = vec![usize::MAX; p.num_points()];
    for (i, &x) in keep.iter().enumerate() {
        index[x] = i;
    }
    let distinct = distinct
        .into_iter()
        .map(|d| d.into_iter().map(|(x, y)| (index[x], index[y])).collect())
        .collect();
    let label = |i: usize, j: usize| {
        let (x, y) = (keep[i], keep[j]);
        let merged = |other: usize| p.label(a, other).or_else(|| p.label(b, other));
        if x == a {
            merged(y)
        } else if y == a {
            merged(x)
        } else {
            p.label(x, y)
        }
    };
    Ok(Pattern::from_parts(
        p.var_names().to_vec(),
        keep.iter()
            .map(|&x| (p.point_name(x).to_string(), p.var_of(x)))
            .collect(),
        label,
        distinct,
    ))
}

pub fn is_dangling(p: &Pattern, a: usize) -> bool {
    let edges: Vec<bool> = (0..p.num_points()).filter_map(|c| p.label(a, c)).collect();
    edges.is_empty() || edges == [true]
}

/// Deletes the dangling point `a` (see [`ReductionStep::DanglingElim`]).
pub fn eliminate_point(p: &Pattern, a: &str) -> Result<Pattern, ReductionError> {
    let ai = point(p, a)?;
    if !is_dangling(p, ai) {
        return Err(ReductionError::NotDangling(a.to_string()));
    }
    remove_idx(p, ai)
}

fn remove_idx(p: &Pattern, a: usize) -> Result<Pattern, ReductionError> {
    // Disjuncts mentioning the deleted point are dropped; the rest of their
    // disjunction must still be satisfiable.
    for d in p.distinct() {
        if d.iter().all(|&(x, y)| x == a || y == a) {
            return Err(ReductionError::DistinctRemoval(p.point_name(a).to_string()));
        }
    }
    let mut keep_point = vec![true; p.num_points()];
    keep_point[a] = false;
    let v = p.var_of(a);
    let keep_var: Vec<bool> = (0..p.num_vars())
        .map(|w| w != v || p.domain(v).len() > 1)
        .collect();
    Ok(p.restrict(&keep_point, &keep_var))
}

/// Removes dangling points until none is left, returning the steps taken.
pub fn eliminate_dangling_points(p: &Pattern) -> (Pattern, Vec<ReductionStep>) {
    let mut cur = p.clone();
    let mut steps = Vec::new();
    'outer: loop {
        for a in 0..cur.num_points() {
            if is_dangling(&cur, a) {
                if let Ok(next) = remove_idx(&cur, a) {
                    steps.push(ReductionStep::DanglingElim {
                        point: cur.point_name(a).to_string(),
                    });
                    cur = next;
                    continue 'outer;
                }
            }
        }
        return (cur, steps);
    }
}

/// A pattern reached by shrinking steps.
#[derive(Clone, Debug)]
pub struct Reduct {
    pub pattern: Pattern,
    pub steps: Vec<ReductionStep>,
}

/// Every pattern reachable from `p` by merging and dangling-point
/// elimination, one per isomorphism class, in breadth-first order.
pub fn shrinking_closure(p: &Pattern) -> Vec<Reduct> {
    let mut seen = HashSet::new();
    seen.insert(canonical_form(p));
    let mut out = vec![Reduct {
        pattern: p.clone(),
        steps: Vec::new(),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let cur = out[i].pattern.clone();
        let mut next = Vec::new();
        for a in 0..cur.num_points() {
            for b in (a + 1)..cur.num_points() {
                if cur.var_of(a) == cur.var_of(b) {
                    if let Ok(m) = merge_idx(&cur, a, b) {
                        next.push((
                            m,
                            ReductionStep::Merge {
                                kept: cur.point_name(a).to_string(),
                                removed: cur.point_name(b).to_string(),
                            },
                        ));
                    }
                }
            }
            if is_dangling(&cur, a) {
                if let Ok(r) = remove_idx(&cur, a) {
                    next.push((
                        r,
                        ReductionStep::DanglingElim {
                            point: cur.point_name(a).to_string(),
                        },
                    ));
                }
            }
        }
        for (q, step) in next {
            if seen.insert(canonical_form(&q)) {
                let mut steps = out[i].steps.clone();
                steps.push(step);
                out.push(Reduct { pattern: q, steps });
                queue.push_back(out.len() - 1);
            }
        }
    }
    out
}

/// A reduction of `p` to `q`, if the search finds one.
pub fn reduces_to(p: &Pattern, q: &Pattern) -> Option<ReductionTrace> {
    reduces_via(&shrinking_closure(p), q)
}

fn reduces_via(closure: &[Reduct], q: &Pattern) -> Option<ReductionTrace> {
    closure.iter().find_map(|r| {
        find_embedding(&r.pattern, q).map(|e| ReductionTrace {
            steps: r.steps.clone(),
            embedding: e.to_witness(&r.pattern, q).into(),
        })
    })
}

fn library_closure(name: PatternName) -> &'static [Reduct] {
    static Z: OnceLock<Vec<Reduct>> = OnceLock::new();
    static TWO_V: OnceLock<Vec<Reduct>> = OnceLock::new();
    let cell = match name {
        PatternName::Z => &Z,
        PatternName::TwoV => &TWO_V,
        _ => unreachable!("only hard patterns are cached"),
    };
    cell.get_or_init(|| shrinking_closure(&name.pattern()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IntractableReason {
    /// Some constraint keeps two incompatibility edges under every merging
    /// of points: either one pair of edges is unmergeable on its own, or no
    /// single sequence of merges brings all constraints down to one
    /// incompatibility edge each. Such a pattern cannot occur in the CNF
    /// encoding of [`crate::generators::sat1_to_csp`].
    TwoIncompatSameConstraint,
    /// `Z` reduces to the pattern.
    ReachesZ,
    /// `2V` reduces to the pattern.
    Reaches2V,
    /// No tractable target is reachable.
    NotReducibleToT,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Classification {
    Tractable {
        target: PatternName,
        trace: ReductionTrace,
    },
    Intractable {
        reason: IntractableReason,
    },
}

impl Classification {
    pub fn is_tractable(&self) -> bool {
        matches!(self, Classification::Tractable { .. })
    }

    pub fn target(&self) -> Option<PatternName> {
        match self {
            Classification::Tractable { target, .. } => Some(*target),
            Classification::Intractable { .. } => None,
        }
    }
}

/// Targets tried in order; the first reachable one is reported.
pub const TARGET_ORDER: [PatternName; 7] = [
    PatternName::OneI,
    PatternName::T1,
    PatternName::T2,
    PatternName::T3,
    PatternName::T4,
    PatternName::T5,
    PatternName::TwoI,
];

/// Classifies a pattern on at most two constraints.
pub fn classify(p: &Pattern) -> Result<Classification, ReductionError> {
    let scopes = p.constraint_scopes();
    if scopes.len() > 2 {
        return Err(ReductionError::Unsupported(scopes.len()));
    }
    if has_unmergeable_incompatibilities(p) {
        return Ok(Classification::Intractable {
            reason: IntractableReason::TwoIncompatSameConstraint,
        });
    }
    let closure = shrinking_closure(p);
    for target in TARGET_ORDER {
        if let Some(trace) = reduces_via(&closure, &target.pattern()) {
            return Ok(Classification::Tractable { target, trace });
        }
    }
    let reason = if reduces_via(library_closure(PatternName::Z), p).is_some() {
        IntractableReason::ReachesZ
    } else if reduces_via(library_closure(PatternName::TwoV), p).is_some() {
        IntractableReason::Reaches2V
    } else if !merges_to_single_incompatibilities(p) {
        IntractableReason::TwoIncompatSameConstraint
    } else {
        IntractableReason::NotReducibleToT
    };
    Ok(Classification::Intractable { reason })
}

/// True iff some constraint carries two distinct incompatibility edges that
/// no sequence of merges can identify.
pub fn has_unmergeable_incompatibilities(p: &Pattern) -> bool {
    let incompat: Vec<(usize, usize)> = p
        .edges()
        .into_iter()
        .filter(|e| !e.2)
        .map(|(x, y, _)| if p.var_of(x) < p.var_of(y) { (x, y) } else { (y, x) })
        .collect();
    for (i, &(a, b)) in incompat.iter().enumerate() {
        for &(c, d) in &incompat[i + 1..] {
            if p.var_of(a) != p.var_of(c) || p.var_of(b) != p.var_of(d) {
                continue;
            }
            if !edges_mergeable(p, (a, b), (c, d)) {
                return true;
            }
        }
    }
    false
}

/// True iff some sequence of merges leaves every constraint with at most
/// one incompatibility edge.
pub fn merges_to_single_incompatibilities(p: &Pattern) -> bool {
    fn ok(p: &Pattern) -> bool {
        let mut seen = HashSet::new();
        p.edges().into_iter().filter(|e| !e.2).all(|(a, b, _)| {
            let (x, y) = (p.var_of(a), p.var_of(b));
            seen.insert((x.min(y), x.max(y)))
        })
    }
    let mut seen = HashSet::from([canonical_form(p)]);
    let mut stack = vec![p.clone()];
    while let Some(cur) = stack.pop() {
        if ok(&cur) {
            return true;
        }
        for a in 0..cur.num_points() {
            for b in (a + 1)..cur.num_points() {
                if cur.var_of(a) != cur.var_of(b) {
                    continue;
                }
                if let Ok(m) = merge_idx(&cur, a, b) {
                    if seen.insert(canonical_form(&m)) {
                        stack.push(m);
                    }
                }
            }
        }
    }
    false
}

fn edges_mergeable(p: &Pattern, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let (an, bn, cn, dn) = (p.point_name(a), p.point_name(b), p.point_name(c), p.point_name(d));
    let mut cur = p.clone();
    if a != c {
        match merge_points(&cur, an, cn) {
            Ok(m) => cur = m,
            Err(_) => return false,
        }
    }
    b == d || merge_points(&cur, bn, dn).is_ok()
}
