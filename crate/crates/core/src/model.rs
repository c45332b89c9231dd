//! Patterns, instances and assignments.
//!
//! A *point* is a variable/value pair. Patterns and instances are both
//! two-level labelled graphs over points: every point belongs to exactly one
//! variable, and a pair of points from different variables is either
//! compatible, incompatible, or (in a pattern only) left undefined.
//!
//! Names are strings at the interface; internally points and variables are
//! addressed by dense indices in declaration order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate point id `{0}`")]
    DuplicatePoint(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("constraint scope repeats variable `{0}`")]
    RepeatedScope(String),
    #[error("point `{point}` does not belong to variable `{var}`")]
    PointNotInVariable { point: String, var: String },
    #[error("edge {{{0}, {1}}} joins two points of the same variable")]
    SameVariableEdge(String, String),
    #[error("edge {{{0}, {1}}} is labelled twice with different labels")]
    ConflictingEdge(String, String),
    #[error("distinctness pair {{{0}, {1}}} must join two different points of one variable")]
    BadDistinctPair(String, String),
    #[error("empty distinctness disjunction")]
    EmptyDisjunction,
    #[error("assignment leaves variable `{0}` unassigned")]
    MissingVariable(String),
}

/// A binary relation listed for one ordered scope when building an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub scope: (String, String),
    pub allowed: Vec<(String, String)>,
}

impl Relation {
    pub fn new<A: Into<String>, B: Into<String>>(
        first: impl Into<String>,
        second: impl Into<String>,
        allowed: impl IntoIterator<Item = (A, B)>,
    ) -> Self {
        Relation {
            scope: (first.into(), second.into()),
            allowed: allowed
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        }
    }

    /// The relation allowing no pair at all.
    pub fn empty(first: impl Into<String>, second: impl Into<String>) -> Self {
        Relation {
            scope: (first.into(), second.into()),
            allowed: Vec::new(),
        }
    }
}

/// A total or partial choice of one point per variable, keyed by names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: impl Into<String>, point: impl Into<String>) -> Option<String> {
        self.0.insert(var.into(), point.into())
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn remove(&mut self, var: &str) -> Option<String> {
        self.0.remove(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(v, p)| (v.as_str(), p.as_str()))
    }
}

impl<V: Into<String>, P: Into<String>> FromIterator<(V, P)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (V, P)>>(iter: I) -> Self {
        Assignment(
            iter.into_iter()
                .map(|(v, p)| (v.into(), p.into()))
                .collect(),
        )
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, p)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}: {p}")?;
        }
        write!(f, "}}")
    }
}

/// Read-only view shared by patterns and instances, used by occurrence search.
pub trait Structure {
    fn num_vars(&self) -> usize;
    fn num_points(&self) -> usize;
    fn var_of(&self, p: usize) -> usize;
    fn domain(&self, v: usize) -> &[usize];
    /// `None` for undefined pairs and for pairs inside one variable.
    fn label(&self, p: usize, q: usize) -> Option<bool>;
    fn var_name(&self, v: usize) -> &str;
    fn point_name(&self, p: usize) -> &str;
}

#[derive(Clone, Debug, Default)]
struct Names {
    list: Vec<String>,
    index: HashMap<String, usize>,
}

impl Names {
    fn push(&mut self, name: String) -> Option<usize> {
        if self.index.contains_key(&name) {
            return None;
        }
        let i = self.list.len();
        self.index.insert(name.clone(), i);
        self.list.push(name);
        Some(i)
    }

    fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

impl PartialEq for Names {
    fn eq(&self, other: &Self) -> bool {
        self.list == other.list
    }
}

impl Eq for Names {}

/// A fully specified binary CSP instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    vars: Names,
    points: Names,
    point_var: Vec<usize>,
    domains: Vec<Vec<usize>>,
    // Row-major |A|x|A| compatibility matrix; same-variable entries unused.
    compat: Vec<bool>,
}

impl Instance {
    /// Builds an instance from per-variable domains and listed relations.
    ///
    /// Pairs of variables with no listed relation are unconstrained. Within a
    /// listed relation every pair not in `allowed` is incompatible. Several
    /// relations on the same scope are intersected.
    pub fn build<V, P>(domains: &[(V, Vec<P>)], relations: &[Relation]) -> Result<Self, ModelError>
    where
        V: AsRef<str>,
        P: AsRef<str>,
    {
        let mut vars = Names::default();
        let mut points = Names::default();
        let mut point_var = Vec::new();
        for (var, dom) in domains {
            let v = vars
                .push(var.as_ref().to_string())
                .ok_or_else(|| ModelError::DuplicateVariable(var.as_ref().to_string()))?;
            for p in dom {
                points
                    .push(p.as_ref().to_string())
                    .ok_or_else(|| ModelError::DuplicatePoint(p.as_ref().to_string()))?;
                point_var.push(v);
            }
        }
        let n = point_var.len();
        let mut compat = vec![true; n * n];
        for rel in relations {
            let (a, b) = (&rel.scope.0, &rel.scope.1);
            let va = vars
                .get(a)
                .ok_or_else(|| ModelError::UnknownVariable(a.clone()))?;
            let vb = vars
                .get(b)
                .ok_or_else(|| ModelError::UnknownVariable(b.clone()))?;
            if va == vb {
                return Err(ModelError::RepeatedScope(a.clone()));
            }
            let mut allowed = vec![false; n * n];
            for (p, q) in &rel.allowed {
                let pi = points
                    .get(p)
                    .ok_or_else(|| ModelError::UnknownPoint(p.clone()))?;
                let qi = points
                    .get(q)
                    .ok_or_else(|| ModelError::UnknownPoint(q.clone()))?;
                if point_var[pi] != va {
                    return Err(ModelError::PointNotInVariable {
                        point: p.clone(),
                        var: a.clone(),
                    });
                }
                if point_var[qi] != vb {
                    return Err(ModelError::PointNotInVariable {
                        point: q.clone(),
                        var: b.clone(),
                    });
                }
                allowed[pi * n + qi] = true;
            }
            for p in (0..n).filter(|&p| point_var[p] == va) {
                for q in (0..n).filter(|&q| point_var[q] == vb) {
                    if !allowed[p * n + q] {
                        compat[p * n + q] = false;
                        compat[q * n + p] = false;
                    }
                }
            }
        }
        Ok(Self::assemble(vars, points, point_var, compat))
    }

    /// Low-level constructor from already validated parts.
    pub(crate) fn from_parts(
        var_names: Vec<String>,
        points: Vec<(String, usize)>,
        compatible: impl Fn(usize, usize) -> bool,
    ) -> Self {
        let mut vars = Names::default();
        for v in var_names {
            vars.push(v).expect("variable names must be unique");
        }
        let mut names = Names::default();
        let mut point_var = Vec::with_capacity(points.len());
        for (name, v) in points {
            assert!(v < vars.list.len(), "point variable out of range");
            names.push(name).expect("point names must be unique");
            point_var.push(v);
        }
        let n = point_var.len();
        let mut compat = vec![false; n * n];
        for p in 0..n {
            for q in (p + 1)..n {
                if point_var[p] != point_var[q] {
                    let c = compatible(p, q);
                    compat[p * n + q] = c;
                    compat[q * n + p] = c;
                }
            }
        }
        Self::assemble(vars, names, point_var, compat)
    }

    fn assemble(vars: Names, points: Names, point_var: Vec<usize>, mut compat: Vec<bool>) -> Self {
        let n = point_var.len();
        let mut domains = vec![Vec::new(); vars.list.len()];
        for (p, &v) in point_var.iter().enumerate() {
            domains[v].push(p);
        }
        for p in 0..n {
            for q in 0..n {
                if point_var[p] == point_var[q] {
                    compat[p * n + q] = false;
                }
            }
        }
        Instance {
            vars,
            points,
            point_var,
            domains,
            compat,
        }
    }

    /// The instance with no variables.
    pub fn empty() -> Self {
        Self::from_parts(Vec::new(), Vec::new(), |_, _| true)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.get(name)
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.get(name)
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars.list
    }

    /// Compatibility of two points of different variables.
    #[inline]
    pub fn compatible(&self, p: usize, q: usize) -> bool {
        self.compat[p * self.point_var.len() + q]
    }

    pub fn domain_size(&self, v: usize) -> usize {
        self.domains[v].len()
    }

    /// Points of `w` compatible with `p`.
    pub fn supports(&self, p: usize, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.domains[w]
            .iter()
            .copied()
            .filter(move |&q| self.compatible(p, q))
    }

    pub fn support_count(&self, p: usize, w: usize) -> usize {
        self.supports(p, w).count()
    }

    /// True iff some pair of points of `v` and `w` is incompatible.
    pub fn is_nontrivial(&self, v: usize, w: usize) -> bool {
        v != w
            && self.domains[v]
                .iter()
                .any(|&p| self.domains[w].iter().any(|&q| !self.compatible(p, q)))
    }

    /// Variables sharing a non-trivial constraint with `v`.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        (0..self.num_vars())
            .filter(|&w| self.is_nontrivial(v, w))
            .collect()
    }

    /// Index pairs `(v, w)`, `v < w`, of non-trivial constraints.
    pub fn constraint_pairs(&self) -> Vec<(usize, usize)> {
        let k = self.num_vars();
        let mut out = Vec::new();
        for v in 0..k {
            for w in (v + 1)..k {
                if self.is_nontrivial(v, w) {
                    out.push((v, w));
                }
            }
        }
        out
    }

    /// The constraint graph as name pairs in declaration order.
    pub fn constraint_graph(&self) -> BTreeSet<(String, String)> {
        self.constraint_pairs()
            .into_iter()
            .map(|(v, w)| (self.vars.list[v].clone(), self.vars.list[w].clone()))
            .collect()
    }

    /// Connected components of the constraint graph, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let k = self.num_vars();
        let mut comp = vec![usize::MAX; k];
        let mut out = Vec::new();
        for s in 0..k {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for w in 0..k {
                    if comp[w] == usize::MAX && self.is_nontrivial(v, w) {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// The relation of the constraint on `(v, w)` as compatible name pairs.
    pub fn constraint(&self, v: &str, w: &str) -> Result<ConstraintView, ModelError> {
        let vi = self
            .var_index(v)
            .ok_or_else(|| ModelError::UnknownVariable(v.to_string()))?;
        let wi = self
            .var_index(w)
            .ok_or_else(|| ModelError::UnknownVariable(w.to_string()))?;
        if vi == wi {
            return Err(ModelError::RepeatedScope(v.to_string()));
        }
        let mut relation = BTreeSet::new();
        for &p in &self.domains[vi] {
            for &q in &self.domains[wi] {
                if self.compatible(p, q) {
                    relation.insert((self.point_name(p).to_string(), self.point_name(q).to_string()));
                }
            }
        }
        Ok(ConstraintView {
            scope: (v.to_string(), w.to_string()),
            relation,
            nontrivial: self.is_nontrivial(vi, wi),
        })
    }

    /// Domains and the non-trivial relations, i.e. the inputs of [`Instance::build`].
    pub fn to_parts(&self) -> (Vec<(String, Vec<String>)>, Vec<Relation>) {
        let domains = (0..self.num_vars())
            .map(|v| {
                (
                    self.vars.list[v].clone(),
                    self.domains[v]
                        .iter()
                        .map(|&p| self.points.list[p].clone())
                        .collect(),
                )
            })
            .collect();
        let relations = self
            .constraint_pairs()
            .into_iter()
            .map(|(v, w)| {
                let mut allowed = Vec::new();
                for &p in &self.domains[v] {
                    for &q in &self.domains[w] {
                        if self.compatible(p, q) {
                            allowed.push((self.points.list[p].clone(), self.points.list[q].clone()));
                        }
                    }
                }
                Relation {
                    scope: (self.vars.list[v].clone(), self.vars.list[w].clone()),
                    allowed,
                }
            })
            .collect();
        (domains, relations)
    }

    /// Keeps the flagged points and variables, preserving declaration order.
    /// Points of dropped variables are dropped too.
    pub fn restrict(&self, keep_point: &[bool], keep_var: &[bool]) -> Instance {
        let mut var_map = vec![usize::MAX; self.num_vars()];
        let mut names = Vec::new();
        for v in 0..self.num_vars() {
            if keep_var[v] {
                var_map[v] = names.len();
                names.push(self.vars.list[v].clone());
            }
        }
        let kept: Vec<usize> = (0..self.num_points())
            .filter(|&p| keep_point[p] && keep_var[self.point_var[p]])
            .collect();
        let points = kept
            .iter()
            .map(|&p| (self.points.list[p].clone(), var_map[self.point_var[p]]))
            .collect();
        Instance::from_parts(names, points, |a, b| self.compatible(kept[a], kept[b]))
    }

    pub fn without_points(&self, names: &[usize]) -> Instance {
        let mut keep = vec![true; self.num_points()];
        for &p in names {
            keep[p] = false;
        }
        self.restrict(&keep, &vec![true; self.num_vars()])
    }

    /// Checks that `assignment` picks exactly one point of each variable and
    /// that all chosen points are pairwise compatible.
    pub fn is_solution(&self, assignment: &Assignment) -> Result<bool, ModelError> {
        let mut chosen = Vec::with_capacity(self.num_vars());
        for (var, point) in assignment.iter() {
            let v = self
                .var_index(var)
                .ok_or_else(|| ModelError::UnknownVariable(var.to_string()))?;
            let p = self
                .point_index(point)
                .ok_or_else(|| ModelError::UnknownPoint(point.to_string()))?;
            if self.point_var[p] != v {
                return Err(ModelError::PointNotInVariable {
                    point: point.to_string(),
                    var: var.to_string(),
                });
            }
            chosen.push(p);
        }
        if let Some(v) = (0..self.num_vars()).find(|&v| assignment.get(&self.vars.list[v]).is_none()) {
            return Err(ModelError::MissingVariable(self.vars.list[v].clone()));
        }
        Ok(chosen
            .iter()
            .enumerate()
            .all(|(i, &p)| chosen[i + 1..].iter().all(|&q| self.compatible(p, q))))
    }

    pub(crate) fn assignment_from(&self, choice: &[usize]) -> Assignment {
        choice
            .iter()
            .enumerate()
            .map(|(v, &p)| (self.vars.list[v].clone(), self.points.list[p].clone()))
            .collect()
    }
}

impl Structure for Instance {
    fn num_vars(&self) -> usize {
        self.vars.list.len()
    }

    fn num_points(&self) -> usize {
        self.point_var.len()
    }

    fn var_of(&self, p: usize) -> usize {
        self.point_var[p]
    }

    fn domain(&self, v: usize) -> &[usize] {
        &self.domains[v]
    }

    fn label(&self, p: usize, q: usize) -> Option<bool> {
        if self.point_var[p] == self.point_var[q] {
            None
        } else {
            Some(self.compatible(p, q))
        }
    }

    fn var_name(&self, v: usize) -> &str {
        &self.vars.list[v]
    }

    fn point_name(&self, p: usize) -> &str {
        &self.points.list[p]
    }
}

/// The constraint between two variables of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintView {
    pub scope: (String, String),
    pub relation: BTreeSet<(String, String)>,
    pub nontrivial: bool,
}

/// A partially specified instance, optionally carrying distinctness
/// disjunctions: each disjunction is a set of same-variable point pairs of
/// which at least one pair must stay distinct under merging and occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    vars: Names,
    points: Names,
    point_var: Vec<usize>,
    domains: Vec<Vec<usize>>,
    labels: Vec<Option<bool>>,
    distinct: Vec<Vec<(usize, usize)>>,
}

impl Pattern {
    pub fn builder() -> PatternBuilder {
        PatternBuilder::default()
    }

    pub(crate) fn from_parts(
        var_names: Vec<String>,
        points: Vec<(String, usize)>,
        label: impl Fn(usize, usize) -> Option<bool>,
        distinct: Vec<Vec<(usize, usize)>>,
    ) -> Self {
        let mut vars = Names::default();
        for v in var_names {
            vars.push(v).expect("variable names must be unique");
        }
        let mut names = Names::default();
        let mut point_var = Vec::with_capacity(points.len());
        for (name, v) in points {
            names.push(name).expect("point names must be unique");
            point_var.push(v);
        }
        let n = point_var.len();
        let mut labels = vec![None; n * n];
        for p in 0..n {
            for q in (p + 1)..n {
                if point_var[p] != point_var[q] {
                    let l = label(p, q);
                    labels[p * n + q] = l;
                    labels[q * n + p] = l;
                }
            }
        }
        let mut domains = vec![Vec::new(); vars.list.len()];
        for (p, &v) in point_var.iter().enumerate() {
            domains[v].push(p);
        }
        let distinct = distinct
            .into_iter()
            .map(|d| {
                let mut d: Vec<(usize, usize)> =
                    d.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
                d.sort_unstable();
                d.dedup();
                d
            })
            .collect();
        Pattern {
            vars,
            points: names,
            point_var,
            domains,
            labels,
            distinct,
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.get(name)
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.get(name)
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars.list
    }

    pub fn point_names(&self) -> &[String] {
        &self.points.list
    }

    /// Distinctness disjunctions as index pairs.
    pub fn distinct(&self) -> &[Vec<(usize, usize)>] {
        &self.distinct
    }

    /// All defined edges `(p, q, compatible)` with `p < q`.
    pub fn edges(&self) -> Vec<(usize, usize, bool)> {
        let n = self.num_points();
        let mut out = Vec::new();
        for p in 0..n {
            for q in (p + 1)..n {
                if let Some(l) = self.labels[p * n + q] {
                    out.push((p, q, l));
                }
            }
        }
        out
    }

    pub fn degree(&self, p: usize) -> usize {
        let n = self.num_points();
        (0..n).filter(|&q| self.labels[p * n + q].is_some()).count()
    }

    /// Unordered variable pairs carrying at least one edge.
    pub fn constraint_scopes(&self) -> BTreeSet<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|(p, q, _)| {
                let (a, b) = (self.point_var[p], self.point_var[q]);
                (a.min(b), a.max(b))
            })
            .collect()
    }

    /// The pattern restricted to the flagged points and variables.
    pub fn restrict(&self, keep_point: &[bool], keep_var: &[bool]) -> Pattern {
        let mut var_map = vec![usize::MAX; self.num_vars()];
        let mut names = Vec::new();
        for v in 0..self.num_vars() {
            if keep_var[v] {
                var_map[v] = names.len();
                names.push(self.vars.list[v].clone());
            }
        }
        let kept: Vec<usize> = (0..self.num_points())
            .filter(|&p| keep_point[p] && keep_var[self.point_var[p]])
            .collect();
        let mut new_index = vec![usize::MAX; self.num_points()];
        for (i, &p) in kept.iter().enumerate() {
            new_index[p] = i;
        }
        let points = kept
            .iter()
            .map(|&p| (self.points.list[p].clone(), var_map[self.point_var[p]]))
            .collect();
        // A disjunct mentioning a dropped point is dropped from its disjunction.
        let distinct = self
            .distinct
            .iter()
            .map(|d| {
                d.iter()
                    .filter(|&&(a, b)| new_index[a] != usize::MAX && new_index[b] != usize::MAX)
                    .map(|&(a, b)| (new_index[a], new_index[b]))
                    .collect::<Vec<_>>()
            })
            .filter(|d| !d.is_empty())
            .collect();
        Pattern::from_parts(
            names,
            points,
            |a, b| self.label(kept[a], kept[b]),
            distinct,
        )
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }
}

impl Structure for Pattern {
    fn num_vars(&self) -> usize {
        self.vars.list.len()
    }

    fn num_points(&self) -> usize {
        self.point_var.len()
    }

    fn var_of(&self, p: usize) -> usize {
        self.point_var[p]
    }

    fn domain(&self, v: usize) -> &[usize] {
        &self.domains[v]
    }

    fn label(&self, p: usize, q: usize) -> Option<bool> {
        self.labels[p * self.point_var.len() + q]
    }

    fn var_name(&self, v: usize) -> &str {
        &self.vars.list[v]
    }

    fn point_name(&self, p: usize) -> &str {
        &self.points.list[p]
    }
}

impl From<&Instance> for Pattern {
    fn from(inst: &Instance) -> Self {
        Pattern::from_parts(
            inst.vars.list.clone(),
            (0..inst.num_points())
                .map(|p| (inst.points.list[p].clone(), inst.point_var[p]))
                .collect(),
            |p, q| Some(inst.compatible(p, q)),
            Vec::new(),
        )
    }
}

/// Name-based pattern construction.
#[derive(Clone, Debug, Default)]
pub struct PatternBuilder {
    vars: Vec<String>,
    points: Vec<(String, String)>,
    edges: Vec<(String, String, bool)>,
    distinct: Vec<Vec<(String, String)>>,
}

impl PatternBuilder {
    /// Declares a variable; variables of points are declared implicitly.
    pub fn var(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        if !self.vars.contains(&name) {
            self.vars.push(name);
        }
        self
    }

    pub fn point(mut self, id: impl Into<String>, var: impl Into<String>) -> Self {
        let var = var.into();
        self = self.var(var.clone());
        self.points.push((id.into(), var));
        self
    }

    pub fn compat(self, p: impl Into<String>, q: impl Into<String>) -> Self {
        self.edge(p, q, true)
    }

    pub fn incompat(self, p: impl Into<String>, q: impl Into<String>) -> Self {
        self.edge(p, q, false)
    }

    pub fn edge(mut self, p: impl Into<String>, q: impl Into<String>, compatible: bool) -> Self {
        self.edges.push((p.into(), q.into(), compatible));
        self
    }

    /// Adds the disjunction "at least one of these pairs stays distinct".
    pub fn distinct_any<S: Into<String>>(mut self, pairs: impl IntoIterator<Item = (S, S)>) -> Self {
        self.distinct
            .push(pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect());
        self
    }

    pub fn build(self) -> Result<Pattern, ModelError> {
        let mut vars = Names::default();
        for v in &self.vars {
            vars.push(v.clone())
                .ok_or_else(|| ModelError::DuplicateVariable(v.clone()))?;
        }
        let mut names = Names::default();
        let mut points = Vec::new();
        for (id, var) in &self.points {
            names
                .push(id.clone())
                .ok_or_else(|| ModelError::DuplicatePoint(id.clone()))?;
            points.push((id.clone(), vars.get(var).expect("declared above")));
        }
        let lookup = |name: &str| {
            names
                .get(name)
                .ok_or_else(|| ModelError::UnknownPoint(name.to_string()))
        };
        let mut labels: HashMap<(usize, usize), bool> = HashMap::new();
        for (p, q, l) in &self.edges {
            let (pi, qi) = (lookup(p)?, lookup(q)?);
            if points[pi].1 == points[qi].1 {
                return Err(ModelError::SameVariableEdge(p.clone(), q.clone()));
            }
            let key = (pi.min(qi), pi.max(qi));
            if let Some(old) = labels.insert(key, *l) {
                if old != *l {
                    return Err(ModelError::ConflictingEdge(p.clone(), q.clone()));
                }
            }
        }
        let mut distinct = Vec::new();
        for d in &self.distinct {
            if d.is_empty() {
                return Err(ModelError::EmptyDisjunction);
            }
            let mut pairs = Vec::new();
            for (a, b) in d {
                let (ai, bi) = (lookup(a)?, lookup(b)?);
                if ai == bi || points[ai].1 != points[bi].1 {
                    return Err(ModelError::BadDistinctPair(a.clone(), b.clone()));
                }
                pairs.push((ai, bi));
            }
            distinct.push(pairs);
        }
        Ok(Pattern::from_parts(
            vars.list,
            points,
            |p, q| labels.get(&(p.min(q), p.max(q))).copied(),
            distinct,
        ))
    }
}
