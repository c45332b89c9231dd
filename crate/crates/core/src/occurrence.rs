//! Pattern occurrence and pattern isomorphism.
//!
//! A pattern occurs in a target when its variables map injectively to target
//! variables and its points map to points of the image variables such that
//! every defined pattern edge lands on a defined target edge with the same
//! label. Two points of one variable may share an image (this is merging)
//! unless a distinctness disjunction of the pattern would be violated. Extra
//! target points and edges are ignored (this is extension).

use std::collections::{BTreeMap, HashSet};

use crate::canon::canonical_form;
use crate::model::{Pattern, Structure};

/// Certificate that a pattern occurs in a target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceWitness {
    pub var_map: BTreeMap<String, String>,
    pub point_map: BTreeMap<String, String>,
}

/// Index form of a witness: `vars[v]` and `points[p]` are target indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub vars: Vec<usize>,
    pub points: Vec<usize>,
}

impl Embedding {
    pub fn to_witness<T: Structure + ?Sized>(&self, pattern: &Pattern, target: &T) -> OccurrenceWitness {
        OccurrenceWitness {
            var_map: self
                .vars
                .iter()
                .enumerate()
                .map(|(v, &w)| (pattern.var_name(v).to_string(), target.var_name(w).to_string()))
                .collect(),
            point_map: self
                .points
                .iter()
                .enumerate()
                .map(|(p, &q)| (pattern.point_name(p).to_string(), target.point_name(q).to_string()))
                .collect(),
        }
    }
}

/// Returns a witness of `pattern` occurring in `target`, if any.
pub fn occurs<T: Structure + ?Sized>(pattern: &Pattern, target: &T) -> Option<OccurrenceWitness> {
    find_embedding(pattern, target).map(|e| e.to_witness(pattern, target))
}

/// True iff `pattern` occurs in `target`.
pub fn occurs_in<T: Structure + ?Sized>(pattern: &Pattern, target: &T) -> bool {
    find_embedding(pattern, target).is_some()
}

/// Occurrence search returning target indices.
pub fn find_embedding<T: Structure + ?Sized>(pattern: &Pattern, target: &T) -> Option<Embedding> {
    if pattern.num_vars() > target.num_vars() {
        return None;
    }
    let mut search = Search::new(pattern, target);
    if search.extend(0) {
        Some(search.finish())
    } else {
        None
    }
}

/// Re-checks every condition a witness must satisfy.
pub fn validate_witness<T: Structure + ?Sized>(
    pattern: &Pattern,
    target: &T,
    witness: &OccurrenceWitness,
) -> bool {
    let mut vars = Vec::with_capacity(pattern.num_vars());
    for v in 0..pattern.num_vars() {
        let Some(name) = witness.var_map.get(pattern.var_name(v)) else {
            return false;
        };
        let Some(w) = (0..target.num_vars()).find(|&w| target.var_name(w) == name) else {
            return false;
        };
        vars.push(w);
    }
    let mut points = Vec::with_capacity(pattern.num_points());
    for p in 0..pattern.num_points() {
        let Some(name) = witness.point_map.get(pattern.point_name(p)) else {
            return false;
        };
        let Some(q) = (0..target.num_points()).find(|&q| target.point_name(q) == name) else {
            return false;
        };
        points.push(q);
    }
    is_embedding(pattern, target, &Embedding { vars, points })
}

pub(crate) fn is_embedding<T: Structure + ?Sized>(pattern: &Pattern, target: &T, e: &Embedding) -> bool {
    let mut used = vec![false; target.num_vars()];
    for &w in &e.vars {
        if std::mem::replace(&mut used[w], true) {
            return false;
        }
    }
    for p in 0..pattern.num_points() {
        if target.var_of(e.points[p]) != e.vars[pattern.var_of(p)] {
            return false;
        }
    }
    for (p, q, l) in pattern.edges() {
        if target.label(e.points[p], e.points[q]) != Some(l) {
            return false;
        }
    }
    pattern
        .distinct()
        .iter()
        .all(|d| d.iter().any(|&(a, b)| e.points[a] != e.points[b]))
}

/// True iff a bijective renaming maps `p` onto `q`, preserving edges, labels
/// and distinctness disjunctions.
pub fn pattern_isomorphic(p: &Pattern, q: &Pattern) -> bool {
    p.num_vars() == q.num_vars()
        && p.num_points() == q.num_points()
        && canonical_form(p) == canonical_form(q)
}

const UNSET: usize = usize::MAX;

struct Search<'a, T: Structure + ?Sized> {
    pattern: &'a Pattern,
    target: &'a T,
    order: Vec<usize>,
    // Positions at which a connected component of the pattern is complete.
    // Point choices inside a completed component cannot affect later ones,
    // so a later failure only needs new variable images: variable maps
    // already known to fail are remembered per boundary.
    boundary: Vec<bool>,
    failed: Vec<HashSet<Vec<usize>>>,
    // For each position, the earlier positions joined to it by an edge.
    back_edges: Vec<Vec<(usize, bool)>>,
    // Disjunctions to check once the point at this position is placed.
    checks: Vec<Vec<usize>>,
    var_img: Vec<usize>,
    var_used: Vec<bool>,
    point_img: Vec<usize>,
}

impl<'a, T: Structure + ?Sized> Search<'a, T> {
    fn new(pattern: &'a Pattern, target: &'a T) -> Self {
        let comps = point_components(pattern);
        let mut order = Vec::with_capacity(pattern.num_points());
        let mut boundary = vec![false; pattern.num_points()];
        for c in &comps {
            order.extend(search_order(pattern, c));
            boundary[order.len() - 1] = true;
        }
        let mut pos = vec![0; pattern.num_points()];
        for (i, &p) in order.iter().enumerate() {
            pos[p] = i;
        }
        let mut back_edges = vec![Vec::new(); order.len()];
        for (p, q, l) in pattern.edges() {
            let (early, late) = if pos[p] < pos[q] { (p, q) } else { (q, p) };
            back_edges[pos[late]].push((early, l));
        }
        let mut checks = vec![Vec::new(); order.len()];
        for (i, d) in pattern.distinct().iter().enumerate() {
            let last = d
                .iter()
                .map(|&(a, b)| pos[a].max(pos[b]))
                .max()
                .expect("disjunctions are nonempty");
            checks[last].push(i);
        }
        Search {
            pattern,
            target,
            failed: vec![HashSet::new(); order.len()],
            order,
            boundary,
            back_edges,
            checks,
            var_img: vec![UNSET; pattern.num_vars()],
            var_used: vec![false; target.num_vars()],
            point_img: vec![UNSET; pattern.num_points()],
        }
    }

    fn extend(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return self.map_pointless_vars();
        }
        let p = self.order[i];
        let v = self.pattern.var_of(p);
        if self.var_img[v] != UNSET {
            let w = self.var_img[v];
            return self.try_domain(i, p, w);
        }
        for w in 0..self.target.num_vars() {
            if self.var_used[w] || self.target.domain(w).is_empty() {
                continue;
            }
            self.var_img[v] = w;
            self.var_used[w] = true;
            if self.try_domain(i, p, w) {
                return true;
            }
            self.var_used[w] = false;
            self.var_img[v] = UNSET;
        }
        false
    }

    fn try_domain(&mut self, i: usize, p: usize, w: usize) -> bool {
        let target = self.target;
        for &q in target.domain(w) {
            if self.back_edges[i]
                .iter()
                .any(|&(r, l)| target.label(q, self.point_img[r]) != Some(l))
            {
                continue;
            }
            self.point_img[p] = q;
            let distinct_ok = self.checks[i].iter().all(|&d| {
                self.pattern.distinct()[d]
                    .iter()
                    .any(|&(a, b)| self.point_img[a] != self.point_img[b])
            });
            if distinct_ok && self.next(i) {
                return true;
            }
            self.point_img[p] = UNSET;
        }
        false
    }

    /// Continues after position `i` has been placed.
    fn next(&mut self, i: usize) -> bool {
        if !self.boundary[i] || i + 1 == self.order.len() {
            return self.extend(i + 1);
        }
        if self.failed[i].contains(&self.var_img) {
            return false;
        }
        if self.extend(i + 1) {
            return true;
        }
        self.failed[i].insert(self.var_img.clone());
        false
    }

    fn map_pointless_vars(&mut self) -> bool {
        let mut free = (0..self.target.num_vars()).filter(|&w| !self.var_used[w]);
        let pointless: Vec<usize> = (0..self.pattern.num_vars())
            .filter(|&v| self.var_img[v] == UNSET)
            .collect();
        let mut chosen = Vec::new();
        for _ in &pointless {
            match free.next() {
                Some(w) => chosen.push(w),
                None => return false,
            }
        }
        for (v, w) in pointless.into_iter().zip(chosen) {
            self.var_img[v] = w;
            self.var_used[w] = true;
        }
        true
    }

    fn finish(self) -> Embedding {
        Embedding {
            vars: self.var_img,
            points: self.point_img,
        }
    }
}

/// Points grouped by connectivity through edges and distinctness
/// disjunctions, largest group first.
fn point_components(pattern: &Pattern) -> Vec<Vec<usize>> {
    let n = pattern.num_points();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let links = pattern
        .edges()
        .into_iter()
        .map(|(p, q, _)| (p, q))
        .chain(pattern.distinct().iter().flat_map(|d| {
            d.iter()
                .flat_map(|&(a, b)| [(a, b), (a, d[0].0)])
                .collect::<Vec<_>>()
        }));
    for (p, q) in links {
        let (a, b) = (root(&mut parent, p), root(&mut parent, q));
        parent[a] = b;
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for p in 0..n {
        let r = root(&mut parent, p);
        groups.entry(r).or_default().push(p);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|c| std::cmp::Reverse(c.len()));
    out
}

/// Connected, high-degree-first ordering of `points` so that edge checks
/// prune early.
fn search_order(pattern: &Pattern, points: &[usize]) -> Vec<usize> {
    let degree: Vec<usize> = points.iter().map(|&p| pattern.degree(p)).collect();
    let mut placed = vec![false; points.len()];
    let mut order = Vec::with_capacity(points.len());
    while order.len() < points.len() {
        // Prefer points with most edges into the placed set, then by degree.
        let next = (0..points.len())
            .filter(|&i| !placed[i])
            .max_by_key(|&i| {
                let p = points[i];
                let links = order
                    .iter()
                    .filter(|&&q| pattern.label(p, q).is_some())
                    .count();
                let same_var = order
                    .iter()
                    .any(|&q| pattern.var_of(q) == pattern.var_of(p));
                (links, same_var, degree[i], std::cmp::Reverse(p))
            })
            .expect("unplaced point exists");
        placed[next] = true;
        order.push(points[next]);
    }
    order
}
