//! Arc consistency, single-valued variable elimination and neighbourhood
//! substitution, separately and jointly to a fixpoint.
//!
//! Arc consistency and singleton elimination have a unique fixpoint.
//! Neighbourhood substitution is unique up to isomorphism; among mutually
//! dominating points the one with the larger id is removed.

use serde::Serialize;

use crate::model::{Assignment, Instance, Structure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PreprocessEvent {
    /// `point` had no compatible point left in `unsupported_at`.
    ArcRemoval { point: String, unsupported_at: String },
    /// `var` had the single point `point`; it was assigned and removed along
    /// with every point incompatible with it.
    SingletonElim {
        var: String,
        point: String,
        removed: Vec<String>,
    },
    /// Every external support of `removed` also supports `dominating`.
    NeighbourhoodSub { removed: String, dominating: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PreprocessTrace {
    pub events: Vec<PreprocessEvent>,
}

impl PreprocessTrace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Variables assigned by singleton elimination, in elimination order.
    pub fn fixed(&self) -> impl Iterator<Item = (&str, &str)> {
        self.events.iter().filter_map(|e| match e {
            PreprocessEvent::SingletonElim { var, point, .. } => Some((var.as_str(), point.as_str())),
            _ => None,
        })
    }
}

/// Output of a preprocessing run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preprocessed {
    pub instance: Instance,
    pub trace: PreprocessTrace,
    /// Some domain was wiped out; the input has no solution.
    pub unsat: bool,
}

impl Preprocessed {
    /// Extends a solution of the output to a solution of the input by
    /// re-adding the singleton assignments.
    pub fn expand(&self, solution: &Assignment) -> Assignment {
        let mut out = solution.clone();
        for (v, p) in self.trace.fixed() {
            out.insert(v, p);
        }
        out
    }
}

pub fn enforce_arc_consistency(instance: &Instance) -> Preprocessed {
    let mut w = Work::new(instance);
    w.arc_consistency();
    w.finish()
}

/// Eliminates single-valued variables until none is left.
pub fn eliminate_single_valued(instance: &Instance) -> Preprocessed {
    let mut w = Work::new(instance);
    if !w.wiped() {
        while w.singleton_round() && !w.wiped() {}
    }
    w.finish()
}

/// Removes dominated points until no point is dominated.
pub fn neighbourhood_substitution(instance: &Instance) -> Preprocessed {
    let mut w = Work::new(instance);
    if !w.wiped() {
        while w.substitution_round() {}
    }
    w.finish()
}

/// Runs all three operations until none applies.
pub fn preprocess_to_convergence(instance: &Instance) -> Preprocessed {
    let mut w = Work::new(instance);
    loop {
        w.arc_consistency();
        if w.wiped() {
            break;
        }
        if w.singleton_round() {
            if w.wiped() {
                break;
            }
            continue;
        }
        if w.substitution_round() {
            continue;
        }
        break;
    }
    w.finish()
}

/// Applies a trace to its input instance.
pub fn replay(input: &Instance, trace: &PreprocessTrace) -> Instance {
    let mut keep_point = vec![true; input.num_points()];
    let mut keep_var = vec![true; input.num_vars()];
    let mut drop = |name: &str| {
        if let Some(p) = input.point_index(name) {
            keep_point[p] = false;
        }
    };
    for e in &trace.events {
        match e {
            PreprocessEvent::ArcRemoval { point, .. } => drop(point),
            PreprocessEvent::NeighbourhoodSub { removed, .. } => drop(removed),
            PreprocessEvent::SingletonElim { var, removed, .. } => {
                for p in removed {
                    drop(p);
                }
                if let Some(v) = input.var_index(var) {
                    keep_var[v] = false;
                }
            }
        }
    }
    input.restrict(&keep_point, &keep_var)
}

struct Work<'a> {
    inst: &'a Instance,
    point_alive: Vec<bool>,
    var_alive: Vec<bool>,
    dom_size: Vec<usize>,
    // support[p * k + w]: alive points of w compatible with p.
    support: Vec<usize>,
    queue: Vec<usize>,
    trace: PreprocessTrace,
    empty_domain: bool,
}

impl<'a> Work<'a> {
    fn new(inst: &'a Instance) -> Self {
        let (n, k) = (inst.num_points(), inst.num_vars());
        let mut support = vec![0; n * k];
        for p in 0..n {
            for w in 0..k {
                if w != inst.var_of(p) {
                    support[p * k + w] = inst.support_count(p, w);
                }
            }
        }
        let dom_size: Vec<usize> = (0..k).map(|v| inst.domain_size(v)).collect();
        let empty_domain = dom_size.iter().any(|&d| d == 0);
        Work {
            inst,
            point_alive: vec![true; n],
            var_alive: vec![true; k],
            dom_size,
            support,
            queue: Vec::new(),
            trace: PreprocessTrace::default(),
            empty_domain,
        }
    }

    fn wiped(&self) -> bool {
        self.empty_domain
    }

    fn k(&self) -> usize {
        self.inst.num_vars()
    }

    fn kill(&mut self, p: usize) {
        debug_assert!(self.point_alive[p]);
        self.point_alive[p] = false;
        let v = self.inst.var_of(p);
        self.dom_size[v] -= 1;
        if self.dom_size[v] == 0 && self.var_alive[v] {
            self.empty_domain = true;
        }
        let k = self.k();
        for q in 0..self.inst.num_points() {
            if self.inst.var_of(q) != v && self.inst.compatible(p, q) {
                self.support[q * k + v] -= 1;
            }
        }
        self.queue.push(p);
    }

    fn unsupported_at(&self, p: usize) -> Option<usize> {
        let k = self.k();
        let v = self.inst.var_of(p);
        (0..k).find(|&w| w != v && self.var_alive[w] && self.support[p * k + w] == 0)
    }

    fn arc_consistency(&mut self) {
        self.queue.clear();
        for p in 0..self.inst.num_points() {
            if self.point_alive[p] && self.var_alive[self.inst.var_of(p)] {
                if let Some(w) = self.unsupported_at(p) {
                    self.remove_unsupported(p, w);
                }
            }
        }
        while let Some(q) = self.queue.pop() {
            let vq = self.inst.var_of(q);
            if !self.var_alive[vq] {
                continue;
            }
            let k = self.k();
            for p in 0..self.inst.num_points() {
                if self.point_alive[p]
                    && self.var_alive[self.inst.var_of(p)]
                    && self.inst.var_of(p) != vq
                    && self.support[p * k + vq] == 0
                {
                    self.remove_unsupported(p, vq);
                }
            }
        }
    }

    fn remove_unsupported(&mut self, p: usize, w: usize) {
        self.trace.events.push(PreprocessEvent::ArcRemoval {
            point: self.inst.point_name(p).to_string(),
            unsupported_at: self.inst.var_name(w).to_string(),
        });
        self.kill(p);
    }

    /// Eliminates every currently single-valued variable once; true on change.
    fn singleton_round(&mut self) -> bool {
        let mut changed = false;
        for v in 0..self.k() {
            if !self.var_alive[v] || self.dom_size[v] != 1 {
                continue;
            }
            let a = self
                .inst
                .domain(v)
                .iter()
                .copied()
                .find(|&p| self.point_alive[p])
                .expect("one alive point");
            self.var_alive[v] = false;
            let removed: Vec<usize> = (0..self.inst.num_points())
                .filter(|&q| {
                    self.point_alive[q]
                        && self.inst.var_of(q) != v
                        && self.var_alive[self.inst.var_of(q)]
                        && !self.inst.compatible(a, q)
                })
                .collect();
            self.trace.events.push(PreprocessEvent::SingletonElim {
                var: self.inst.var_name(v).to_string(),
                point: self.inst.point_name(a).to_string(),
                removed: removed
                    .iter()
                    .map(|&q| self.inst.point_name(q).to_string())
                    .collect(),
            });
            self.kill(a);
            for q in removed {
                self.kill(q);
            }
            changed = true;
            if self.empty_domain {
                break;
            }
        }
        changed
    }

    fn dominates(&self, b: usize, a: usize) -> bool {
        let v = self.inst.var_of(a);
        (0..self.inst.num_points()).all(|q| {
            !self.point_alive[q]
                || self.inst.var_of(q) == v
                || !self.var_alive[self.inst.var_of(q)]
                || !self.inst.compatible(a, q)
                || self.inst.compatible(b, q)
        })
    }

    /// One sweep of neighbourhood substitution; true on change.
    fn substitution_round(&mut self) -> bool {
        let mut changed = false;
        for v in 0..self.k() {
            if !self.var_alive[v] {
                continue;
            }
            for &a in self.inst.domain(v) {
                if !self.point_alive[a] {
                    continue;
                }
                let dominating = self.inst.domain(v).iter().copied().find(|&b| {
                    b != a
                        && self.point_alive[b]
                        && self.dominates(b, a)
                        && (!self.dominates(a, b) || self.inst.point_name(a) > self.inst.point_name(b))
                });
                if let Some(b) = dominating {
                    self.trace.events.push(PreprocessEvent::NeighbourhoodSub {
                        removed: self.inst.point_name(a).to_string(),
                        dominating: self.inst.point_name(b).to_string(),
                    });
                    self.kill(a);
                    changed = true;
                }
            }
        }
        self.queue.clear();
        changed
    }

    fn finish(self) -> Preprocessed {
        Preprocessed {
            instance: self.inst.restrict(&self.point_alive, &self.var_alive),
            trace: self.trace,
            unsat: self.empty_domain,
        }
    }
}
