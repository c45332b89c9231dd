//! T2-free instances, solved per connected component of the constraint graph.
//!
//! A point is weakly incompatible with a variable if it is incompatible with
//! some point of it. In a component where some point is weakly incompatible
//! with two variables (the gadget V-), every non-trivial constraint is
//! functional in at least one direction and every non-leaf variable is
//! reachable from any variable along functional constraints. Trying each
//! value of one variable and following those constraints decides the
//! component; leaves are completed by picking any support.
//!
//! In the other components every point is active towards at most one
//! neighbour, see [`commit_component`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{Instance, Structure};
use crate::solvers::{violation, Chain, SolveError, SolveResult, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Functionality {
    /// Every point of the first variable has exactly one support in the second.
    FunctionalTo,
    /// No incompatible pair.
    Trivial,
    Other,
}

/// Functionality of every ordered pair of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalityInfo {
    pub pairs: BTreeMap<(String, String), Functionality>,
}

impl FunctionalityInfo {
    pub fn compute(inst: &Instance) -> Self {
        let k = inst.num_vars();
        let mut pairs = BTreeMap::new();
        for v in 0..k {
            for w in (0..k).filter(|&w| w != v) {
                pairs.insert(
                    (inst.var_name(v).to_string(), inst.var_name(w).to_string()),
                    functionality(inst, v, w),
                );
            }
        }
        FunctionalityInfo { pairs }
    }

    pub fn get(&self, v: &str, w: &str) -> Option<Functionality> {
        self.pairs.get(&(v.to_string(), w.to_string())).copied()
    }

    /// A shortest path of functionality from `from` to `to`: consecutive
    /// variables are linked by a non-trivial constraint functional towards
    /// the later one.
    pub fn path(&self, from: &str, to: &str) -> Option<Vec<String>> {
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = vec![to.to_string()];
                let mut cur = to;
                while let Some(&p) = prev.get(cur) {
                    path.push(p.to_string());
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for ((a, b), f) in &self.pairs {
                if a == v && *f == Functionality::FunctionalTo && seen.insert(b.as_str()) {
                    prev.insert(b.as_str(), a.as_str());
                    queue.push_back(b.as_str());
                }
            }
        }
        None
    }
}

fn functionality(inst: &Instance, v: usize, w: usize) -> Functionality {
    if !inst.is_nontrivial(v, w) {
        Functionality::Trivial
    } else if inst.domain(v).iter().all(|&p| inst.support_count(p, w) == 1) {
        Functionality::FunctionalTo
    } else {
        Functionality::Other
    }
}

pub fn solve_t2(instance: &Instance) -> Result<SolveResult, SolveError> {
    let mut chain = Chain::new(instance);
    let pre = chain.preprocess(instance);
    if pre.unsat {
        return chain.unsat();
    }
    let inst = pre.instance;
    let weak = weak_sets(&inst);
    let mut choice = vec![usize::MAX; inst.num_vars()];
    for comp in inst.components() {
        let has_vminus = comp
            .iter()
            .any(|&v| inst.domain(v).iter().any(|&p| weak[p].len() >= 2));
        let ok = if has_vminus {
            functional_component(&inst, &comp, &weak, &mut choice, &mut chain)?
        } else {
            commit_component(&inst, &comp, &weak, &mut choice)?
        };
        if !ok {
            return chain.unsat();
        }
    }
    chain.finish(&inst, Some(choice))
}

/// For each point, the variables it is weakly incompatible with.
fn weak_sets(inst: &Instance) -> Vec<BTreeSet<usize>> {
    (0..inst.num_points())
        .map(|p| {
            (0..inst.num_vars())
                .filter(|&w| w != inst.var_of(p) && inst.support_count(p, w) < inst.domain_size(w))
                .collect()
        })
        .collect()
}

fn functional_component(
    inst: &Instance,
    comp: &[usize],
    weak: &[BTreeSet<usize>],
    choice: &mut [usize],
    chain: &mut Chain,
) -> Result<bool, SolveError> {
    const STAGE: &str = "T2 functional component";
    for &v in comp {
        let first = &weak[inst.domain(v)[0]];
        if inst.domain(v).iter().any(|&p| weak[p] != *first) {
            return Err(violation(
                STAGE,
                format!("points of `{}` are weakly incompatible with different variables", inst.var_name(v)),
            ));
        }
        for w in inst.neighbours(v) {
            if functionality(inst, v, w) != Functionality::FunctionalTo
                && functionality(inst, w, v) != Functionality::FunctionalTo
            {
                return Err(violation(
                    STAGE,
                    format!(
                        "constraint between `{}` and `{}` is functional in neither direction",
                        inst.var_name(v),
                        inst.var_name(w)
                    ),
                ));
            }
        }
    }
    let seed = comp[0];
    for &p in inst.domain(seed) {
        let ok = propagate_functional(inst, comp, seed, p, choice)?;
        chain.event(TraceEvent::Propagation {
            seed: inst.var_name(seed).to_string(),
            value: inst.point_name(p).to_string(),
            success: ok,
        });
        if ok {
            return Ok(true);
        }
        for &v in comp {
            choice[v] = usize::MAX;
        }
    }
    Ok(false)
}

fn propagate_functional(
    inst: &Instance,
    comp: &[usize],
    seed: usize,
    p: usize,
    choice: &mut [usize],
) -> Result<bool, SolveError> {
    choice[seed] = p;
    let mut stack = vec![seed];
    while let Some(v) = stack.pop() {
        for w in inst.neighbours(v) {
            if functionality(inst, v, w) != Functionality::FunctionalTo {
                continue;
            }
            let image = inst.supports(choice[v], w).next().expect("functional");
            if choice[w] == usize::MAX {
                choice[w] = image;
                stack.push(w);
            } else if choice[w] != image {
                return Ok(false);
            }
        }
    }
    for &v in comp {
        if choice[v] != usize::MAX {
            continue;
        }
        let nb = inst.neighbours(v);
        let [u] = nb[..] else {
            return Err(violation(
                "T2 functional component",
                format!("`{}` is neither reached by functionality nor a leaf", inst.var_name(v)),
            ));
        };
        if choice[u] == usize::MAX {
            return Err(violation(
                "T2 functional component",
                format!("leaf `{}` hangs off an unreached variable", inst.var_name(v)),
            ));
        }
        choice[v] = inst.supports(choice[u], v).next().expect("arc consistent");
    }
    Ok(comp
        .iter()
        .all(|&v| comp.iter().all(|&w| v == w || inst.compatible(choice[v], choice[w]))))
}

/// What a variable of a V--free component does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Commit {
    Undecided,
    /// Takes a point compatible with everything.
    Free(usize),
    /// Takes a point whose incompatibilities all lie in this neighbour.
    Towards(usize),
}

/// Solves a component in which every point is weakly incompatible with at
/// most one variable.
///
/// A point incompatible with nothing can always be taken. Otherwise a
/// variable commits to a neighbour `w` and takes a point active towards `w`;
/// such a point is compatible with every point of the other variables that is
/// not active towards it. So a conflict needs both endpoints to commit to each
/// other over a bad edge, one where no active pair is compatible. Variables
/// with a safe commitment are peeled off; the rest must pick pairwise distinct
/// incident bad edges, which is possible iff no remaining component is a tree.
fn commit_component(
    inst: &Instance,
    comp: &[usize],
    weak: &[BTreeSet<usize>],
    choice: &mut [usize],
) -> Result<bool, SolveError> {
    const STAGE: &str = "T2 commitment";
    let k = inst.num_vars();
    let active = |v: usize, w: usize| -> Vec<usize> {
        inst.domain(v)
            .iter()
            .copied()
            .filter(|&p| weak[p].contains(&w))
            .collect()
    };
    let pair_for = |v: usize, w: usize| -> Option<(usize, usize)> {
        let aw = active(w, v);
        active(v, w)
            .into_iter()
            .find_map(|p| aw.iter().copied().find(|&q| inst.compatible(p, q)).map(|q| (p, q)))
    };
    let mut commit = vec![Commit::Undecided; k];
    for &v in comp {
        if let Some(&p) = inst.domain(v).iter().find(|&&p| weak[p].is_empty()) {
            commit[v] = Commit::Free(p);
        }
    }
    let nbrs: BTreeMap<usize, Vec<usize>> = comp.iter().map(|&v| (v, inst.neighbours(v))).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &v in comp {
            if commit[v] != Commit::Undecided {
                continue;
            }
            let safe = nbrs[&v]
                .iter()
                .copied()
                .find(|&w| commit[w] != Commit::Undecided || pair_for(v, w).is_some());
            if let Some(w) = safe {
                commit[v] = Commit::Towards(w);
                changed = true;
            }
        }
    }

    // Remaining variables only have bad edges, all to remaining variables.
    let rest: Vec<usize> = comp.iter().copied().filter(|&v| commit[v] == Commit::Undecided).collect();
    let mut done: BTreeSet<usize> = BTreeSet::new();
    for &s in &rest {
        if done.contains(&s) {
            continue;
        }
        let mut part = vec![s];
        done.insert(s);
        let mut i = 0;
        while i < part.len() {
            for &w in &nbrs[&part[i]] {
                if commit[w] == Commit::Undecided && done.insert(w) {
                    part.push(w);
                }
            }
            i += 1;
        }
        let edges: usize = part.iter().map(|v| nbrs[v].len()).sum::<usize>() / 2;
        if edges < part.len() {
            return Ok(false);
        }
        orient(&part, &nbrs, &mut commit);
    }

    for &v in comp {
        choice[v] = match commit[v] {
            Commit::Free(p) => p,
            Commit::Towards(w) if commit[w] == Commit::Towards(v) => {
                let (p, _) = pair_for(v, w).ok_or_else(|| {
                    violation(
                        STAGE,
                        format!(
                            "`{}` and `{}` commit to each other over a bad edge",
                            inst.var_name(v),
                            inst.var_name(w)
                        ),
                    )
                })?;
                p
            }
            Commit::Towards(w) => active(v, w)[0],
            Commit::Undecided => unreachable!("every variable is decided"),
        };
    }
    // Mutually committed pairs must use the same compatible pair.
    for &v in comp {
        if let Commit::Towards(w) = commit[v] {
            if commit[w] == Commit::Towards(v) && v < w {
                let (p, q) = pair_for(v, w).expect("checked above");
                choice[v] = p;
                choice[w] = q;
            }
        }
    }
    if comp
        .iter()
        .all(|&v| comp.iter().all(|&w| v == w || inst.compatible(choice[v], choice[w])))
    {
        Ok(true)
    } else {
        Err(violation(STAGE, "commitments do not yield a solution"))
    }
}

/// Gives each variable of a connected part with at least as many edges as
/// variables its own incident edge: around one cycle, then towards it.
fn orient(part: &[usize], nbrs: &BTreeMap<usize, Vec<usize>>, commit: &mut [Commit]) {
    let inside: BTreeSet<usize> = part.iter().copied().collect();
    let cycle = find_cycle(part[0], &inside, nbrs).expect("a connected graph with |E| >= |V| has a cycle");
    let mut queue = VecDeque::new();
    for (i, &v) in cycle.iter().enumerate() {
        commit[v] = Commit::Towards(cycle[(i + 1) % cycle.len()]);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        for &w in &nbrs[&v] {
            if inside.contains(&w) && commit[w] == Commit::Undecided {
                commit[w] = Commit::Towards(v);
                queue.push_back(w);
            }
        }
    }
}

fn find_cycle(start: usize, inside: &BTreeSet<usize>, nbrs: &BTreeMap<usize, Vec<usize>>) -> Option<Vec<usize>> {
    // Depth-first search: in an undirected graph every non-tree edge leads
    // back to a vertex on the current path.
    fn visit(
        v: usize,
        from: usize,
        inside: &BTreeSet<usize>,
        nbrs: &BTreeMap<usize, Vec<usize>>,
        path: &mut Vec<usize>,
        seen: &mut BTreeSet<usize>,
    ) -> Option<Vec<usize>> {
        seen.insert(v);
        path.push(v);
        for &w in &nbrs[&v] {
            if !inside.contains(&w) || w == from {
                continue;
            }
            if let Some(pos) = path.iter().position(|&x| x == w) {
                return Some(path[pos..].to_vec());
            }
            if !seen.contains(&w) {
                if let Some(c) = visit(w, v, inside, nbrs, path, seen) {
                    return Some(c);
                }
            }
        }
        path.pop();
        None
    }
    visit(start, usize::MAX, inside, nbrs, &mut Vec::new(), &mut BTreeSet::new())
}
