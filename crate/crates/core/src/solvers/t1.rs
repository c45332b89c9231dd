//! T1-free instances.
//!
//! Pipeline, with preprocessing re-run to convergence between steps:
//! 1. remove point `a` of every occurrence of the gadget X;
//! 2. compute the "better than" order of each variable with respect to every
//!    other variable and check it is total with a unique strict witness;
//! 3. fuse pairs whose order has three or more tiers along the staircase;
//! 4. split variables into one-winner (E) and one-loser (F) ones and fuse any
//!    constrained pair within E or within F;
//! 5. the remaining constraints between F and E read `v = b => v' = a`, one
//!    per point of F; they form a clause system in which each literal occurs
//!    once, decided by matching clauses to variables.

use std::collections::{BTreeMap, BTreeSet};

use crate::fusion::{fuse, FusionSpec};
use crate::model::{Assignment, Instance, Structure};
use crate::reduction::library::PatternName;
use crate::solvers::noosat::{match_clauses, NoosatInstance};
use crate::solvers::{violation, Chain, SolveError, SolveResult, TraceEvent};

/// Points of `var` grouped into equivalence classes of the "better than"
/// order with respect to `other`, worst first. `b` is better than `a` when
/// every point of `other` compatible with `a` is compatible with `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainOrder {
    pub var: String,
    pub other: String,
    pub classes: Vec<Vec<String>>,
}

impl DomainOrder {
    /// `None` if the order is not total or a name is unknown.
    pub fn compute(inst: &Instance, var: &str, other: &str) -> Option<DomainOrder> {
        let (v, w) = (inst.var_index(var)?, inst.var_index(other)?);
        let classes = order_classes(inst, v, w)?;
        Some(DomainOrder {
            var: var.to_string(),
            other: other.to_string(),
            classes: names(inst, &classes),
        })
    }

    pub fn tiers(&self) -> usize {
        self.classes.len()
    }
}

/// Winners form the best class; everything else loses. With a single class
/// every point wins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TierInfo {
    pub var: String,
    pub other: String,
    pub tiers: usize,
    pub winners: Vec<String>,
    pub losers: Vec<String>,
}

impl TierInfo {
    pub fn from_order(order: &DomainOrder) -> TierInfo {
        let (last, rest) = order.classes.split_last().map_or((&[][..], &[][..]), |(l, r)| (&l[..], r));
        TierInfo {
            var: order.var.clone(),
            other: order.other.clone(),
            tiers: order.tiers(),
            winners: last.to_vec(),
            losers: rest.iter().flatten().cloned().collect(),
        }
    }
}

fn names(inst: &Instance, classes: &[Vec<usize>]) -> Vec<Vec<String>> {
    classes
        .iter()
        .map(|c| c.iter().map(|&p| inst.point_name(p).to_string()).collect())
        .collect()
}

fn support_set(inst: &Instance, p: usize, w: usize) -> BTreeSet<usize> {
    inst.supports(p, w).collect()
}

/// Equivalence classes of `A_v` w.r.t. `w`, worst first; `None` if two
/// points are incomparable.
fn order_classes(inst: &Instance, v: usize, w: usize) -> Option<Vec<Vec<usize>>> {
    let mut pts: Vec<(BTreeSet<usize>, usize)> = inst
        .domain(v)
        .iter()
        .map(|&p| (support_set(inst, p, w), p))
        .collect();
    pts.sort_by_key(|(s, p)| (s.len(), *p));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..pts.len() {
        if i > 0 && pts[i].0 == pts[i - 1].0 {
            classes.last_mut().expect("non-empty").push(pts[i].1);
            continue;
        }
        if i > 0 && !pts[i - 1].0.is_subset(&pts[i].0) {
            return None;
        }
        classes.push(vec![pts[i].1]);
    }
    Some(classes)
}

const ORDERS: &str = "T1 domain orders";

/// All orders of the instance, keyed by ordered variable pair, after checking
/// totality, the unique strict witness and the absence of `a=b<c=d`.
fn orders(inst: &Instance) -> Result<BTreeMap<(usize, usize), Vec<Vec<usize>>>, SolveError> {
    let k = inst.num_vars();
    let mut out = BTreeMap::new();
    for v in 0..k {
        for w in (0..k).filter(|&w| w != v) {
            let classes = order_classes(inst, v, w).ok_or_else(|| {
                violation(
                    ORDERS,
                    format!("order of `{}` w.r.t. `{}` is not total", inst.var_name(v), inst.var_name(w)),
                )
            })?;
            if classes.len() == 2 && classes.iter().all(|c| c.len() >= 2) {
                return Err(violation(
                    ORDERS,
                    format!("two tiers of size >= 2 in `{}` w.r.t. `{}`", inst.var_name(v), inst.var_name(w)),
                ));
            }
            out.insert((v, w), classes);
        }
    }
    for v in 0..k {
        let dom = inst.domain(v);
        let sets: Vec<Vec<BTreeSet<usize>>> = (0..k)
            .map(|w| {
                if w == v {
                    Vec::new()
                } else {
                    dom.iter().map(|&p| support_set(inst, p, w)).collect()
                }
            })
            .collect();
        for i in 0..dom.len() {
            for j in 0..dom.len() {
                if i == j {
                    continue;
                }
                let witnesses = (0..k)
                    .filter(|&w| w != v && sets[w][i].is_subset(&sets[w][j]) && sets[w][i] != sets[w][j])
                    .count();
                if witnesses != 1 {
                    return Err(violation(
                        ORDERS,
                        format!(
                            "`{}` is strictly worse than `{}` for {witnesses} variables",
                            inst.point_name(dom[i]),
                            inst.point_name(dom[j])
                        ),
                    ));
                }
            }
        }
    }
    Ok(out)
}

pub fn solve_t1(instance: &Instance) -> Result<SolveResult, SolveError> {
    let mut chain = Chain::new(instance);
    let mut inst = instance.clone();
    loop {
        inst = match chain.remove_gadgets(inst, PatternName::X, "a") {
            Some(i) => i,
            None => return chain.unsat(),
        };
        let ord = orders(&inst)?;
        if let Some(spec) = staircase_fusion(&inst, &ord)? {
            inst = apply(&mut chain, &inst, &spec)?;
            continue;
        }
        let (e, f) = split_winners(&inst, &ord)?;
        if let Some(spec) = winner_fusion(&inst, &ord, &e).or_else(|| loser_fusion(&inst, &ord, &f)) {
            inst = apply(&mut chain, &inst, &spec)?;
            continue;
        }
        return endgame(&inst, &e, chain);
    }
}

fn apply(chain: &mut Chain, inst: &Instance, spec: &FusionSpec) -> Result<Instance, SolveError> {
    let fused = fuse(inst, spec).map_err(|e| violation("T1 fusion", e.to_string()))?;
    chain.fusion(fused.record);
    Ok(fused.instance)
}

/// Fusion of the first pair with three or more tiers.
fn staircase_fusion(
    inst: &Instance,
    ord: &BTreeMap<(usize, usize), Vec<Vec<usize>>>,
) -> Result<Option<FusionSpec>, SolveError> {
    const STAGE: &str = "T1 staircase";
    let Some((&(v, w), a)) = ord.iter().find(|(_, c)| c.len() >= 3) else {
        return Ok(None);
    };
    let b = &ord[&(w, v)];
    let d = a.len();
    let strict = |c: &Vec<Vec<usize>>| c.iter().all(|x| x.len() == 1);
    if b.len() != d || !strict(a) || !strict(b) {
        return Err(violation(
            STAGE,
            format!("`{}` and `{}` do not form a strict staircase", inst.var_name(v), inst.var_name(w)),
        ));
    }
    let a: Vec<usize> = a.iter().map(|c| c[0]).collect();
    let b: Vec<usize> = b.iter().map(|c| c[0]).collect();
    let mut f = BTreeMap::new();
    for (i, &ai) in a.iter().enumerate() {
        // a_i (1-based i+1) is compatible with exactly the top i+1 points of b.
        let expected: BTreeSet<usize> = b[d - 1 - i..].iter().copied().collect();
        if support_set(inst, ai, w) != expected {
            return Err(violation(
                STAGE,
                format!("`{}` does not have the staircase supports", inst.point_name(ai)),
            ));
        }
        f.insert(inst.point_name(ai).to_string(), inst.point_name(b[d - 1 - i]).to_string());
    }
    Ok(Some(FusionSpec::simple(inst.var_name(v), inst.var_name(w), f)))
}

/// One-winner variables and the rest, which must all be one-loser.
fn split_winners(
    inst: &Instance,
    ord: &BTreeMap<(usize, usize), Vec<Vec<usize>>>,
) -> Result<(Vec<usize>, Vec<usize>), SolveError> {
    let k = inst.num_vars();
    let (mut e, mut f) = (Vec::new(), Vec::new());
    for v in 0..k {
        let pairs = || (0..k).filter(move |&w| w != v).map(move |w| &ord[&(v, w)]);
        let one_winner = pairs().all(|c| c.len() == 1 || c.last().is_some_and(|x| x.len() == 1));
        let one_loser = pairs().all(|c| c.len() == 1 || (c.len() == 2 && c[0].len() == 1));
        if one_winner {
            e.push(v);
        } else if one_loser {
            f.push(v);
        } else {
            return Err(violation(
                "T1 winners",
                format!("`{}` is neither one-winner nor one-loser", inst.var_name(v)),
            ));
        }
    }
    Ok((e, f))
}

fn constrained_pair(inst: &Instance, set: &[usize]) -> Option<(usize, usize)> {
    set.iter()
        .flat_map(|&v| set.iter().map(move |&w| (v, w)))
        .find(|&(v, w)| v < w && inst.is_nontrivial(v, w))
}

fn constant_fusion(inst: &Instance, v: usize, w: usize, hinge: usize, target: usize) -> FusionSpec {
    let f = inst
        .domain(v)
        .iter()
        .filter(|&&p| p != hinge)
        .map(|&p| (inst.point_name(p).to_string(), inst.point_name(target).to_string()))
        .collect();
    FusionSpec::complex(inst.var_name(v), inst.var_name(w), inst.point_name(hinge), f)
}

/// Within E: hinge on the unique winner of `v`, every other point paired
/// with the unique winner of `w`.
fn winner_fusion(inst: &Instance, ord: &BTreeMap<(usize, usize), Vec<Vec<usize>>>, e: &[usize]) -> Option<FusionSpec> {
    let (v, w) = constrained_pair(inst, e)?;
    let a = *ord[&(v, w)].last()?.first()?;
    let b = *ord[&(w, v)].last()?.first()?;
    Some(constant_fusion(inst, v, w, a, b))
}

/// Within F: hinge on the unique loser of `v`, every other point paired with
/// the unique loser of `w`.
fn loser_fusion(inst: &Instance, ord: &BTreeMap<(usize, usize), Vec<Vec<usize>>>, f: &[usize]) -> Option<FusionSpec> {
    let (v, w) = constrained_pair(inst, f)?;
    let a = *ord[&(v, w)].first()?.first()?;
    let b = *ord[&(w, v)].first()?.first()?;
    Some(constant_fusion(inst, v, w, a, b))
}

fn endgame(inst: &Instance, e: &[usize], mut chain: Chain) -> Result<SolveResult, SolveError> {
    const STAGE: &str = "T1 endgame";
    let k = inst.num_vars();
    let in_e: Vec<bool> = (0..k).map(|v| e.contains(&v)).collect();
    for (v, w) in inst.constraint_pairs() {
        if in_e[v] == in_e[w] {
            return Err(violation(
                STAGE,
                format!("constraint left inside one side: `{}`-`{}`", inst.var_name(v), inst.var_name(w)),
            ));
        }
    }
    // For each F point: `None` if it is compatible with everything, else the
    // single E literal it implies.
    let mut implied: BTreeMap<usize, Option<(usize, usize)>> = BTreeMap::new();
    for v in (0..k).filter(|&v| !in_e[v]) {
        for &b in inst.domain(v) {
            let weak: Vec<usize> = (0..k)
                .filter(|&w| w != v && inst.support_count(b, w) < inst.domain_size(w))
                .collect();
            let lit = match weak[..] {
                [] => None,
                [w] => {
                    let mut s = inst.supports(b, w);
                    match (s.next(), s.next()) {
                        (Some(a), None) => Some((w, a)),
                        _ => {
                            return Err(violation(
                                STAGE,
                                format!("`{}` has more than one support in `{}`", inst.point_name(b), inst.var_name(w)),
                            ))
                        }
                    }
                }
                _ => {
                    return Err(violation(
                        STAGE,
                        format!("`{}` is weakly incompatible with several variables", inst.point_name(b)),
                    ))
                }
            };
            implied.insert(b, lit);
        }
    }

    let mut clauses = Vec::new();
    let mut clause_vars = Vec::new();
    for v in (0..k).filter(|&v| !in_e[v]) {
        let lits: Option<BTreeSet<(String, String)>> = inst
            .domain(v)
            .iter()
            .map(|b| implied[b].map(|(w, a)| (inst.var_name(w).to_string(), inst.point_name(a).to_string())))
            .collect();
        if let Some(c) = lits {
            clauses.push(c);
            clause_vars.push(v);
        }
    }
    let noosat = NoosatInstance::new(
        e.iter().map(|&v| inst.var_name(v).to_string()).collect(),
        e.iter()
            .flat_map(|&v| inst.domain(v).iter().map(|&p| inst.point_name(p).to_string()))
            .collect(),
        clauses,
    )
    .map_err(|err| violation(STAGE, err.to_string()))?;
    let matched = match_clauses(&noosat);
    chain.event(TraceEvent::Matching {
        clauses: noosat.clauses().len(),
        matched: matched.as_ref().map_or(0, |m| m.len()),
    });
    let Some(matched) = matched else {
        return chain.unsat();
    };

    let mut choice = vec![usize::MAX; k];
    for &v in e {
        choice[v] = match matched.get(inst.var_name(v)) {
            Some(a) => inst.point_index(a).expect("literal names a point"),
            None => inst.domain(v)[0],
        };
    }
    for v in (0..k).filter(|&v| !in_e[v]) {
        choice[v] = inst
            .domain(v)
            .iter()
            .copied()
            .find(|b| implied[b].map_or(true, |(w, a)| choice[w] == a))
            .ok_or_else(|| violation(STAGE, "matched clause has no satisfied literal"))?;
    }
    let solution: Assignment = inst.assignment_from(&choice);
    chain.sat(solution)
}
