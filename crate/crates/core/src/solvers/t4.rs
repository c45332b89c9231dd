//! T4-free instances. While the gadget W (a point compatible with two points
//! of another variable and incompatible with a third) occurs, its point `c`
//! can be removed. Without W every constraint is zero-one-all: each point is
//! compatible with none, exactly one, or all points of any other variable.

use crate::model::{Instance, Structure};
use crate::preprocess::enforce_arc_consistency;
use crate::reduction::library::PatternName;
use crate::solvers::{violation, Chain, SolveError, SolveResult, TraceEvent};

pub fn solve_t4(instance: &Instance) -> Result<SolveResult, SolveError> {
    let mut chain = Chain::new(instance);
    let Some(inst) = chain.remove_gadgets(instance.clone(), PatternName::W, "c") else {
        return chain.unsat();
    };
    let choice = zoa_search(&inst, &mut chain)?;
    chain.finish(&inst, choice)
}

/// Decides a zero-one-all instance.
///
/// After arc consistency, each value of a seed variable is tried and
/// "one"-supports are followed transitively. If that closes without a
/// conflict, every assigned point is compatible with all points of the
/// unassigned variables, so the rest is solved independently. If every seed
/// value fails the instance is unsatisfiable.
pub fn solve_zoa(instance: &Instance) -> Result<SolveResult, SolveError> {
    let mut chain = Chain::new(instance);
    let ac = enforce_arc_consistency(instance);
    if !ac.trace.is_empty() {
        chain.event(TraceEvent::Preprocess {
            events: ac.trace.events.clone(),
        });
    }
    if ac.unsat {
        return chain.unsat();
    }
    let choice = zoa_search(&ac.instance, &mut chain)?;
    chain.finish(&ac.instance, choice)
}

/// `inst` must be arc consistent.
fn zoa_search(inst: &Instance, chain: &mut Chain) -> Result<Option<Vec<usize>>, SolveError> {
    check_zoa(inst)?;
    let k = inst.num_vars();
    let mut choice = vec![usize::MAX; k];
    while let Some(seed) = (0..k).find(|&v| choice[v] == usize::MAX) {
        let mut found = false;
        for &p in inst.domain(seed) {
            let mut trial = choice.clone();
            let ok = propagate(inst, seed, p, &mut trial);
            chain.event(TraceEvent::Propagation {
                seed: inst.var_name(seed).to_string(),
                value: inst.point_name(p).to_string(),
                success: ok,
            });
            if ok {
                choice = trial;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(None);
        }
    }
    Ok(Some(choice))
}

fn check_zoa(inst: &Instance) -> Result<(), SolveError> {
    for p in 0..inst.num_points() {
        for w in inst.neighbours(inst.var_of(p)) {
            let s = inst.support_count(p, w);
            if s > 1 && s < inst.domain_size(w) {
                return Err(violation(
                    "T4 zero-one-all",
                    format!(
                        "`{}` has {s} of {} supports in `{}`",
                        inst.point_name(p),
                        inst.domain_size(w),
                        inst.var_name(w)
                    ),
                ));
            }
            if s == 0 {
                return Err(violation(
                    "T4 zero-one-all",
                    format!("`{}` is unsupported in `{}`", inst.point_name(p), inst.var_name(w)),
                ));
            }
        }
    }
    Ok(())
}

fn propagate(inst: &Instance, seed: usize, p: usize, choice: &mut [usize]) -> bool {
    choice[seed] = p;
    let mut stack = vec![seed];
    while let Some(v) = stack.pop() {
        let a = choice[v];
        for w in inst.neighbours(v) {
            let mut sup = inst.supports(a, w);
            let (Some(only), None) = (sup.next(), sup.next()) else {
                // "all": any later choice in `w` is compatible with `a`.
                continue;
            };
            if choice[w] == usize::MAX {
                choice[w] = only;
                stack.push(w);
            } else if choice[w] != only {
                return false;
            }
        }
    }
    true
}
