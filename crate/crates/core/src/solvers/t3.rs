//! T3-free instances. While the gadget N (a point compatible with two points
//! of another variable, one of which has an incompatibility back) occurs, its
//! point `c` can be removed without losing solvability. Without N every
//! constraint is trivial or a bijection, and each connected component is
//! decided by trying every value of one variable.

use crate::model::{Instance, Structure};
use crate::reduction::library::PatternName;
use crate::solvers::{violation, Chain, SolveError, SolveResult, TraceEvent};

pub fn solve_t3(instance: &Instance) -> Result<SolveResult, SolveError> {
    let mut chain = Chain::new(instance);
    let Some(inst) = chain.remove_gadgets(instance.clone(), PatternName::NT3, "c") else {
        return chain.unsat();
    };
    check_bijections(&inst)?;
    let mut choice = vec![usize::MAX; inst.num_vars()];
    for comp in inst.components() {
        if !solve_component(&inst, &comp, &mut choice, &mut chain) {
            return chain.unsat();
        }
    }
    chain.finish(&inst, Some(choice))
}

fn check_bijections(inst: &Instance) -> Result<(), SolveError> {
    for (v, w) in inst.constraint_pairs() {
        let bij = inst.domain_size(v) == inst.domain_size(w)
            && inst.domain(v).iter().all(|&p| inst.support_count(p, w) == 1)
            && inst.domain(w).iter().all(|&q| inst.support_count(q, v) == 1);
        if !bij {
            return Err(violation(
                "T3 bijections",
                format!(
                    "constraint between `{}` and `{}` is neither trivial nor a bijection",
                    inst.var_name(v),
                    inst.var_name(w)
                ),
            ));
        }
    }
    Ok(())
}

fn solve_component(inst: &Instance, comp: &[usize], choice: &mut [usize], chain: &mut Chain) -> bool {
    let seed = comp[0];
    for &p in inst.domain(seed) {
        let ok = propagate(inst, seed, p, choice);
        chain.event(TraceEvent::Propagation {
            seed: inst.var_name(seed).to_string(),
            value: inst.point_name(p).to_string(),
            success: ok,
        });
        if ok {
            return true;
        }
        for &v in comp {
            choice[v] = usize::MAX;
        }
    }
    false
}

/// Follows bijections from `seed = p` through the component.
fn propagate(inst: &Instance, seed: usize, p: usize, choice: &mut [usize]) -> bool {
    choice[seed] = p;
    let mut stack = vec![seed];
    while let Some(v) = stack.pop() {
        let a = choice[v];
        for w in inst.neighbours(v) {
            let image = inst.supports(a, w).next().expect("bijection");
            if choice[w] == usize::MAX {
                choice[w] = image;
                stack.push(w);
            } else if choice[w] != image {
                return false;
            }
        }
    }
    true
}
