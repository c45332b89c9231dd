//! T5-free instances are free of the broken-triangle pattern under every
//! variable order, so after arc consistency a greedy assignment in any fixed
//! order never gets stuck: the supports of the already chosen points in the
//! next variable form a chain under inclusion, and the smallest is non-empty.

use crate::model::{Instance, Structure};
use crate::solvers::{violation, Chain, SolveError, SolveResult};

pub fn solve_t5(instance: &Instance) -> Result<SolveResult, SolveError> {
    let mut chain = Chain::new(instance);
    let pre = chain.preprocess(instance);
    if pre.unsat {
        return chain.unsat();
    }
    let inst = pre.instance;
    let choice = greedy(&inst)?;
    chain.finish(&inst, Some(choice))
}

/// Assigns variables in declaration order, each to its first point
/// compatible with everything chosen so far.
pub(crate) fn greedy(inst: &Instance) -> Result<Vec<usize>, SolveError> {
    let mut choice: Vec<usize> = Vec::with_capacity(inst.num_vars());
    for v in 0..inst.num_vars() {
        let p = inst
            .domain(v)
            .iter()
            .copied()
            .find(|&p| choice.iter().all(|&q| inst.compatible(p, q)))
            .ok_or_else(|| {
                violation(
                    "T5 greedy",
                    format!("no point of `{}` extends the partial assignment", inst.var_name(v)),
                )
            })?;
        choice.push(p);
    }
    Ok(choice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relation;
    use crate::solvers::Verdict;

    #[test]
    fn bijection_chain() {
        let inst = Instance::build(
            &[("x", vec!["x0", "x1"]), ("y", vec!["y0", "y1"]), ("z", vec!["z0", "z1"])],
            &[
                Relation::new("x", "y", [("x0", "y1"), ("x1", "y0")]),
                Relation::new("y", "z", [("y0", "z0"), ("y1", "z1")]),
            ],
        )
        .unwrap();
        let r = solve_t5(&inst).unwrap();
        assert!(r.verdict.is_sat());
    }

    #[test]
    fn wiped_out_by_arc_consistency() {
        let inst = Instance::build(
            &[("x", vec!["x0"]), ("y", vec!["y0"])],
            &[Relation::empty("x", "y")],
        )
        .unwrap();
        assert_eq!(solve_t5(&inst).unwrap().verdict, Verdict::Unsat);
    }
}
