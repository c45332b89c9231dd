//! Exhaustive backtracking with forward checking. Ground truth for tests.

use crate::model::{Instance, Structure};
use crate::solvers::{SolveError, SolveResult, Verdict};

/// Node budget used by [`oracle_solve`].
pub const DEFAULT_BUDGET: u64 = 50_000_000;

pub fn oracle_solve(instance: &Instance) -> Result<SolveResult, SolveError> {
    oracle_solve_with_budget(instance, DEFAULT_BUDGET)
}

pub fn oracle_solve_with_budget(instance: &Instance, budget: u64) -> Result<SolveResult, SolveError> {
    let verdict = match find_solution(instance, budget)? {
        Some(choice) => Verdict::Sat(instance.assignment_from(&choice)),
        None => Verdict::Unsat,
    };
    Ok(SolveResult {
        verdict,
        trace: Vec::new(),
    })
}

/// A solution as one point index per variable, or `None`.
pub fn find_solution(instance: &Instance, budget: u64) -> Result<Option<Vec<usize>>, SolveError> {
    let domains: Vec<Vec<usize>> = (0..instance.num_vars())
        .map(|v| instance.domain(v).to_vec())
        .collect();
    let mut s = Oracle {
        inst: instance,
        choice: vec![usize::MAX; instance.num_vars()],
        nodes: 0,
        budget,
    };
    if s.search(domains)? {
        Ok(Some(s.choice))
    } else {
        Ok(None)
    }
}

/// True iff the instance has a solution.
pub fn is_satisfiable(instance: &Instance) -> Result<bool, SolveError> {
    Ok(find_solution(instance, DEFAULT_BUDGET)?.is_some())
}

struct Oracle<'a> {
    inst: &'a Instance,
    choice: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Oracle<'_> {
    fn search(&mut self, domains: Vec<Vec<usize>>) -> Result<bool, SolveError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolveError::BudgetExceeded { nodes: self.budget });
        }
        let next = (0..domains.len())
            .filter(|&v| self.choice[v] == usize::MAX)
            .min_by_key(|&v| domains[v].len());
        let Some(v) = next else {
            return Ok(true);
        };
        for &p in &domains[v] {
            let mut filtered = domains.clone();
            let mut wiped = false;
            for (w, dom) in filtered.iter_mut().enumerate() {
                if w == v || self.choice[w] != usize::MAX {
                    continue;
                }
                dom.retain(|&q| self.inst.compatible(p, q));
                if dom.is_empty() {
                    wiped = true;
                    break;
                }
            }
            if wiped {
                continue;
            }
            self.choice[v] = p;
            if self.search(filtered)? {
                return Ok(true);
            }
            self.choice[v] = usize::MAX;
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relation;

    #[test]
    fn empty_instance_is_sat() {
        let r = oracle_solve(&Instance::empty()).unwrap();
        assert_eq!(r.verdict, Verdict::Sat(Default::default()));
    }

    #[test]
    fn empty_relation_is_unsat() {
        let inst = Instance::build(
            &[("v", vec!["1"]), ("w", vec!["2"])],
            &[Relation::empty("v", "w")],
        )
        .unwrap();
        assert_eq!(oracle_solve(&inst).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn budget_is_enforced() {
        let doms: Vec<(String, Vec<String>)> = (0..4)
            .map(|v| (format!("v{v}"), (0..3).map(|d| format!("v{v}_{d}")).collect()))
            .collect();
        // Pairwise "not equal index" on four variables with three values: unsat.
        let mut rels = Vec::new();
        for a in 0..4 {
            for b in (a + 1)..4 {
                let allowed = (0..3)
                    .flat_map(|x| (0..3).filter(move |&y| y != x).map(move |y| (x, y)))
                    .map(|(x, y)| (format!("v{a}_{x}"), format!("v{b}_{y}")))
                    .collect::<Vec<_>>();
                rels.push(Relation {
                    scope: (format!("v{a}"), format!("v{b}")),
                    allowed,
                });
            }
        }
        let inst = Instance::build(&doms, &rels).unwrap();
        assert_eq!(oracle_solve(&inst).unwrap().verdict, Verdict::Unsat);
        assert!(matches!(
            oracle_solve_with_budget(&inst, 2),
            Err(SolveError::BudgetExceeded { .. })
        ));
    }
}
