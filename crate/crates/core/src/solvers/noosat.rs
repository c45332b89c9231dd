//! Clauses of `variable = value` literals in which every literal occurs in at
//! most one clause.
//!
//! Because each literal belongs to one clause, a variable can satisfy at most
//! one clause, and any set of clauses is satisfiable iff clauses can be
//! matched to distinct variables occurring in them. That is a bipartite
//! matching problem, solved here with augmenting paths.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::Assignment;
use crate::solvers::Verdict;

pub type Literal = (String, String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoosatInstance {
    variables: Vec<String>,
    values: Vec<String>,
    clauses: Vec<BTreeSet<Literal>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NoosatError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown value `{0}`")]
    UnknownValue(String),
    #[error("literal {0} = {1} occurs in more than one clause")]
    RepeatedLiteral(String, String),
}

impl NoosatInstance {
    pub fn new(
        variables: Vec<String>,
        values: Vec<String>,
        clauses: Vec<BTreeSet<Literal>>,
    ) -> Result<Self, NoosatError> {
        let mut seen = BTreeSet::new();
        for c in &clauses {
            for (v, a) in c {
                if !variables.contains(v) {
                    return Err(NoosatError::UnknownVariable(v.clone()));
                }
                if !values.contains(a) {
                    return Err(NoosatError::UnknownValue(a.clone()));
                }
                if !seen.insert((v, a)) {
                    return Err(NoosatError::RepeatedLiteral(v.clone(), a.clone()));
                }
            }
        }
        Ok(NoosatInstance {
            variables,
            values,
            clauses,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn clauses(&self) -> &[BTreeSet<Literal>] {
        &self.clauses
    }

    /// True iff `assignment` gives every variable a known value and satisfies
    /// every clause.
    pub fn satisfied_by(&self, assignment: &Assignment) -> bool {
        self.variables
            .iter()
            .all(|v| assignment.get(v).is_some_and(|a| self.values.iter().any(|x| x == a)))
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|(v, a)| assignment.get(v) == Some(a.as_str())))
    }
}

/// Decides satisfiability. Unmatched variables take the first value.
pub fn solve_noosat(instance: &NoosatInstance) -> Verdict {
    if instance.values.is_empty() && !instance.variables.is_empty() {
        return Verdict::Unsat;
    }
    match match_clauses(instance) {
        Some(m) => {
            let mut out = Assignment::new();
            for v in &instance.variables {
                let a = m.get(v).unwrap_or(&instance.values[0]);
                out.insert(v.clone(), a.clone());
            }
            Verdict::Sat(out)
        }
        None => Verdict::Unsat,
    }
}

/// A value for each variable used to satisfy a clause, if every clause can
/// be given its own variable.
pub(crate) fn match_clauses(instance: &NoosatInstance) -> Option<BTreeMap<String, String>> {
    let index: BTreeMap<&str, usize> = instance
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    // adj[c]: (variable, value) pairs offered by clause c.
    let adj: Vec<Vec<(usize, &str)>> = instance
        .clauses
        .iter()
        .map(|c| c.iter().map(|(v, a)| (index[v.as_str()], a.as_str())).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; instance.variables.len()];
    for c in 0..adj.len() {
        let mut seen = vec![false; instance.variables.len()];
        if !augment(c, &adj, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut out = BTreeMap::new();
    for (v, o) in owner.iter().enumerate() {
        if let Some(c) = o {
            let (_, a) = adj[*c].iter().find(|(x, _)| *x == v).expect("matched edge");
            out.insert(instance.variables[v].clone(), a.to_string());
        }
    }
    Some(out)
}

fn augment(c: usize, adj: &[Vec<(usize, &str)>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &(v, _) in &adj[c] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v].map_or(true, |d| augment(d, adj, owner, seen)) {
            owner[v] = Some(c);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: &str, a: &str) -> Literal {
        (v.to_string(), a.to_string())
    }

    fn inst(vars: &[&str], vals: &[&str], clauses: Vec<Vec<Literal>>) -> NoosatInstance {
        NoosatInstance::new(
            vars.iter().map(|s| s.to_string()).collect(),
            vals.iter().map(|s| s.to_string()).collect(),
            clauses.into_iter().map(|c| c.into_iter().collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn no_clauses() {
        let i = inst(&["v"], &["a"], vec![]);
        assert!(solve_noosat(&i).is_sat());
    }

    #[test]
    fn single_literal() {
        let i = inst(&["v"], &["a", "b"], vec![vec![lit("v", "b")]]);
        let Verdict::Sat(s) = solve_noosat(&i) else { panic!() };
        assert_eq!(s.get("v"), Some("b"));
    }

    #[test]
    fn one_variable_two_clauses() {
        let i = inst(&["v"], &["a", "b"], vec![vec![lit("v", "a")], vec![lit("v", "b")]]);
        assert_eq!(solve_noosat(&i), Verdict::Unsat);
    }

    #[test]
    fn matching_needs_reassignment() {
        let i = inst(
            &["x", "y"],
            &["a", "b"],
            vec![vec![lit("x", "a"), lit("y", "a")], vec![lit("x", "b")]],
        );
        let Verdict::Sat(s) = solve_noosat(&i) else { panic!() };
        assert!(i.satisfied_by(&s));
    }

    #[test]
    fn repeated_literal_is_rejected() {
        let r = NoosatInstance::new(
            vec!["x".into()],
            vec!["a".into()],
            vec![[lit("x", "a")].into(), [lit("x", "a")].into()],
        );
        assert_eq!(r, Err(NoosatError::RepeatedLiteral("x".into(), "a".into())));
    }

    #[test]
    fn empty_clause_is_unsat() {
        let i = inst(&["x"], &["a"], vec![vec![]]);
        assert_eq!(solve_noosat(&i), Verdict::Unsat);
    }
}
