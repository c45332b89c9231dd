//! The classes with a single incompatibility pattern: 1I and 2I.

use crate::model::{Instance, Structure};
use crate::solvers::{violation, Chain, SolveError, SolveResult};

/// Instances without any incompatible pair: every choice is a solution.
pub fn solve_1i(instance: &Instance) -> Result<SolveResult, SolveError> {
    if let Some((v, w)) = instance.constraint_pairs().first() {
        return Err(SolveError::Precondition(format!(
            "constraint between `{}` and `{}` has an incompatible pair",
            instance.var_name(*v),
            instance.var_name(*w)
        )));
    }
    let chain = Chain::new(instance);
    let choice: Option<Vec<usize>> = (0..instance.num_vars())
        .map(|v| instance.domain(v).first().copied())
        .collect();
    chain.finish(instance, choice)
}

/// Instances in which no two non-trivial constraints have disjoint scopes.
///
/// The non-trivial constraints then form a star or a triangle, so they are
/// covered by at most two variables. Every assignment of the cover is tried;
/// the remaining variables are pairwise unconstrained and each just needs a
/// point compatible with the cover.
pub fn solve_2i(instance: &Instance) -> Result<SolveResult, SolveError> {
    let mut chain = Chain::new(instance);
    let pre = chain.preprocess(instance);
    if pre.unsat {
        return chain.unsat();
    }
    let inst = pre.instance;
    let edges = inst.constraint_pairs();
    let cover = vertex_cover(&edges).ok_or_else(|| {
        violation("2I", "two non-trivial constraints have disjoint scopes")
    })?;
    let choice = solve_with_cover(&inst, &cover);
    chain.finish(&inst, choice)
}

/// A cover of at most two variables for a star or triangle.
fn vertex_cover(edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let Some(&(a, b)) = edges.first() else {
        return Some(Vec::new());
    };
    for c in [a, b] {
        if edges.iter().all(|&(x, y)| x == c || y == c) {
            return Some(vec![c]);
        }
    }
    let cover = vec![a, b];
    if edges.len() == 3 && edges.iter().all(|&(x, y)| cover.contains(&x) || cover.contains(&y)) {
        return Some(cover);
    }
    None
}

fn solve_with_cover(inst: &Instance, cover: &[usize]) -> Option<Vec<usize>> {
    let k = inst.num_vars();
    let mut fixed = vec![usize::MAX; k];
    let mut result = None;
    try_cover(inst, cover, 0, &mut fixed, &mut result);
    result
}

fn try_cover(inst: &Instance, cover: &[usize], i: usize, fixed: &mut Vec<usize>, out: &mut Option<Vec<usize>>) {
    if out.is_some() {
        return;
    }
    if i == cover.len() {
        let mut choice = fixed.clone();
        for v in 0..inst.num_vars() {
            if choice[v] != usize::MAX {
                continue;
            }
            let pick = inst
                .domain(v)
                .iter()
                .copied()
                .find(|&p| cover.iter().all(|&c| inst.compatible(p, fixed[c])));
            match pick {
                Some(p) => choice[v] = p,
                None => return,
            }
        }
        *out = Some(choice);
        return;
    }
    let v = cover[i];
    for &p in inst.domain(v) {
        if cover[..i].iter().all(|&c| inst.compatible(p, fixed[c])) {
            fixed[v] = p;
            try_cover(inst, cover, i + 1, fixed, out);
            fixed[v] = usize::MAX;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relation;
    use crate::solvers::Verdict;

    #[test]
    fn trivial_instance_is_sat() {
        let inst = Instance::build(&[("x", vec!["a", "b"]), ("y", vec!["c"])], &[]).unwrap();
        let r = solve_1i(&inst).unwrap();
        assert!(r.verdict.is_sat());
    }

    #[test]
    fn incompatibility_violates_1i_precondition() {
        let inst = Instance::build(
            &[("x", vec!["a", "b"]), ("y", vec!["c"])],
            &[Relation::new("x", "y", [("a", "c")])],
        )
        .unwrap();
        assert!(matches!(solve_1i(&inst), Err(SolveError::Precondition(_))));
    }

    #[test]
    fn empty_domain_is_unsat_for_1i() {
        let inst = Instance::build::<_, &str>(&[("x", vec![])], &[]).unwrap();
        assert_eq!(solve_1i(&inst).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn triangle_with_odd_cycle_of_inequalities() {
        // Three variables pairwise different over two values: unsat.
        let dom = |v: &str| (v.to_string(), vec![format!("{v}0"), format!("{v}1")]);
        let ne = |v: &str, w: &str| {
            Relation::new(v, w, [(format!("{v}0"), format!("{w}1")), (format!("{v}1"), format!("{w}0"))])
        };
        let inst = Instance::build(&[dom("x"), dom("y"), dom("z")], &[ne("x", "y"), ne("y", "z"), ne("x", "z")])
            .unwrap();
        assert_eq!(solve_2i(&inst).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn star_is_solved() {
        let inst = Instance::build(
            &[("c", vec!["c0", "c1"]), ("x", vec!["x0", "x1"]), ("y", vec!["y0"])],
            &[
                Relation::new("c", "x", [("c0", "x0"), ("c1", "x1")]),
                Relation::new("c", "y", [("c1", "y0")]),
            ],
        )
        .unwrap();
        let r = solve_2i(&inst).unwrap();
        let Verdict::Sat(s) = r.verdict else { panic!("expected sat") };
        assert_eq!(s.get("c"), Some("c1"));
        assert_eq!(s.get("x"), Some("x1"));
    }

    #[test]
    fn disjoint_constraints_are_rejected() {
        let dom = |v: &str| (v.to_string(), vec![format!("{v}0"), format!("{v}1")]);
        let eq = |v: &str, w: &str| {
            Relation::new(v, w, [(format!("{v}0"), format!("{w}0")), (format!("{v}1"), format!("{w}1"))])
        };
        let inst = Instance::build(&[dom("a"), dom("b"), dom("c"), dom("d")], &[eq("a", "b"), eq("c", "d")])
            .unwrap();
        // Preprocessing leaves both equalities in place.
        assert!(matches!(solve_2i(&inst), Err(SolveError::StructureViolation { .. })));
    }
}
