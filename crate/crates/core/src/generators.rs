//! Instance generators: hardness reductions whose outputs avoid a given
//! pattern, and seeded random pattern-free instances for testing.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Instance, Relation, Structure};
use crate::occurrence::find_embedding;
use crate::reduction::library::PatternName;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("literal {0} is out of range")]
    BadLiteral(i64),
    #[error("variable {var} occurs more than once in clause {clause}")]
    RepeatedVariable { clause: usize, var: usize },
    #[error("vertex {0} is out of range")]
    BadVertex(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no {class}-free instance reached within {repairs} repairs")]
    GenerationBudgetExceeded { class: String, repairs: usize },
}

/// A CNF formula in which no variable occurs twice in one clause.
/// Literals are non-zero integers as in DIMACS: `-3` is the negation of
/// variable 3; variables are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sat1Formula {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
}

impl Sat1Formula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, GenerateError> {
        for (ci, c) in clauses.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &l in c {
                let v = l.unsigned_abs() as usize;
                if l == 0 || v > num_vars {
                    return Err(GenerateError::BadLiteral(l));
                }
                if !seen.insert(v) {
                    return Err(GenerateError::RepeatedVariable { clause: ci + 1, var: v });
                }
            }
        }
        Ok(Sat1Formula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    /// Truth of the formula under `values[i]` for variable `i + 1`.
    pub fn evaluate(&self, values: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| values[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

/// Reads DIMACS CNF. Repeated literals within a clause are merged and
/// tautological clauses dropped, so the result always satisfies the
/// one-occurrence invariant.
pub fn parse_dimacs(text: &str) -> Result<Sat1Formula, GenerateError> {
    let mut num_vars = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            match f[..] {
                ["cnf", n, _] => {
                    num_vars = Some(n.parse::<usize>().map_err(|e| GenerateError::Parse {
                        line: i + 1,
                        msg: e.to_string(),
                    })?)
                }
                _ => {
                    return Err(GenerateError::Parse {
                        line: i + 1,
                        msg: "expected `p cnf <vars> <clauses>`".into(),
                    })
                }
            }
            continue;
        }
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| GenerateError::Parse {
                line: i + 1,
                msg: format!("bad literal `{tok}`"),
            })?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(l);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let max_var = clauses
        .iter()
        .flatten()
        .map(|l| l.unsigned_abs() as usize)
        .max()
        .unwrap_or(0);
    let num_vars = num_vars.unwrap_or(max_var);
    let clauses = clauses
        .into_iter()
        .filter_map(|c| {
            let set: BTreeSet<i64> = c.into_iter().collect();
            if set.iter().any(|l| set.contains(&-l)) {
                None
            } else {
                Some(set.into_iter().collect())
            }
        })
        .collect();
    Sat1Formula::new(num_vars, clauses)
}

/// One variable per propositional variable with points for both polarities,
/// one variable per clause with a point per literal. A clause point is
/// incompatible only with the opposite polarity of its own variable, so each
/// constraint has at most one incompatible pair.
pub fn sat1_to_csp(formula: &Sat1Formula) -> Instance {
    let lit = |l: i64| format!("{}x{}", if l > 0 { "" } else { "~" }, l.unsigned_abs());
    let mut domains: Vec<(String, Vec<String>)> = (1..=formula.num_vars as i64)
        .map(|v| (format!("x{v}"), vec![lit(v), lit(-v)]))
        .collect();
    let mut relations = Vec::new();
    for (j, c) in formula.clauses.iter().enumerate() {
        let cv = format!("C{}", j + 1);
        let points: Vec<String> = c.iter().map(|&l| format!("{cv}:{}", lit(l))).collect();
        for &l in c {
            let v = l.unsigned_abs() as i64;
            let (pos, neg) = (lit(v), lit(-v));
            let mut allowed = Vec::with_capacity(2 * c.len());
            for (&m, pm) in c.iter().zip(&points) {
                if m != l || l < 0 {
                    allowed.push((pm.clone(), pos.clone()));
                }
                if m != l || l > 0 {
                    allowed.push((pm.clone(), neg.clone()));
                }
            }
            relations.push(Relation::new(cv.clone(), format!("x{v}"), allowed));
        }
        domains.push((cv, points));
    }
    Instance::build(&domains, &relations).expect("generated names are consistent")
}

/// A simple undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouringGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ColouringGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GenerateError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x == 0 || x > n {
                    return Err(GenerateError::BadVertex(x));
                }
            }
            if u == v {
                return Err(GenerateError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(ColouringGraph { n, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)));
        Self::new(n, edges).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// Brute-force 3-colourability, for small graphs.
    pub fn is_3_colourable(&self) -> bool {
        let mut colour = vec![0u8; self.n + 1];
        fn go(g: &ColouringGraph, v: usize, colour: &mut Vec<u8>) -> bool {
            if v > g.n {
                return true;
            }
            for c in 1..=3 {
                let clash = g
                    .edges
                    .iter()
                    .any(|&(a, b)| (a == v && b < v && colour[b] == c) || (b == v && a < v && colour[a] == c));
                if !clash {
                    colour[v] = c;
                    if go(g, v + 1, colour) {
                        return true;
                    }
                }
            }
            colour[v] = 0;
            false
        }
        go(self, 1, &mut colour)
    }
}

/// Reads an edge list: one `u v` pair per line, optionally prefixed with
/// `e`. A `p edge <n> <m>` or `n <n>` line fixes the vertex count, otherwise
/// it is the largest vertex mentioned. `#` and `c` start comments.
pub fn parse_edge_list(text: &str) -> Result<ColouringGraph, GenerateError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('c') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<usize>().map_err(|_| GenerateError::Parse {
                line: i + 1,
                msg: format!("bad number `{s}`"),
            })
        };
        match f[..] {
            ["p", "edge", k, _] | ["n", k] => n = Some(num(k)?),
            ["e", u, v] | [u, v] => edges.push((num(u)?, num(v)?)),
            _ => {
                return Err(GenerateError::Parse {
                    line: i + 1,
                    msg: format!("unrecognised line `{line}`"),
                })
            }
        }
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0));
    ColouringGraph::new(n, edges)
}

/// `R_{s,t}`: `(u, v)` allowed iff `u = s` and `v = t`, or `u != s` and `v != t`.
fn r_relation(x: &str, y: &str, s: usize, t: usize) -> Relation {
    let mut allowed = Vec::new();
    for u in 1..=3 {
        for v in 1..=3 {
            if (u == s) == (v == t) {
                allowed.push((format!("{x}={u}"), format!("{y}={v}")));
            }
        }
    }
    Relation::new(x, y, allowed)
}

/// 3-colouring as a Z-free instance: every edge `{i, j}` gets fresh
/// variables `u1, u2, u3` with `R_{k,k}` on `(v_i, u_k)` and
/// `R_{1 + (k mod 3), k}` on `(u_k, v_j)`, which together force `v_i != v_j`.
pub fn coloring_to_z_free(graph: &ColouringGraph) -> Instance {
    let dom = |x: &str| (x.to_string(), (1..=3).map(|c| format!("{x}={c}")).collect::<Vec<_>>());
    let mut domains: Vec<(String, Vec<String>)> = (1..=graph.n).map(|i| dom(&format!("v{i}"))).collect();
    let mut relations = Vec::new();
    for &(i, j) in &graph.edges {
        let (vi, vj) = (format!("v{i}"), format!("v{j}"));
        for k in 1..=3 {
            let u = format!("e{i}_{j}_u{k}");
            domains.push(dom(&u));
            relations.push(r_relation(&vi, &u, k, k));
            relations.push(r_relation(&u, &vj, 1 + (k % 3), k));
        }
    }
    Instance::build(&domains, &relations).expect("generated names are consistent")
}

/// Moves every non-trivial constraint `(v, w)` onto fresh copies `v'`, `w'`
/// tied to the originals by equality constraints, leaving `(v, w)` trivial.
pub fn csp_to_2v_free(instance: &Instance) -> Instance {
    let (mut domains, relations) = instance.to_parts();
    let mut out = Vec::new();
    for rel in relations {
        let (v, w) = rel.scope.clone();
        let tag = format!("{v}~{w}");
        let copy = |x: &str| format!("{x}@{tag}");
        for x in [&v, &w] {
            let points = domains
                .iter()
                .find(|(name, _)| name == x)
                .map(|(_, p)| p.clone())
                .expect("scope variable exists");
            domains.push((copy(x), points.iter().map(|p| copy(p)).collect()));
            out.push(Relation::new(x.clone(), copy(x), points.iter().map(|p| (p.clone(), copy(p)))));
        }
        out.push(Relation::new(
            copy(&v),
            copy(&w),
            rel.allowed.iter().map(|(p, q)| (copy(p), copy(q))),
        ));
    }
    Instance::build(&domains, &out).expect("generated names are consistent")
}

/// How the relation of a constrained scope is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationShape {
    /// Each pair incompatible independently with probability `tightness`.
    Uniform,
    /// Per scope, one of: uniform, bijection, function, staircase, or a
    /// single point restricted to one support.
    Mixed,
}

/// Parameters of [`random_pattern_free`].
#[derive(Clone, Debug)]
pub struct RandomParams {
    pub n: usize,
    pub d: usize,
    /// Probability that a pair of variables gets a non-trivial constraint.
    pub density: f64,
    /// Probability that a pair of points in a uniform scope is incompatible.
    pub tightness: f64,
    pub shape: RelationShape,
    pub seed: u64,
}

impl RandomParams {
    pub fn new(n: usize, d: usize, density: f64, seed: u64) -> Self {
        RandomParams {
            n,
            d,
            density,
            tightness: 0.5,
            shape: RelationShape::Uniform,
            seed,
        }
    }

    pub fn mixed(mut self) -> Self {
        self.shape = RelationShape::Mixed;
        self
    }
}

/// Incompatible pairs `(i, j)` of a `d x d` scope.
fn sample_scope(rng: &mut ChaCha8Rng, d: usize, params: &RandomParams) -> Vec<(usize, usize)> {
    let uniform = |rng: &mut ChaCha8Rng| {
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if rng.gen_bool(params.tightness.clamp(0.0, 1.0)) {
                    out.push((i, j));
                }
            }
        }
        out
    };
    if params.shape == RelationShape::Uniform {
        return uniform(rng);
    }
    let perm = |rng: &mut ChaCha8Rng| {
        let mut p: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            p.swap(i, rng.gen_range(0..=i));
        }
        p
    };
    let all = || (0..d).flat_map(|i| (0..d).map(move |j| (i, j)));
    match rng.gen_range(0..5) {
        0 => uniform(rng),
        1 => {
            let p = perm(rng);
            all().filter(|&(i, j)| p[i] != j).collect()
        }
        2 => {
            let f: Vec<usize> = (0..d).map(|_| rng.gen_range(0..d)).collect();
            all().filter(|&(i, j)| f[i] != j).collect()
        }
        3 => {
            let (p, q) = (perm(rng), perm(rng));
            all().filter(|&(i, j)| p[i] + q[j] + 1 < d).collect()
        }
        _ => {
            let (i, j) = (rng.gen_range(0..d), rng.gen_range(0..d));
            (0..d).filter(|&k| k != j).map(|k| (i, k)).collect()
        }
    }
}

/// A random instance in which `class` does not occur.
///
/// The instance is sampled, then repaired: while the pattern occurs, the
/// lowest target pair that is the image of an incompatible pattern edge is
/// made compatible. Repairs only remove incompatibilities, so they never
/// cycle; at most `10 * |A|^2` are attempted.
pub fn random_pattern_free(class: PatternName, params: &RandomParams) -> Result<Instance, GenerateError> {
    let (n, d) = (params.n, params.d);
    let total = n * d;
    let mut incompatible = sample_incompatibilities(params);
    let (var_names, points) = random_names(n, d);
    let make = |inc: &[bool]| Instance::from_parts(var_names.clone(), points.clone(), |p, q| !inc[p * total + q]);
    let pattern = class.pattern();
    let incompat_edges: Vec<(usize, usize)> = pattern
        .edges()
        .into_iter()
        .filter(|&(_, _, c)| !c)
        .map(|(p, q, _)| (p, q))
        .collect();
    let budget = 10 * total * total;
    let mut inst = make(&incompatible);
    for _ in 0..=budget {
        let Some(e) = find_embedding(&pattern, &inst) else {
            return Ok(inst);
        };
        let (p, q) = incompat_edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (e.points[a], e.points[b]);
                (x.min(y), x.max(y))
            })
            .min()
            .ok_or_else(|| GenerateError::GenerationBudgetExceeded {
                class: class.to_string(),
                repairs: 0,
            })?;
        incompatible[p * total + q] = false;
        incompatible[q * total + p] = false;
        inst = make(&incompatible);
    }
    Err(GenerateError::GenerationBudgetExceeded {
        class: class.to_string(),
        repairs: budget,
    })
}

/// A random instance with the same sampling as [`random_pattern_free`] but
/// no pattern repair.
pub fn random_instance(params: &RandomParams) -> Instance {
    let total = params.n * params.d;
    let incompatible = sample_incompatibilities(params);
    let (var_names, points) = random_names(params.n, params.d);
    Instance::from_parts(var_names, points, |p, q| !incompatible[p * total + q])
}

fn random_names(n: usize, d: usize) -> (Vec<String>, Vec<(String, usize)>) {
    let var_names = (0..n).map(|v| format!("x{v}")).collect();
    let points = (0..n * d).map(|p| (format!("x{}_{}", p / d, p % d), p / d)).collect();
    (var_names, points)
}

/// Symmetric `|A| x |A|` incompatibility matrix; variable `v` owns points
/// `v*d .. (v+1)*d`.
fn sample_incompatibilities(params: &RandomParams) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (n, d) = (params.n, params.d);
    let total = n * d;
    let mut incompatible = vec![false; total * total];
    for v in 0..n {
        for w in (v + 1)..n {
            if !rng.gen_bool(params.density.clamp(0.0, 1.0)) {
                continue;
            }
            for (i, j) in sample_scope(&mut rng, d, params) {
                let (p, q) = (v * d + i, w * d + j);
                incompatible[p * total + q] = true;
                incompatible[q * total + p] = true;
            }
        }
    }
    incompatible
}

/// Number of incompatible pairs of points in `inst`.
pub fn incompatible_pairs(inst: &Instance) -> usize {
    let n = inst.num_points();
    (0..n)
        .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
        .filter(|&(p, q)| inst.var_of(p) != inst.var_of(q) && !inst.compatible(p, q))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occurrence::occurs;
    use crate::solvers::oracle::is_satisfiable;

    #[test]
    fn unit_clause() {
        let f = Sat1Formula::new(1, vec![vec![1]]).unwrap();
        let inst = sat1_to_csp(&f);
        assert_eq!(inst.num_vars(), 2);
        assert!(is_satisfiable(&inst).unwrap());
    }

    #[test]
    fn xor_formula_is_equisatisfiable() {
        let f = Sat1Formula::new(2, vec![vec![1, 2], vec![-1, -2]]).unwrap();
        let inst = sat1_to_csp(&f);
        let truth = (0..4).any(|m| f.evaluate(&[m & 1 == 1, m & 2 == 2]));
        assert_eq!(is_satisfiable(&inst).unwrap(), truth);
        // Every constraint has at most one incompatible pair.
        for (v, w) in inst.constraint_pairs() {
            let bad = inst
                .domain(v)
                .iter()
                .flat_map(|&p| inst.domain(w).iter().map(move |&q| (p, q)))
                .filter(|&(p, q)| !inst.compatible(p, q))
                .count();
            assert_eq!(bad, 1);
        }
    }

    #[test]
    fn repeated_variable_rejected() {
        assert_eq!(
            Sat1Formula::new(1, vec![vec![1, -1]]),
            Err(GenerateError::RepeatedVariable { clause: 1, var: 1 })
        );
    }

    #[test]
    fn dimacs_reader() {
        let f = parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n2 3 -1 0\n").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.clauses(), &[vec![-2, 1], vec![-1, 2, 3]]);
        let taut = parse_dimacs("1 -1 0\n2 2 0\n").unwrap();
        assert_eq!(taut.clauses(), &[vec![2]]);
    }

    #[test]
    fn r_relation_gadget_forces_difference() {
        let g = ColouringGraph::new(2, [(1, 2)]).unwrap();
        let inst = coloring_to_z_free(&g);
        let v1 = inst.var_index("v1").unwrap();
        let v2 = inst.var_index("v2").unwrap();
        for c1 in 1..=3 {
            for c2 in 1..=3 {
                let keep: Vec<bool> = (0..inst.num_points())
                    .map(|p| {
                        let name = inst.point_name(p);
                        (inst.var_of(p) != v1 || name == format!("v1={c1}"))
                            && (inst.var_of(p) != v2 || name == format!("v2={c2}"))
                    })
                    .collect();
                let pinned = inst.restrict(&keep, &vec![true; inst.num_vars()]);
                assert_eq!(is_satisfiable(&pinned).unwrap(), c1 != c2, "{c1} {c2}");
            }
        }
    }

    #[test]
    fn k3_and_k4() {
        for (n, sat) in [(3, true), (4, false)] {
            let inst = coloring_to_z_free(&ColouringGraph::complete(n));
            assert!(occurs(&PatternName::Z.pattern(), &inst).is_none());
            assert_eq!(is_satisfiable(&inst).unwrap(), sat);
        }
    }

    #[test]
    fn edge_list_reader() {
        let g = parse_edge_list("# k3\np edge 3 3\ne 1 2\n2 3\n3 1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().len(), 3);
        assert!(parse_edge_list("1 1\n").is_err());
    }

    #[test]
    fn two_v_free_copy() {
        let inst = Instance::build(
            &[("v", vec!["a", "b"]), ("w", vec!["c", "d"])],
            &[Relation::new("v", "w", [("a", "c"), ("b", "c")])],
        )
        .unwrap();
        let out = csp_to_2v_free(&inst);
        assert_eq!(out.num_vars(), 4);
        assert!(!out.is_nontrivial(out.var_index("v").unwrap(), out.var_index("w").unwrap()));
        assert_eq!(is_satisfiable(&out).unwrap(), is_satisfiable(&inst).unwrap());
        assert!(occurs(&PatternName::TwoV.pattern(), &out).is_none());
        let trivial = Instance::build(&[("v", vec!["a"])], &[]).unwrap();
        assert_eq!(csp_to_2v_free(&trivial), trivial);
    }

    #[test]
    fn random_is_deterministic_and_free() {
        for class in PatternName::SOLVABLE {
            let p = RandomParams::new(5, 3, 0.5, 7);
            let a = random_pattern_free(class, &p).unwrap();
            let b = random_pattern_free(class, &p).unwrap();
            assert_eq!(a, b);
            assert!(occurs(&class.pattern(), &a).is_none(), "{class}");
        }
    }

    #[test]
    fn zero_density_is_trivial() {
        let inst = random_pattern_free(PatternName::T1, &RandomParams::new(4, 3, 0.0, 1)).unwrap();
        assert!(inst.constraint_pairs().is_empty());
        assert_eq!(incompatible_pairs(&inst), 0);
    }
}
