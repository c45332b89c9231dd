use std::collections::BTreeMap;

use pattern_csp::format::{read_instance, read_pattern, write_instance, write_pattern};
use pattern_csp::fusion::{fuse, FusionSpec};
use pattern_csp::generators::{random_instance, random_pattern_free, RandomParams};
use pattern_csp::occurrence::{find_embedding, occurs, occurs_in, validate_witness};
use pattern_csp::preprocess::{
    eliminate_single_valued, enforce_arc_consistency, neighbourhood_substitution, preprocess_to_convergence,
    replay, Preprocessed,
};
use pattern_csp::reduction::library::PatternName;
use pattern_csp::reduction::merge_points;
use pattern_csp::solvers::oracle;
use pattern_csp::solvers::{solve_noosat, NoosatInstance, Verdict};
use pattern_csp::{Assignment, Instance, Pattern, Structure};
use proptest::prelude::*;

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (1usize..=5, 1usize..=3, 0.0f64..=1.0, 0.1f64..=0.9, any::<bool>(), any::<u64>()).prop_map(
        |(n, d, density, tightness, mixed, seed)| {
            let mut p = RandomParams::new(n, d, density, seed);
            p.tightness = tightness;
            if mixed {
                p = p.mixed();
            }
            random_instance(&p)
        },
    )
}

fn free_instance_strategy() -> impl Strategy<Value = (PatternName, Instance)> {
    (
        prop::sample::select(PatternName::SOLVABLE.to_vec()),
        2usize..=5,
        1usize..=3,
        prop::sample::select(vec![0.2, 0.5, 0.8]),
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(|(class, n, d, density, mixed, seed)| {
            let mut p = RandomParams::new(n, d, density, seed);
            if mixed {
                p = p.mixed();
            }
            (class, random_pattern_free(class, &p).expect("small instances repair quickly"))
        })
}

/// Patterns with up to three variables of up to three points each, every
/// cross-variable pair labelled compatible, incompatible or left undefined.
fn pattern_strategy() -> impl Strategy<Value = Pattern> {
    prop::collection::vec(1usize..=3, 1..=3)
        .prop_flat_map(|sizes| {
            let points: Vec<(String, String)> = sizes
                .iter()
                .enumerate()
                .flat_map(|(v, &k)| (0..k).map(move |i| (format!("v{v}p{i}"), format!("v{v}"))))
                .collect();
            let mut pairs = Vec::new();
            for i in 0..points.len() {
                for j in (i + 1)..points.len() {
                    if points[i].1 != points[j].1 {
                        pairs.push((points[i].0.clone(), points[j].0.clone()));
                    }
                }
            }
            let labels = prop::collection::vec(prop::option::of(any::<bool>()), pairs.len());
            (Just(points), Just(pairs), labels)
        })
        .prop_map(|(points, pairs, labels)| {
            let mut b = Pattern::builder();
            for (id, var) in &points {
                b = b.point(id, var);
            }
            for ((p, q), l) in pairs.into_iter().zip(labels) {
                if let Some(l) = l {
                    b = b.edge(p, q, l);
                }
            }
            b.build().unwrap()
        })
}

/// Brute-force solution check straight from the compatibility relation.
fn naive_is_solution(inst: &Instance, a: &Assignment) -> bool {
    let mut chosen = Vec::new();
    for v in 0..inst.num_vars() {
        let Some(name) = a.get(inst.var_name(v)) else { return false };
        match inst.domain(v).iter().find(|&&p| inst.point_name(p) == name) {
            Some(&p) => chosen.push(p),
            None => return false,
        }
    }
    chosen
        .iter()
        .all(|&p| chosen.iter().all(|&q| p == q || inst.compatible(p, q)))
}

fn assignment_strategy() -> impl Strategy<Value = (Instance, Vec<usize>)> {
    instance_strategy().prop_flat_map(|inst| {
        let picks = prop::collection::vec(0usize..4, inst.num_vars());
        (Just(inst), picks)
    })
}

fn check_preprocessing(inst: &Instance, out: &Preprocessed) -> Result<(), TestCaseError> {
    let before = oracle::is_satisfiable(inst).unwrap();
    if out.unsat {
        prop_assert!(!before);
        return Ok(());
    }
    prop_assert_eq!(before, oracle::is_satisfiable(&out.instance).unwrap());
    if let Some(s) = oracle::find_solution(&out.instance, oracle::DEFAULT_BUDGET).unwrap() {
        let named: Assignment = s
            .iter()
            .enumerate()
            .map(|(v, &p)| (out.instance.var_name(v), out.instance.point_name(p)))
            .collect();
        prop_assert!(inst.is_solution(&out.expand(&named)).unwrap());
    }
    prop_assert_eq!(&replay(inst, &out.trace), &out.instance);
    Ok(())
}

type Step = fn(&Instance) -> Preprocessed;

const STEPS: [(&str, Step); 4] = [
    ("arc consistency", enforce_arc_consistency),
    ("single-valued elimination", eliminate_single_valued),
    ("neighbourhood substitution", neighbourhood_substitution),
    ("all", preprocess_to_convergence),
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn witnesses_validate(p in pattern_strategy(), inst in instance_strategy()) {
        if let Some(w) = occurs(&p, &inst) {
            prop_assert!(validate_witness(&p, &inst, &w));
        }
    }

    #[test]
    fn occurrence_matches_exhaustive_search(p in pattern_strategy(), n in 1usize..=4, d in 1usize..=2, density in 0.0f64..=1.0, seed in any::<u64>()) {
        let inst = random_instance(&RandomParams::new(n, d, density, seed));
        prop_assert_eq!(occurs_in(&p, &inst), brute_occurs(&p, &inst));
    }

    #[test]
    fn library_occurrence_matches_exhaustive_search(name in prop::sample::select(PatternName::ALL.to_vec()), n in 2usize..=4, d in 1usize..=2, density in 0.3f64..=1.0, seed in any::<u64>()) {
        let inst = random_instance(&RandomParams::new(n, d, density, seed));
        let p = name.pattern();
        prop_assert_eq!(occurs_in(&p, &inst), brute_occurs(&p, &inst), "{}", name);
    }

    #[test]
    fn pattern_occurs_in_itself(p in pattern_strategy()) {
        let w = occurs(&p, &p);
        prop_assert!(w.is_some());
        prop_assert!(validate_witness(&p, &p, &w.unwrap()));
    }

    #[test]
    fn pattern_occurs_in_its_mergings(p in pattern_strategy()) {
        for v in 0..p.num_vars() {
            let dom = p.domain(v).to_vec();
            for (i, &a) in dom.iter().enumerate() {
                for &b in &dom[i + 1..] {
                    if let Ok(q) = merge_points(&p, p.point_name(a), p.point_name(b)) {
                        prop_assert!(occurs_in(&p, &q), "merging {} and {}", p.point_name(a), p.point_name(b));
                    }
                }
            }
        }
    }

    #[test]
    fn sub_patterns_occur(p in pattern_strategy(), keep in prop::collection::vec(any::<bool>(), 9)) {
        let keep_point: Vec<bool> = (0..p.num_points()).map(|i| keep[i]).collect();
        let q = p.restrict(&keep_point, &vec![true; p.num_vars()]);
        prop_assert!(occurs_in(&q, &p));
    }

    #[test]
    fn occurrence_is_transitive(p in pattern_strategy(), inst in instance_strategy(), keep in prop::collection::vec(any::<bool>(), 9)) {
        let keep_point: Vec<bool> = (0..p.num_points()).map(|i| keep[i]).collect();
        let q = p.restrict(&keep_point, &vec![true; p.num_vars()]);
        if occurs_in(&p, &inst) {
            prop_assert!(occurs_in(&q, &inst));
        }
    }

    #[test]
    fn occurrence_survives_instance_growth(p in pattern_strategy(), inst in instance_strategy(), keep in prop::collection::vec(any::<bool>(), 15)) {
        let keep_point: Vec<bool> = (0..inst.num_points()).map(|i| keep[i]).collect();
        let smaller = inst.restrict(&keep_point, &vec![true; inst.num_vars()]);
        if let Some(e) = find_embedding(&p, &smaller) {
            prop_assert!(occurs_in(&p, &inst), "{:?}", e);
        }
    }

    #[test]
    fn preprocessing_preserves_satisfiability(inst in instance_strategy()) {
        for (_, step) in STEPS {
            check_preprocessing(&inst, &step(&inst))?;
        }
    }

    #[test]
    fn preprocessing_is_idempotent(inst in instance_strategy()) {
        for (name, step) in STEPS {
            let once = step(&inst);
            if once.unsat {
                continue;
            }
            let twice = step(&once.instance);
            prop_assert!(twice.trace.is_empty(), "{}: {:?}", name, twice.trace);
            prop_assert_eq!(&twice.instance, &once.instance);
        }
    }

    #[test]
    fn preprocessing_never_introduces_the_class_pattern((class, inst) in free_instance_strategy()) {
        let pattern = class.pattern();
        prop_assert!(!occurs_in(&pattern, &inst));
        for (name, step) in STEPS {
            let out = step(&inst);
            prop_assert!(!occurs_in(&pattern, &out.instance), "{} introduced {}", name, class);
        }
    }

    #[test]
    fn build_round_trips(inst in instance_strategy()) {
        let (domains, relations) = inst.to_parts();
        prop_assert_eq!(&Instance::build(&domains, &relations).unwrap(), &inst);
        prop_assert_eq!(&read_instance(&write_instance(&inst, None)).unwrap(), &inst);
    }

    #[test]
    fn pattern_files_round_trip(p in pattern_strategy()) {
        prop_assert_eq!(read_pattern(&write_pattern(&p)).unwrap(), p);
    }

    #[test]
    fn is_solution_matches_definition((inst, picks) in assignment_strategy()) {
        let mut a = Assignment::new();
        for v in 0..inst.num_vars() {
            let dom = inst.domain(v);
            if !dom.is_empty() {
                a.insert(inst.var_name(v), inst.point_name(dom[picks[v] % dom.len()]));
            }
        }
        match inst.is_solution(&a) {
            Ok(ok) => prop_assert_eq!(ok, naive_is_solution(&inst, &a)),
            Err(_) => prop_assert!(a.len() < inst.num_vars()),
        }
    }

    #[test]
    fn fusion_round_trips(inst in instance_strategy(), which in any::<(usize, usize, bool)>()) {
        let n = inst.num_vars();
        prop_assume!(n >= 2);
        let v1 = which.0 % n;
        let v2 = (v1 + 1 + which.1 % (n - 1)) % n;
        prop_assume!(!inst.domain(v1).is_empty() && !inst.domain(v2).is_empty());
        let spec = valid_spec(&inst, v1, v2, which.2);
        let fused = fuse(&inst, &spec).unwrap();
        prop_assert!(fused.instance.num_points() < inst.num_points());
        let before = oracle::is_satisfiable(&inst).unwrap();
        prop_assert_eq!(before, oracle::is_satisfiable(&fused.instance).unwrap());
        if let Some(s) = oracle::find_solution(&fused.instance, oracle::DEFAULT_BUDGET).unwrap() {
            let named: Assignment = s
                .iter()
                .enumerate()
                .map(|(v, &p)| (fused.instance.var_name(v), fused.instance.point_name(p)))
                .collect();
            prop_assert!(inst.is_solution(&fused.record.expand_solution(&named)).unwrap());
        }
    }

    #[test]
    fn noosat_matches_brute_force(vars in 1usize..=4, vals in 1usize..=3, picks in prop::collection::vec((0usize..4, 0usize..3, 0usize..4), 0..8)) {
        let inst = noosat(vars, vals, &picks);
        prop_assert_eq!(solve_noosat(&inst).is_sat(), brute_noosat(&inst));
        if let Verdict::Sat(a) = solve_noosat(&inst) {
            prop_assert!(inst.satisfied_by(&a));
        }
    }
}

/// Tries every injective variable map and every point map.
fn brute_occurs(p: &Pattern, t: &Instance) -> bool {
    fn points(p: &Pattern, t: &Instance, vars: &[usize], img: &mut Vec<usize>) -> bool {
        let i = img.len();
        if i == p.num_points() {
            return p.edges().iter().all(|&(a, b, l)| t.label(img[a], img[b]) == Some(l))
                && p.distinct().iter().all(|d| d.iter().any(|&(a, b)| img[a] != img[b]));
        }
        for &q in t.domain(vars[p.var_of(i)]) {
            img.push(q);
            if points(p, t, vars, img) {
                return true;
            }
            img.pop();
        }
        false
    }
    fn vars(p: &Pattern, t: &Instance, map: &mut Vec<usize>) -> bool {
        if map.len() == p.num_vars() {
            return points(p, t, map, &mut Vec::new());
        }
        for w in 0..t.num_vars() {
            if !map.contains(&w) {
                map.push(w);
                if vars(p, t, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    vars(p, t, &mut Vec::new())
}

/// A fusion spec whose premise holds: each point of `v1` in some solution
/// is mapped to the value `v2` takes in one such solution.
fn valid_spec(inst: &Instance, v1: usize, v2: usize, complex: bool) -> FusionSpec {
    let hinge = complex.then(|| inst.domain(v1)[0]);
    let mut f = BTreeMap::new();
    for &u in inst.domain(v1) {
        if Some(u) == hinge {
            continue;
        }
        let keep: Vec<bool> = (0..inst.num_points()).map(|p| inst.var_of(p) != v1 || p == u).collect();
        let pinned = inst.restrict(&keep, &vec![true; inst.num_vars()]);
        let image = match oracle::find_solution(&pinned, oracle::DEFAULT_BUDGET).unwrap() {
            Some(s) => pinned.point_name(s[v2]).to_string(),
            None => inst.point_name(inst.domain(v2)[0]).to_string(),
        };
        f.insert(inst.point_name(u).to_string(), image);
    }
    let (a, b) = (inst.var_name(v1), inst.var_name(v2));
    match hinge {
        Some(h) => FusionSpec::complex(a, b, inst.point_name(h), f),
        None => FusionSpec::simple(a, b, f),
    }
}

/// Clauses from `(clause, variable, value)` picks, skipping literals
/// already used so that each literal occurs once.
fn noosat(vars: usize, vals: usize, picks: &[(usize, usize, usize)]) -> NoosatInstance {
    let var = |i: usize| format!("v{i}");
    let val = |i: usize| format!("a{i}");
    let mut used = std::collections::BTreeSet::new();
    let mut clauses = vec![std::collections::BTreeSet::new(); picks.iter().map(|p| p.0 + 1).max().unwrap_or(0)];
    for &(c, v, a) in picks {
        let lit = (var(v % vars), val(a % vals));
        if used.insert(lit.clone()) {
            clauses[c].insert(lit);
        }
    }
    NoosatInstance::new((0..vars).map(var).collect(), (0..vals).map(val).collect(), clauses).unwrap()
}

fn brute_noosat(inst: &NoosatInstance) -> bool {
    let (n, k) = (inst.variables().len(), inst.values().len());
    (0..k.pow(n as u32)).any(|mut code| {
        let mut a = Assignment::new();
        for v in inst.variables() {
            a.insert(v.clone(), inst.values()[code % k].clone());
            code /= k;
        }
        inst.satisfied_by(&a)
    })
}
