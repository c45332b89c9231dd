use pattern_csp::generators::{random_pattern_free, RandomParams};
use pattern_csp::reduction::library::PatternName;
use pattern_csp::solvers::{oracle, solve, SolveError, Verdict};

fn check(class: PatternName, seeds: u64) {
    for seed in 0..seeds {
        for (i, density) in [0.2, 0.5, 0.8].into_iter().enumerate() {
            let n = 2 + (seed as usize % 6);
            let d = 1 + (seed as usize / 6 % 4);
            let mut params = RandomParams::new(n, d, density, seed * 3 + i as u64);
            match seed % 3 {
                0 => {}
                1 => params.tightness = 0.25,
                _ => params = params.mixed(),
            }
            let inst = random_pattern_free(class, &params).unwrap();
            let expected = oracle::is_satisfiable(&inst).unwrap();
            match solve(&inst, class.as_str()) {
                Ok(r) => {
                    assert_eq!(r.verdict.is_sat(), expected, "{class} seed {seed} density {density}: {inst:?}");
                    if let Verdict::Sat(s) = &r.verdict {
                        assert!(inst.is_solution(s).unwrap());
                    }
                }
                Err(SolveError::Precondition(_)) if class == PatternName::OneI => {}
                Err(e) => panic!("{class} seed {seed} density {density}: {e}\n{inst:?}"),
            }
        }
    }
}

#[test]
fn one_i() {
    check(PatternName::OneI, 90);
}

#[test]
fn two_i() {
    check(PatternName::TwoI, 90);
}

#[test]
fn t1() {
    check(PatternName::T1, 90);
}

#[test]
fn t2() {
    check(PatternName::T2, 90);
}

#[test]
fn t3() {
    check(PatternName::T3, 90);
}

#[test]
fn t4() {
    check(PatternName::T4, 90);
}

#[test]
fn t5() {
    check(PatternName::T5, 90);
}
