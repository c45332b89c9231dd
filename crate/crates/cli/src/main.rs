mod dot;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use pattern_csp::format::{self, Provenance};
use pattern_csp::generators::{self, RandomParams};
use pattern_csp::reduction::library::PatternName;
use pattern_csp::reduction::{classify, Classification};
use pattern_csp::solvers::{oracle_solve, solve_with, SolveError, SolveOptions, Verdict};
use pattern_csp::{occurs, Assignment, Instance, Structure};

use report::{sha256_hex, Run, RunReport};

#[derive(Parser)]
#[command(name = "pattern-csp", version, about = "Forbidden-pattern CSP toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a pattern on at most two constraints.
    /// Exit code 0 = tractable, 1 = intractable, 2 = error.
    Classify {
        pattern: PathBuf,
        /// Print the pattern as Graphviz DOT instead of the JSON report.
        #[arg(long)]
        dot: bool,
    },
    /// Solve an instance with the solver of a tractable class.
    /// Exit code 0 = solved, 1 = oracle disagreement, 2 = error.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        class: String,
        /// Refuse instances in which the class pattern occurs.
        #[arg(long)]
        check_free: bool,
        /// Cross-check the verdict with the brute-force oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Look for an occurrence of a pattern in an instance.
    /// Exit code 0 = absent, 1 = present, 2 = error.
    Occurs { pattern: PathBuf, instance: PathBuf },
    /// Write a generated instance (JSON with a provenance block).
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        /// Output file; the instance goes to stdout when omitted.
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Seeded random instance free of a class pattern.
    RandomFree {
        #[arg(long)]
        class: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0.5)]
        tightness: f64,
        /// Draw structured relations (bijections, functions, ...) as well.
        #[arg(long)]
        mixed: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CNF (DIMACS) to a CSP with one incompatible pair per constraint.
    Sat1 {
        #[arg(long)]
        cnf: PathBuf,
    },
    /// Graph 3-colouring (edge list) to a Z-free instance.
    ZFree {
        #[arg(long = "from-graph")]
        graph: PathBuf,
    },
    /// Instance to an equisatisfiable 2V-free instance.
    #[command(name = "2v-free")]
    TwoVFree {
        #[arg(long = "from-instance")]
        instance: PathBuf,
    },
}

/// Exit status and report of a command.
type Outcome = (u8, RunReport);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Classify { pattern, dot } => cmd_classify(&pattern, dot),
        Command::Solve {
            instance,
            class,
            check_free,
            oracle,
        } => cmd_solve(&instance, &class, check_free, oracle),
        Command::Occurs { pattern, instance } => cmd_occurs(&pattern, &instance),
        Command::Generate { kind, out } => match cmd_generate(kind, out.as_deref()) {
            Some(o) => o,
            None => return ExitCode::SUCCESS,
        },
    };
    let (code, report) = outcome;
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::from(code)
}

fn error_exit(run: Run, e: String) -> Outcome {
    (2, run.finish(Err(e)))
}

fn cmd_classify(path: &Path, dot: bool) -> Outcome {
    let mut run = Run::new("classify");
    let pattern = match run.read(path).and_then(|t| format::read_pattern(&t).map_err(|e| e.to_string())) {
        Ok(p) => p,
        Err(e) => return error_exit(run, e),
    };
    let c = match classify(&pattern) {
        Ok(c) => c,
        Err(e) => return error_exit(run, e.to_string()),
    };
    if dot {
        print!("{}", dot::pattern_to_dot(&pattern));
        std::process::exit(if c.is_tractable() { 0 } else { 1 });
    }
    if let Classification::Tractable { trace, .. } = &c {
        for step in serde_json::to_value(&trace.steps).expect("serializable").as_array().into_iter().flatten() {
            run.count(step["op"].as_str().unwrap_or("step"));
        }
    }
    let code = if c.is_tractable() { 0 } else { 1 };
    (code, run.finish(Ok(serde_json::to_value(&c).expect("serializable"))))
}

fn assignment_json(a: &Assignment) -> Value {
    a.iter().map(|(v, p)| (v.to_string(), Value::from(p))).collect::<serde_json::Map<_, _>>().into()
}

fn verdict_str(v: &Verdict) -> &'static str {
    if v.is_sat() {
        "sat"
    } else {
        "unsat"
    }
}

fn cmd_solve(path: &Path, class: &str, check_free: bool, with_oracle: bool) -> Outcome {
    let mut run = Run::new("solve");
    let inst = match run.read(path).and_then(|t| format::read_instance(&t).map_err(|e| e.to_string())) {
        Ok(i) => i,
        Err(e) => return error_exit(run, e),
    };
    let result = match solve_with(&inst, class, &SolveOptions { check_free }) {
        Ok(r) => r,
        Err(SolveError::PatternPresent { class, witness }) => {
            let points: Vec<String> = witness.point_map.iter().map(|(p, q)| format!("{p}->{q}")).collect();
            return error_exit(run, format!("pattern {class} occurs in the instance ({})", points.join(", ")));
        }
        Err(e) => return error_exit(run, e.to_string()),
    };
    for e in &result.trace {
        let v = serde_json::to_value(e).expect("serializable");
        run.count(v["kind"].as_str().unwrap_or("event"));
    }
    let mut out = json!({
        "class": class,
        "verdict": verdict_str(&result.verdict),
    });
    if let Verdict::Sat(a) = &result.verdict {
        out["assignment"] = assignment_json(a);
    }
    let mut code = 0;
    if with_oracle {
        match oracle_solve(&inst) {
            Ok(o) => {
                let agrees = o.verdict.is_sat() == result.verdict.is_sat();
                out["oracle"] = verdict_str(&o.verdict).into();
                out["agrees"] = agrees.into();
                if !agrees {
                    code = 1;
                }
            }
            Err(e) => return error_exit(run, e.to_string()),
        }
    }
    (code, run.finish(Ok(out)))
}

fn cmd_occurs(pattern: &Path, instance: &Path) -> Outcome {
    let mut run = Run::new("occurs");
    let p = match run.read(pattern).and_then(|t| format::read_pattern(&t).map_err(|e| e.to_string())) {
        Ok(p) => p,
        Err(e) => return error_exit(run, e),
    };
    let inst = match run.read(instance).and_then(|t| format::read_instance(&t).map_err(|e| e.to_string())) {
        Ok(i) => i,
        Err(e) => return error_exit(run, e),
    };
    match occurs(&p, &inst) {
        Some(w) => (
            1,
            run.finish(Ok(json!({
                "occurs": true,
                "witness": {"var_map": w.var_map, "point_map": w.point_map},
            }))),
        ),
        None => (0, run.finish(Ok(json!({"occurs": false, "witness": "none"})))),
    }
}

/// `None` when the instance was written to stdout and there is no report.
fn cmd_generate(kind: GenerateKind, out: Option<&Path>) -> Option<Outcome> {
    let mut run = Run::new("generate");
    let made = generate(&mut run, kind);
    let (inst, prov) = match made {
        Ok(x) => x,
        Err(e) => return Some(error_exit(run, e)),
    };
    let text = format::write_instance(&inst, Some(prov.clone()));
    let Some(path) = out else {
        println!("{text}");
        return None;
    };
    if let Err(e) = std::fs::write(path, format!("{text}\n")) {
        return Some(error_exit(run, format!("{}: {e}", path.display())));
    }
    Some((
        0,
        run.finish(Ok(json!({
            "out": path.display().to_string(),
            "sha256": sha256_hex(format!("{text}\n").as_bytes()),
            "generator": prov.generator,
            "variables": inst.num_vars(),
            "points": inst.num_points(),
        }))),
    ))
}

fn source(run: &Run, path: &Path) -> Value {
    let digest = run.last_digest().unwrap_or_default();
    json!({"source": path.display().to_string(), "sha256": digest})
}

fn generate(run: &mut Run, kind: GenerateKind) -> Result<(Instance, Provenance), String> {
    let prov = |generator: &str, params: Value, seed: Option<u64>| Provenance {
        generator: generator.to_string(),
        params,
        seed,
    };
    match kind {
        GenerateKind::RandomFree {
            class,
            n,
            d,
            density,
            tightness,
            mixed,
            seed,
        } => {
            let name: PatternName = class.parse().map_err(|e| format!("{e}"))?;
            if !PatternName::SOLVABLE.contains(&name) {
                return Err(format!("`{class}` is not a tractable class"));
            }
            let mut p = RandomParams::new(n, d, density, seed);
            p.tightness = tightness;
            if mixed {
                p = p.mixed();
            }
            let inst = generators::random_pattern_free(name, &p).map_err(|e| e.to_string())?;
            let params = json!({
                "class": name.as_str(), "n": n, "d": d, "density": density,
                "tightness": tightness, "mixed": mixed,
            });
            Ok((inst, prov("random-free", params, Some(seed))))
        }
        GenerateKind::Sat1 { cnf } => {
            let text = run.read(&cnf)?;
            let f = generators::parse_dimacs(&text).map_err(|e| e.to_string())?;
            Ok((generators::sat1_to_csp(&f), prov("sat1", source(run, &cnf), None)))
        }
        GenerateKind::ZFree { graph } => {
            let text = run.read(&graph)?;
            let g = generators::parse_edge_list(&text).map_err(|e| e.to_string())?;
            Ok((generators::coloring_to_z_free(&g), prov("z-free", source(run, &graph), None)))
        }
        GenerateKind::TwoVFree { instance } => {
            let text = run.read(&instance)?;
            let inst = format::read_instance(&text).map_err(|e| e.to_string())?;
            Ok((generators::csp_to_2v_free(&inst), prov("2v-free", source(run, &instance), None)))
        }
    }
}
