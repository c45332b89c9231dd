//! Polynomial-time solvers for each tractable class, the brute-force oracle
//! and the dispatcher.

mod noosat;
pub mod oracle;
mod t1;
mod t2;
mod t3;
mod t4;
mod t5;
mod trivial;

pub use noosat::{solve_noosat, NoosatError, NoosatInstance};
pub use oracle::oracle_solve;
pub use t1::{solve_t1, DomainOrder, TierInfo};
pub use t2::{solve_t2, Functionality, FunctionalityInfo};
pub use t3::solve_t3;
pub use t4::{solve_t4, solve_zoa};
pub use t5::solve_t5;
pub use trivial::{solve_1i, solve_2i};

use serde::Serialize;
use thiserror::Error;

use crate::fusion::FusionRecord;
use crate::model::{Assignment, Instance, ModelError, Structure};
use crate::occurrence::{find_embedding, occurs, OccurrenceWitness};
use crate::preprocess::{preprocess_to_convergence, PreprocessEvent, PreprocessTrace, Preprocessed};
use crate::reduction::library::PatternName;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Assignment),
    Unsat,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }
}

/// One step taken by a solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEvent {
    Preprocess { events: Vec<PreprocessEvent> },
    /// A point removed because it is the designated point of a gadget occurrence.
    GadgetRemoval { gadget: String, point: String },
    Fusion { record: FusionRecord },
    /// Outcome of trying one value of a seed variable.
    Propagation { seed: String, value: String, success: bool },
    Matching { clauses: usize, matched: usize },
    Note { text: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("pattern {class} occurs in the instance")]
    PatternPresent {
        class: String,
        witness: Box<OccurrenceWitness>,
    },
    #[error("structure violation in {stage}: {detail}")]
    StructureViolation { stage: String, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle node budget of {nodes} exceeded")]
    BudgetExceeded { nodes: u64 },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("solver produced an assignment that is not a solution: {0}")]
    InvalidSolution(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) fn violation(stage: &str, detail: impl Into<String>) -> SolveError {
    SolveError::StructureViolation {
        stage: stage.to_string(),
        detail: detail.into(),
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Check that the class pattern does not occur before solving.
    pub check_free: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            check_free: cfg!(debug_assertions),
        }
    }
}

/// Solves an instance of the class named `class` (`OneI`, `TwoI`, `T1`..`T5`).
pub fn solve(instance: &Instance, class: &str) -> Result<SolveResult, SolveError> {
    solve_with(instance, class, &SolveOptions::default())
}

pub fn solve_with(instance: &Instance, class: &str, options: &SolveOptions) -> Result<SolveResult, SolveError> {
    let name: PatternName = class
        .parse()
        .map_err(|_| SolveError::UnknownClass(class.to_string()))?;
    if !PatternName::SOLVABLE.contains(&name) {
        return Err(SolveError::UnknownClass(class.to_string()));
    }
    if options.check_free {
        if let Some(w) = occurs(&name.pattern(), instance) {
            return Err(SolveError::PatternPresent {
                class: name.to_string(),
                witness: Box::new(w),
            });
        }
    }
    match name {
        PatternName::OneI => solve_1i(instance),
        PatternName::TwoI => solve_2i(instance),
        PatternName::T1 => solve_t1(instance),
        PatternName::T2 => solve_t2(instance),
        PatternName::T3 => solve_t3(instance),
        PatternName::T4 => solve_t4(instance),
        PatternName::T5 => solve_t5(instance),
        _ => unreachable!("checked against SOLVABLE"),
    }
}

enum Undo {
    Preprocess(PreprocessTrace),
    Fusion(FusionRecord),
}

/// Reductions applied so far, for tracing and for mapping a solution of the
/// current instance back to the original one.
pub(crate) struct Chain<'a> {
    original: &'a Instance,
    undo: Vec<Undo>,
    trace: Vec<TraceEvent>,
}

impl<'a> Chain<'a> {
    pub(crate) fn new(original: &'a Instance) -> Self {
        Chain {
            original,
            undo: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub(crate) fn preprocess(&mut self, instance: &Instance) -> Preprocessed {
        let out = preprocess_to_convergence(instance);
        if !out.trace.is_empty() {
            self.trace.push(TraceEvent::Preprocess {
                events: out.trace.events.clone(),
            });
            self.undo.push(Undo::Preprocess(out.trace.clone()));
        }
        out
    }

    pub(crate) fn fusion(&mut self, record: FusionRecord) {
        self.trace.push(TraceEvent::Fusion { record: record.clone() });
        self.undo.push(Undo::Fusion(record));
    }

    pub(crate) fn event(&mut self, e: TraceEvent) {
        self.trace.push(e);
    }

    /// Preprocesses, removes the image of `point` of an occurrence of `gadget`,
    /// and repeats until the gadget no longer occurs. `None` on a wipe-out.
    pub(crate) fn remove_gadgets(
        &mut self,
        mut instance: Instance,
        gadget: PatternName,
        point: &str,
    ) -> Option<Instance> {
        let pattern = gadget.pattern();
        let pi = pattern.point_index(point).expect("gadget point exists");
        loop {
            let pre = self.preprocess(&instance);
            if pre.unsat {
                return None;
            }
            instance = pre.instance;
            let Some(e) = find_embedding(&pattern, &instance) else {
                return Some(instance);
            };
            let q = e.points[pi];
            self.event(TraceEvent::GadgetRemoval {
                gadget: gadget.to_string(),
                point: instance.point_name(q).to_string(),
            });
            instance = instance.without_points(&[q]);
        }
    }

    pub(crate) fn unsat(self) -> Result<SolveResult, SolveError> {
        Ok(SolveResult {
            verdict: Verdict::Unsat,
            trace: self.trace,
        })
    }

    /// Maps a solution of the current instance back and checks it against the
    /// original instance.
    pub(crate) fn sat(self, solution: Assignment) -> Result<SolveResult, SolveError> {
        let mut s = solution;
        for u in self.undo.iter().rev() {
            match u {
                Undo::Preprocess(t) => {
                    for (v, p) in t.fixed() {
                        s.insert(v, p);
                    }
                }
                Undo::Fusion(r) => s = r.expand_solution(&s),
            }
        }
        match self.original.is_solution(&s) {
            Ok(true) => Ok(SolveResult {
                verdict: Verdict::Sat(s),
                trace: self.trace,
            }),
            Ok(false) => Err(SolveError::InvalidSolution(s.to_string())),
            Err(e) => Err(SolveError::InvalidSolution(format!("{s}: {e}"))),
        }
    }

    /// Either verdict from a final choice vector.
    pub(crate) fn finish(self, instance: &Instance, choice: Option<Vec<usize>>) -> Result<SolveResult, SolveError> {
        match choice {
            Some(c) => self.sat(instance.assignment_from(&c)),
            None => self.unsat(),
        }
    }
}
