//! Named patterns: the tractable targets, the hard patterns and the gadgets
//! the solvers look for.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::model::{Pattern, PatternBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternName {
    T1,
    T2,
    T3,
    T4,
    T5,
    OneI,
    TwoI,
    Z,
    TwoV,
    Vplus,
    Vminus,
    X,
    NT2,
    NT3,
    W,
    Btp,
}

impl PatternName {
    pub const ALL: [PatternName; 16] = [
        PatternName::T1,
        PatternName::T2,
        PatternName::T3,
        PatternName::T4,
        PatternName::T5,
        PatternName::OneI,
        PatternName::TwoI,
        PatternName::Z,
        PatternName::TwoV,
        PatternName::Vplus,
        PatternName::Vminus,
        PatternName::X,
        PatternName::NT2,
        PatternName::NT3,
        PatternName::W,
        PatternName::Btp,
    ];

    /// The five two-constraint tractable targets.
    pub const T: [PatternName; 5] = [
        PatternName::T1,
        PatternName::T2,
        PatternName::T3,
        PatternName::T4,
        PatternName::T5,
    ];

    /// Classes with a dedicated solver.
    pub const SOLVABLE: [PatternName; 7] = [
        PatternName::OneI,
        PatternName::TwoI,
        PatternName::T1,
        PatternName::T2,
        PatternName::T3,
        PatternName::T4,
        PatternName::T5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternName::T1 => "T1",
            PatternName::T2 => "T2",
            PatternName::T3 => "T3",
            PatternName::T4 => "T4",
            PatternName::T5 => "T5",
            PatternName::OneI => "OneI",
            PatternName::TwoI => "TwoI",
            PatternName::Z => "Z",
            PatternName::TwoV => "TwoV",
            PatternName::Vplus => "Vplus",
            PatternName::Vminus => "Vminus",
            PatternName::X => "X",
            PatternName::NT2 => "N_T2",
            PatternName::NT3 => "N_T3",
            PatternName::W => "W",
            PatternName::Btp => "BTP",
        }
    }

    pub fn pattern(self) -> Pattern {
        make_named(self).pattern
    }
}

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for PatternName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPatternName(pub String);

impl fmt::Display for UnknownPatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown pattern name `{}`", self.0)
    }
}

impl std::error::Error for UnknownPatternName {}

impl FromStr for PatternName {
    type Err = UnknownPatternName;

    /// Accepts the canonical names plus the aliases `1I`, `2I`, `2V`, `V+`,
    /// `V-`, `NT2`, `NT3` (case-insensitive), with an optional leading `$`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().trim_start_matches('$').to_ascii_lowercase();
        let name = match key.as_str() {
            "t1" => PatternName::T1,
            "t2" => PatternName::T2,
            "t3" => PatternName::T3,
            "t4" => PatternName::T4,
            "t5" => PatternName::T5,
            "onei" | "1i" => PatternName::OneI,
            "twoi" | "2i" => PatternName::TwoI,
            "z" => PatternName::Z,
            "twov" | "2v" => PatternName::TwoV,
            "vplus" | "v+" => PatternName::Vplus,
            "vminus" | "v-" => PatternName::Vminus,
            "x" => PatternName::X,
            "n_t2" | "nt2" => PatternName::NT2,
            "n_t3" | "nt3" => PatternName::NT3,
            "w" => PatternName::W,
            "btp" => PatternName::Btp,
            _ => return Err(UnknownPatternName(s.to_string())),
        };
        Ok(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedPattern {
    pub name: PatternName,
    pub pattern: Pattern,
}

fn points(b: PatternBuilder, var: &str, ids: &[&str]) -> PatternBuilder {
    ids.iter().fold(b, |b, id| b.point(*id, var))
}

fn compat(b: PatternBuilder, pairs: &[(&str, &str)]) -> PatternBuilder {
    pairs.iter().fold(b, |b, (p, q)| b.compat(*p, *q))
}

fn incompat(b: PatternBuilder, pairs: &[(&str, &str)]) -> PatternBuilder {
    pairs.iter().fold(b, |b, (p, q)| b.incompat(*p, *q))
}

pub fn make_named(name: PatternName) -> NamedPattern {
    let b = Pattern::builder();
    let b = match name {
        // Shared variable v0 with two points; e is incompatible towards both
        // other variables, f compatible with both.
        PatternName::T1 => {
            let b = points(points(points(b, "v0", &["e", "f"]), "v1", &["b"]), "v2", &["c"]);
            compat(incompat(b, &[("b", "e"), ("c", "e")]), &[("b", "f"), ("c", "f")])
        }
        PatternName::T2 => {
            let b = points(points(points(b, "v0", &["e", "f"]), "v1", &["a", "b"]), "v2", &["c"]);
            compat(
                incompat(b, &[("b", "e"), ("c", "e")]),
                &[("a", "e"), ("a", "f"), ("c", "f")],
            )
        }
        PatternName::T3 => {
            let b = points(points(points(b, "v0", &["e", "f"]), "v1", &["a", "b"]), "v2", &["c"]);
            compat(
                incompat(b, &[("b", "e"), ("c", "f")]),
                &[("c", "e"), ("a", "e"), ("a", "f")],
            )
        }
        PatternName::T4 => {
            let b = points(points(points(b, "v0", &["e", "f", "g"]), "v1", &["b"]), "v2", &["c"]);
            compat(
                incompat(b, &[("b", "e"), ("c", "f")]),
                &[("c", "g"), ("b", "g"), ("b", "f")],
            )
        }
        PatternName::T5 => {
            let b = points(points(points(b, "v0", &["e", "f"]), "v1", &["b"]), "v2", &["c"]);
            compat(incompat(b, &[("b", "e"), ("c", "f")]), &[("c", "e"), ("b", "f")])
        }
        PatternName::OneI => incompat(points(points(b, "v0", &["a"]), "v1", &["b"]), &[("a", "b")]),
        PatternName::TwoI => {
            let b = points(points(points(points(b, "v0", &["a"]), "v1", &["b"]), "v2", &["c"]), "v3", &["d"]);
            incompat(b, &[("a", "b"), ("c", "d")])
        }
        PatternName::Z => {
            let b = points(points(b, "v", &["a", "b"]), "w", &["c", "d"]);
            incompat(compat(b, &[("a", "c"), ("a", "d"), ("b", "c")]), &[("b", "d")])
        }
        PatternName::TwoV => {
            let b = points(b, "v0", &["g", "h", "i", "j", "k", "l"]);
            let b = points(points(b, "v1", &["a", "b", "c"]), "v2", &["d", "e", "f"]);
            let b = compat(
                b,
                &[("a", "h"), ("b", "g"), ("b", "h"), ("e", "k"), ("e", "l"), ("f", "l")],
            );
            incompat(b, &[("c", "i"), ("d", "j")])
                .distinct_any([("a", "b"), ("g", "h")])
                .distinct_any([("e", "f"), ("k", "l")])
        }
        PatternName::Vplus => {
            let b = points(points(b, "v0", &["a"]), "v1", &["b", "c"]);
            compat(b, &[("a", "b"), ("a", "c")]).distinct_any([("b", "c")])
        }
        PatternName::Vminus => {
            let b = points(points(points(b, "v0", &["a"]), "v1", &["b"]), "v2", &["c"]);
            incompat(b, &[("a", "b"), ("a", "c")])
        }
        PatternName::X => {
            let b = points(points(b, "v0", &["a", "b"]), "v1", &["c", "d"]);
            compat(incompat(b, &[("a", "c"), ("b", "d")]), &[("a", "d"), ("b", "c")])
        }
        PatternName::NT2 => {
            let b = points(points(b, "v0", &["a", "b"]), "v1", &["c", "d"]);
            incompat(compat(b, &[("a", "d"), ("b", "d")]), &[("b", "c")]).distinct_any([("a", "b")])
        }
        PatternName::NT3 => {
            let b = points(points(b, "v0", &["a", "e"]), "v1", &["b", "c"]);
            incompat(compat(b, &[("a", "b"), ("a", "c")]), &[("c", "e")]).distinct_any([("b", "c")])
        }
        PatternName::W => {
            let b = points(points(b, "v0", &["a"]), "v1", &["b", "c", "x"]);
            incompat(compat(b, &[("a", "b"), ("a", "c")]), &[("a", "x")]).distinct_any([("b", "c")])
        }
        PatternName::Btp => {
            let b = points(points(points(b, "x", &["a"]), "y", &["b"]), "z", &["c", "d"]);
            incompat(
                compat(b, &[("a", "b"), ("a", "c"), ("b", "d")]),
                &[("a", "d"), ("b", "c")],
            )
        }
    };
    NamedPattern {
        name,
        pattern: b.build().expect("library patterns are well formed"),
    }
}
