//! Binary constraint satisfaction problems restricted by forbidden patterns.
//!
//! The crate decides pattern occurrence, classifies patterns on at most two
//! constraints as tractable or intractable, and solves instances from each
//! tractable class in polynomial time. A brute-force oracle and hardness
//! reduction builders are included for verification.

pub mod canon;
pub mod format;
pub mod fusion;
pub mod generators;
pub mod model;
pub mod occurrence;
pub mod preprocess;
pub mod reduction;
pub mod solvers;

pub use model::{Assignment, Instance, ModelError, Pattern, PatternBuilder, Relation, Structure};
pub use occurrence::{occurs, pattern_isomorphic, OccurrenceWitness};
