//! Symbolic graph classification: structural hashing, orbit-aware feature
//! encoding, predicate counting, decision trees and rule extraction.

pub mod error;
pub mod ga;
pub mod graph;
pub mod hashing;
pub mod oracle;
pub mod orbits;
pub mod pipeline;
pub mod predicates;
pub mod rules;
pub mod synth;
pub mod tree;
pub mod tu;
