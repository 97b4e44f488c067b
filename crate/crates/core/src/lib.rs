//! Analysis of labeled-graph presentations of irreducible sofic shifts.
//!
//! A sofic shift is presented by a finite directed multigraph whose edges
//! carry symbols from a finite alphabet (equivalently, by a square matrix
//! whose entries are formal sums of symbols). This crate takes such a
//! presentation and computes the structures used to classify the shift up
//! to flow equivalence:
//!
//! * the right Fischer cover (minimal right-resolving presentation), with
//!   magic-word certificates ([`fischer`]);
//! * the ordered-tuple automaton over cover vertices, from which the
//!   AFT / PET / near-Markov properties and the multiplicity spectrum
//!   are decided ([`tupleflow`]);
//! * skewing permutations on the per-multiplicity components and the
//!   corresponding matrices over the group ring of a symmetric group
//!   ([`skew`]);
//! * exact integer invariants: Smith normal form, Bowen–Franks group,
//!   `det(I-A)`, the Franks decision for irreducible SFTs, and the
//!   bipartite multiplicity graph with its near-Markov flow-equivalence
//!   decision ([`invariants`]);
//! * brute-force, definition-level oracles (language sampling, periodic
//!   preimage census, fiber products) used to cross-check all of the
//!   above at desk scale ([`oracle`]).
//!
//! [`analysis`] ties the pipeline together and produces deterministic,
//! serializable reports; the `sofic` command-line tool is a thin client
//! of that module.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so everything here is safe to call concurrently.

pub mod analysis;
pub mod fischer;
mod graphutil;
pub mod invariants;
pub mod oracle;
pub mod presentation;
pub mod skew;
pub mod tupleflow;

pub use analysis::{analyze, AnalysisOptions, AnalysisReport};
pub use presentation::{parse, SymbolicPresentation};

/// Errors shared across the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("presentation is not right-resolving: state `{state}` has two outgoing edges labeled `{symbol}`")]
    NotRightResolving { state: String, symbol: String },
    #[error("presentation has more than {0} states; subset constructions are limited to {0}")]
    TooManyStates(usize),
    #[error("{stage}: precondition failed: {detail}")]
    Precondition { stage: &'static str, detail: String },
    #[error("synchronization search exceeded bound {bound}; raise --magic-bound")]
    MagicBoundExceeded { bound: usize },
    #[error("internal inconsistency in {stage}: {detail}")]
    Internal { stage: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Hard cap for bitset-based subset constructions.
pub(crate) const MAX_STATES: usize = 64;
