//! The filtering-ordering-enumeration core: per-vertex candidate filtering,
//! greedy connected matching order, depth-first enumeration with pluggable
//! candidate ranking (baseline order, neural navigation, or a brute-force
//! extendability oracle), branch-batched navigator evaluation, and
//! first-match/throughput instrumentation.

pub mod enumerate;
pub mod filter;
pub mod order;
pub mod ranking;

use thiserror::Error;

pub use enumerate::{enumerate, enumerate_with, measure_mps, EnumerationStats, StepControl};
pub use filter::{filter_nodes, CandidateSets};
pub use order::{generate_order, MatchingOrder};
pub use ranking::{conf_and_sort, EngineConfig, RankedCandidates, RankingMode, Termination};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("query graph must be connected")]
    DisconnectedQuery,

    #[error("neural ranking mode requires a model")]
    MissingModel,

    #[error("model vocabulary {model} does not cover the data graph ({graph} vertices)")]
    VocabularyMismatch { model: usize, graph: usize },

    #[error(transparent)]
    Euler(#[from] neugn_euler_serialize::EulerError),

    #[error(transparent)]
    Nav(#[from] neugn_neural_nav::NavError),
}
