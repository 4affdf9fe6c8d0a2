//! Labeled-graph core: graph representation, text file I/O, random-walk query
//! sampling, and a small brute-force matcher used as the correctness oracle by
//! the rest of the workspace.

pub mod error;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod sample;

pub use error::GraphError;
pub use graph::{LabeledGraph, Match};
pub use io::{load_graph, load_query_set, save_graph, save_query_set};
pub use oracle::{brute_force_enumerate, verify_match, MatchSet, DEFAULT_ORACLE_CAP};
pub use sample::{generate_query_set, random_walk_sample, QuerySet};
