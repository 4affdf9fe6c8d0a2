//! Serialization of connected labeled graphs into (semi-)Eulerian node paths
//! and the masked node sequences built on top of them.
//!
//! The pipeline is eulerize -> euler_path -> cyclic_reindex ->
//! build_masked_sequence; reconstruct_graph inverts the serialization.

pub mod eulerize;
pub mod path;
pub mod sequence;

use thiserror::Error;

pub use eulerize::{eulerize, EulerizedGraph};
pub use path::{cyclic_reindex, euler_path, reconstruct_graph, EulerPath, IndexedEulerPath};
pub use sequence::{advance_masked_sequence, build_masked_sequence, MaskedNodeSequence, Token};

#[derive(Debug, Error)]
pub enum EulerError {
    #[error("graph must be connected and nonempty")]
    Disconnected,

    #[error("path has {distinct} distinct vertices, more than the index window {window}")]
    WindowExceeded { distinct: usize, window: usize },

    #[error("offset {offset} is outside the index window {window}")]
    OffsetOutOfRange { offset: usize, window: usize },

    #[error("query vertex {0} is already matched")]
    AlreadyMatched(usize),

    #[error("path positions are unassigned; run cyclic_reindex first")]
    PositionsUnassigned,
}
