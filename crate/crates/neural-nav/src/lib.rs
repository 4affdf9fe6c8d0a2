//! The learnable stack: a dense-tensor micro-kernel, the query structure
//! extractor (GCN over label embeddings with max-pool readout), the
//! generative navigator (token/position/sequence embeddings, bidirectional
//! decoder layers, vocabulary prediction head), hand-derived gradients for
//! every parameter, and binary weight persistence.

pub mod model_io;
pub mod navigator;
pub mod params;
pub mod pipeline;
pub mod qs_extract;
pub mod tensor;

use thiserror::Error;

pub use model_io::{load_model, load_with_extras, save_model, save_with_extras};
pub use navigator::{
    assemble_input, navigator_backward, navigator_forward, navigator_forward_batch,
    navigator_probs, AssembledInput, ForwardTrace, LOG_EPSILON,
};
pub use params::{DecoderLayerParams, Hyperparams, ModelParams, NavigatorParams, QsExtractorParams};
pub use qs_extract::{qs_backward, qs_extract, QsTrace};
pub use tensor::Tensor;

#[derive(Debug, Error)]
pub enum NavError {
    #[error("label {label} is outside the label vocabulary of size {vocab}")]
    LabelOutOfRange { label: usize, vocab: usize },

    #[error("vertex {vertex} is outside the vocabulary of size {vocab}")]
    VertexOutOfRange { vertex: usize, vocab: usize },

    #[error("position id {position} is outside the index window {window}")]
    PositionOutOfRange { position: usize, window: usize },

    #[error("sequence needs {len} rows, model maximum is {max}")]
    SequenceTooLong { len: usize, max: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("model load failed: {0}")]
    Load(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
