//! Self-supervised masked node generation training: per-anchor subgraph
//! sampling, the cross-entropy objective, the Adam loop with exponential
//! learning-rate decay, held-out evaluation, and checkpointing.

pub mod adam;
pub mod eval;
pub mod samples;
pub mod train;

use thiserror::Error;

pub use adam::Adam;
pub use eval::{evaluate, mng_loss, EvalMetrics};
pub use samples::{generate_epoch_samples, SampleGenerator, TrainingSample};
pub use train::{
    train, train_on_samples, write_log_csv, EpochStats, TrainOutcome, TrainingConfig,
};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),

    #[error("non-finite loss in epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },

    #[error("evaluation stream is empty")]
    EmptyEvaluation,

    #[error(transparent)]
    Graph(#[from] neugn_graph_core::GraphError),

    #[error(transparent)]
    Euler(#[from] neugn_euler_serialize::EulerError),

    #[error(transparent)]
    Nav(#[from] neugn_neural_nav::NavError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
