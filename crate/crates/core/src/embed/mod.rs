//! Co-occurrence counting and GloVe training.

mod cooccur;
mod io;
mod model;
mod train;
mod vocab;

pub use cooccur::{build_cooccurrence, build_cooccurrence_sharded, CooccurrenceMatrix, Weighting, MAX_WINDOW};
pub use model::{EmbeddingModel, TrainingMeta, VectorMode};
pub use train::{loss_and_gradient, train, weight_fn, Gradients, TrainConfig};
pub use vocab::{build_vocab, Vocabulary};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("token stream is empty")]
    EmptyStream,
    #[error("co-occurrence matrix has no entries")]
    EmptyMatrix,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("loss became non-finite ({loss}) in iteration {iteration}; lower the learning rate")]
    Diverged { iteration: usize, loss: f64 },
    #[error("word {0:?} is not in the vocabulary")]
    NotFound(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
}
