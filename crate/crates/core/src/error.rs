use thiserror::Error;

use crate::entropy::EntropyError;
use crate::inference::InferenceError;
use crate::ingest::IngestError;
use crate::symbolize::SymbolizeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error wrapping the per-stage errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Symbolize(#[from] SymbolizeError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}
