//! TF-IDF document vectors and the n-gram patterns that seed linking nodes.

mod ngram;
mod tfidf;

use thiserror::Error;

pub use ngram::{
    distinct_ngrams, extract_ngrams, linking_candidates, LnConstraints, NGram, NGramOccurrence,
    MAX_ORDER,
};
pub use tfidf::{cosine, document_vector, score_tfidf, write_vectors_jsonl, DocumentVector, TfidfModel};

#[derive(Debug, Error)]
pub enum VectorizeError {
    #[error("cannot fit a model on an empty corpus")]
    EmptyCorpus,
    #[error("term {0:?} is not in the model vocabulary")]
    TermUnknown(String),
    #[error("invalid n-gram: {0}")]
    InvalidNGram(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}
