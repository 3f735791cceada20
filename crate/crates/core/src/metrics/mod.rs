//! Synthetic corpora, the relation-ablation visibility experiment, and the
//! relation/node count tables.

mod synth;
mod tables;
mod visibility;

use thiserror::Error;

use crate::ingest::IngestError;
use crate::kgraph::GraphError;
use crate::search::SearchError;
use crate::vectorize::VectorizeError;

pub use synth::{generate_synthetic_corpus, GeneratedCorpus, SyntheticSpec, MANIFEST_FILE};
pub use tables::{report_tables, ReportTables};
pub use visibility::{
    config_label, experiment_queries, fc_results, render_columns, visibility_experiment, CategorySet, ExperimentSpec,
    VisibilityReport, VisibilityRow,
};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl MetricsError {
    pub fn code(&self) -> &'static str {
        match self {
            MetricsError::InvalidSpec(_) => "INVALID_SPEC",
            MetricsError::Ingest(e) => e.code(),
            MetricsError::Vectorize(_) => "VECTORIZE_ERROR",
            MetricsError::Graph(e) => e.code(),
            MetricsError::Search(e) => e.code(),
            MetricsError::Csv(_) | MetricsError::Io(_) => "IO_ERROR",
        }
    }
}
