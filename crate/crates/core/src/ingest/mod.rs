//! Corpus loading and the text-mining pipeline that turns raw documents into
//! sentence-segmented, normalized tokens.

mod extract;
mod manifest;
mod normalize;
mod pipeline;
mod rules;
mod text;

use std::path::PathBuf;

use thiserror::Error;

pub use extract::{extract_text, ExtractedDocument};
pub use manifest::{load_corpus, Corpus, DocFormat, RawDocument, SourceType};
pub use normalize::{apply_domain_rules, normalize_tokens, Token, TokenKind};
pub use pipeline::{preprocess, preprocess_corpus, LoadReport, PreprocessedCorpus, TokenizedDocument};
pub use rules::{
    default_stopwords, DomainRules, RulesFile, SymbolAction, SymbolPatternSpec, SymbolRule,
};
pub use text::{clean_text, is_allowed_char, tokenize, SENTENCE_BOUNDARIES};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed manifest: {0}")]
    ManifestMalformed(String),
    #[error("missing document file: {}", .0.display())]
    MissingDocumentFile(PathBuf),
    #[error("duplicate document id: {0}")]
    DuplicateId(String),
    #[error("invalid type/format pairing for document {0}")]
    InvalidTypeFormatPair(String),
    #[error("content of document {0} cannot be parsed")]
    UnparseableContent(String),
    #[error("element tree of document {0} is not a forest")]
    CyclicStructure(String),
    #[error("invalid rules: {0}")]
    InvalidRules(String),
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::ManifestMalformed(_) => "MANIFEST_MALFORMED",
            IngestError::MissingDocumentFile(_) => "MISSING_DOCUMENT_FILE",
            IngestError::DuplicateId(_) => "DUPLICATE_ID",
            IngestError::InvalidTypeFormatPair(_) => "INVALID_TYPE_FORMAT_PAIR",
            IngestError::UnparseableContent(_) => "UNPARSEABLE_CONTENT",
            IngestError::CyclicStructure(_) => "CYCLIC_STRUCTURE",
            IngestError::InvalidRules(_) => "INVALID_RULES",
        }
    }
}
