use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DomainRules, IngestError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceType {
    FailureCase,
    ProjectElement,
    ProductSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocFormat {
    PlainText,
    ElementTree,
    LabeledTable,
}

impl SourceType {
    /// The only document format each source type may arrive in.
    pub fn expected_format(self) -> DocFormat {
        match self {
            SourceType::FailureCase => DocFormat::PlainText,
            SourceType::ProjectElement => DocFormat::ElementTree,
            SourceType::ProductSpec => DocFormat::LabeledTable,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDocument {
    pub id: String,
    pub source_type: SourceType,
    pub format: DocFormat,
    pub content: String,
    pub language: String,
    pub metadata: BTreeMap<String, String>,
}

impl RawDocument {
    /// Builds a document, enforcing the id and type/format invariants.
    pub fn new(
        id: impl Into<String>,
        source_type: SourceType,
        format: DocFormat,
        content: impl Into<String>,
    ) -> Result<Self, IngestError> {
        let id = id.into();
        if id.is_empty() {
            return Err(IngestError::ManifestMalformed("empty document id".into()));
        }
        if source_type.expected_format() != format {
            return Err(IngestError::InvalidTypeFormatPair(id));
        }
        Ok(RawDocument {
            id,
            source_type,
            format,
            content: content.into(),
            language: "en".into(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_language(mut self, language: impl Into<String>) -> Self {
        self.language = language.into();
        self
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<RawDocument>,
    pub rules: DomainRules,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    rules: Option<String>,
    documents: Vec<ManifestEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    id: String,
    #[serde(rename = "type")]
    source_type: SourceType,
    format: DocFormat,
    path: String,
    #[serde(default = "default_language")]
    language: String,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

fn default_language() -> String {
    "en".into()
}

/// Loads a manifest and every document it references. Relative paths are
/// resolved against the manifest's directory.
pub fn load_corpus(manifest_path: &Path) -> Result<Corpus, IngestError> {
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|_| IngestError::MissingDocumentFile(manifest_path.to_path_buf()))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| IngestError::ManifestMalformed(e.to_string()))?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let rules = match &manifest.rules {
        Some(p) => DomainRules::from_path(&resolve(base, p))?,
        None => DomainRules::default(),
    };

    let mut seen = HashSet::new();
    let mut documents = Vec::with_capacity(manifest.documents.len());
    for entry in manifest.documents {
        if !seen.insert(entry.id.clone()) {
            return Err(IngestError::DuplicateId(entry.id));
        }
        let path = resolve(base, &entry.path);
        if !path.is_file() {
            return Err(IngestError::MissingDocumentFile(path));
        }
        let bytes = std::fs::read(&path).map_err(|_| IngestError::MissingDocumentFile(path.clone()))?;
        let mut doc = RawDocument::new(entry.id, entry.source_type, entry.format, String::new())?;
        doc.content = String::from_utf8(bytes)
            .map_err(|_| IngestError::UnparseableContent(doc.id.clone()))?;
        doc.language = entry.language;
        doc.metadata = entry.metadata;
        doc.metadata
            .insert("path".into(), entry.path);
        documents.push(doc);
    }

    Ok(Corpus { documents, rules })
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
