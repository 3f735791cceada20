use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::VectorizeError;
use crate::ingest::TokenizedDocument;

/// Document frequencies over a corpus; idf is ln(N / df).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    #[serde(rename = "N")]
    n: usize,
    df: BTreeMap<String, usize>,
}

impl TfidfModel {
    pub fn fit(corpus: &[TokenizedDocument]) -> Result<Self, VectorizeError> {
        if corpus.is_empty() {
            return Err(VectorizeError::EmptyCorpus);
        }
        let mut df = BTreeMap::new();
        for doc in corpus {
            let distinct: BTreeSet<&str> = doc.terms().collect();
            for term in distinct {
                *df.entry(term.to_owned()).or_insert(0) += 1;
            }
        }
        Ok(TfidfModel { n: corpus.len(), df })
    }

    /// Builds a model from stored counts, validating 1 <= df <= N.
    pub fn from_counts(n: usize, df: BTreeMap<String, usize>) -> Result<Self, VectorizeError> {
        if n == 0 {
            return Err(VectorizeError::EmptyCorpus);
        }
        if let Some((term, _)) = df.iter().find(|(_, &d)| d == 0 || d > n) {
            return Err(VectorizeError::InvalidModel(format!("df of {term:?} out of range")));
        }
        Ok(TfidfModel { n, df })
    }

    pub fn document_count(&self) -> usize {
        self.n
    }

    pub fn df(&self, term: &str) -> Option<usize> {
        self.df.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.df(term).map(|df| (self.n as f64 / df as f64).ln())
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.df.keys().map(String::as_str)
    }

    pub fn vocabulary_len(&self) -> usize {
        self.df.len()
    }

    /// Writes `{"N":…, "df":{…}}`.
    pub fn write_json(&self, out: impl Write) -> serde_json::Result<()> {
        serde_json::to_writer(out, self)
    }
}

fn term_counts(doc: &TokenizedDocument) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for term in doc.terms() {
        *counts.entry(term).or_insert(0) += 1;
    }
    counts
}

/// Raw in-document count times idf. Unknown terms are an error, absent
/// vocabulary terms score zero.
pub fn score_tfidf(term: &str, doc: &TokenizedDocument, model: &TfidfModel) -> Result<f64, VectorizeError> {
    let idf = model
        .idf(term)
        .ok_or_else(|| VectorizeError::TermUnknown(term.to_owned()))?;
    let tf = doc.terms().filter(|t| *t == term).count();
    Ok(tf as f64 * idf)
}

/// Top-K weighted terms of one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentVector {
    pub doc_id: String,
    pub capacity: usize,
    pub terms: BTreeMap<String, f64>,
}

impl DocumentVector {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Terms ordered by weight descending, then term ascending.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut ranked: Vec<(&str, f64)> = self.terms.iter().map(|(t, &w)| (t.as_str(), w)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }

    pub fn cosine(&self, other: &DocumentVector) -> f64 {
        cosine(&self.terms, &other.terms)
    }
}

/// Cosine similarity of two sparse vectors; zero when either is empty.
pub fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(t, w)| large.get(t).map(|v| w * v))
        .sum();
    if dot == 0.0 {
        return 0.0;
    }
    // sqrt of the product keeps identical vectors at exactly 1.0
    let na2: f64 = a.values().map(|w| w * w).sum();
    let nb2: f64 = b.values().map(|w| w * w).sum();
    (dot / (na2 * nb2).sqrt()).min(1.0)
}

pub fn document_vector(doc: &TokenizedDocument, model: &TfidfModel, capacity: usize) -> DocumentVector {
    assert!(capacity >= 1, "vector capacity must be at least 1");
    let mut scored: Vec<(&str, f64)> = term_counts(doc)
        .into_iter()
        .filter_map(|(term, tf)| {
            let idf = model.idf(term)?;
            let w = tf as f64 * idf;
            (w > 0.0).then_some((term, w))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    scored.truncate(capacity);
    DocumentVector {
        doc_id: doc.id.clone(),
        capacity,
        terms: scored.into_iter().map(|(t, w)| (t.to_owned(), w)).collect(),
    }
}

#[derive(Serialize)]
struct VectorLine<'a> {
    doc_id: &'a str,
    terms: &'a BTreeMap<String, f64>,
}

/// One `{"doc_id":…, "terms":{…}}` object per line.
pub fn write_vectors_jsonl<'a>(
    vectors: impl IntoIterator<Item = &'a DocumentVector>,
    mut out: impl Write,
) -> std::io::Result<()> {
    for v in vectors {
        serde_json::to_writer(
            &mut out,
            &VectorLine {
                doc_id: &v.doc_id,
                terms: &v.terms,
            },
        )?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
