use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::VectorizeError;
use crate::ingest::TokenizedDocument;

/// Largest supported n-gram order; linking weights are n / MAX_ORDER.
pub const MAX_ORDER: usize = 3;

/// A 1..=3 term pattern and the documents it occurs in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NGramRecord", into = "NGramRecord")]
pub struct NGram {
    terms: Vec<String>,
    postings: BTreeSet<String>,
}

#[derive(Serialize, Deserialize)]
struct NGramRecord {
    terms: Vec<String>,
    n: usize,
    postings: BTreeSet<String>,
    df: usize,
}

impl NGram {
    pub fn new(terms: Vec<String>, postings: BTreeSet<String>) -> Result<Self, VectorizeError> {
        if terms.is_empty() || terms.len() > MAX_ORDER {
            return Err(VectorizeError::InvalidNGram(format!(
                "order {} outside 1..={MAX_ORDER}",
                terms.len()
            )));
        }
        if postings.is_empty() {
            return Err(VectorizeError::InvalidNGram("no postings".into()));
        }
        Ok(NGram { terms, postings })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn n(&self) -> usize {
        self.terms.len()
    }

    pub fn postings(&self) -> &BTreeSet<String> {
        &self.postings
    }

    pub fn df(&self) -> usize {
        self.postings.len()
    }

    pub fn text(&self) -> String {
        self.terms.join(" ")
    }
}

impl TryFrom<NGramRecord> for NGram {
    type Error = VectorizeError;

    fn try_from(r: NGramRecord) -> Result<Self, Self::Error> {
        if r.n != r.terms.len() || r.df != r.postings.len() {
            return Err(VectorizeError::InvalidNGram("inconsistent n or df".into()));
        }
        NGram::new(r.terms, r.postings)
    }
}

impl From<NGram> for NGramRecord {
    fn from(g: NGram) -> Self {
        NGramRecord {
            n: g.terms.len(),
            df: g.postings.len(),
            terms: g.terms,
            postings: g.postings,
        }
    }
}

/// One sliding-window hit inside a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramOccurrence {
    pub terms: Vec<String>,
    pub sentence: usize,
    pub start: usize,
}

fn check_order(n_max: usize) -> Result<(), VectorizeError> {
    if (1..=MAX_ORDER).contains(&n_max) {
        Ok(())
    } else {
        Err(VectorizeError::InvalidNGram(format!("n_max {n_max} outside 1..={MAX_ORDER}")))
    }
}

/// Sliding windows of length 1..=n_max over each sentence; never crosses a
/// sentence boundary.
pub fn extract_ngrams(doc: &TokenizedDocument, n_max: usize) -> Result<Vec<NGramOccurrence>, VectorizeError> {
    check_order(n_max)?;
    let mut out = Vec::new();
    for (si, sentence) in doc.term_sentences().iter().enumerate() {
        for n in 1..=n_max {
            for (start, window) in sentence.windows(n).enumerate() {
                out.push(NGramOccurrence {
                    terms: window.iter().map(|t| t.to_string()).collect(),
                    sentence: si,
                    start,
                });
            }
        }
    }
    Ok(out)
}

/// Distinct n-gram patterns of one document.
pub fn distinct_ngrams(doc: &TokenizedDocument, n_max: usize) -> Result<BTreeSet<Vec<String>>, VectorizeError> {
    Ok(extract_ngrams(doc, n_max)?
        .into_iter()
        .map(|o| o.terms)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LnConstraints {
    pub n_max: usize,
    /// Unigrams occurring in more than ceil(ratio * N) documents are dropped.
    pub max_unigram_df_ratio: f64,
}

impl Default for LnConstraints {
    fn default() -> Self {
        LnConstraints {
            n_max: MAX_ORDER,
            max_unigram_df_ratio: 0.2,
        }
    }
}

impl LnConstraints {
    pub fn validate(&self) -> Result<(), VectorizeError> {
        check_order(self.n_max)?;
        if !(self.max_unigram_df_ratio > 0.0 && self.max_unigram_df_ratio <= 1.0) {
            return Err(VectorizeError::InvalidNGram(format!(
                "max_unigram_df_ratio {} outside (0, 1]",
                self.max_unigram_df_ratio
            )));
        }
        Ok(())
    }

    pub fn unigram_df_cap(&self, corpus_size: usize) -> usize {
        // the epsilon keeps 0.2 * 100 from rounding up to 21
        ((self.max_unigram_df_ratio * corpus_size as f64) - 1e-9).ceil().max(0.0) as usize
    }
}

fn purely_numeric(term: &str) -> bool {
    !term.is_empty() && term.chars().all(char::is_numeric)
}

/// N-grams shared by at least two documents, minus unigram hubs and bare numbers.
pub fn linking_candidates(
    corpus: &[TokenizedDocument],
    constraints: &LnConstraints,
) -> Result<Vec<NGram>, VectorizeError> {
    constraints.validate()?;
    let mut postings: BTreeMap<Vec<String>, BTreeSet<String>> = BTreeMap::new();
    for doc in corpus {
        for pattern in distinct_ngrams(doc, constraints.n_max)? {
            postings.entry(pattern).or_default().insert(doc.id.clone());
        }
    }
    let cap = constraints.unigram_df_cap(corpus.len());
    postings
        .into_iter()
        .filter(|(terms, docs)| {
            docs.len() >= 2
                && (terms.len() > 1 || (docs.len() <= cap && !purely_numeric(&terms[0])))
        })
        .map(|(terms, docs)| NGram::new(terms, docs))
        .collect()
}
