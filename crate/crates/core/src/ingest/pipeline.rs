use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    apply_domain_rules, clean_text, extract_text, normalize_tokens, tokenize, Corpus,
    DomainRules, IngestError, RawDocument, SourceType, Token,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub id: String,
    pub source_type: SourceType,
    pub label: String,
    pub sentences: Vec<Vec<Token>>,
    /// (child_id, parent_id) pairs inherited from extraction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<Vec<(String, String)>>,
}

impl TokenizedDocument {
    pub fn parent(&self) -> Option<&str> {
        self.structure
            .as_ref()?
            .iter()
            .find(|(child, _)| child == &self.id)
            .map(|(_, parent)| parent.as_str())
    }

    /// Normalized terms in document order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.sentences
            .iter()
            .flatten()
            .map(|t| t.normalized.as_str())
    }

    pub fn term_sentences(&self) -> Vec<Vec<&str>> {
        self.sentences
            .iter()
            .map(|s| s.iter().map(|t| t.normalized.as_str()).collect())
            .collect()
    }
}

/// Runs extraction, cleaning, tokenization, domain rules and normalization.
pub fn preprocess(doc: &RawDocument, rules: &DomainRules) -> Result<Vec<TokenizedDocument>, IngestError> {
    let extracted = extract_text(doc)?;
    Ok(extracted
        .into_iter()
        .map(|ex| {
            let cleaned = clean_text(&ex.text, rules);
            let surfaces = tokenize(&cleaned);
            let tokens = apply_domain_rules(&surfaces, rules);
            TokenizedDocument {
                sentences: normalize_tokens(tokens, rules, &ex.language),
                id: ex.id,
                source_type: ex.source_type,
                label: ex.label,
                structure: ex.structure,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    pub raw_documents: usize,
    pub tokenized_documents: usize,
    /// Documents left with no sentences after stopword removal.
    pub empty_documents: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PreprocessedCorpus {
    pub documents: Vec<TokenizedDocument>,
    pub rules: DomainRules,
    pub report: LoadReport,
}

/// Preprocesses every document in parallel; output order follows the corpus
/// order regardless of scheduling.
pub fn preprocess_corpus(corpus: &Corpus) -> Result<PreprocessedCorpus, IngestError> {
    let per_doc: Vec<Vec<TokenizedDocument>> = corpus
        .documents
        .par_iter()
        .map(|doc| preprocess(doc, &corpus.rules))
        .collect::<Result<_, _>>()?;

    let mut seen = HashSet::new();
    let mut documents = Vec::new();
    for doc in per_doc.into_iter().flatten() {
        if !seen.insert(doc.id.clone()) {
            return Err(IngestError::DuplicateId(doc.id));
        }
        documents.push(doc);
    }
    let report = LoadReport {
        raw_documents: corpus.documents.len(),
        tokenized_documents: documents.len(),
        empty_documents: documents
            .iter()
            .filter(|d| d.sentences.is_empty())
            .map(|d| d.id.clone())
            .collect(),
    };
    Ok(PreprocessedCorpus {
        documents,
        rules: corpus.rules.clone(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DocFormat, RulesFile, SymbolAction, SymbolPatternSpec};
    use proptest::prelude::*;

    fn fc(id: &str, text: &str) -> RawDocument {
        RawDocument::new(id, SourceType::FailureCase, DocFormat::PlainText, text).unwrap()
    }

    fn norms(doc: &TokenizedDocument) -> Vec<Vec<&str>> {
        doc.term_sentences()
    }

    #[test]
    fn failure_case_pipeline() {
        let out = preprocess(&fc("fc", "The oscillator failed!"), &DomainRules::default()).unwrap();
        assert_eq!(norms(&out[0]), vec![vec!["oscil", "fail"]]);
    }

    #[test]
    fn all_stopwords_gives_empty_document() {
        let corpus = Corpus {
            documents: vec![fc("a", "The of and."), fc("b", "board reset")],
            rules: DomainRules::default(),
        };
        let pre = preprocess_corpus(&corpus).unwrap();
        assert!(pre.documents[0].sentences.is_empty());
        assert_eq!(pre.report.empty_documents, vec!["a".to_owned()]);
    }

    #[test]
    fn element_tree_keeps_structure() {
        let doc = RawDocument::new(
            "t",
            SourceType::ProjectElement,
            DocFormat::ElementTree,
            r#"{"id":"chip","name":"Chip","children":[{"id":"osc","name":"Oscillator","description":"ring type"}]}"#,
        )
        .unwrap();
        let out = preprocess(&doc, &DomainRules::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].parent(), Some("chip"));
        assert_eq!(out[0].parent(), None);
        assert_eq!(norms(&out[1]), vec![vec!["oscil"], vec!["ring", "type"]]);
    }

    #[test]
    fn duplicate_ids_across_trees_rejected() {
        let tree = |id: &str| {
            RawDocument::new(
                id,
                SourceType::ProjectElement,
                DocFormat::ElementTree,
                r#"{"id":"chip","name":"Chip"}"#,
            )
            .unwrap()
        };
        let corpus = Corpus {
            documents: vec![tree("t1"), tree("t2")],
            rules: DomainRules::default(),
        };
        assert!(matches!(preprocess_corpus(&corpus), Err(IngestError::DuplicateId(_))));
    }

    fn rich_rules() -> DomainRules {
        DomainRules::from_file(RulesFile {
            abbreviations: [("osc".to_owned(), "oscillator".to_owned())].into(),
            symbol_patterns: vec![SymbolPatternSpec {
                pattern: "__+".into(),
                action: SymbolAction::Split,
            }],
            ..Default::default()
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn deterministic_and_stopword_free(text in "[A-Za-z_0-9 .,;!?#@]{0,120}") {
            let rules = rich_rules();
            let doc = fc("p", &text);
            let a = preprocess(&doc, &rules).unwrap();
            let b = preprocess(&doc, &rules).unwrap();
            prop_assert_eq!(&a, &b);
            for sentence in &a[0].sentences {
                prop_assert!(!sentence.is_empty());
                for tok in sentence {
                    prop_assert!(!rules.is_stopword(&tok.normalized));
                    prop_assert!(!tok.normalized.is_empty());
                }
            }
        }
    }
}
