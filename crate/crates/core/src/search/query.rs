use std::collections::{BTreeMap, BTreeSet};

use super::SearchError;
use crate::ingest::{apply_domain_rules, clean_text, normalize_tokens, tokenize, DomainRules};
use crate::vectorize::{TfidfModel, MAX_ORDER};

/// A user query normalized with the same rules the graph was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub raw: String,
    pub tokens: Vec<String>,
    /// term -> idf, for terms the model knows.
    pub vector: BTreeMap<String, f64>,
    pub ngrams: BTreeSet<Vec<String>>,
}

pub fn parse_query(raw: &str, rules: &DomainRules, model: &TfidfModel) -> Result<Query, SearchError> {
    let cleaned = clean_text(raw, rules);
    let sentences = normalize_tokens(apply_domain_rules(&tokenize(&cleaned), rules), rules, "en");
    if sentences.is_empty() {
        return Err(SearchError::EmptyQuery);
    }

    let term_sentences: Vec<Vec<String>> = sentences
        .iter()
        .map(|s| s.iter().map(|t| t.normalized.clone()).collect())
        .collect();
    let tokens: Vec<String> = term_sentences.iter().flatten().cloned().collect();
    let vector = tokens
        .iter()
        .filter_map(|t| model.idf(t).map(|idf| (t.clone(), idf)))
        .collect();
    let mut ngrams = BTreeSet::new();
    for sentence in &term_sentences {
        for n in 1..=MAX_ORDER {
            for window in sentence.windows(n) {
                ngrams.insert(window.to_vec());
            }
        }
    }
    Ok(Query {
        raw: raw.to_owned(),
        tokens,
        vector,
        ngrams,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{RulesFile, SymbolAction, SymbolPatternSpec};

    fn model() -> TfidfModel {
        TfidfModel::from_counts(
            4,
            [("oscil", 1), ("failur", 2), ("vdd", 1), ("core", 4)]
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_terms_one_bigram() {
        let q = parse_query("oscillator failure", &DomainRules::default(), &model()).unwrap();
        assert_eq!(q.tokens, ["oscil", "failur"]);
        assert_eq!(q.ngrams.iter().filter(|g| g.len() == 2).count(), 1);
        assert_eq!(q.ngrams.len(), 3);
        assert!((q.vector["oscil"] - 4f64.ln()).abs() < 1e-12);
        assert!((q.vector["failur"] - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn all_stopwords_is_empty_query() {
        assert!(matches!(
            parse_query("the of and", &DomainRules::default(), &model()),
            Err(SearchError::EmptyQuery)
        ));
        assert!(matches!(
            parse_query("  #@! ", &DomainRules::default(), &model()),
            Err(SearchError::EmptyQuery)
        ));
    }

    #[test]
    fn symbol_rules_reused() {
        let rules = DomainRules::from_file(RulesFile {
            symbol_patterns: vec![SymbolPatternSpec {
                pattern: "__+".into(),
                action: SymbolAction::Split,
            }],
            ..Default::default()
        })
        .unwrap();
        let q = parse_query("VDD__CORE", &rules, &model()).unwrap();
        assert_eq!(q.tokens, ["vdd", "core"]);
        // core is in every document: idf 0 but still part of the vector
        assert_eq!(q.vector["core"], 0.0);
    }

    #[test]
    fn unknown_terms_stay_out_of_vector() {
        let q = parse_query("zzyzx oscillator", &DomainRules::default(), &model()).unwrap();
        assert_eq!(q.tokens.len(), 2);
        assert_eq!(q.vector.len(), 1);
    }
}
