//! Domain rules: the expert-maintained data that steers tokenization.
//!
//! Rules are loaded from a JSON file so abbreviation and symbol handling can
//! be extended without a rebuild. The same rules are embedded into every graph
//! file so queries are normalized exactly like the corpus was.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::IngestError;

const DEFAULT_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// What to do with a token matched by a symbol pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolAction {
    PreserveAsSymbol,
    Split,
    Delete,
}

#[derive(Debug, Clone)]
pub struct SymbolRule {
    pub pattern: Regex,
    pub action: SymbolAction,
}

/// On-disk form of [`DomainRules`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesFile {
    #[serde(default)]
    pub abbreviations: BTreeMap<String, String>,
    #[serde(default)]
    pub symbol_patterns: Vec<SymbolPatternSpec>,
    #[serde(default)]
    pub autogen_patterns: Vec<String>,
    /// When absent the bundled English function-word list is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<Vec<String>>,
    /// Lemma exceptions applied to lowercased words before stemming.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lemmas: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolPatternSpec {
    pub pattern: String,
    pub action: SymbolAction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RulesFile", into = "RulesFile")]
pub struct DomainRules {
    abbreviations: BTreeMap<String, String>,
    symbol_patterns: Vec<SymbolRule>,
    autogen_patterns: Vec<Regex>,
    stopwords: BTreeSet<String>,
    lemmas: BTreeMap<String, String>,
}

impl Default for DomainRules {
    fn default() -> Self {
        DomainRules {
            abbreviations: BTreeMap::new(),
            symbol_patterns: Vec::new(),
            autogen_patterns: Vec::new(),
            stopwords: default_stopwords(),
            lemmas: BTreeMap::new(),
        }
    }
}

pub fn default_stopwords() -> BTreeSet<String> {
    DEFAULT_STOPWORDS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

impl DomainRules {
    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| IngestError::MissingDocumentFile(path.to_path_buf()))?;
        let file: RulesFile = serde_json::from_str(&text)
            .map_err(|e| IngestError::InvalidRules(format!("{}: {e}", path.display())))?;
        Self::from_file(file)
    }

    pub fn from_file(file: RulesFile) -> Result<Self, IngestError> {
        let mut abbreviations = BTreeMap::new();
        for (key, expansion) in file.abbreviations {
            if key.is_empty() || key != key.to_lowercase() {
                return Err(IngestError::InvalidRules(format!(
                    "abbreviation key {key:?} must be non-empty and lowercase"
                )));
            }
            if expansion.trim().is_empty() {
                return Err(IngestError::InvalidRules(format!(
                    "abbreviation {key:?} has an empty expansion"
                )));
            }
            abbreviations.insert(key, expansion.to_lowercase());
        }

        let symbol_patterns = file
            .symbol_patterns
            .into_iter()
            .map(|spec| {
                Ok(SymbolRule {
                    pattern: compile(&spec.pattern)?,
                    action: spec.action,
                })
            })
            .collect::<Result<Vec<_>, IngestError>>()?;
        let autogen_patterns = file
            .autogen_patterns
            .iter()
            .map(|p| compile(p))
            .collect::<Result<Vec<_>, _>>()?;

        let stopwords = match file.stopwords {
            Some(words) => words.into_iter().map(|w| w.to_lowercase()).collect(),
            None => default_stopwords(),
        };
        if let Some(bad) = stopwords
            .iter()
            .find(|w| w.is_empty() || w.contains('_') || w.chars().any(char::is_numeric))
        {
            return Err(IngestError::InvalidRules(format!(
                "stopword {bad:?} is empty or looks like a symbolic identifier"
            )));
        }

        Ok(DomainRules {
            abbreviations,
            symbol_patterns,
            autogen_patterns,
            stopwords,
            lemmas: file
                .lemmas
                .into_iter()
                .map(|(k, v)| (k.to_lowercase(), v.to_lowercase()))
                .collect(),
        })
    }

    pub fn abbreviation(&self, lowercase: &str) -> Option<&str> {
        self.abbreviations.get(lowercase).map(String::as_str)
    }

    pub fn symbol_patterns(&self) -> &[SymbolRule] {
        &self.symbol_patterns
    }

    pub fn autogen_patterns(&self) -> &[Regex] {
        &self.autogen_patterns
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn lemma(&self, lowercase: &str) -> Option<&str> {
        self.lemmas.get(lowercase).map(String::as_str)
    }
}

fn compile(pattern: &str) -> Result<Regex, IngestError> {
    Regex::new(pattern)
        .map_err(|e| IngestError::InvalidRules(format!("bad pattern {pattern:?}: {e}")))
}

impl TryFrom<RulesFile> for DomainRules {
    type Error = IngestError;

    fn try_from(file: RulesFile) -> Result<Self, Self::Error> {
        DomainRules::from_file(file)
    }
}

impl From<DomainRules> for RulesFile {
    fn from(rules: DomainRules) -> Self {
        RulesFile {
            abbreviations: rules.abbreviations,
            symbol_patterns: rules
                .symbol_patterns
                .into_iter()
                .map(|r| SymbolPatternSpec {
                    pattern: r.pattern.as_str().to_owned(),
                    action: r.action,
                })
                .collect(),
            autogen_patterns: rules
                .autogen_patterns
                .iter()
                .map(|r| r.as_str().to_owned())
                .collect(),
            stopwords: Some(rules.stopwords.into_iter().collect()),
            lemmas: rules.lemmas,
        }
    }
}
