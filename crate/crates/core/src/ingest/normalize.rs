use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use super::{DomainRules, SymbolAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Symbol,
    Abbrev,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub kind: TokenKind,
}

impl Token {
    fn word(surface: &str) -> Token {
        Token {
            surface: surface.to_owned(),
            normalized: surface.to_lowercase(),
            kind: TokenKind::Word,
        }
    }

    fn verbatim(surface: &str, kind: TokenKind) -> Token {
        Token {
            surface: surface.to_owned(),
            normalized: surface.to_owned(),
            kind,
        }
    }
}

fn has_digit(s: &str) -> bool {
    s.chars().any(char::is_numeric)
}

/// Abbreviation lookup, then the digit and underscore exemptions, then plain word.
fn classify(surface: &str, rules: &DomainRules) -> Token {
    if let Some(expansion) = rules.abbreviation(&surface.to_lowercase()) {
        return Token {
            surface: surface.to_owned(),
            normalized: expansion.to_owned(),
            kind: TokenKind::Abbrev,
        };
    }
    if has_digit(surface) {
        Token::verbatim(surface, TokenKind::Numeric)
    } else if surface.contains('_') {
        Token::verbatim(surface, TokenKind::Symbol)
    } else {
        Token::word(surface)
    }
}

pub fn apply_domain_rules(sentences: &[Vec<String>], rules: &DomainRules) -> Vec<Vec<Token>> {
    sentences
        .iter()
        .map(|sentence| {
            let mut out = Vec::with_capacity(sentence.len());
            for surface in sentence {
                apply_one(surface, rules, &mut out);
            }
            out
        })
        .collect()
}

fn apply_one(surface: &str, rules: &DomainRules, out: &mut Vec<Token>) {
    if rules.abbreviation(&surface.to_lowercase()).is_some() {
        out.push(classify(surface, rules));
        return;
    }
    let Some(rule) = rules
        .symbol_patterns()
        .iter()
        .find(|r| r.pattern.is_match(surface))
    else {
        out.push(classify(surface, rules));
        return;
    };
    match rule.action {
        SymbolAction::PreserveAsSymbol => out.push(Token::verbatim(surface, TokenKind::Symbol)),
        SymbolAction::Delete => {}
        SymbolAction::Split => {
            for piece in rule.pattern.split(surface).filter(|p| !p.is_empty()) {
                out.push(classify(piece, rules));
            }
        }
    }
}

fn is_english(language: &str) -> bool {
    let lang = language.to_ascii_lowercase();
    lang == "en" || lang.starts_with("en-") || lang.starts_with("en_")
}

/// Lowercases, applies lemma exceptions and stems word tokens, then drops
/// stopwords and empty sentences. Non-English words are only lowercased.
pub fn normalize_tokens(
    sentences: Vec<Vec<Token>>,
    rules: &DomainRules,
    language: &str,
) -> Vec<Vec<Token>> {
    let stemmer = is_english(language).then(|| Stemmer::create(Algorithm::English));
    sentences
        .into_iter()
        .map(|sentence| {
            sentence
                .into_iter()
                .filter_map(|mut tok| {
                    if tok.kind == TokenKind::Word {
                        let lower = tok.surface.to_lowercase();
                        if rules.is_stopword(&lower) {
                            return None;
                        }
                        let lemma = rules.lemma(&lower).unwrap_or(&lower);
                        tok.normalized = match &stemmer {
                            Some(s) => s.stem(lemma).into_owned(),
                            None => lemma.to_owned(),
                        };
                    }
                    (!tok.normalized.is_empty() && !rules.is_stopword(&tok.normalized))
                        .then_some(tok)
                })
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{RulesFile, SymbolPatternSpec};

    fn rules() -> DomainRules {
        DomainRules::from_file(RulesFile {
            abbreviations: [("osc".to_owned(), "oscillator".to_owned())].into(),
            symbol_patterns: vec![
                SymbolPatternSpec {
                    pattern: "__+".into(),
                    action: SymbolAction::Split,
                },
                SymbolPatternSpec {
                    pattern: "^TMP".into(),
                    action: SymbolAction::Delete,
                },
                SymbolPatternSpec {
                    pattern: "^PIN_".into(),
                    action: SymbolAction::PreserveAsSymbol,
                },
                SymbolPatternSpec {
                    pattern: "^PIN".into(),
                    action: SymbolAction::Delete,
                },
            ],
            lemmas: [("went".to_owned(), "go".to_owned())].into(),
            ..Default::default()
        })
        .unwrap()
    }

    fn one(surface: &str) -> Vec<Token> {
        apply_domain_rules(&[vec![surface.to_owned()]], &rules()).remove(0)
    }

    #[test]
    fn abbreviation_hit() {
        assert_eq!(
            one("osc"),
            vec![Token {
                surface: "osc".into(),
                normalized: "oscillator".into(),
                kind: TokenKind::Abbrev
            }]
        );
        assert_eq!(one("OSC")[0].kind, TokenKind::Abbrev);
    }

    #[test]
    fn split_on_multiple_underscores() {
        let toks = one("VDD__CORE");
        let normalized: Vec<_> = toks.iter().map(|t| t.normalized.as_str()).collect();
        assert_eq!(normalized, ["vdd", "core"]);
        assert!(toks.iter().all(|t| t.kind == TokenKind::Word));
    }

    #[test]
    fn digit_rule_and_symbol_rules() {
        let t = one("3v3");
        assert_eq!(t[0].kind, TokenKind::Numeric);
        assert_eq!(t[0].normalized, "3v3");
        assert!(one("TMP_export").is_empty());
        assert_eq!(one("VDD_CORE")[0].kind, TokenKind::Symbol);
    }

    #[test]
    fn first_matching_pattern_wins() {
        // "PIN_A" matches both ^PIN_ (preserve) and ^PIN (delete); order decides
        assert_eq!(one("PIN_A")[0].kind, TokenKind::Symbol);
        assert!(one("PINX").is_empty());
    }

    #[test]
    fn stemming_goldens() {
        let r = rules();
        let sentences = apply_domain_rules(
            &[vec!["Oscillators".into(), "the".into(), "failed".into(), "went".into()]],
            &r,
        );
        let out = normalize_tokens(sentences, &r, "en");
        let normalized: Vec<_> = out[0].iter().map(|t| t.normalized.as_str()).collect();
        assert_eq!(normalized, ["oscil", "fail", "go"]);
    }

    #[test]
    fn symbols_and_numerics_exempt_from_stemming() {
        let r = rules();
        let sentences = apply_domain_rules(&[vec!["VDD_CORE".into(), "3V3".into()]], &r);
        let out = normalize_tokens(sentences, &r, "en");
        assert_eq!(out[0][0].normalized, "VDD_CORE");
        assert_eq!(out[0][1].normalized, "3V3");
    }

    #[test]
    fn non_english_only_lowercased() {
        let r = rules();
        let sentences = apply_domain_rules(&[vec!["Oszillatoren".into()]], &r);
        let out = normalize_tokens(sentences, &r, "de");
        assert_eq!(out[0][0].normalized, "oszillatoren");
    }

    #[test]
    fn stopword_only_sentence_dropped() {
        let r = rules();
        let sentences = apply_domain_rules(&[vec!["the".into(), "of".into()], vec!["board".into()]], &r);
        let out = normalize_tokens(sentences, &r, "en");
        assert_eq!(out.len(), 1);
        assert_eq!(out[0][0].normalized, "board");
    }
}
