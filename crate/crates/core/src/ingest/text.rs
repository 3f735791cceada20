use super::DomainRules;

pub const SENTENCE_BOUNDARIES: [char; 4] = ['.', '!', '?', ';'];

/// Characters that survive cleaning: letters, digits, underscore, whitespace
/// and the sentence punctuation used for segmentation.
pub fn is_allowed_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c.is_whitespace() || SENTENCE_BOUNDARIES.contains(&c)
}

/// Strips generated patterns, drops non-symbolic special characters and
/// collapses whitespace runs to a single space.
pub fn clean_text(text: &str, rules: &DomainRules) -> String {
    let mut stripped = text.to_owned();
    for pattern in rules.autogen_patterns() {
        if pattern.is_match(&stripped) {
            stripped = pattern.replace_all(&stripped, " ").into_owned();
        }
    }
    let filtered: String = stripped.chars().filter(|&c| is_allowed_char(c)).collect();
    filtered.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits cleaned text into sentences of whitespace-separated tokens.
pub fn tokenize(text: &str) -> Vec<Vec<String>> {
    text.split(|c| SENTENCE_BOUNDARIES.contains(&c))
        .map(|sentence| {
            sentence
                .split_whitespace()
                .map(str::to_owned)
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}
