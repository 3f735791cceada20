use crate::ingest::{SourceType, Token, TokenKind, TokenizedDocument};

/// Builds a tokenized document whose tokens are already normalized.
pub(crate) fn doc(id: &str, sentences: &[&[&str]]) -> TokenizedDocument {
    typed_doc(id, SourceType::FailureCase, sentences)
}

pub(crate) fn typed_doc(id: &str, source_type: SourceType, sentences: &[&[&str]]) -> TokenizedDocument {
    TokenizedDocument {
        id: id.into(),
        source_type,
        label: id.into(),
        sentences: sentences
            .iter()
            .map(|s| {
                s.iter()
                    .map(|t| Token {
                        surface: t.to_string(),
                        normalized: t.to_string(),
                        kind: TokenKind::Word,
                    })
                    .collect()
            })
            .collect(),
        structure: None,
    }
}
