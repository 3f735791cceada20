use std::collections::HashSet;

use serde::Deserialize;

use super::{DocFormat, IngestError, RawDocument, SourceType};

/// Linear text pulled out of one source unit. Element trees produce one of
/// these per tree node.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedDocument {
    pub id: String,
    pub source_type: SourceType,
    pub language: String,
    /// Short display label (element name, first line, or id).
    pub label: String,
    pub text: String,
    /// (child_id, parent_id) pairs; element trees only.
    pub structure: Option<Vec<(String, String)>>,
    /// (label, text) rows; labeled tables only.
    pub labels: Option<Vec<(String, String)>>,
}

#[derive(Debug, Deserialize)]
struct ElementNode {
    id: String,
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    children: Vec<ElementNode>,
}

const LABEL_MAX_CHARS: usize = 80;

pub fn extract_text(doc: &RawDocument) -> Result<Vec<ExtractedDocument>, IngestError> {
    match doc.format {
        DocFormat::PlainText => Ok(vec![ExtractedDocument {
            id: doc.id.clone(),
            source_type: doc.source_type,
            language: doc.language.clone(),
            label: doc
                .metadata
                .get("title")
                .cloned()
                .unwrap_or_else(|| first_line_label(&doc.content, &doc.id)),
            text: doc.content.clone(),
            structure: None,
            labels: None,
        }]),
        DocFormat::ElementTree => extract_tree(doc),
        DocFormat::LabeledTable => extract_table(doc),
    }
}

fn first_line_label(content: &str, fallback: &str) -> String {
    let line = content.lines().map(str::trim).find(|l| !l.is_empty());
    match line {
        Some(l) => l.chars().take(LABEL_MAX_CHARS).collect(),
        None => fallback.to_owned(),
    }
}

fn extract_tree(doc: &RawDocument) -> Result<Vec<ExtractedDocument>, IngestError> {
    let root: ElementNode = serde_json::from_str(&doc.content)
        .map_err(|_| IngestError::UnparseableContent(doc.id.clone()))?;

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut ancestors = Vec::new();
    walk(doc, &root, None, &mut ancestors, &mut seen, &mut out)?;
    Ok(out)
}

fn walk(
    doc: &RawDocument,
    node: &ElementNode,
    parent: Option<&str>,
    ancestors: &mut Vec<String>,
    seen: &mut HashSet<String>,
    out: &mut Vec<ExtractedDocument>,
) -> Result<(), IngestError> {
    if node.id.trim().is_empty() {
        return Err(IngestError::UnparseableContent(doc.id.clone()));
    }
    if ancestors.iter().any(|a| a == &node.id) {
        return Err(IngestError::CyclicStructure(doc.id.clone()));
    }
    if !seen.insert(node.id.clone()) {
        return Err(IngestError::DuplicateId(node.id.clone()));
    }

    let description = node.description.trim();
    let text = if description.is_empty() {
        node.name.clone()
    } else {
        format!("{}. {}", node.name.trim(), description)
    };
    out.push(ExtractedDocument {
        id: node.id.clone(),
        source_type: doc.source_type,
        language: doc.language.clone(),
        label: node.name.trim().to_owned(),
        text,
        structure: Some(
            parent
                .map(|p| vec![(node.id.clone(), p.to_owned())])
                .unwrap_or_default(),
        ),
        labels: None,
    });

    ancestors.push(node.id.clone());
    for child in &node.children {
        walk(doc, child, Some(&node.id), ancestors, seen, out)?;
    }
    ancestors.pop();
    Ok(())
}

/// TSV with a header row; the first column of each row is its label.
fn extract_table(doc: &RawDocument) -> Result<Vec<ExtractedDocument>, IngestError> {
    let mut lines = doc
        .content
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| IngestError::UnparseableContent(doc.id.clone()))?;
    let width = header.split('\t').count();

    let mut labels = Vec::new();
    for line in lines {
        let mut fields = line.split('\t');
        let label = fields.next().unwrap_or_default().trim().to_owned();
        let rest: Vec<&str> = fields.map(str::trim).filter(|f| !f.is_empty()).collect();
        if line.split('\t').count() > width {
            return Err(IngestError::UnparseableContent(doc.id.clone()));
        }
        labels.push((label, rest.join(" ")));
    }

    let text = labels
        .iter()
        .map(|(l, t)| if t.is_empty() { l.clone() } else { format!("{l} {t}") })
        .collect::<Vec<_>>()
        .join(". ");

    Ok(vec![ExtractedDocument {
        id: doc.id.clone(),
        source_type: doc.source_type,
        language: doc.language.clone(),
        label: doc.metadata.get("title").cloned().unwrap_or_else(|| doc.id.clone()),
        text,
        structure: None,
        labels: Some(labels),
    }])
}
