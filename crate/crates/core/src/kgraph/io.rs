use std::io::Write;
use std::path::Path;

use quick_xml::escape::escape;
use serde::{Deserialize, Serialize};

use super::{Edge, GraphConfig, GraphError, KnowledgeGraph, Node, Payload};
use crate::ingest::DomainRules;
use crate::vectorize::TfidfModel;

pub const GRAPH_FILE_VERSION: u64 = 1;

#[derive(Serialize)]
struct GraphFileRef<'a> {
    version: u64,
    config: &'a GraphConfig,
    rules: &'a DomainRules,
    model: &'a TfidfModel,
    nodes: &'a [Node],
    edges: &'a [Edge],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    #[allow(dead_code)]
    version: u64,
    config: GraphConfig,
    rules: DomainRules,
    model: TfidfModel,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl KnowledgeGraph {
    /// Canonical JSON encoding; equal graphs encode to identical bytes.
    pub fn to_json(&self) -> String {
        let file = GraphFileRef {
            version: GRAPH_FILE_VERSION,
            config: self.config(),
            rules: self.rules(),
            model: self.model(),
            nodes: self.nodes(),
            edges: self.edges(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<KnowledgeGraph, GraphError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| GraphError::CorruptFile(e.to_string()))?;
        match value.get("version") {
            Some(v) if v.as_u64() == Some(GRAPH_FILE_VERSION) => {}
            Some(v) => return Err(GraphError::SchemaVersionMismatch(v.to_string())),
            None => return Err(GraphError::SchemaVersionMismatch("missing".into())),
        }
        let file: GraphFile =
            serde_json::from_value(value).map_err(|e| GraphError::CorruptFile(e.to_string()))?;
        let model = TfidfModel::from_counts(file.model.document_count(), {
            file.model
                .vocabulary()
                .map(|t| (t.to_owned(), file.model.df(t).unwrap_or(0)))
                .collect()
        })
        .map_err(|e| GraphError::CorruptFile(e.to_string()))?;
        KnowledgeGraph::new(file.config, file.rules, model, file.nodes, file.edges)
            .map_err(|e| GraphError::CorruptFile(e.to_string()))
    }
}

pub fn export_graph(graph: &KnowledgeGraph, path: &Path) -> Result<(), GraphError> {
    std::fs::write(path, graph.to_json())?;
    Ok(())
}

pub fn import_graph(path: &Path) -> Result<KnowledgeGraph, GraphError> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| GraphError::CorruptFile("not UTF-8".into()))?;
    KnowledgeGraph::from_json(&text)
}

/// GraphML for third-party viewers; node type and edge category are attributes.
pub fn write_graphml(graph: &KnowledgeGraph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(out, r#"  <key id="type" for="node" attr.name="type" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="label" for="node" attr.name="label" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="terms" for="node" attr.name="terms" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="category" for="edge" attr.name="category" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#)?;
    writeln!(out, r#"  <graph id="G" edgedefault="undirected">"#)?;
    for node in graph.nodes() {
        let terms = match &node.payload {
            Payload::Vector(v) => v.ranked().iter().map(|(t, _)| *t).collect::<Vec<_>>().join(" "),
            Payload::Ngram(g) => g.text(),
        };
        writeln!(out, r#"    <node id="{}">"#, escape(node.id.as_str()))?;
        writeln!(out, r#"      <data key="type">{}</data>"#, node.node_type)?;
        writeln!(out, r#"      <data key="label">{}</data>"#, escape(node.label.as_str()))?;
        writeln!(out, r#"      <data key="terms">{}</data>"#, escape(terms.as_str()))?;
        writeln!(out, "    </node>")?;
    }
    for (i, e) in graph.edges().iter().enumerate() {
        writeln!(
            out,
            r#"    <edge id="e{i}" source="{}" target="{}">"#,
            escape(e.a.as_str()),
            escape(e.b.as_str())
        )?;
        writeln!(out, r#"      <data key="category">{}</data>"#, e.category)?;
        writeln!(out, r#"      <data key="weight">{}</data>"#, e.weight)?;
        writeln!(out, "    </edge>")?;
    }
    writeln!(out, "  </graph>")?;
    writeln!(out, "</graphml>")
}
