//! The typed, weighted knowledge graph: document nodes (FC, PE, PS), linking
//! nodes (LN) reifying shared n-grams, and the relations between them.

mod build;
mod config;
mod graph;
mod io;
mod stats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{IngestError, SourceType};
use crate::vectorize::{DocumentVector, NGram, VectorizeError};

pub use build::{
    build_from_corpus, build_from_manifest, build_graph, create_document_nodes, linking_node_id, GraphBuilder, PatternSets,
};
pub use config::GraphConfig;
pub use graph::KnowledgeGraph;
pub use io::{export_graph, import_graph, write_graphml, GRAPH_FILE_VERSION};
pub use stats::{graph_stats, GraphStats, NodeTypeStat, RelationStat, RelationType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeType {
    FC,
    PE,
    PS,
    LN,
}

impl NodeType {
    pub const DOCUMENT_TYPES: [NodeType; 3] = [NodeType::FC, NodeType::PE, NodeType::PS];

    pub fn from_source(source: SourceType) -> NodeType {
        match source {
            SourceType::FailureCase => NodeType::FC,
            SourceType::ProjectElement => NodeType::PE,
            SourceType::ProductSpec => NodeType::PS,
        }
    }

    pub fn is_document(self) -> bool {
        self != NodeType::LN
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeType::FC => "FC",
            NodeType::PE => "PE",
            NodeType::PS => "PS",
            NodeType::LN => "LN",
        }
    }

    pub fn parse(s: &str) -> Option<NodeType> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FC" => Some(NodeType::FC),
            "PE" => Some(NodeType::PE),
            "PS" => Some(NodeType::PS),
            "LN" => Some(NodeType::LN),
            _ => None,
        }
    }
}

impl std::fmt::Display for NodeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeCategory {
    #[serde(rename = "FC_FC")]
    FcFc,
    #[serde(rename = "PE_PE")]
    PePe,
    #[serde(rename = "FC_LN")]
    FcLn,
    #[serde(rename = "PE_LN")]
    PeLn,
    #[serde(rename = "PS_LN")]
    PsLn,
    #[serde(rename = "XVEC")]
    Xvec,
}

impl EdgeCategory {
    pub const ALL: [EdgeCategory; 6] = [
        EdgeCategory::FcFc,
        EdgeCategory::PePe,
        EdgeCategory::FcLn,
        EdgeCategory::PeLn,
        EdgeCategory::PsLn,
        EdgeCategory::Xvec,
    ];
    pub const LINKING: [EdgeCategory; 3] =
        [EdgeCategory::FcLn, EdgeCategory::PeLn, EdgeCategory::PsLn];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeCategory::FcFc => "FC_FC",
            EdgeCategory::PePe => "PE_PE",
            EdgeCategory::FcLn => "FC_LN",
            EdgeCategory::PeLn => "PE_LN",
            EdgeCategory::PsLn => "PS_LN",
            EdgeCategory::Xvec => "XVEC",
        }
    }

    /// Parses a category name; `LN` expands to the three linking categories.
    pub fn parse_group(s: &str) -> Option<Vec<EdgeCategory>> {
        let s = s.trim().to_ascii_uppercase().replace('-', "_");
        if s == "LN" {
            return Some(Self::LINKING.to_vec());
        }
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .map(|c| vec![c])
    }

    /// The category an edge between these node types must carry, if any.
    pub fn between(a: NodeType, b: NodeType) -> Option<EdgeCategory> {
        use NodeType::*;
        match (a, b) {
            (FC, FC) => Some(EdgeCategory::FcFc),
            (PE, PE) => Some(EdgeCategory::PePe),
            (FC, LN) | (LN, FC) => Some(EdgeCategory::FcLn),
            (PE, LN) | (LN, PE) => Some(EdgeCategory::PeLn),
            (PS, LN) | (LN, PS) => Some(EdgeCategory::PsLn),
            (x, y) if x != y && x.is_document() && y.is_document() => Some(EdgeCategory::Xvec),
            _ => None,
        }
    }

    pub fn linking(doc_type: NodeType) -> Option<EdgeCategory> {
        Self::between(doc_type, NodeType::LN)
    }

    pub fn is_linking(self) -> bool {
        Self::LINKING.contains(&self)
    }
}

impl std::fmt::Display for EdgeCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Vector(DocumentVector),
    Ngram(NGram),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub label: String,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_parent: Option<String>,
}

impl Node {
    pub fn vector(&self) -> Option<&DocumentVector> {
        match &self.payload {
            Payload::Vector(v) => Some(v),
            Payload::Ngram(_) => None,
        }
    }

    pub fn ngram(&self) -> Option<&NGram> {
        match &self.payload {
            Payload::Ngram(g) => Some(g),
            Payload::Vector(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionMeta {
    pub parent: String,
    pub child: String,
}

/// Undirected weighted edge; endpoints are stored with `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub category: EdgeCategory,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_meta: Option<DirectionMeta>,
}

impl Edge {
    pub fn new(x: &str, y: &str, category: EdgeCategory, weight: f64) -> Edge {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Edge {
            a: a.to_owned(),
            b: b.to_owned(),
            category,
            weight,
            direction_meta: None,
        }
    }

    pub fn other(&self, id: &str) -> &str {
        if self.a == id {
            &self.b
        } else {
            &self.a
        }
    }
}

/// Linking-edge weight for an n-gram of order `n`: n / 3.
pub fn linking_weight(n: usize) -> f64 {
    n as f64 / crate::vectorize::MAX_ORDER as f64
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node {0} references a missing structure parent")]
    DanglingParent(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid graph config: {0}")]
    InvalidConfig(String),
    #[error("unsupported graph file version {0}")]
    SchemaVersionMismatch(String),
    #[error("corrupt graph file: {0}")]
    CorruptFile(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::DanglingParent(_) => "DANGLING_PARENT",
            GraphError::UnknownNode(_) => "UNKNOWN_NODE",
            GraphError::InvalidGraph(_) => "INVALID_GRAPH",
            GraphError::InvalidConfig(_) => "INVALID_CONFIG",
            GraphError::SchemaVersionMismatch(_) => "SCHEMA_VERSION_MISMATCH",
            GraphError::CorruptFile(_) => "CORRUPT_FILE",
            GraphError::Ingest(e) => e.code(),
            GraphError::Vectorize(_) => "VECTORIZE_ERROR",
            GraphError::Io(_) => "IO_ERROR",
        }
    }
}
