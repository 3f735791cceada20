//! Two-stage graph search: match base nodes for a query, then expand along
//! weighted relations up to a hop bound and rank what was reached.

mod expand;
mod query;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kgraph::{EdgeCategory, KnowledgeGraph, NodeType};

pub use expand::{expand, match_base_nodes, reachable_within};
pub use query::{parse_query, Query};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("query contains no searchable terms")]
    EmptyQuery,
    #[error("unknown project element {0}")]
    UnknownElement(String),
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
}

impl SearchError {
    pub fn code(&self) -> &'static str {
        match self {
            SearchError::EmptyQuery => "EMPTY_QUERY",
            SearchError::UnknownElement(_) => "UNKNOWN_ELEMENT",
            SearchError::InvalidConfig(_) => "INVALID_SEARCH_CONFIG",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub depth: usize,
    pub result_types: BTreeSet<NodeType>,
    pub limit: usize,
    pub min_score: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            depth: 1,
            result_types: BTreeSet::from([NodeType::FC]),
            limit: 10,
            min_score: 0.05,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.result_types.contains(&NodeType::LN) {
            return Err(SearchError::InvalidConfig("LN nodes are never results".into()));
        }
        if !(self.min_score > 0.0 && self.min_score.is_finite()) {
            return Err(SearchError::InvalidConfig(format!(
                "min_score {} must be a positive number",
                self.min_score
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub category: EdgeCategory,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredNode {
    pub id: String,
    pub score: f64,
    /// True when the node's best score is its own direct match.
    pub base: bool,
    pub best_path: Vec<PathStep>,
    pub depth_used: usize,
}

/// Filter by type, order by score descending then id ascending, truncate.
fn rank(graph: &KnowledgeGraph, nodes: Vec<ScoredNode>, config: &SearchConfig) -> Vec<ScoredNode> {
    let mut out: Vec<ScoredNode> = nodes
        .into_iter()
        .filter(|n| {
            graph
                .node(&n.id)
                .is_some_and(|node| node.node_type != NodeType::LN && config.result_types.contains(&node.node_type))
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    out.truncate(config.limit);
    out
}

pub fn search(graph: &KnowledgeGraph, raw_query: &str, config: &SearchConfig) -> Result<Vec<ScoredNode>, SearchError> {
    config.validate()?;
    let query = parse_query(raw_query, graph.rules(), graph.model())?;
    let base = match_base_nodes(graph, &query);
    Ok(rank(graph, expand(graph, &base, config), config))
}

/// What was inserted into the design: an existing PE node, or a free-text
/// element description.
#[derive(Debug, Clone, Copy)]
pub enum Element<'a> {
    Id(&'a str),
    Text(&'a str),
}

/// Failure cases related to an inserted design element.
pub fn recommend(graph: &KnowledgeGraph, element: Element<'_>, config: &SearchConfig) -> Result<Vec<ScoredNode>, SearchError> {
    let config = SearchConfig {
        result_types: BTreeSet::from([NodeType::FC]),
        ..config.clone()
    };
    config.validate()?;
    let base = match element {
        Element::Id(id) => match graph.node(id) {
            Some(node) if node.node_type == NodeType::PE => vec![ScoredNode {
                id: id.to_owned(),
                score: 1.0,
                base: true,
                best_path: Vec::new(),
                depth_used: 0,
            }],
            _ => return Err(SearchError::UnknownElement(id.to_owned())),
        },
        Element::Text(text) => {
            let query = parse_query(text, graph.rules(), graph.model())?;
            match_base_nodes(graph, &query)
        }
    };
    Ok(rank(graph, expand(graph, &base, &config), &config))
}

/// Wire form of a ranked result, shared by the HTTP service and `--json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub id: String,
    pub label: String,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub score: f64,
    pub base: bool,
    pub path: Vec<PathStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub results: Vec<ResultRecord>,
}

impl SearchResponse {
    pub fn new(graph: &KnowledgeGraph, results: &[ScoredNode]) -> SearchResponse {
        SearchResponse {
            results: results
                .iter()
                .filter_map(|r| {
                    let node = graph.node(&r.id)?;
                    Some(ResultRecord {
                        id: r.id.clone(),
                        label: node.label.clone(),
                        node_type: node.node_type,
                        score: r.score,
                        base: r.base,
                        path: r.best_path.clone(),
                    })
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::DomainRules;
    use crate::kgraph::{Edge, GraphBuilder, GraphConfig, Node, Payload};
    use crate::vectorize::{DocumentVector, NGram, TfidfModel};

    fn doc_node(id: &str, t: NodeType, terms: &[&str]) -> Node {
        Node {
            id: id.into(),
            node_type: t,
            label: format!("label {id}"),
            payload: Payload::Vector(DocumentVector {
                doc_id: id.into(),
                capacity: 20,
                terms: terms.iter().map(|k| (k.to_string(), 1.0)).collect(),
            }),
            structure_parent: None,
        }
    }

    fn gram(terms: &[&str], docs: &[&str]) -> NGram {
        NGram::new(
            terms.iter().map(|s| s.to_string()).collect(),
            docs.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    fn model(terms: &[&str]) -> TfidfModel {
        TfidfModel::from_counts(10, terms.iter().map(|t| (t.to_string(), 1)).collect()).unwrap()
    }

    /// FC1 and FC2 share one trigram, PE1 shares another with FC3, and
    /// PE1 - PE2 - PE3 is a chain.
    fn fixture() -> KnowledgeGraph {
        let mut b = GraphBuilder::new(GraphConfig::default());
        b.add_nodes([
            doc_node("FC1", NodeType::FC, &["osc"]),
            doc_node("FC2", NodeType::FC, &["drift"]),
            doc_node("FC3", NodeType::FC, &["brownout"]),
            doc_node("FC4", NodeType::FC, &["osc"]),
            doc_node("PE1", NodeType::PE, &["regul"]),
            doc_node("PE2", NodeType::PE, &["ldo"]),
            doc_node("PE3", NodeType::PE, &["bandgap"]),
            doc_node("PE9", NodeType::PE, &["isol"]),
        ])
        .unwrap();
        b.insert_linking_nodes(&[gram(&["kq", "zv", "wx"], &["FC1", "FC2"]), gram(&["mq", "nv", "rx"], &["FC3", "PE1"])])
            .unwrap();
        let g = b
            .finish(
                DomainRules::default(),
                model(&["osc", "drift", "brownout", "regul", "ldo", "bandgap", "isol"]),
            )
            .unwrap();
        let mut edges = g.edges().to_vec();
        edges.push(Edge::new("PE1", "PE2", EdgeCategory::PePe, 1.0));
        edges.push(Edge::new("PE2", "PE3", EdgeCategory::PePe, 1.0));
        KnowledgeGraph::new(
            g.config().clone(),
            g.rules().clone(),
            g.model().clone(),
            g.nodes().to_vec(),
            edges,
        )
        .unwrap()
    }

    fn all_docs(depth: usize) -> SearchConfig {
        SearchConfig {
            depth,
            result_types: NodeType::DOCUMENT_TYPES.into_iter().collect(),
            limit: usize::MAX,
            min_score: 1e-9,
        }
    }

    fn seed(id: &str, score: f64) -> ScoredNode {
        ScoredNode {
            id: id.into(),
            score,
            base: true,
            best_path: vec![],
            depth_used: 0,
        }
    }

    #[test]
    fn base_by_cosine_identity() {
        let g = fixture();
        let q = parse_query("drift", g.rules(), g.model()).unwrap();
        let base = match_base_nodes(&g, &q);
        assert_eq!(base.len(), 1);
        assert_eq!(base[0].id, "FC2");
        assert_eq!(base[0].score, 1.0);
    }

    #[test]
    fn base_by_trigram_linking_node() {
        let g = fixture();
        let q = parse_query("kq zv wx", g.rules(), g.model()).unwrap();
        let base = match_base_nodes(&g, &q);
        let ids: Vec<_> = base.iter().map(|b| (b.id.as_str(), b.score)).collect();
        assert_eq!(ids, vec![("FC1", 1.0), ("FC2", 1.0)]);
    }

    #[test]
    fn no_overlap_no_base() {
        let g = fixture();
        let q = parse_query("unrelated words", g.rules(), g.model()).unwrap();
        assert!(match_base_nodes(&g, &q).is_empty());
    }

    #[test]
    fn depth_zero_is_base_only() {
        let g = fixture();
        let out = expand(&g, &[seed("FC1", 1.0)], &all_docs(0));
        assert_eq!(out.len(), 1);
        assert!(out[0].base);
    }

    #[test]
    fn linking_node_is_one_hop() {
        let g = fixture();
        let out = expand(&g, &[seed("FC1", 1.0)], &all_docs(1));
        let fc2 = out.iter().find(|n| n.id == "FC2").unwrap();
        assert_eq!(fc2.score, 1.0);
        assert_eq!(fc2.depth_used, 1);
        assert_eq!(
            fc2.best_path,
            vec![
                PathStep { category: EdgeCategory::FcLn, weight: 1.0 },
                PathStep { category: EdgeCategory::FcLn, weight: 1.0 }
            ]
        );
        assert!(!out.iter().any(|n| n.id.starts_with("ln:")));
    }

    #[test]
    fn hop_bound_respected() {
        let g = fixture();
        let out = expand(&g, &[seed("PE1", 0.8)], &all_docs(1));
        let pe2 = out.iter().find(|n| n.id == "PE2").unwrap();
        assert!((pe2.score - 0.8).abs() < 1e-12);
        assert!(!out.iter().any(|n| n.id == "PE3"));
        let out2 = expand(&g, &[seed("PE1", 0.8)], &all_docs(2));
        assert!(out2.iter().any(|n| n.id == "PE3"));
    }

    #[test]
    fn min_score_prunes() {
        let g = fixture();
        let cfg = SearchConfig { min_score: 0.9, ..all_docs(2) };
        let out = expand(&g, &[seed("PE1", 0.8)], &cfg);
        assert!(out.is_empty());
    }

    #[test]
    fn search_ranks_and_ties_by_id() {
        let g = fixture();
        let cfg = SearchConfig { depth: 0, ..SearchConfig::default() };
        let out = search(&g, "osc", &cfg).unwrap();
        let ids: Vec<_> = out.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["FC1", "FC4"]);
        let top = search(&g, "osc", &SearchConfig { limit: 1, ..cfg.clone() }).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].id, "FC1");
    }

    #[test]
    fn result_type_filter_can_empty_results() {
        let g = fixture();
        let out = search(&g, "bandgap", &SearchConfig { depth: 0, ..SearchConfig::default() }).unwrap();
        assert!(out.is_empty());
        assert!(matches!(search(&g, "the of", &SearchConfig::default()), Err(SearchError::EmptyQuery)));
    }

    #[test]
    fn ln_result_type_rejected() {
        let g = fixture();
        let cfg = SearchConfig {
            result_types: BTreeSet::from([NodeType::LN]),
            ..SearchConfig::default()
        };
        assert!(matches!(search(&g, "osc", &cfg), Err(SearchError::InvalidConfig(_))));
    }

    #[test]
    fn recommend_through_trigram() {
        let g = fixture();
        let out = recommend(&g, Element::Id("PE1"), &SearchConfig::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].id, "FC3");
        assert_eq!(out[0].score, 1.0);
    }

    #[test]
    fn recommend_isolated_and_unknown() {
        let g = fixture();
        assert!(recommend(&g, Element::Id("PE9"), &SearchConfig::default()).unwrap().is_empty());
        assert!(matches!(
            recommend(&g, Element::Id("nope"), &SearchConfig::default()),
            Err(SearchError::UnknownElement(_))
        ));
        assert!(matches!(
            recommend(&g, Element::Id("FC1"), &SearchConfig::default()),
            Err(SearchError::UnknownElement(_))
        ));
    }

    #[test]
    fn recommend_from_text() {
        let g = fixture();
        let out = recommend(&g, Element::Text("regul"), &SearchConfig::default()).unwrap();
        assert_eq!(out.iter().map(|n| n.id.as_str()).collect::<Vec<_>>(), ["FC3"]);
    }

    #[test]
    fn response_records_carry_labels() {
        let g = fixture();
        let out = search(&g, "drift", &SearchConfig { depth: 0, ..SearchConfig::default() }).unwrap();
        let resp = SearchResponse::new(&g, &out);
        let json = serde_json::to_value(&resp).unwrap();
        let first = &json["results"][0];
        assert_eq!(first["id"], "FC2");
        assert_eq!(first["type"], "FC");
        assert_eq!(first["label"], "label FC2");
        assert!(first["path"].is_array());
    }

    #[test]
    fn reachability_matches_expand() {
        let g = fixture();
        for r in 0..3 {
            let (docs, _) = reachable_within(&g, g.index_of("PE1").unwrap(), r);
            let got: BTreeSet<usize> = expand(&g, &[seed("PE1", 1.0)], &all_docs(r))
                .iter()
                .map(|n| g.index_of(&n.id).unwrap())
                .collect();
            assert_eq!(docs, got);
        }
    }
}
