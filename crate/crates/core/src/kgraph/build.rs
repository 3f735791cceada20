use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::{
    linking_weight, DirectionMeta, Edge, EdgeCategory, GraphConfig, GraphError, KnowledgeGraph,
    Node, NodeType, Payload,
};
use crate::ingest::{load_corpus, preprocess_corpus, Corpus, DomainRules, TokenizedDocument};
use crate::vectorize::{distinct_ngrams, document_vector, linking_candidates, NGram, TfidfModel};

/// Distinct n-gram patterns per document id.
pub type PatternSets = BTreeMap<String, BTreeSet<Vec<String>>>;

pub fn linking_node_id(terms: &[String]) -> String {
    format!("ln:{}", terms.join("+"))
}

/// One node per tokenized document, typed by its source and carrying its
/// top-K vector.
pub fn create_document_nodes(docs: &[TokenizedDocument], model: &TfidfModel, capacity: usize) -> Vec<Node> {
    docs.iter()
        .map(|doc| {
            let node_type = NodeType::from_source(doc.source_type);
            Node {
                id: doc.id.clone(),
                node_type,
                label: doc.label.clone(),
                payload: Payload::Vector(document_vector(doc, model, capacity)),
                structure_parent: if node_type == NodeType::PE {
                    doc.parent().map(str::to_owned)
                } else {
                    None
                },
            }
        })
        .collect()
}

type EdgeKey = (String, String, EdgeCategory);

/// Accumulates nodes and edges; edges of categories the config does not
/// enable are silently refused.
#[derive(Debug)]
pub struct GraphBuilder {
    config: GraphConfig,
    nodes: BTreeMap<String, Node>,
    edges: BTreeMap<EdgeKey, Edge>,
}

impl GraphBuilder {
    pub fn new(config: GraphConfig) -> Self {
        GraphBuilder {
            config,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn add_nodes(&mut self, nodes: impl IntoIterator<Item = Node>) -> Result<(), GraphError> {
        for node in nodes {
            if node.id.starts_with("ln:") && node.node_type.is_document() {
                return Err(GraphError::InvalidGraph(format!(
                    "document id {} uses the reserved ln: prefix",
                    node.id
                )));
            }
            if self.nodes.contains_key(&node.id) {
                return Err(GraphError::InvalidGraph(format!("duplicate node {}", node.id)));
            }
            self.nodes.insert(node.id.clone(), node);
        }
        Ok(())
    }

    fn node_type(&self, id: &str) -> Option<NodeType> {
        self.nodes.get(id).map(|n| n.node_type)
    }

    fn add_edge(&mut self, edge: Edge) -> bool {
        if !self.config.enabled(edge.category) {
            return false;
        }
        let key = (edge.a.clone(), edge.b.clone(), edge.category);
        match self.edges.get_mut(&key) {
            Some(existing) if existing.weight >= edge.weight => {}
            Some(existing) => *existing = edge,
            None => {
                self.edges.insert(key, edge);
            }
        }
        true
    }

    /// One LN per candidate, linked to each posting document with weight n/3.
    /// A candidate is skipped when fewer than two of its edges are enabled.
    pub fn insert_linking_nodes(&mut self, candidates: &[NGram]) -> Result<(), GraphError> {
        for gram in candidates {
            if gram.df() < 2 {
                return Err(GraphError::InvalidGraph(format!(
                    "linking candidate {:?} has fewer than two postings",
                    gram.text()
                )));
            }
            let id = linking_node_id(gram.terms());
            if self.nodes.contains_key(&id) {
                return Err(GraphError::InvalidGraph(format!("duplicate linking node {id}")));
            }
            let mut links = Vec::new();
            for doc in gram.postings() {
                let doc_type = self
                    .node_type(doc)
                    .ok_or_else(|| GraphError::UnknownNode(doc.clone()))?;
                let category = EdgeCategory::linking(doc_type)
                    .ok_or_else(|| GraphError::InvalidGraph(format!("posting {doc} is not a document")))?;
                if self.config.enabled(category) {
                    links.push(Edge::new(doc, &id, category, linking_weight(gram.n())));
                }
            }
            if links.len() < 2 {
                continue;
            }
            self.nodes.insert(
                id.clone(),
                Node {
                    id,
                    node_type: NodeType::LN,
                    label: gram.text(),
                    payload: Payload::Ngram(gram.clone()),
                    structure_parent: None,
                },
            );
            for e in links {
                self.add_edge(e);
            }
        }
        Ok(())
    }

    /// FC pairs whose shared pattern mass S (sum of n over shared distinct
    /// n-grams) reaches `min_mass` get an edge of weight min(1, S / cap).
    pub fn link_intra_fc(&mut self, patterns: &PatternSets, min_mass: u32, cap: u32) {
        let mut by_pattern: BTreeMap<&Vec<String>, Vec<&str>> = BTreeMap::new();
        for (doc, set) in patterns {
            if self.node_type(doc) != Some(NodeType::FC) {
                continue;
            }
            for p in set {
                by_pattern.entry(p).or_default().push(doc);
            }
        }
        let mut mass: BTreeMap<(&str, &str), u64> = BTreeMap::new();
        for (pattern, docs) in &by_pattern {
            for (i, a) in docs.iter().enumerate() {
                for b in &docs[i + 1..] {
                    *mass.entry((a, b)).or_insert(0) += pattern.len() as u64;
                }
            }
        }
        let edges: Vec<Edge> = mass
            .into_iter()
            .filter(|&(_, s)| s >= u64::from(min_mass))
            .map(|((a, b), s)| {
                let w = (s as f64 / f64::from(cap)).min(1.0);
                Edge::new(a, b, EdgeCategory::FcFc, w)
            })
            .collect();
        for e in edges {
            self.add_edge(e);
        }
    }

    /// "Is part of" edges from each PE node to its structure parent.
    pub fn link_intra_pe(&mut self) -> Result<(), GraphError> {
        let mut edges = Vec::new();
        for node in self.nodes.values() {
            let Some(parent) = &node.structure_parent else { continue };
            if node.node_type != NodeType::PE {
                continue;
            }
            if self.node_type(parent) != Some(NodeType::PE) {
                return Err(GraphError::DanglingParent(node.id.clone()));
            }
            let mut e = Edge::new(parent, &node.id, EdgeCategory::PePe, 1.0);
            e.direction_meta = Some(DirectionMeta {
                parent: parent.clone(),
                child: node.id.clone(),
            });
            edges.push(e);
        }
        for e in edges {
            self.add_edge(e);
        }
        Ok(())
    }

    /// Cross-type document pairs with vector cosine >= tau.
    pub fn link_inter_vector(&mut self, tau: f64) {
        let docs: Vec<&Node> = self
            .nodes
            .values()
            .filter(|n| n.node_type.is_document() && n.vector().is_some_and(|v| !v.is_empty()))
            .collect();
        let mut by_term: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, node) in docs.iter().enumerate() {
            for term in node.vector().unwrap().terms.keys() {
                by_term.entry(term).or_default().push(i);
            }
        }
        let mut pairs = BTreeSet::new();
        for members in by_term.values() {
            for (k, &i) in members.iter().enumerate() {
                for &j in &members[k + 1..] {
                    if docs[i].node_type != docs[j].node_type {
                        pairs.insert((i.min(j), i.max(j)));
                    }
                }
            }
        }
        let edges: Vec<Edge> = pairs
            .into_iter()
            .filter_map(|(i, j)| {
                let sim = docs[i].vector().unwrap().cosine(docs[j].vector().unwrap());
                (sim >= tau && sim > 0.0)
                    .then(|| Edge::new(&docs[i].id, &docs[j].id, EdgeCategory::Xvec, sim.min(1.0)))
            })
            .collect();
        for e in edges {
            self.add_edge(e);
        }
    }

    pub fn finish(self, rules: DomainRules, model: TfidfModel) -> Result<KnowledgeGraph, GraphError> {
        KnowledgeGraph::new(
            self.config,
            rules,
            model,
            self.nodes.into_values().collect(),
            self.edges.into_values().collect(),
        )
    }
}

/// Full construction: document nodes, then LN, FC-FC, PE-PE and cross-type
/// vector relations, each only when its category is enabled.
pub fn build_graph(
    docs: &[TokenizedDocument],
    rules: &DomainRules,
    model: &TfidfModel,
    config: &GraphConfig,
) -> Result<KnowledgeGraph, GraphError> {
    config.validate()?;
    let mut builder = GraphBuilder::new(config.clone());
    builder.add_nodes(create_document_nodes(docs, model, config.vector_capacity))?;

    if config.any_linking_enabled() {
        let candidates = linking_candidates(docs, &config.ln_constraints)?;
        builder.insert_linking_nodes(&candidates)?;
    }
    if config.enabled(EdgeCategory::FcFc) {
        let mut patterns = PatternSets::new();
        for doc in docs.iter().filter(|d| NodeType::from_source(d.source_type) == NodeType::FC) {
            patterns.insert(doc.id.clone(), distinct_ngrams(doc, config.ln_constraints.n_max)?);
        }
        builder.link_intra_fc(&patterns, config.fc_fc_min_pattern_mass, config.fc_fc_mass_cap);
    }
    if config.enabled(EdgeCategory::PePe) {
        builder.link_intra_pe()?;
    }
    if config.enabled(EdgeCategory::Xvec) {
        builder.link_inter_vector(config.xvec_similarity_threshold);
    }
    builder.finish(rules.clone(), model.clone())
}

/// Preprocess, fit the model, and build, in one step.
pub fn build_from_corpus(corpus: &Corpus, config: &GraphConfig) -> Result<KnowledgeGraph, GraphError> {
    let pre = preprocess_corpus(corpus)?;
    let model = TfidfModel::fit(&pre.documents)?;
    build_graph(&pre.documents, &pre.rules, &model, config)
}

pub fn build_from_manifest(manifest: &Path, config: &GraphConfig) -> Result<KnowledgeGraph, GraphError> {
    build_from_corpus(&load_corpus(manifest)?, config)
}
