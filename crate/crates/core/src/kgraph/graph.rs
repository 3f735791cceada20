use std::collections::{BTreeSet, HashMap};

use super::{
    linking_weight, Edge, EdgeCategory, GraphConfig, GraphError, Node, NodeType, Payload,
};
use crate::ingest::DomainRules;
use crate::vectorize::TfidfModel;

/// An immutable, validated knowledge graph. Nodes are kept sorted by id and
/// edges by (a, b, category), so serialization is canonical.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    config: GraphConfig,
    rules: DomainRules,
    model: TfidfModel,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
    ngram_index: HashMap<Vec<String>, usize>,
}

impl KnowledgeGraph {
    pub fn new(
        config: GraphConfig,
        rules: DomainRules,
        model: TfidfModel,
        mut nodes: Vec<Node>,
        mut edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        nodes.sort_by(|x, y| x.id.cmp(&y.id));
        let mut index = HashMap::with_capacity(nodes.len());
        let mut ngram_index = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if node.id.is_empty() {
                return Err(invalid("empty node id"));
            }
            if index.insert(node.id.clone(), i).is_some() {
                return Err(invalid(format!("duplicate node {}", node.id)));
            }
            match (&node.payload, node.node_type) {
                (Payload::Ngram(g), NodeType::LN) => {
                    if ngram_index.insert(g.terms().to_vec(), i).is_some() {
                        return Err(invalid(format!("duplicate linking pattern at {}", node.id)));
                    }
                }
                (Payload::Vector(_), t) if t.is_document() => {}
                _ => return Err(invalid(format!("payload does not match type of {}", node.id))),
            }
            if node.structure_parent.is_some() && node.node_type != NodeType::PE {
                return Err(invalid(format!("structure_parent on non-PE node {}", node.id)));
            }
        }

        for e in edges.iter_mut() {
            if e.a > e.b {
                std::mem::swap(&mut e.a, &mut e.b);
            }
        }
        edges.sort_by(|x, y| {
            (x.a.as_str(), x.b.as_str(), x.category).cmp(&(y.a.as_str(), y.b.as_str(), y.category))
        });

        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut seen = BTreeSet::new();
        for (ei, e) in edges.iter().enumerate() {
            let (&ia, &ib) = match (index.get(&e.a), index.get(&e.b)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(invalid(format!("edge {}-{} has a missing endpoint", e.a, e.b))),
            };
            if ia == ib {
                return Err(invalid(format!("self-loop on {}", e.a)));
            }
            if !seen.insert((ia, ib, e.category)) {
                return Err(invalid(format!("duplicate {} edge {}-{}", e.category, e.a, e.b)));
            }
            if !(e.weight > 0.0 && e.weight <= 1.0) {
                return Err(invalid(format!("weight {} outside (0,1] on {}-{}", e.weight, e.a, e.b)));
            }
            let (ta, tb) = (nodes[ia].node_type, nodes[ib].node_type);
            if EdgeCategory::between(ta, tb) != Some(e.category) {
                return Err(invalid(format!("{} edge between {ta} and {tb}", e.category)));
            }
            if e.category.is_linking() {
                let ln = if ta == NodeType::LN { &nodes[ia] } else { &nodes[ib] };
                let n = ln.ngram().map(|g| g.n()).unwrap_or(0);
                if e.weight != linking_weight(n) {
                    return Err(invalid(format!("linking edge to {} has weight {}", ln.id, e.weight)));
                }
            }
            if let Some(meta) = &e.direction_meta {
                let ok = e.category == EdgeCategory::PePe
                    && ((meta.parent == e.a && meta.child == e.b)
                        || (meta.parent == e.b && meta.child == e.a));
                if !ok {
                    return Err(invalid(format!("bad direction_meta on {}-{}", e.a, e.b)));
                }
            }
            adjacency[ia].push((ib, ei));
            adjacency[ib].push((ia, ei));
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.node_type == NodeType::LN && adjacency[i].len() < 2 {
                return Err(invalid(format!("linking node {} links fewer than two documents", node.id)));
            }
        }

        Ok(KnowledgeGraph {
            config,
            rules,
            model,
            nodes,
            edges,
            index,
            adjacency,
            ngram_index,
        })
    }

    pub fn config(&self) -> &GraphConfig {
        &self.config
    }

    pub fn rules(&self) -> &DomainRules {
        &self.rules
    }

    pub fn model(&self) -> &TfidfModel {
        &self.model
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn node_at(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn edge_at(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    /// (neighbor index, edge index) pairs, sorted by neighbor.
    pub fn neighbors(&self, idx: usize) -> &[(usize, usize)] {
        &self.adjacency[idx]
    }

    /// The linking node that reifies this exact term pattern, if any.
    pub fn linking_node(&self, terms: &[String]) -> Option<usize> {
        self.ngram_index.get(terms).copied()
    }

    pub fn count_nodes(&self, node_type: NodeType) -> usize {
        self.nodes.iter().filter(|n| n.node_type == node_type).count()
    }

    pub fn count_edges(&self, category: EdgeCategory) -> usize {
        self.edges.iter().filter(|e| e.category == category).count()
    }
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidGraph(msg.into())
}
