use serde::{Deserialize, Serialize};

use super::{EdgeCategory, KnowledgeGraph, NodeType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationType {
    IntraNodeType,
    InterNodeType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTypeStat {
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub count: usize,
    pub percent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationStat {
    pub relation_type: RelationType,
    pub category: EdgeCategory,
    pub count: usize,
}

/// Node counts with whole-percent shares and edge counts per category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub total_nodes: usize,
    pub total_relations: usize,
    pub nodes: Vec<NodeTypeStat>,
    pub relations: Vec<RelationStat>,
}

/// Rows always present, in table order. PS, PS_LN and XVEC rows are appended
/// only when the graph has any.
const NODE_ROWS: [NodeType; 3] = [NodeType::FC, NodeType::LN, NodeType::PE];
const RELATION_ROWS: [(RelationType, EdgeCategory); 4] = [
    (RelationType::IntraNodeType, EdgeCategory::FcFc),
    (RelationType::IntraNodeType, EdgeCategory::PePe),
    (RelationType::InterNodeType, EdgeCategory::PeLn),
    (RelationType::InterNodeType, EdgeCategory::FcLn),
];
const OPTIONAL_RELATIONS: [(RelationType, EdgeCategory); 2] = [
    (RelationType::InterNodeType, EdgeCategory::PsLn),
    (RelationType::InterNodeType, EdgeCategory::Xvec),
];

pub fn graph_stats(graph: &KnowledgeGraph) -> GraphStats {
    let mut node_rows: Vec<(NodeType, usize)> =
        NODE_ROWS.iter().map(|&t| (t, graph.count_nodes(t))).collect();
    let ps = graph.count_nodes(NodeType::PS);
    if ps > 0 {
        node_rows.push((NodeType::PS, ps));
    }
    let counts: Vec<usize> = node_rows.iter().map(|r| r.1).collect();
    let percents = whole_percentages(&counts);

    let mut relations: Vec<RelationStat> = RELATION_ROWS
        .iter()
        .map(|&(relation_type, category)| RelationStat {
            relation_type,
            category,
            count: graph.count_edges(category),
        })
        .collect();
    for &(relation_type, category) in &OPTIONAL_RELATIONS {
        let count = graph.count_edges(category);
        if count > 0 {
            relations.push(RelationStat {
                relation_type,
                category,
                count,
            });
        }
    }

    GraphStats {
        total_nodes: graph.node_count(),
        total_relations: graph.edge_count(),
        nodes: node_rows
            .into_iter()
            .zip(percents)
            .map(|((node_type, count), percent)| NodeTypeStat {
                node_type,
                count,
                percent,
            })
            .collect(),
        relations,
    }
}

/// Largest-remainder rounding: shares sum to exactly 100 unless all counts
/// are zero, in which case every share is 0.
pub(crate) fn whole_percentages(counts: &[usize]) -> Vec<u32> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut shares: Vec<u32> = counts.iter().map(|&c| (c * 100 / total) as u32).collect();
    let assigned: u32 = shares.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // stable sort keeps row order among equal remainders
    order.sort_by_key(|&i| std::cmp::Reverse(counts[i] * 100 % total));
    for &i in order.iter().take((100 - assigned) as usize) {
        shares[i] += 1;
    }
    shares
}
