use std::collections::{BTreeMap, BTreeSet};

use super::{PathStep, Query, ScoredNode, SearchConfig};
use crate::kgraph::{linking_weight, KnowledgeGraph, NodeType};
use crate::vectorize::cosine;

/// Calls `f(target, weight, steps)` for every logical hop out of document
/// node `u`. A pass through a linking node is one hop whose weight is the
/// product of its two edges.
pub(crate) fn for_each_hop(graph: &KnowledgeGraph, u: usize, mut f: impl FnMut(usize, f64, &[PathStep])) {
    for &(x, e) in graph.neighbors(u) {
        let first = graph.edge_at(e);
        let step = PathStep {
            category: first.category,
            weight: first.weight,
        };
        if graph.node_at(x).node_type == NodeType::LN {
            for &(v, e2) in graph.neighbors(x) {
                if v == u {
                    continue;
                }
                let second = graph.edge_at(e2);
                f(
                    v,
                    first.weight * second.weight,
                    &[
                        step.clone(),
                        PathStep {
                            category: second.category,
                            weight: second.weight,
                        },
                    ],
                );
            }
        } else {
            f(x, first.weight, std::slice::from_ref(&step));
        }
    }
}

/// Documents whose vector overlaps the query (score = cosine) plus the
/// postings of every linking node whose pattern occurs in the query
/// (score = max(existing, n/3)).
pub fn match_base_nodes(graph: &KnowledgeGraph, query: &Query) -> Vec<ScoredNode> {
    let mut best: BTreeMap<usize, f64> = BTreeMap::new();
    for (i, node) in graph.nodes().iter().enumerate() {
        let Some(v) = node.vector() else { continue };
        let sim = cosine(&query.vector, &v.terms);
        if sim > 0.0 {
            best.insert(i, sim);
        }
    }
    for pattern in &query.ngrams {
        let Some(ln) = graph.linking_node(pattern) else { continue };
        let w = linking_weight(pattern.len());
        for &(doc, _) in graph.neighbors(ln) {
            let entry = best.entry(doc).or_insert(0.0);
            *entry = entry.max(w);
        }
    }
    best.into_iter()
        .map(|(i, score)| ScoredNode {
            id: graph.node_at(i).id.clone(),
            score,
            base: true,
            best_path: Vec::new(),
            depth_used: 0,
        })
        .collect()
}

#[derive(Clone)]
struct Reach {
    score: f64,
    origin_is_self: bool,
    path: Vec<PathStep>,
    hops: usize,
}

/// Max-product scoring over paths of at most `config.depth` logical hops.
/// Returns every reached document node scoring at least `min_score`, in id
/// order. Result-type filtering is left to the caller.
pub fn expand(graph: &KnowledgeGraph, base: &[ScoredNode], config: &SearchConfig) -> Vec<ScoredNode> {
    let mut reach: Vec<Option<Reach>> = vec![None; graph.node_count()];
    let mut frontier = BTreeSet::new();
    for b in base {
        let Some(i) = graph.index_of(&b.id) else { continue };
        let score = b.score.min(1.0);
        if score < config.min_score || !graph.node_at(i).node_type.is_document() {
            continue;
        }
        if reach[i].as_ref().is_none_or(|r| score > r.score) {
            reach[i] = Some(Reach {
                score,
                origin_is_self: true,
                path: Vec::new(),
                hops: 0,
            });
            frontier.insert(i);
        }
    }

    for hop in 1..=config.depth {
        let mut updates: BTreeMap<usize, Reach> = BTreeMap::new();
        for &u in &frontier {
            let from = reach[u].clone().expect("frontier nodes are reached");
            for_each_hop(graph, u, |v, w, steps| {
                let cand = from.score * w;
                if cand < config.min_score {
                    return;
                }
                let current = updates
                    .get(&v)
                    .or(reach[v].as_ref())
                    .map_or(f64::NEG_INFINITY, |r| r.score);
                if cand > current {
                    let mut path = from.path.clone();
                    path.extend_from_slice(steps);
                    updates.insert(
                        v,
                        Reach {
                            score: cand,
                            origin_is_self: false,
                            path,
                            hops: hop,
                        },
                    );
                }
            });
        }
        if updates.is_empty() {
            break;
        }
        frontier = updates.keys().copied().collect();
        for (v, r) in updates {
            reach[v] = Some(r);
        }
    }

    reach
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let r = r?;
            Some(ScoredNode {
                id: graph.node_at(i).id.clone(),
                score: r.score,
                base: r.origin_is_self,
                best_path: r.path,
                depth_used: r.hops,
            })
        })
        .collect()
}

/// Unweighted reachability under the same hop semantics: the document nodes
/// within `radius` logical hops of `seed`, and the linking nodes passed
/// through on the way.
pub fn reachable_within(graph: &KnowledgeGraph, seed: usize, radius: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut docs = BTreeSet::from([seed]);
    let mut links = BTreeSet::new();
    let mut frontier = vec![seed];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &u in &frontier {
            for &(x, _) in graph.neighbors(u) {
                if graph.node_at(x).node_type == NodeType::LN {
                    links.insert(x);
                    for &(v, _) in graph.neighbors(x) {
                        if docs.insert(v) {
                            next.push(v);
                        }
                    }
                } else if docs.insert(x) {
                    next.push(x);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    (docs, links)
}
