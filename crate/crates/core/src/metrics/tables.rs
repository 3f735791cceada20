use std::io::Write;

use super::visibility::render_columns;
use super::MetricsError;
use crate::kgraph::{graph_stats, GraphStats, KnowledgeGraph, RelationType};

fn relation_type_str(t: RelationType) -> &'static str {
    match t {
        RelationType::IntraNodeType => "intra_node_type",
        RelationType::InterNodeType => "inter_node_type",
    }
}

const CSV_HEADER: [&str; 5] = ["table", "relation_type", "category", "count", "percent"];

/// Relation and node tables for one graph, renderable as text or CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTables {
    pub stats: GraphStats,
}

pub fn report_tables(graph: &KnowledgeGraph) -> ReportTables {
    ReportTables {
        stats: graph_stats(graph),
    }
}

impl ReportTables {
    fn relation_rows(&self) -> Vec<[String; 3]> {
        self.stats
            .relations
            .iter()
            .map(|r| {
                [
                    relation_type_str(r.relation_type).to_owned(),
                    r.category.as_str().to_owned(),
                    r.count.to_string(),
                ]
            })
            .collect()
    }

    fn node_rows(&self) -> Vec<[String; 3]> {
        self.stats
            .nodes
            .iter()
            .map(|n| [n.node_type.as_str().to_owned(), n.count.to_string(), format!("{}%", n.percent)])
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("Relations\n");
        out.push_str(&render_columns(&["relation type", "category", "count"], &self.relation_rows()));
        out.push_str(&format!("total relations: {}\n\nNodes\n", self.stats.total_relations));
        out.push_str(&render_columns(&["type", "count", "percent"], &self.node_rows()));
        out.push_str(&format!("total nodes: {}\n", self.stats.total_nodes));
        out
    }

    /// Column order is fixed: table, relation_type, category, count, percent.
    pub fn write_csv(&self, out: impl Write) -> Result<(), MetricsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.stats.relations {
            w.write_record([
                "relations",
                relation_type_str(r.relation_type),
                r.category.as_str(),
                &r.count.to_string(),
                "",
            ])?;
        }
        for n in &self.stats.nodes {
            w.write_record(["nodes", "", n.node_type.as_str(), &n.count.to_string(), &n.percent.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DomainRules, SourceType};
    use crate::kgraph::{build_graph, GraphConfig};
    use crate::testutil::typed_doc;
    use crate::vectorize::TfidfModel;

    /// Two FCs sharing one trigram plus an unrelated PE, pruned down to the
    /// trigram LN: 2 FC, 1 LN, 1 PE.
    fn tiny() -> KnowledgeGraph {
        let docs = vec![
            typed_doc("fc1", SourceType::FailureCase, &[&["ring", "osc", "drift"]]),
            typed_doc("fc2", SourceType::FailureCase, &[&["ring", "osc", "drift"]]),
            typed_doc("pe1", SourceType::ProjectElement, &[&["chip"]]),
        ];
        let model = TfidfModel::fit(&docs).unwrap();
        let g = build_graph(&docs, &DomainRules::default(), &model, &GraphConfig::default()).unwrap();
        let keep: Vec<_> = g
            .nodes()
            .iter()
            .filter(|n| n.ngram().is_none_or(|ng| ng.n() == 3))
            .cloned()
            .collect();
        let ids: std::collections::BTreeSet<_> = keep.iter().map(|n| n.id.clone()).collect();
        let edges = g
            .edges()
            .iter()
            .filter(|e| ids.contains(&e.a) && ids.contains(&e.b))
            .cloned()
            .collect();
        KnowledgeGraph::new(g.config().clone(), g.rules().clone(), g.model().clone(), keep, edges).unwrap()
    }

    #[test]
    fn tiny_graph_quarters() {
        let t = report_tables(&tiny());
        let csv = t.to_csv();
        assert!(csv.contains("nodes,,FC,2,50\n"), "{csv}");
        assert!(csv.contains("nodes,,LN,1,25\n"));
        assert!(csv.contains("nodes,,PE,1,25\n"));
        assert!(csv.starts_with("table,relation_type,category,count,percent\n"));
        let text = t.to_text();
        assert!(text.contains("FC    2      50%"), "{text}");
    }

    #[test]
    fn empty_graph_all_zero() {
        let g = KnowledgeGraph::new(
            GraphConfig::default(),
            DomainRules::default(),
            TfidfModel::from_counts(1, Default::default()).unwrap(),
            vec![],
            vec![],
        )
        .unwrap();
        let t = report_tables(&g);
        assert!(t.stats.nodes.iter().all(|n| n.count == 0 && n.percent == 0));
        assert_eq!(t.stats.relations.len(), 4);
        assert!(t.to_csv().contains("relations,intra_node_type,FC_FC,0,\n"));
    }
}
