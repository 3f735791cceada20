use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_synthetic_corpus, MetricsError, SyntheticSpec};
use crate::ingest::{load_corpus, preprocess_corpus, Corpus};
use crate::kgraph::{build_graph, EdgeCategory, GraphConfig, KnowledgeGraph, NodeType};
use crate::search::{search, SearchConfig};
use crate::vectorize::TfidfModel;

/// One set of enabled relation categories.
pub type CategorySet = BTreeSet<EdgeCategory>;

fn parse_config(groups: &[String]) -> Result<CategorySet, MetricsError> {
    let mut set = CategorySet::new();
    for g in groups {
        let cats = EdgeCategory::parse_group(g)
            .ok_or_else(|| MetricsError::InvalidSpec(format!("unknown relation category {g}")))?;
        set.extend(cats);
    }
    Ok(set)
}

/// Display form of a category set, with the three linking categories folded
/// into "LN" when all are present.
pub fn config_label(set: &CategorySet) -> String {
    let all_linking = EdgeCategory::LINKING.iter().all(|c| set.contains(c));
    let mut parts = Vec::new();
    let mut ln_done = false;
    for c in set {
        if all_linking && c.is_linking() {
            if !ln_done {
                parts.push("LN".to_owned());
                ln_done = true;
            }
        } else {
            parts.push(c.as_str().to_owned());
        }
    }
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join("+")
    }
}

/// Experiment description as read from JSON. Exactly one of `manifest` and
/// `synthetic` selects the corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub manifest: Option<PathBuf>,
    pub synthetic: Option<SyntheticSpec>,
    pub graph: GraphConfig,
    pub configs: Vec<Vec<String>>,
    pub depths: Vec<usize>,
    pub min_score: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            manifest: None,
            synthetic: Some(SyntheticSpec::default()),
            graph: GraphConfig::default(),
            configs: vec![
                vec!["FC_FC".into()],
                vec!["FC_FC".into(), "LN".into()],
                vec!["FC_FC".into(), "LN".into(), "PE_PE".into()],
            ],
            depths: vec![1, 2],
            min_score: SearchConfig::default().min_score,
        }
    }
}

impl ExperimentSpec {
    pub fn corpus(&self) -> Result<Corpus, MetricsError> {
        match (&self.manifest, &self.synthetic) {
            (Some(m), None) => Ok(load_corpus(m)?),
            (None, Some(s)) => generate_synthetic_corpus(s)?.corpus(),
            _ => Err(MetricsError::InvalidSpec(
                "exactly one of manifest and synthetic must be given".into(),
            )),
        }
    }

    pub fn category_sets(&self) -> Result<Vec<CategorySet>, MetricsError> {
        self.configs.iter().map(|c| parse_config(c)).collect()
    }

    pub fn run(&self) -> Result<VisibilityReport, MetricsError> {
        let corpus = self.corpus()?;
        visibility_experiment(&corpus, &self.graph, &self.category_sets()?, &self.depths, self.min_score)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityRow {
    pub config: String,
    pub categories: Vec<EdgeCategory>,
    pub depth: usize,
    pub queries: usize,
    pub mean_unique_fc: f64,
    pub total_relations: usize,
    /// None when the baseline retrieves nothing at this depth.
    pub gain_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityReport {
    pub rows: Vec<VisibilityRow>,
}

/// One query per failure case: its two highest-ranked vector terms.
pub fn experiment_queries(graph: &KnowledgeGraph) -> Vec<(String, String)> {
    graph
        .nodes()
        .iter()
        .filter(|n| n.node_type == NodeType::FC)
        .map(|n| {
            let terms: Vec<&str> = n
                .vector()
                .map(|v| v.ranked().into_iter().take(2).map(|(t, _)| t).collect())
                .unwrap_or_default();
            (n.id.clone(), terms.join(" "))
        })
        .collect()
}

/// Unique failure cases a query reaches at `depth`, unbounded by any limit.
pub fn fc_results(graph: &KnowledgeGraph, query: &str, depth: usize, min_score: f64) -> Result<BTreeSet<String>, MetricsError> {
    let config = SearchConfig {
        depth,
        result_types: BTreeSet::from([NodeType::FC]),
        limit: usize::MAX,
        min_score,
    };
    Ok(search(graph, query, &config)?.into_iter().map(|r| r.id).collect())
}

fn gain(full: f64, base: f64) -> Option<f64> {
    (base > 0.0).then(|| 100.0 * (full - base) / base)
}

/// Builds one graph per category set and measures how many failure cases the
/// per-document queries reach at each depth, relative to the FC_FC-only
/// baseline at the same depth.
pub fn visibility_experiment(
    corpus: &Corpus,
    graph_config: &GraphConfig,
    configs: &[CategorySet],
    depths: &[usize],
    min_score: f64,
) -> Result<VisibilityReport, MetricsError> {
    let baseline: CategorySet = BTreeSet::from([EdgeCategory::FcFc]);
    if !configs.contains(&baseline) {
        return Err(MetricsError::InvalidSpec("configs must include the FC_FC baseline".into()));
    }
    let pre = preprocess_corpus(corpus)?;
    let model = TfidfModel::fit(&pre.documents)?;
    let graphs: Vec<KnowledgeGraph> = configs
        .par_iter()
        .map(|set| {
            let config = graph_config.clone().with_categories(set.iter().copied());
            build_graph(&pre.documents, &pre.rules, &model, &config)
        })
        .collect::<Result<_, _>>()?;
    let queries = experiment_queries(&graphs[0]);

    let cells: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| depths.iter().map(move |&d| (c, d)))
        .collect();
    let means: Vec<f64> = cells
        .par_iter()
        .map(|&(c, d)| {
            let mut total = 0usize;
            for (_, q) in &queries {
                total += fc_results(&graphs[c], q, d, min_score)?.len();
            }
            Ok(if queries.is_empty() { 0.0 } else { total as f64 / queries.len() as f64 })
        })
        .collect::<Result<_, MetricsError>>()?;

    let base_idx = configs.iter().position(|s| *s == baseline).expect("checked above");
    let base_mean: BTreeMap<usize, f64> = cells
        .iter()
        .zip(&means)
        .filter(|((c, _), _)| *c == base_idx)
        .map(|(&(_, d), &m)| (d, m))
        .collect();

    let rows = cells
        .iter()
        .zip(&means)
        .map(|(&(c, d), &mean)| VisibilityRow {
            config: config_label(&configs[c]),
            categories: configs[c].iter().copied().collect(),
            depth: d,
            queries: queries.len(),
            mean_unique_fc: mean,
            total_relations: graphs[c].edge_count(),
            gain_percent: gain(mean, base_mean[&d]),
        })
        .collect();
    Ok(VisibilityReport { rows })
}

const CSV_HEADER: [&str; 6] = ["config", "depth", "queries", "mean_unique_fc", "total_relations", "gain_percent"];

impl VisibilityReport {
    fn cells(row: &VisibilityRow) -> [String; 6] {
        [
            row.config.clone(),
            row.depth.to_string(),
            row.queries.to_string(),
            format!("{:.4}", row.mean_unique_fc),
            row.total_relations.to_string(),
            row.gain_percent.map_or_else(|| "undefined".into(), |g| format!("{g:.2}")),
        ]
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), MetricsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.write_record(Self::cells(row))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is UTF-8")
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<[String; 6]> = self.rows.iter().map(Self::cells).collect();
        render_columns(&CSV_HEADER, &rows)
    }
}

/// Left-aligned columns separated by two spaces, no trailing whitespace.
pub fn render_columns<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut widths = header.map(str::len);
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                l.push_str("  ");
            }
            l.push_str(&format!("{cell:<w$}"));
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec {
            synthetic: Some(SyntheticSpec {
                failure_cases: 12,
                project_elements: 40,
                pe_roots: 2,
                shared_trigram_prob: 0.1,
                mention_pool: 6,
                ..SyntheticSpec::default()
            }),
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn gain_formula() {
        assert_eq!(gain(1.28, 1.0), Some(28.000000000000004));
        assert_eq!(gain(3.0, 0.0), None);
        assert_eq!(gain(0.0, 0.0), None);
    }

    #[test]
    fn labels_fold_linking() {
        let set = parse_config(&["FC_FC".into(), "LN".into(), "PE_PE".into()]).unwrap();
        assert_eq!(config_label(&set), "FC_FC+PE_PE+LN");
        let partial = parse_config(&["FC_LN".into()]).unwrap();
        assert_eq!(config_label(&partial), "FC_LN");
        assert!(parse_config(&["XX".into()]).is_err());
    }

    #[test]
    fn baseline_required() {
        let spec = ExperimentSpec {
            configs: vec![vec!["LN".into()]],
            ..small_spec()
        };
        assert!(matches!(spec.run(), Err(MetricsError::InvalidSpec(_))));
    }

    #[test]
    fn one_query_per_fc_from_own_vector() {
        let spec = small_spec();
        let corpus = spec.corpus().unwrap();
        let g = crate::kgraph::build_from_corpus(&corpus, &GraphConfig::default()).unwrap();
        let qs = experiment_queries(&g);
        assert_eq!(qs.len(), 12);
        for (id, q) in &qs {
            let v = g.node(id).unwrap().vector().unwrap();
            for t in q.split(' ') {
                assert!(v.terms.contains_key(t));
            }
        }
    }

    #[test]
    fn report_is_deterministic_and_non_negative() {
        let spec = small_spec();
        let a = spec.run().unwrap();
        let b = spec.run().unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 6);
        for row in &a.rows {
            assert!(row.gain_percent.unwrap() >= 0.0, "{row:?}");
        }
        assert!(a.to_csv().starts_with("config,depth,queries,mean_unique_fc,total_relations,gain_percent\n"));
        assert_eq!(a.to_text().lines().count(), 7);
    }
}
