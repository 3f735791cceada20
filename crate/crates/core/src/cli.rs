//! The `lessonsgraph` command line. Exit codes: 0 success, 1 domain error,
//! 2 usage error.

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use crate::kgraph::{build_from_manifest, export_graph, import_graph, write_graphml, GraphConfig, KnowledgeGraph};
use crate::metrics::{generate_synthetic_corpus, render_columns, report_tables, ExperimentSpec, SyntheticSpec};
use crate::search::{recommend, search, Element, ScoredNode, SearchConfig, SearchResponse};
use crate::service::{parse_result_types, serve, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "lessonsgraph", version, about = "Failure-case knowledge graph: build, search, recommend, serve")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph file from a corpus manifest.
    Build {
        #[arg(long)]
        manifest: PathBuf,
        /// Graph config JSON; defaults apply when omitted.
        #[arg(long, env = "LESSONSGRAPH_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank failure cases (or other document types) for a text query.
    Search {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        query: String,
        #[command(flatten)]
        opts: SearchOpts,
        /// Comma-separated result types, e.g. FC,PE,PS.
        #[arg(long, value_delimiter = ',')]
        types: Option<Vec<String>>,
        #[arg(long)]
        json: bool,
    },
    /// Failure cases related to an inserted design element.
    #[command(group(ArgGroup::new("element").required(true).args(["element_id", "element_text"])))]
    Recommend {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        element_id: Option<String>,
        #[arg(long)]
        element_text: Option<String>,
        #[command(flatten)]
        opts: SearchOpts,
        #[arg(long)]
        json: bool,
    },
    /// Relation and node count tables.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the relation-ablation visibility experiment.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a generated corpus (manifest, rules, documents) to a directory.
    Synth {
        /// Synthetic corpus parameters as JSON; defaults apply when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-export a graph file.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Allowed browser origin; repeatable.
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct SearchOpts {
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 10)]
    limit: usize,
    #[arg(long, default_value_t = 0.05)]
    min_score: f64,
}

impl SearchOpts {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            depth: self.depth,
            limit: self.limit,
            min_score: self.min_score,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExportFormat {
    Graphml,
    Json,
}

/// A domain failure: stable code plus a one-line message.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

macro_rules! impl_from_coded {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError { code: e.code(), message: e.to_string() }
            }
        }
    )*};
}

impl_from_coded!(
    crate::ingest::IngestError,
    crate::kgraph::GraphError,
    crate::search::SearchError,
    crate::metrics::MetricsError,
    crate::service::ServiceError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError {
            code: "IO_ERROR",
            message: e.to_string(),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError {
        code: "IO_ERROR",
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError {
        code: "INVALID_CONFIG",
        message: format!("{}: {e}", path.display()),
    })
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn print_results(graph: &KnowledgeGraph, results: &[ScoredNode], json: bool, out: &mut impl Write) -> Result<(), CliError> {
    let response = SearchResponse::new(graph, results);
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&response).expect("response serializes"))?;
        return Ok(());
    }
    if response.results.is_empty() {
        writeln!(out, "no results")?;
        return Ok(());
    }
    let rows: Vec<[String; 5]> = response
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            [
                (i + 1).to_string(),
                format!("{:.4}", r.score),
                r.node_type.to_string(),
                r.id.clone(),
                single_line(&r.label),
            ]
        })
        .collect();
    write!(out, "{}", render_columns(&["rank", "score", "type", "id", "label"], &rows))?;
    Ok(())
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    match cli.command {
        Command::Build { manifest, config, out: dest } => {
            let config: GraphConfig = match config {
                Some(p) => read_json(&p)?,
                None => GraphConfig::default(),
            };
            let graph = build_from_manifest(&manifest, &config)?;
            export_graph(&graph, &dest)?;
            writeln!(
                out,
                "wrote {}: {} nodes, {} relations",
                dest.display(),
                graph.node_count(),
                graph.edge_count()
            )?;
        }
        Command::Search { graph, query, opts, types, json } => {
            let graph = import_graph(&graph)?;
            let mut config = opts.config();
            if let Some(types) = types {
                config.result_types = parse_result_types(&types)?;
            }
            let results = search(&graph, &query, &config)?;
            print_results(&graph, &results, json, out)?;
        }
        Command::Recommend { graph, element_id, element_text, opts, json } => {
            let graph = import_graph(&graph)?;
            let element = match (&element_id, &element_text) {
                (Some(id), _) => Element::Id(id),
                (None, Some(text)) => Element::Text(text),
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let results = recommend(&graph, element, &opts.config())?;
            print_results(&graph, &results, json, out)?;
        }
        Command::Stats { graph, csv, json } => {
            let graph = import_graph(&graph)?;
            let tables = report_tables(&graph);
            if csv {
                write!(out, "{}", tables.to_csv())?;
            } else if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&tables.stats).expect("stats serialize"))?;
            } else {
                write!(out, "{}", tables.to_text())?;
            }
        }
        Command::Experiment { spec, out: dest } => {
            let mut experiment: ExperimentSpec = read_json(&spec)?;
            if let Some(m) = experiment.manifest.as_mut() {
                if m.is_relative() {
                    *m = spec.parent().unwrap_or(Path::new(".")).join(&*m);
                }
            }
            let report = experiment.run()?;
            let mut file = std::fs::File::create(&dest)?;
            report.write_csv(&mut file)?;
            write!(out, "{}", report.to_text())?;
        }
        Command::Synth { spec, out: dest } => {
            let spec: SyntheticSpec = match spec {
                Some(p) => read_json(&p)?,
                None => SyntheticSpec::default(),
            };
            let corpus = generate_synthetic_corpus(&spec)?;
            corpus.write(&dest)?;
            writeln!(out, "wrote {} files to {}", corpus.files.len(), dest.display())?;
        }
        Command::Export { graph, format, out: dest } => {
            let graph = import_graph(&graph)?;
            let mut buf = Vec::new();
            match format {
                ExportFormat::Graphml => write_graphml(&graph, &mut buf)?,
                ExportFormat::Json => buf.extend_from_slice(graph.to_json().as_bytes()),
            }
            match dest {
                Some(p) => std::fs::write(p, buf)?,
                None => out.write_all(&buf)?,
            }
        }
        Command::Serve { graph, port, host, cors_origins } => {
            let config = ServiceConfig {
                bind: SocketAddr::new(host, port),
                graph_path: graph,
                search: SearchConfig::default(),
                cors_origins,
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(config))?;
        }
    }
    Ok(())
}

/// Parses the process arguments, runs, and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {}: {}", e.code, single_line(&e.message));
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn recommend_needs_an_element() {
        let r = Cli::try_parse_from(["lessonsgraph", "recommend", "--graph", "g.json"]);
        assert!(r.is_err());
        let r = Cli::try_parse_from(["lessonsgraph", "recommend", "--graph", "g", "--element-id", "a", "--element-text", "b"]);
        assert!(r.is_err());
    }

    #[test]
    fn types_split_on_commas() {
        let cli = Cli::try_parse_from(["lessonsgraph", "search", "--graph", "g", "--query", "q", "--types", "FC,PE"]).unwrap();
        match cli.command {
            Command::Search { types, .. } => assert_eq!(types.unwrap(), ["FC", "PE"]),
            _ => unreachable!(),
        }
    }
}
