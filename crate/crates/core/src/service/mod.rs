//! Read-only HTTP API over one immutable graph.

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::kgraph::{graph_stats, import_graph, Edge, EdgeCategory, GraphError, KnowledgeGraph, Node, NodeType};
use crate::search::{reachable_within, recommend, search, Element, SearchConfig, SearchError, SearchResponse};

pub const MAX_SUBGRAPH_RADIUS: usize = 2;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub graph_path: PathBuf,
    pub search: SearchConfig,
    /// Allowed browser origins; empty disables CORS headers.
    pub cors_origins: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot load graph: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid service config: {0}")]
    InvalidConfig(String),
    #[error("cannot bind: {0}")]
    Io(#[from] std::io::Error),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Graph(e) => e.code(),
            ServiceError::InvalidConfig(_) => "INVALID_CONFIG",
            ServiceError::Io(_) => "IO_ERROR",
        }
    }
}

struct AppState {
    graph: KnowledgeGraph,
    defaults: SearchConfig,
}

/// Error body `{"code","message"}` with its HTTP status.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> ApiError {
        let status = match e {
            SearchError::EmptyQuery => StatusCode::UNPROCESSABLE_ENTITY,
            SearchError::UnknownElement(_) => StatusCode::NOT_FOUND,
            SearchError::InvalidConfig(_) => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"code": self.code, "message": self.message}))).into_response()
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchRequest {
    query: String,
    depth: Option<usize>,
    limit: Option<usize>,
    result_types: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecommendRequest {
    element_id: Option<String>,
    element_text: Option<String>,
    depth: Option<usize>,
    limit: Option<usize>,
}

fn overlay(defaults: &SearchConfig, depth: Option<usize>, limit: Option<usize>) -> SearchConfig {
    SearchConfig {
        depth: depth.unwrap_or(defaults.depth),
        limit: limit.unwrap_or(defaults.limit),
        ..defaults.clone()
    }
}

pub fn parse_result_types(names: &[String]) -> Result<BTreeSet<NodeType>, SearchError> {
    names
        .iter()
        .map(|n| NodeType::parse(n.trim()).ok_or_else(|| SearchError::InvalidConfig(format!("unknown node type {n}"))))
        .collect()
}

async fn post_search(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<SearchResponse>, ApiError> {
    let req: SearchRequest = parse_body(&body)?;
    let mut config = overlay(&state.defaults, req.depth, req.limit);
    if let Some(types) = &req.result_types {
        config.result_types = parse_result_types(types)?;
    }
    let results = search(&state.graph, &req.query, &config)?;
    Ok(Json(SearchResponse::new(&state.graph, &results)))
}

async fn post_recommend(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<SearchResponse>, ApiError> {
    let req: RecommendRequest = parse_body(&body)?;
    let element = match (&req.element_id, &req.element_text) {
        (Some(id), None) => Element::Id(id),
        (None, Some(text)) => Element::Text(text),
        _ => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "BAD_REQUEST",
                "give exactly one of element_id and element_text",
            ))
        }
    };
    let config = overlay(&state.defaults, req.depth, req.limit);
    let results = recommend(&state.graph, element, &config)?;
    Ok(Json(SearchResponse::new(&state.graph, &results)))
}

async fn get_stats(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    Json(graph_stats(&state.graph))
}

#[derive(Debug, Serialize)]
struct Neighbor<'a> {
    id: &'a str,
    #[serde(rename = "type")]
    node_type: NodeType,
    category: EdgeCategory,
    weight: f64,
}

#[derive(Debug, Serialize)]
struct NodeDetail<'a> {
    #[serde(flatten)]
    node: &'a Node,
    neighbors: Vec<Neighbor<'a>>,
}

fn unknown_node(id: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_NODE", format!("unknown node {id}"))
}

async fn get_node(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let g = &state.graph;
    let idx = g.index_of(&id).ok_or_else(|| unknown_node(&id))?;
    let neighbors = g
        .neighbors(idx)
        .iter()
        .map(|&(v, e)| {
            let (node, edge) = (g.node_at(v), g.edge_at(e));
            Neighbor {
                id: &node.id,
                node_type: node.node_type,
                category: edge.category,
                weight: edge.weight,
            }
        })
        .collect();
    Ok(Json(NodeDetail {
        node: g.node_at(idx),
        neighbors,
    })
    .into_response())
}

#[derive(Debug, Deserialize)]
struct SubgraphParams {
    node: String,
    #[serde(default)]
    radius: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Subgraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// Everything within `radius` logical hops of `id`, linking nodes included,
/// with the edges among them.
pub fn subgraph(graph: &KnowledgeGraph, id: &str, radius: usize) -> Result<Subgraph, GraphError> {
    let seed = graph.index_of(id).ok_or_else(|| GraphError::UnknownNode(id.to_owned()))?;
    let (docs, links) = if graph.node_at(seed).node_type == NodeType::LN {
        // an LN seed behaves like the relation it reifies: its postings are
        // one hop away
        let mut docs = BTreeSet::new();
        let mut links = BTreeSet::from([seed]);
        if radius > 0 {
            for &(d, _) in graph.neighbors(seed) {
                let (more, more_links) = reachable_within(graph, d, radius - 1);
                docs.extend(more);
                links.extend(more_links);
            }
        }
        (docs, links)
    } else {
        reachable_within(graph, seed, radius)
    };
    let keep: BTreeSet<usize> = docs.union(&links).copied().collect();
    let mut edges = Vec::new();
    for &u in &keep {
        for &(v, e) in graph.neighbors(u) {
            if u < v && keep.contains(&v) {
                edges.push(graph.edge_at(e).clone());
            }
        }
    }
    edges.sort_by(|x, y| (&x.a, &x.b, x.category).cmp(&(&y.a, &y.b, y.category)));
    Ok(Subgraph {
        nodes: keep.iter().map(|&i| graph.node_at(i).clone()).collect(),
        edges,
    })
}

async fn get_subgraph(
    State(state): State<Arc<AppState>>,
    params: Result<Query<SubgraphParams>, axum::extract::rejection::QueryRejection>,
) -> Result<Json<Subgraph>, ApiError> {
    let Query(params) =
        params.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", e.body_text()))?;
    if params.radius > MAX_SUBGRAPH_RADIUS {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "INVALID_RADIUS",
            format!("radius must be at most {MAX_SUBGRAPH_RADIUS}"),
        ));
    }
    subgraph(&state.graph, &params.node, params.radius)
        .map(Json)
        .map_err(|_| unknown_node(&params.node))
}

async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", "no such endpoint")
}

fn cors_layer(origins: &[String]) -> Result<Option<CorsLayer>, ServiceError> {
    if origins.is_empty() {
        return Ok(None);
    }
    let values = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|_| ServiceError::InvalidConfig(format!("bad CORS origin {o}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(
        CorsLayer::new()
            .allow_origin(AllowOrigin::list(values))
            .allow_methods([Method::GET, Method::POST])
            .allow_headers([axum::http::header::CONTENT_TYPE]),
    ))
}

pub fn router(graph: KnowledgeGraph, defaults: SearchConfig, cors_origins: &[String]) -> Result<Router, ServiceError> {
    defaults
        .validate()
        .map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
    let state = Arc::new(AppState { graph, defaults });
    let app = Router::new()
        .route("/search", post(post_search))
        .route("/recommend", post(post_recommend))
        .route("/stats", get(get_stats))
        .route("/nodes/{id}", get(get_node))
        .route("/subgraph", get(get_subgraph))
        .fallback(fallback)
        .with_state(state);
    Ok(match cors_layer(cors_origins)? {
        Some(layer) => app.layer(layer),
        None => app,
    })
}

/// Loads the graph, binds, and serves until ctrl-c. Fails before binding if
/// the graph does not load.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let graph = import_graph(&config.graph_path)?;
    let app = router(graph, config.search, &config.cors_origins)?;
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
