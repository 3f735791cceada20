mod common;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use lessonsgraph::search::SearchConfig;
use lessonsgraph::service::router;
use serde_json::json;

use common::{call, fixture_graph, get, post};

fn app() -> axum::Router {
    router(fixture_graph(), SearchConfig::default(), &[]).unwrap()
}

fn ids(v: &serde_json::Value, key: &str) -> Vec<String> {
    v[key].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap().to_owned()).collect()
}

#[tokio::test]
async fn stats_endpoint() {
    let (status, v) = get(&app(), "/stats").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["total_nodes"], 50);
    assert_eq!(v["total_relations"], 113);
}

#[tokio::test]
async fn search_endpoint() {
    let app = app();
    let (status, v) = post(&app, "/search", json!({"query": "ring oscillator frequency drift", "depth": 2})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ids(&v, "results"), ["fc01", "fc03", "fc05", "fc02", "fc04"]);
    let first = &v["results"][0];
    assert_eq!(first["type"], "FC");
    assert_eq!(first["score"], 1.0);

    let (_, v) = post(&app, "/search", json!({"query": "ring oscillator", "depth": 0, "limit": 1})).await;
    assert_eq!(v["results"].as_array().unwrap().len(), 1);

    let (_, v) = post(&app, "/search", json!({"query": "bandgap", "depth": 0, "result_types": ["PE"]})).await;
    assert!(ids(&v, "results").iter().all(|id| id.starts_with("pe-")));
}

#[tokio::test]
async fn search_errors() {
    let app = app();
    let (status, v) = post(&app, "/search", json!({"query": "the of"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "EMPTY_QUERY");

    let (status, v) = post(&app, "/search", json!({"query": "x", "result_types": ["LN"]})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "INVALID_SEARCH_CONFIG");

    let (status, v) = post(&app, "/search", json!({"qury": "x"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "BAD_REQUEST");

    let req = Request::post("/search").body(Body::from("{not json")).unwrap();
    let (status, _) = call(&app, req).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn recommend_endpoint() {
    let app = app();
    let (status, v) = post(&app, "/recommend", json!({"element_id": "pe-esd"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ids(&v, "results")[0], "fc04");

    let (status, v) = post(&app, "/recommend", json!({"element_text": "bandgap reference trim", "depth": 0})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(ids(&v, "results").contains(&"fc02".to_owned()));

    let (status, v) = post(&app, "/recommend", json!({"element_id": "pe-nothing"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "UNKNOWN_ELEMENT");

    let (status, _) = post(&app, "/recommend", json!({"element_id": "pe-esd", "element_text": "x"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = post(&app, "/recommend", json!({})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn node_endpoint() {
    let app = app();
    let (status, v) = get(&app, "/nodes/pe-esd").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["id"], "pe-esd");
    assert_eq!(v["type"], "PE");
    let neighbors = v["neighbors"].as_array().unwrap();
    assert!(neighbors.iter().any(|n| n["id"] == "pe-io" && n["category"] == "PE_PE"));

    let (status, v) = get(&app, "/nodes/nope").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "UNKNOWN_NODE");
}

#[tokio::test]
async fn subgraph_endpoint() {
    let app = app();
    let (status, v) = get(&app, "/subgraph?node=fc04&radius=0").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ids(&v, "nodes"), ["fc04"]);
    assert!(v["edges"].as_array().unwrap().is_empty());

    // fc04 and pe-esd are joined through an LN, which must come along
    let (_, v) = get(&app, "/subgraph?node=fc04&radius=1").await;
    let nodes = ids(&v, "nodes");
    assert!(nodes.contains(&"pe-esd".to_owned()));
    assert!(nodes.contains(&"ln:electrostatic discharge".to_owned()));
    for e in v["edges"].as_array().unwrap() {
        assert!(nodes.contains(&e["a"].as_str().unwrap().to_owned()));
        assert!(nodes.contains(&e["b"].as_str().unwrap().to_owned()));
    }

    let (_, v) = get(&app, "/subgraph?node=ln:electrostatic%20discharge&radius=1").await;
    let nodes = ids(&v, "nodes");
    for id in ["fc04", "pe-esd", "pe-io"] {
        assert!(nodes.contains(&id.to_owned()), "{nodes:?}");
    }

    let (status, v) = get(&app, "/subgraph?node=fc04&radius=3").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "INVALID_RADIUS");
    let (status, _) = get(&app, "/subgraph?node=nope&radius=1").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = get(&app, "/subgraph?radius=1").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_route() {
    let (status, v) = get(&app(), "/nowhere").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "NOT_FOUND");
}

#[tokio::test]
async fn cors_allows_listed_origin_only() {
    let app = router(fixture_graph(), SearchConfig::default(), &["http://localhost:3000".into()]).unwrap();
    let req = |origin: &str| {
        Request::get("/stats")
            .header("origin", origin)
            .body(Body::empty())
            .unwrap()
    };
    let resp = tower::ServiceExt::oneshot(app.clone(), req("http://localhost:3000")).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:3000");
    let resp = tower::ServiceExt::oneshot(app, req("http://evil.example")).await.unwrap();
    assert!(resp.headers().get("access-control-allow-origin").is_none());

    assert!(router(fixture_graph(), SearchConfig::default(), &["bad\norigin".into()]).is_err());
}

#[tokio::test]
async fn invalid_defaults_rejected() {
    let defaults = SearchConfig {
        min_score: 0.0,
        ..SearchConfig::default()
    };
    assert!(router(fixture_graph(), defaults, &[]).is_err());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_agree() {
    let app = app();
    let body = json!({"query": "supply droop during reset", "depth": 2});
    let handles: Vec<_> = (0..32)
        .map(|_| {
            let app = app.clone();
            let body = body.clone();
            tokio::spawn(async move { post(&app, "/search", body).await })
        })
        .collect();
    let mut outs = Vec::new();
    for h in handles {
        outs.push(h.await.unwrap());
    }
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(outs[0].0, StatusCode::OK);
}
