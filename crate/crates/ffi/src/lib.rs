//! C ABI for lessonsgraph: load a graph file, search, recommend, and read
//! statistics. Results come back as JSON strings owned by the library.
//!
//! Every function returns an [`LgStatus`]. On failure a one-line message is
//! available from [`lg_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use lessonsgraph::kgraph::{graph_stats, import_graph, GraphError, KnowledgeGraph};
use lessonsgraph::search::{recommend, search, Element, SearchConfig, SearchError, SearchResponse};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    CorruptGraph = 4,
    SchemaVersion = 5,
    EmptyQuery = 6,
    UnknownElement = 7,
    InvalidConfig = 8,
    Internal = 9,
}

/// Opaque handle to a loaded, immutable graph. Safe to share across threads
/// for concurrent reads.
pub struct LgGraph {
    graph: KnowledgeGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(LgStatus, String);

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Failure {
        let status = match e {
            GraphError::Io(_) => LgStatus::Io,
            GraphError::SchemaVersionMismatch(_) => LgStatus::SchemaVersion,
            GraphError::CorruptFile(_) => LgStatus::CorruptGraph,
            _ => LgStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Failure {
        let status = match e {
            SearchError::EmptyQuery => LgStatus::EmptyQuery,
            SearchError::UnknownElement(_) => LgStatus::UnknownElement,
            SearchError::InvalidConfig(_) => LgStatus::InvalidConfig,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LgStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(LgStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LgStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn graph_arg<'a>(g: *const LgGraph) -> Result<&'a KnowledgeGraph, Failure> {
    g.as_ref()
        .map(|h| &h.graph)
        .ok_or_else(|| Failure(LgStatus::NullArgument, "graph is null".into()))
}

unsafe fn write_json(out: *mut *mut c_char, json: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(LgStatus::NullArgument, "output pointer is null".into()));
    }
    let s = CString::new(json).map_err(|_| Failure(LgStatus::Internal, "interior NUL in output".into()))?;
    *out = s.into_raw();
    Ok(())
}

fn config(depth: u32, limit: u32) -> SearchConfig {
    SearchConfig {
        depth: depth as usize,
        limit: limit as usize,
        ..SearchConfig::default()
    }
}

/// Loads a graph file written by `lessonsgraph build`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable. On success
/// `*out` holds a handle to release with [`lg_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn lg_graph_load(path: *const c_char, out: *mut *mut LgGraph) -> LgStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(Failure(LgStatus::NullArgument, "output pointer is null".into()));
        }
        let graph = import_graph(Path::new(path))?;
        *out = Box::into_raw(Box::new(LgGraph { graph }));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from [`lg_graph_load`] and not have been freed. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_free(graph: *mut LgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of nodes in the graph, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lg_graph_node_count(graph: *const LgGraph) -> usize {
    graph.as_ref().map_or(0, |h| h.graph.node_count())
}

/// Ranked failure cases for `query` as `{"results":[...]}` JSON.
///
/// # Safety
/// `graph` must be a live handle, `query` NUL-terminated, `out` writable.
/// Release `*out` with [`lg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lg_search_json(
    graph: *const LgGraph,
    query: *const c_char,
    depth: u32,
    limit: u32,
    out: *mut *mut c_char,
) -> LgStatus {
    guard(|| {
        let g = graph_arg(graph)?;
        let query = str_arg(query, "query")?;
        let results = search(g, query, &config(depth, limit))?;
        write_json(out, serde_json::to_string(&SearchResponse::new(g, &results)).expect("serializes"))
    })
}

/// Failure cases related to project element `element_id`, same JSON shape
/// as [`lg_search_json`].
///
/// # Safety
/// As for [`lg_search_json`].
#[no_mangle]
pub unsafe extern "C" fn lg_recommend_json(
    graph: *const LgGraph,
    element_id: *const c_char,
    depth: u32,
    limit: u32,
    out: *mut *mut c_char,
) -> LgStatus {
    guard(|| {
        let g = graph_arg(graph)?;
        let id = str_arg(element_id, "element_id")?;
        let results = recommend(g, Element::Id(id), &config(depth, limit))?;
        write_json(out, serde_json::to_string(&SearchResponse::new(g, &results)).expect("serializes"))
    })
}

/// Node and relation counts as JSON.
///
/// # Safety
/// `graph` must be a live handle and `out` writable. Release `*out` with
/// [`lg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lg_stats_json(graph: *const LgGraph, out: *mut *mut c_char) -> LgStatus {
    guard(|| {
        let g = graph_arg(graph)?;
        write_json(out, serde_json::to_string(&graph_stats(g)).expect("serializes"))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn lg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn lg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn lg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
