pub mod cli;
pub mod ingest;
pub mod kgraph;
pub mod metrics;
pub mod search;
pub mod service;
pub mod vectorize;

#[cfg(test)]
pub(crate) mod testutil;
