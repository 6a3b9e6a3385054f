//! Cardinality estimation lab for cost-based federated SPARQL engines.
//!
//! Loads N-Triples sources, builds the statistics five engines rely on,
//! estimates per-node cardinalities of left-deep plans, compares them with
//! exact counts and relates the resulting error metrics to runtimes.

pub mod estimators;
pub mod eval;
pub mod fixtures;
pub mod metrics;
pub mod oracle;
pub mod par;
pub mod planner;
pub mod query;
pub mod rdf;
pub mod report;
pub mod stats;
pub mod summaries;
pub mod trace;
