//! One row of metrics per (query, engine) pair.

use std::collections::{BTreeSet, HashMap};
use std::convert::Infallible;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use crate::estimators::{Engine, EngineEstimator, Expression, PlanEstimator, SourceSelection};
use crate::metrics::{bundle, MetricBundle};
use crate::oracle::{Oracle, OracleError};
use crate::planner::{classify_plan, greedy_left_deep_plan, tp_sources_count, PlanClass};
use crate::query::{parse_query, BasicGraphPattern};
use crate::rdf::TripleStore;
use crate::summaries::Summaries;
use crate::trace::{trace_plan, CardinalityTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    Failed,
    OracleBlowup,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::OracleBlowup => "oracle_blowup",
        }
    }

    pub fn parse(s: &str) -> Option<Status> {
        match s {
            "ok" => Some(Status::Ok),
            "failed" => Some(Status::Failed),
            "oracle_blowup" => Some(Status::OracleBlowup),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub query_id: String,
    pub engine: String,
    /// Present iff `status` is `Ok`.
    pub metrics: Option<MetricBundle>,
    pub plan_class: PlanClass,
    pub num_tp: usize,
    pub num_joins: usize,
    pub tp_sources: usize,
    pub fallback_used: bool,
    pub status: Status,
    /// Why the row failed, for diagnostics.
    pub detail: Option<String>,
}

impl EvalRow {
    fn failed(query_id: &str, engine: &str, status: Status, detail: String) -> Self {
        EvalRow {
            query_id: query_id.to_string(),
            engine: engine.to_string(),
            metrics: None,
            plan_class: PlanClass::Failed(detail.clone()),
            num_tp: 0,
            num_joins: 0,
            tp_sources: 0,
            fallback_used: false,
            status,
            detail: Some(detail),
        }
    }
}

/// Real cardinalities keyed by the set of patterns joined; a natural join's
/// size does not depend on the join order.
pub struct MemoOracle<'a> {
    oracle: Oracle<'a>,
    cache: HashMap<BTreeSet<usize>, u64>,
}

impl<'a> MemoOracle<'a> {
    pub fn new(stores: &'a [TripleStore], cap: u64) -> Self {
        MemoOracle {
            oracle: Oracle::new(stores, cap),
            cache: HashMap::new(),
        }
    }

    pub fn cardinality(&mut self, expr: &Expression) -> Result<f64, OracleError> {
        let key = expr.ordinals();
        if let Some(&c) = self.cache.get(&key) {
            return Ok(c as f64);
        }
        let c = self.oracle.cardinality(expr)?;
        self.cache.insert(key, c);
        Ok(c as f64)
    }

    pub fn inner(&mut self) -> &mut Oracle<'a> {
        &mut self.oracle
    }
}

/// Plans with the engine's estimates, traces and classifies the plan.
pub fn evaluate_with<E: PlanEstimator + ?Sized>(
    query_id: &str,
    engine: &str,
    bgp: &BasicGraphPattern,
    estimator: &E,
    stores: &[TripleStore],
    cap: u64,
) -> EvalRow {
    let plan = match greedy_left_deep_plan(bgp, |e| Ok::<_, Infallible>(estimator.cardinality(e))) {
        Ok(plan) => plan,
        Err(never) => match never {},
    };
    let mut oracle = MemoOracle::new(stores, cap);
    let trace: CardinalityTrace = match trace_plan(query_id, engine, &plan, estimator, oracle.inner()) {
        Ok(t) => t,
        Err(e) => {
            let mut row = EvalRow::failed(query_id, engine, Status::OracleBlowup, e.to_string());
            row.num_tp = bgp.patterns.len();
            row.num_joins = plan.join_count();
            row.tp_sources = tp_sources_count(bgp, stores);
            return row;
        }
    };
    let plan_class = classify_plan(&plan, bgp, |e| oracle.cardinality(e));
    let mut row = EvalRow {
        query_id: query_id.to_string(),
        engine: engine.to_string(),
        metrics: None,
        plan_class,
        num_tp: bgp.patterns.len(),
        num_joins: plan.join_count(),
        tp_sources: tp_sources_count(bgp, stores),
        fallback_used: trace.fallback_used(),
        status: Status::Ok,
        detail: None,
    };
    match bundle(&trace) {
        Ok(m) => row.metrics = Some(m),
        Err(e) => {
            row.status = Status::Failed;
            row.detail = Some(e.to_string());
        }
    }
    row
}

/// Stores, their summaries and the oracle cap shared by all evaluations.
pub struct Evaluator<'a> {
    pub stores: &'a [TripleStore],
    pub summaries: &'a Summaries,
    pub oracle_cap: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(stores: &'a [TripleStore], summaries: &'a Summaries, oracle_cap: u64) -> Self {
        Evaluator {
            stores,
            summaries,
            oracle_cap,
        }
    }

    pub fn evaluate_query(&self, query_id: &str, text: &str, engine: Engine) -> EvalRow {
        let bgp = match parse_query(text) {
            Ok(b) => b,
            Err(e) => return EvalRow::failed(query_id, engine.name(), Status::Failed, e.to_string()),
        };
        let selection = SourceSelection::compute(&bgp, self.stores);
        let edges = bgp.join_edges();
        let estimator = EngineEstimator::new(engine, self.summaries, &selection, &edges);
        evaluate_with(query_id, engine.name(), &bgp, &estimator, self.stores, self.oracle_cap)
    }

    fn jobs<'q>(queries: &'q [(String, String)], engines: &[Engine]) -> Vec<(&'q str, &'q str, Engine)> {
        queries
            .iter()
            .flat_map(|(id, text)| engines.iter().map(move |&e| (id.as_str(), text.as_str(), e)))
            .collect()
    }

    /// Every (query, engine) pair, run on the parallel pool when available.
    /// Rows are sorted by query id, then engine name.
    pub fn evaluate_corpus(&self, queries: &[(String, String)], engines: &[Engine]) -> Vec<EvalRow> {
        let jobs = Self::jobs(queries, engines);
        sorted(crate::par::map(&jobs, |&(id, text, e)| self.evaluate_query(id, text, e)))
    }

    pub fn evaluate_corpus_sequential(&self, queries: &[(String, String)], engines: &[Engine]) -> Vec<EvalRow> {
        let jobs = Self::jobs(queries, engines);
        sorted(crate::par::map_sequential(&jobs, |&(id, text, e)| self.evaluate_query(id, text, e)))
    }
}

fn sorted(mut rows: Vec<EvalRow>) -> Vec<EvalRow> {
    rows.sort_by(|a, b| (&a.query_id, &a.engine).cmp(&(&b.query_id, &b.engine)));
    rows
}

/// `*.rq` files of `dir` as `(file stem, text)`, ordered by file name.
pub fn load_queries(dir: &Path) -> io::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "rq") {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            out.push((id, fs::read_to_string(&path)?));
        }
    }
    out.sort();
    Ok(out)
}
