mod common;

use approx::assert_abs_diff_eq;
use fedcard::estimators::Engine;
use fedcard::eval::{evaluate_with, Evaluator, Status};
use fedcard::fixtures::{star_store, synthetic_corpus, STAR_QUERY};
use fedcard::oracle::DEFAULT_ORACLE_CAP;
use fedcard::planner::PlanClass;
use fedcard::query::parse_query;
use fedcard::report::{read_results, write_results, Feature, RESULTS_HEADER};
use fedcard::summaries::Summaries;

use common::{star_engine1, star_engine2};

#[test]
fn star_example_rows_through_csv() {
    let stores = vec![star_store()];
    let bgp = parse_query(STAR_QUERY).unwrap();
    let rows = vec![
        evaluate_with("star", "engine1", &bgp, &star_engine1(), &stores, DEFAULT_ORACLE_CAP),
        evaluate_with("star", "engine2", &bgp, &star_engine2(), &stores, DEFAULT_ORACLE_CAP),
    ];
    let mut csv = Vec::new();
    write_results(&rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), RESULTS_HEADER.join(","));
    assert!(text.lines().nth(1).unwrap().ends_with(",OptP,3,2,3,false,ok"), "{text}");
    assert!(text.lines().nth(2).unwrap().ends_with(",subOpt,3,2,3,false,ok"), "{text}");

    let back = read_results(text.as_bytes()).unwrap();
    let one = &back[0];
    assert_abs_diff_eq!(one.feature(Feature::ET).unwrap(), 0.0658, epsilon = 5e-4);
    assert_abs_diff_eq!(one.feature(Feature::EP).unwrap(), 0.1391, epsilon = 5e-4);
    assert_eq!(one.feature(Feature::QT), Some(1.25));
    assert_eq!(one.feature(Feature::QJ), Some(3.0));
    assert_eq!(one.feature(Feature::QP), Some(3.0));

    // (200, 600, 500) against (100, 200, 300)
    let two = &back[1];
    assert_abs_diff_eq!(two.feature(Feature::ET).unwrap(), 0.3882, epsilon = 5e-4);
    assert_eq!(two.feature(Feature::QT), Some(3.0));
}

#[test]
fn oracle_cap_turns_rows_into_blowups() {
    let stores = vec![star_store()];
    let bgp = parse_query(STAR_QUERY).unwrap();
    let row = evaluate_with("star", "engine1", &bgp, &star_engine1(), &stores, 150);
    assert_eq!(row.status, Status::OracleBlowup);
    assert!(row.metrics.is_none());
    assert!(matches!(row.plan_class, PlanClass::Failed(_)));
    let mut csv = Vec::new();
    write_results(&[row], &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "star,engine1,,,,,,,Failed,3,2,3,false,oracle_blowup");
}

#[test]
fn parallel_and_sequential_evaluation_agree() {
    let corpus = synthetic_corpus(3);
    let summaries = Summaries::build(&corpus.stores);
    let ev = Evaluator::new(&corpus.stores, &summaries, DEFAULT_ORACLE_CAP);
    let queries = &corpus.queries[..20];
    let engines = [Engine::CostFed, Engine::Odyssey, Engine::Splendid];
    let par = ev.evaluate_corpus(queries, &engines);
    assert_eq!(par.len(), 60);
    assert_eq!(par, ev.evaluate_corpus_sequential(queries, &engines));
}

#[test]
fn results_are_deterministic() {
    let corpus = synthetic_corpus(9);
    let summaries = Summaries::build(&corpus.stores);
    let ev = Evaluator::new(&corpus.stores, &summaries, DEFAULT_ORACLE_CAP);
    let render = || {
        let mut out = Vec::new();
        write_results(&ev.evaluate_corpus(&corpus.queries[..10], &Engine::ALL), &mut out).unwrap();
        out
    };
    assert_eq!(render(), render());
}
