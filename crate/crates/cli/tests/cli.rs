use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const HEADER: &str =
    "query_id,engine,E_T,E_J,E_P,Q_T,Q_J,Q_P,plan_class,num_tp,num_joins,tp_sources,fallback_used,status";

fn fedcard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedcard"))
        .args(args)
        .env_remove("FEDCARD_ORACLE_CAP")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Fixtures plus ingested toy and synthetic stores.
fn workspace() -> TempDir {
    let tmp = TempDir::new().unwrap();
    let fx = tmp.path().join("fx");
    assert!(fedcard(&["fixtures", "--out", p(&fx)]).status.success());
    for (dir, out) in [("toy", "toy_stores"), ("synthetic/data", "syn_stores")] {
        for entry in fs::read_dir(fx.join(dir)).unwrap() {
            let path = entry.unwrap().path();
            let name = path.file_stem().unwrap().to_str().unwrap().to_string();
            let o = fedcard(&["ingest", "--source", &name, "--file", p(&path), "--out", p(&tmp.path().join(out))]);
            assert!(o.status.success(), "{}", stderr(&o));
        }
    }
    tmp
}

#[test]
fn ingest_writes_versioned_store() {
    let tmp = workspace();
    let store = tmp.path().join("toy_stores/A.store");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(store).unwrap()).unwrap();
    assert_eq!(json["format_version"], 1);
    assert_eq!(json["source"], "A");
}

#[test]
fn ingest_reports_triple_count() {
    let tmp = TempDir::new().unwrap();
    let nt = tmp.path().join("d.nt");
    fs::write(&nt, "<http://a> <http://p> <http://b> .\n<http://a> <http://p> <http://b> .\n<http://a> <http://p> \"x\" .\n")
        .unwrap();
    let o = fedcard(&["ingest", "--source", "D", "--file", p(&nt), "--out", p(tmp.path())]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("2 triples"), "{}", stdout(&o));
}

#[test]
fn ingest_missing_file_is_usage_error() {
    let tmp = TempDir::new().unwrap();
    let o = fedcard(&["ingest", "--source", "X", "--file", "/nonexistent/x.nt", "--out", p(tmp.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no such file"));
}

#[test]
fn ingest_parse_error_names_the_line() {
    let tmp = TempDir::new().unwrap();
    let nt = tmp.path().join("bad.nt");
    let mut text = "<http://a> <http://p> <http://b> .\n".repeat(6);
    text.push_str("<http://a> <http://p> .\n");
    fs::write(&nt, text).unwrap();
    let o = fedcard(&["ingest", "--source", "X", "--file", p(&nt), "--out", p(tmp.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 7: "), "{}", stderr(&o));
    assert!(!tmp.path().join("X.store").exists());
}

#[test]
fn summarize_all_kinds() {
    let tmp = workspace();
    let out = tmp.path().join("sum");
    let o = fedcard(&["summarize", "--stores", p(&tmp.path().join("toy_stores")), "--kind", "all", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for kind in ["void", "costfed", "charsets"] {
        let file = out.join(format!("A.{kind}.json"));
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap();
        assert_eq!(json["format_version"], 1);
        assert_eq!(json["source"], "A");
        assert!(json["stats"].is_object());
    }
    let o = fedcard(&["summarize", "--stores", p(&tmp.path().join("toy_stores")), "--kind", "bogus", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_unknown_engine_lists_valid_names() {
    let tmp = workspace();
    let o = fedcard(&[
        "evaluate",
        "--stores",
        p(&tmp.path().join("toy_stores")),
        "--queries",
        p(tmp.path()),
        "--engines",
        "lhd,hibiscus",
        "--out",
        p(&tmp.path().join("r.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for name in ["costfed", "splendid", "lhd", "semagrow", "odyssey"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn evaluate_empty_query_dir_gives_header_only() {
    let tmp = workspace();
    let queries = tmp.path().join("empty");
    fs::create_dir(&queries).unwrap();
    let out = tmp.path().join("r.csv");
    let o = fedcard(&[
        "evaluate",
        "--stores",
        p(&tmp.path().join("toy_stores")),
        "--queries",
        p(&queries),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(out).unwrap(), format!("{HEADER}\n"));
}

#[test]
fn evaluate_marks_blowups_and_respects_env_cap() {
    let tmp = workspace();
    let queries = tmp.path().join("q");
    fs::create_dir(&queries).unwrap();
    fs::write(queries.join("big.rq"), "SELECT * WHERE { ?a ?b ?c . ?d ?e ?f }").unwrap();
    let out = tmp.path().join("r.csv");
    let stores = tmp.path().join("toy_stores");
    let args = [
        "evaluate",
        "--stores",
        p(&stores),
        "--queries",
        p(&queries),
        "--engines",
        "lhd",
        "--out",
        p(&out),
    ];
    let o = Command::new(env!("CARGO_BIN_EXE_fedcard"))
        .args(args)
        .env("FEDCARD_ORACLE_CAP", "10")
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("big,lhd,,,,,,,Failed,"), "{row}");
    assert!(row.ends_with(",oracle_blowup"), "{row}");

    let o = fedcard(&args);
    assert!(o.status.success());
    assert!(fs::read_to_string(&out).unwrap().lines().nth(1).unwrap().ends_with(",ok"));
}

#[test]
fn evaluate_then_correlate_round_trip() {
    let tmp = workspace();
    let results = tmp.path().join("results.csv");
    let o = fedcard(&[
        "evaluate",
        "--stores",
        p(&tmp.path().join("syn_stores")),
        "--queries",
        p(&tmp.path().join("fx/synthetic/queries")),
        "--engines",
        "costfed,odyssey",
        "--out",
        p(&results),
        "--seed",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&results).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for r in &rows {
        for field in &r[2..8] {
            if !field.is_empty() {
                let mantissa: String = field.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
                assert!(mantissa.trim_start_matches('0').len() <= 6, "{field}");
            }
        }
    }

    // runtimes monotone in E_P
    let mut runtimes = String::from("query_id,engine,runtime_ms\n");
    for r in rows.iter().filter(|r| r[13] == "ok") {
        let ep: f64 = r[4].parse().unwrap();
        runtimes.push_str(&format!("{},{},{}\n", r[0], r[1], 10.0 + 1000.0 * ep));
    }
    let rt = tmp.path().join("runtimes.csv");
    fs::write(&rt, runtimes).unwrap();
    let report = tmp.path().join("report.csv");
    let o = fedcard(&[
        "correlate",
        "--results",
        p(&results),
        "--runtimes",
        p(&rt),
        "--features",
        "E_P",
        "--method",
        "spearman",
        "--out",
        p(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("very strong"));
    let csv = fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("engine,feature,method,coefficient,p_value,n,band"));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 3);
    assert!(body[0].starts_with("costfed,E_P,spearman,1,"));
    assert!(body[2].starts_with("average,E_P,spearman,1,,"));
}

#[test]
fn correlate_insufficient_data() {
    let tmp = TempDir::new().unwrap();
    let results = tmp.path().join("r.csv");
    fs::write(
        &results,
        format!("{HEADER}\nQ1,lhd,0.1,0,0.1,1,1,1,OnlyP,2,1,2,false,ok\nQ2,lhd,0.2,0,0.2,1,1,1,OnlyP,2,1,2,false,ok\n"),
    )
    .unwrap();
    let rt = tmp.path().join("t.csv");
    fs::write(&rt, "query_id,engine,runtime_ms\nQ1,lhd,5\nQ2,lhd,7\n").unwrap();
    let o = fedcard(&["correlate", "--results", p(&results), "--runtimes", p(&rt), "--method", "ols"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("insufficient data"));
}

#[test]
fn correlate_irls_outlier_footer_and_missing_engine_warning() {
    let tmp = TempDir::new().unwrap();
    let mut results = format!("{HEADER}\n");
    let mut rt = String::from("query_id,engine,runtime_ms\n");
    for i in 1..=10 {
        results.push_str(&format!("Q{i:02},lhd,{i},0,{i},1,1,1,OnlyP,2,1,2,false,ok\n"));
        results.push_str(&format!("Q{i:02},splendid,{i},0,{i},1,1,1,OnlyP,2,1,2,false,ok\n"));
        let t = if i == 5 { 100 } else { 2 * i };
        rt.push_str(&format!("Q{i:02},lhd,{t}\n"));
    }
    fs::write(tmp.path().join("r.csv"), results).unwrap();
    fs::write(tmp.path().join("t.csv"), rt).unwrap();
    let o = fedcard(&[
        "correlate",
        "--results",
        p(&tmp.path().join("r.csv")),
        "--runtimes",
        p(&tmp.path().join("t.csv")),
        "--features",
        "E_T",
        "--method",
        "irls",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("# outliers: lhd E_T: Q05"), "{}", stdout(&o));
    assert!(stderr(&o).contains("splendid"));
}

#[test]
fn correlate_rejects_unknown_method_and_feature() {
    let tmp = TempDir::new().unwrap();
    let f = p(tmp.path());
    let o = fedcard(&["correlate", "--results", f, "--runtimes", f, "--method", "kendall"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fedcard(&["correlate", "--results", f, "--runtimes", f, "--features", "E_X"]);
    assert_eq!(o.status.code(), Some(2));
}
