use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use fedcard::estimators::Engine;
use fedcard::eval::{load_queries, Evaluator};
use fedcard::oracle::{DEFAULT_ORACLE_CAP, ORACLE_CAP_ENV};
use fedcard::rdf::{load_store_dir, parse_ntriples, save_store, TripleStore};
use fedcard::report::{self, Feature, Method, ReportError};
use fedcard::summaries::{Summaries, SummaryKind};

#[derive(Parser)]
#[command(name = "fedcard", version, about = "Cardinality estimation lab for federated SPARQL engines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an N-Triples file into a store.
    Ingest {
        #[arg(long)]
        source: String,
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write per-source summary files for the stores in a directory.
    Summarize {
        #[arg(long)]
        stores: PathBuf,
        /// void, costfed, charsets or all
        #[arg(long, default_value = "all")]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate, plan and score every query for every engine.
    Evaluate {
        #[arg(long)]
        stores: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// Comma-separated engine names.
        #[arg(long, default_value = "costfed,splendid,lhd,semagrow,odyssey")]
        engines: String,
        #[arg(long)]
        out: PathBuf,
        /// Largest intermediate result the exact evaluator may build.
        #[arg(long, env = ORACLE_CAP_ENV, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: u64,
        /// Accepted for reproducible invocations; evaluation is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Correlate error metrics with runtimes.
    Correlate {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        runtimes: PathBuf,
        #[arg(long, default_value = "E_T,E_J,E_P,Q_T,Q_J,Q_P")]
        features: String,
        /// spearman, ols or irls
        #[arg(long, default_value = "spearman")]
        method: String,
        /// Keep only queries every engine answered.
        #[arg(long)]
        common_only: bool,
        /// Report CSV; printed after the table when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the toy and synthetic fixtures.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Usage errors exit with 2, data errors with 1.
enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest { source, file, out } => ingest(&source, &file, &out),
        Command::Summarize { stores, kind, out } => summarize(&stores, &kind, &out),
        Command::Evaluate {
            stores,
            queries,
            engines,
            out,
            oracle_cap,
            seed: _,
        } => evaluate(&stores, &queries, &engines, &out, oracle_cap),
        Command::Correlate {
            results,
            runtimes,
            features,
            method,
            common_only,
            out,
        } => correlate(&results, &runtimes, &features, &method, common_only, out.as_deref()),
        Command::Fixtures { out, seed } => fixtures(&out, seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn require_exists(path: &Path) -> CmdResult {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{}: no such file", path.display())))
    }
}

fn ingest(source: &str, file: &Path, out: &Path) -> CmdResult {
    require_exists(file)?;
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let triples = parse_ntriples(&text).map_err(|e| anyhow::anyhow!("{}: {e}", file.display()))?;
    let store = TripleStore::new(source, triples);
    let path = save_store(out, &store)?;
    println!("{}: {} triples -> {}", source, store.len(), path.display());
    Ok(())
}

fn load_stores(dir: &Path) -> Result<Vec<TripleStore>, Failure> {
    require_exists(dir)?;
    Ok(load_store_dir(dir)?)
}

fn summarize(stores: &Path, kind: &str, out: &Path) -> CmdResult {
    let kinds = match kind {
        "all" => SummaryKind::ALL.to_vec(),
        other => vec![other
            .parse::<SummaryKind>()
            .map_err(|e| Failure::Usage(e.replace("charsets)", "charsets|all)")))?],
    };
    let stores = load_stores(stores)?;
    let summaries = Summaries::build(&stores);
    for kind in kinds {
        for path in summaries.write(out, kind)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn parse_engines(list: &str) -> Result<Vec<Engine>, Failure> {
    let mut engines = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let engine: Engine = name.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
        if !engines.contains(&engine) {
            engines.push(engine);
        }
    }
    if engines.is_empty() {
        let valid: Vec<_> = Engine::ALL.iter().map(|e| e.name()).collect();
        return Err(Failure::Usage(format!("no engines given (valid: {})", valid.join(", "))));
    }
    Ok(engines)
}

fn evaluate(stores: &Path, queries: &Path, engines: &str, out: &Path, cap: u64) -> CmdResult {
    let engines = parse_engines(engines)?;
    require_exists(queries)?;
    let stores = load_stores(stores)?;
    let queries = load_queries(queries).with_context(|| format!("reading {}", queries.display()))?;
    let summaries = Summaries::build(&stores);
    let rows = Evaluator::new(&stores, &summaries, cap).evaluate_corpus(&queries, &engines);
    for row in &rows {
        if let Some(detail) = &row.detail {
            eprintln!("warning: {} {}: {} ({detail})", row.query_id, row.engine, row.status);
        }
    }
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    report::write_results(&rows, BufWriter::new(file))?;
    let ok = rows.iter().filter(|r| r.status == fedcard::eval::Status::Ok).count();
    println!("{} rows ({ok} ok) -> {}", rows.len(), out.display());
    Ok(())
}

fn correlate(
    results: &Path,
    runtimes: &Path,
    features: &str,
    method: &str,
    common_only: bool,
    out: Option<&Path>,
) -> CmdResult {
    let usage = |e: ReportError| Failure::Usage(e.to_string());
    let features: Vec<Feature> = features
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    let method: Method = method.parse().map_err(usage)?;
    require_exists(results)?;
    require_exists(runtimes)?;
    let rows = report::read_results(File::open(results).context("opening results")?)
        .with_context(|| results.display().to_string())?;
    let times = report::read_runtimes(File::open(runtimes).context("opening runtimes")?)
        .with_context(|| runtimes.display().to_string())?;
    let report = match report::correlate_results(&rows, &times, &features, method, common_only) {
        Ok(r) => r,
        Err(ReportError::InsufficientData) => {
            return Err(Failure::Data(anyhow::anyhow!(
                "insufficient data: fewer than 3 matched rows for every engine"
            )))
        }
        Err(e) => return Err(Failure::Data(e.into())),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    write!(stdout, "{}", report::render_table(&report)).context("writing table")?;
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report::write_report(&report, BufWriter::new(file))?;
        }
        None => {
            writeln!(stdout).context("writing report")?;
            report::write_report(&report, &mut stdout)?;
        }
    }
    Ok(())
}

fn fixtures(out: &Path, seed: u64) -> CmdResult {
    fedcard::fixtures::write_all(out, seed).with_context(|| format!("writing {}", out.display()))?;
    println!("fixtures written to {}", out.display());
    Ok(())
}
