//! Results and correlation report files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::eval::{EvalRow, Status};
use crate::stats::{irls_huber, ols, spearman, Band, StatsError};

pub const RESULTS_HEADER: [&str; 14] = [
    "query_id",
    "engine",
    "E_T",
    "E_J",
    "E_P",
    "Q_T",
    "Q_J",
    "Q_P",
    "plan_class",
    "num_tp",
    "num_joins",
    "tp_sources",
    "fallback_used",
    "status",
];

pub const RUNTIMES_HEADER: [&str; 3] = ["query_id", "engine", "runtime_ms"];

pub const REPORT_HEADER: [&str; 7] = ["engine", "feature", "method", "coefficient", "p_value", "n", "band"];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: {message}")]
    Field { row: usize, message: String },
    #[error("unknown feature `{0}` (valid: E_T, E_J, E_P, Q_T, Q_J, Q_P)")]
    UnknownFeature(String),
    #[error("unknown method `{0}` (valid: spearman, ols, irls)")]
    UnknownMethod(String),
    #[error("insufficient data: no engine has at least 3 matched rows")]
    InsufficientData,
}

/// A real with 6 significant digits, shortest form: plain notation for
/// exponents in `[-4, 6)`, scientific otherwise.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let plain = format!("{v:.decimals$}");
        trim_zeros(&plain)
    } else {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), ReportError> {
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != expected {
        return Err(ReportError::Header {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

pub fn write_results<W: Write>(rows: &[EvalRow], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for row in rows {
        let metric = |f: fn(&crate::metrics::MetricBundle) -> f64| match (&row.metrics, row.status) {
            (Some(m), Status::Ok) => format_real(f(m)),
            _ => String::new(),
        };
        w.write_record([
            row.query_id.clone(),
            row.engine.clone(),
            metric(|m| m.e_t),
            metric(|m| m.e_j),
            metric(|m| m.e_p),
            metric(|m| m.q_t),
            metric(|m| m.q_j),
            metric(|m| m.q_p),
            row.plan_class.label().to_string(),
            row.num_tp.to_string(),
            row.num_joins.to_string(),
            row.tp_sources.to_string(),
            row.fallback_used.to_string(),
            row.status.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    ET,
    EJ,
    EP,
    QT,
    QJ,
    QP,
}

impl Feature {
    pub const ALL: [Feature; 6] = [Feature::ET, Feature::EJ, Feature::EP, Feature::QT, Feature::QJ, Feature::QP];

    pub fn name(self) -> &'static str {
        match self {
            Feature::ET => "E_T",
            Feature::EJ => "E_J",
            Feature::EP => "E_P",
            Feature::QT => "Q_T",
            Feature::QJ => "Q_J",
            Feature::QP => "Q_P",
        }
    }

    fn column(self) -> usize {
        2 + self as usize
    }
}

impl FromStr for Feature {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ReportError::UnknownFeature(s.to_string()))
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One parsed line of a results file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub query_id: String,
    pub engine: String,
    /// Indexed like `Feature::ALL`; `None` when the field is empty.
    pub metrics: [Option<f64>; 6],
    pub plan_class: String,
    pub num_tp: usize,
    pub num_joins: usize,
    pub tp_sources: usize,
    pub fallback_used: bool,
    pub status: Status,
}

impl ResultRecord {
    pub fn feature(&self, f: Feature) -> Option<f64> {
        self.metrics[f as usize]
    }
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRecord>, ReportError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &RESULTS_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let bad = |message: String| ReportError::Field { row, message };
        let int = |k: usize| -> Result<usize, ReportError> {
            rec[k].parse().map_err(|_| bad(format!("{} is not a count: `{}`", RESULTS_HEADER[k], &rec[k])))
        };
        let mut metrics = [None; 6];
        for f in Feature::ALL {
            let text = &rec[f.column()];
            if !text.is_empty() {
                let v: f64 = text
                    .parse()
                    .map_err(|_| bad(format!("{} is not a number: `{text}`", f.name())))?;
                metrics[f as usize] = Some(v);
            }
        }
        out.push(ResultRecord {
            query_id: rec[0].to_string(),
            engine: rec[1].to_string(),
            metrics,
            plan_class: rec[8].to_string(),
            num_tp: int(9)?,
            num_joins: int(10)?,
            tp_sources: int(11)?,
            fallback_used: rec[12]
                .parse()
                .map_err(|_| bad(format!("fallback_used is not a boolean: `{}`", &rec[12])))?,
            status: Status::parse(&rec[13]).ok_or_else(|| bad(format!("unknown status `{}`", &rec[13])))?,
        });
    }
    Ok(out)
}

/// Runtimes keyed by `(query_id, engine)`.
pub fn read_runtimes<R: Read>(input: R) -> Result<HashMap<(String, String), f64>, ReportError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &RUNTIMES_HEADER)?;
    let mut out = HashMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let v: f64 = rec[2].parse().map_err(|_| ReportError::Field {
            row: i + 2,
            message: format!("runtime_ms is not a number: `{}`", &rec[2]),
        })?;
        out.insert((rec[0].to_string(), rec[1].to_string()), v);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spearman,
    Ols,
    Irls,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spearman => "spearman",
            Method::Ols => "ols",
            Method::Irls => "irls",
        }
    }
}

impl FromStr for Method {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spearman" => Ok(Method::Spearman),
            "ols" => Ok(Method::Ols),
            "irls" => Ok(Method::Irls),
            _ => Err(ReportError::UnknownMethod(s.to_string())),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const AVERAGE_ROW: &str = "average";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub engine: String,
    pub feature: Feature,
    pub method: Method,
    pub coefficient: f64,
    /// `None` on the averages row and when the statistic is undefined.
    pub p_value: Option<f64>,
    pub n: usize,
    pub band: Band,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrelationReport {
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
    /// `(engine, feature, query ids)` of points IRLS down-weighted.
    pub outliers: Vec<(String, Feature, Vec<String>)>,
}

/// Joins results with runtimes and correlates each feature with the runtime,
/// per engine. Engines with fewer than 3 usable rows are skipped with a
/// warning; an averages row follows the engines for every feature.
pub fn correlate_results(
    results: &[ResultRecord],
    runtimes: &HashMap<(String, String), f64>,
    features: &[Feature],
    method: Method,
    common_only: bool,
) -> Result<CorrelationReport, ReportError> {
    let mut report = CorrelationReport::default();
    let engines: BTreeSet<&str> = results.iter().map(|r| r.engine.as_str()).collect();

    let mut usable: Vec<&ResultRecord> = results.iter().filter(|r| r.status == Status::Ok).collect();
    if common_only {
        let mut passing: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for r in &usable {
            passing.entry(r.engine.as_str()).or_default().insert(r.query_id.as_str());
        }
        let common: BTreeSet<&str> = engines
            .iter()
            .map(|e| passing.get(e).cloned().unwrap_or_default())
            .reduce(|a, b| a.intersection(&b).copied().collect())
            .unwrap_or_default();
        usable.retain(|r| common.contains(r.query_id.as_str()));
    }

    let mut by_engine: BTreeMap<&str, Vec<(&ResultRecord, f64)>> = BTreeMap::new();
    for r in usable {
        if let Some(&t) = runtimes.get(&(r.query_id.clone(), r.engine.clone())) {
            by_engine.entry(r.engine.as_str()).or_default().push((r, t));
        }
    }
    for e in &engines {
        if !by_engine.contains_key(e) {
            report.warnings.push(format!("engine {e}: no runtimes matched, omitted"));
        }
    }
    by_engine.retain(|e, rows| {
        if rows.len() < 3 {
            report
                .warnings
                .push(format!("engine {e}: only {} matched rows, skipped", rows.len()));
            false
        } else {
            true
        }
    });
    if by_engine.is_empty() {
        return Err(ReportError::InsufficientData);
    }

    for &feature in features {
        let mut coefficients = Vec::new();
        let mut total_n = 0;
        for (engine, rows) in &by_engine {
            let points: Vec<(&str, f64, f64)> = rows
                .iter()
                .filter_map(|(r, t)| r.feature(feature).map(|v| (r.query_id.as_str(), v, *t)))
                .collect();
            let xs: Vec<f64> = points.iter().map(|p| p.1).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
            let outcome: Result<(f64, f64, Vec<usize>), StatsError> = match method {
                Method::Spearman => spearman(&xs, &ys).map(|c| (c.rho, c.p_value, Vec::new())),
                Method::Ols => ols(&xs, &ys).map(|r| (r.r, r.p_value, Vec::new())),
                Method::Irls => irls_huber(&xs, &ys).map(|r| {
                    if !r.converged {
                        report
                            .warnings
                            .push(format!("engine {engine}, {feature}: IRLS did not converge"));
                    }
                    (r.r, r.p_value, r.outliers)
                }),
            };
            match outcome {
                Ok((c, p, outliers)) => {
                    coefficients.push(c);
                    total_n += xs.len();
                    report.rows.push(ReportRow {
                        engine: engine.to_string(),
                        feature,
                        method,
                        coefficient: c,
                        p_value: Some(p),
                        n: xs.len(),
                        band: Band::of(c),
                    });
                    if method == Method::Irls && !outliers.is_empty() {
                        let ids = outliers.iter().map(|&i| points[i].0.to_string()).collect();
                        report.outliers.push((engine.to_string(), feature, ids));
                    }
                }
                Err(e) => report.warnings.push(format!("engine {engine}, {feature}: {e}")),
            }
        }
        if !coefficients.is_empty() {
            let mean = coefficients.iter().sum::<f64>() / coefficients.len() as f64;
            report.rows.push(ReportRow {
                engine: AVERAGE_ROW.to_string(),
                feature,
                method,
                coefficient: mean,
                p_value: None,
                n: total_n,
                band: Band::of(mean),
            });
        }
    }
    Ok(report)
}

pub fn write_report<W: Write>(report: &CorrelationReport, mut out: W) -> Result<(), ReportError> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(REPORT_HEADER)?;
        for r in &report.rows {
            w.write_record([
                r.engine.clone(),
                r.feature.name().to_string(),
                r.method.name().to_string(),
                format_real(r.coefficient),
                r.p_value.map(format_real).unwrap_or_default(),
                r.n.to_string(),
                r.band.label().to_string(),
            ])?;
        }
        w.flush()?;
    }
    for (engine, feature, ids) in &report.outliers {
        writeln!(out, "# outliers: {engine} {feature}: {}", ids.join(" "))?;
    }
    Ok(())
}

/// Fixed-width table of the report rows.
pub fn render_table(report: &CorrelationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:<8} {:<9} {:>12} {:>12} {:>5}  band",
        "engine", "feature", "method", "coefficient", "p_value", "n"
    );
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{:<10} {:<8} {:<9} {:>12} {:>12} {:>5}  {}",
            r.engine,
            r.feature.name(),
            r.method.name(),
            format_real(r.coefficient),
            r.p_value.map(format_real).unwrap_or_else(|| "-".to_string()),
            r.n,
            r.band
        );
    }
    s
}
