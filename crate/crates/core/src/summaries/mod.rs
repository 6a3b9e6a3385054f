//! Statistics summaries consumed by the estimators.

mod charsets;
mod costfed;
mod void;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use charsets::{
    build_charsets, CharSetStats, CharSetSummary, CharacteristicPair, CharacteristicSet,
};
pub use costfed::{build_costfed, CostFedPredicate, CostFedStats, CostFedSummary};
pub use void::{build_void, PredicateVoid, VoidStats, VoidSummary};

use crate::rdf::TripleStore;

pub const SUMMARY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SummaryKind {
    Void,
    CostFed,
    CharSets,
}

impl SummaryKind {
    pub const ALL: [SummaryKind; 3] = [SummaryKind::Void, SummaryKind::CostFed, SummaryKind::CharSets];

    pub fn name(self) -> &'static str {
        match self {
            SummaryKind::Void => "void",
            SummaryKind::CostFed => "costfed",
            SummaryKind::CharSets => "charsets",
        }
    }

    /// `<source>.<kind>.json`
    pub fn file_name(self, source: &str) -> String {
        format!("{source}.{}.json", self.name())
    }
}

impl FromStr for SummaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "void" => Ok(SummaryKind::Void),
            "costfed" => Ok(SummaryKind::CostFed),
            "charsets" => Ok(SummaryKind::CharSets),
            other => Err(format!("unknown summary kind `{other}` (expected void|costfed|charsets)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SummaryError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed summary: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: unsupported format_version {found} (expected {SUMMARY_FORMAT_VERSION})")]
    Version { path: PathBuf, found: u32 },
}

/// On-disk envelope shared by all summary kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile<T> {
    pub format_version: u32,
    pub source: String,
    pub stats: T,
}

impl<T> SummaryFile<T> {
    pub fn new(source: impl Into<String>, stats: T) -> Self {
        SummaryFile {
            format_version: SUMMARY_FORMAT_VERSION,
            source: source.into(),
            stats,
        }
    }
}

pub fn write_summary_file<T: Serialize>(
    path: &Path,
    file: &SummaryFile<T>,
) -> Result<(), SummaryError> {
    let json = serde_json::to_string_pretty(file).map_err(|source| SummaryError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, json + "\n").map_err(|source| SummaryError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_summary_file<T: DeserializeOwned>(path: &Path) -> Result<SummaryFile<T>, SummaryError> {
    let text = fs::read_to_string(path).map_err(|source| SummaryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    #[derive(Deserialize)]
    struct Header {
        format_version: u32,
    }
    let header: Header = serde_json::from_str(&text).map_err(|source| SummaryError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if header.format_version != SUMMARY_FORMAT_VERSION {
        return Err(SummaryError::Version {
            path: path.to_path_buf(),
            found: header.format_version,
        });
    }
    serde_json::from_str(&text).map_err(|source| SummaryError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// All three summaries over the same set of sources.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summaries {
    pub void: VoidSummary,
    pub costfed: CostFedSummary,
    pub charsets: CharSetSummary,
}

impl Summaries {
    pub fn build(stores: &[TripleStore]) -> Self {
        Summaries {
            void: build_void(stores),
            costfed: build_costfed(stores),
            charsets: build_charsets(stores),
        }
    }

    /// Writes one file per source for the requested kind; returns the paths.
    pub fn write(&self, dir: &Path, kind: SummaryKind) -> Result<Vec<PathBuf>, SummaryError> {
        fs::create_dir_all(dir).map_err(|source| SummaryError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut written = Vec::new();
        macro_rules! emit {
            ($map:expr) => {
                for (name, stats) in &$map {
                    let path = dir.join(kind.file_name(name));
                    write_summary_file(&path, &SummaryFile::new(name.clone(), stats))?;
                    written.push(path);
                }
            };
        }
        match kind {
            SummaryKind::Void => emit!(self.void.sources),
            SummaryKind::CostFed => emit!(self.costfed.sources),
            SummaryKind::CharSets => emit!(self.charsets.sources),
        }
        Ok(written)
    }

    /// Loads the summaries of the named sources from `dir`.
    pub fn read(dir: &Path, sources: &[&str]) -> Result<Self, SummaryError> {
        let mut out = Summaries::default();
        for &name in sources {
            let v: SummaryFile<VoidStats> =
                read_summary_file(&dir.join(SummaryKind::Void.file_name(name)))?;
            out.void.sources.insert(v.source, v.stats);
            let c: SummaryFile<CostFedStats> =
                read_summary_file(&dir.join(SummaryKind::CostFed.file_name(name)))?;
            out.costfed.sources.insert(c.source, c.stats);
            let cs: SummaryFile<CharSetStats> =
                read_summary_file(&dir.join(SummaryKind::CharSets.file_name(name)))?;
            out.charsets.sources.insert(cs.source, cs.stats);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn envelope_layout() {
        let s = Summaries::build(&[fixtures::toy1()]);
        let json = serde_json::to_value(SummaryFile::new("A", &s.costfed.sources["A"])).unwrap();
        assert_eq!(json["format_version"], 1);
        assert_eq!(json["source"], "A");
        assert_eq!(json["stats"]["total_triples"], 5);
        assert_eq!(json["stats"]["predicates"]["http://x/p"]["avg_subject_selectivity"], 0.5);
    }

    #[test]
    fn write_then_read_all_kinds() {
        let dir = std::env::temp_dir().join(format!("fedcard-summaries-{}", std::process::id()));
        let stores = fixtures::toy_federation();
        let s = Summaries::build(&stores);
        for kind in SummaryKind::ALL {
            let paths = s.write(&dir, kind).unwrap();
            assert_eq!(paths.len(), 2);
        }
        assert!(dir.join("A.charsets.json").exists());
        let back = Summaries::read(&dir, &["A", "B"]).unwrap();
        assert_eq!(back, s);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let dir = std::env::temp_dir().join(format!("fedcard-version-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("X.void.json");
        std::fs::write(&path, r#"{"format_version":2,"source":"X","stats":{}}"#).unwrap();
        let err = read_summary_file::<VoidStats>(&path).unwrap_err();
        assert!(matches!(err, SummaryError::Version { found: 2, .. }));
        std::fs::remove_dir_all(&dir).ok();
    }
}
