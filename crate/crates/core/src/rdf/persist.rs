use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Triple, TripleStore};

pub const STORE_FORMAT_VERSION: u32 = 1;

pub const STORE_EXTENSION: &str = "store";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed store file: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: unsupported format_version {found} (expected {STORE_FORMAT_VERSION})")]
    Version { path: PathBuf, found: u32 },
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    format_version: u32,
    source: String,
    triples: Vec<Triple>,
}

/// Path of the store file for `name` inside `dir`.
pub fn store_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.{STORE_EXTENSION}"))
}

pub fn save_store(dir: &Path, store: &TripleStore) -> Result<PathBuf, StoreError> {
    let path = store_path(dir, store.name());
    let io = |source| StoreError::Io {
        path: path.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let file = StoreFile {
        format_version: STORE_FORMAT_VERSION,
        source: store.name().to_string(),
        triples: store.triples().to_vec(),
    };
    let json = serde_json::to_string(&file).map_err(|source| StoreError::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, json).map_err(io)?;
    Ok(path)
}

pub fn load_store(path: &Path) -> Result<TripleStore, StoreError> {
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let json = |source| StoreError::Json {
        path: path.to_path_buf(),
        source,
    };
    #[derive(Deserialize)]
    struct Header {
        format_version: u32,
    }
    let header: Header = serde_json::from_str(&text).map_err(json)?;
    if header.format_version != STORE_FORMAT_VERSION {
        return Err(StoreError::Version {
            path: path.to_path_buf(),
            found: header.format_version,
        });
    }
    let file: StoreFile = serde_json::from_str(&text).map_err(json)?;
    Ok(TripleStore::new(file.source, file.triples))
}

/// Every `*.store` file in `dir`, ordered by source name.
pub fn load_store_dir(dir: &Path) -> Result<Vec<TripleStore>, StoreError> {
    let entries = fs::read_dir(dir).map_err(|source| StoreError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| StoreError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.extension().is_some_and(|e| e == STORE_EXTENSION) {
            paths.push(path);
        }
    }
    let mut stores = paths.iter().map(|p| load_store(p)).collect::<Result<Vec<_>, _>>()?;
    stores.sort_by(|a, b| a.name().cmp(b.name()));
    Ok(stores)
}
