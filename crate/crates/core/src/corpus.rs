//! Reading and writing directories of `nodeset<digits>.json` files.

use crate::graph::{parse_nodeset, serialize_nodeset, GraphError, Nodeset};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: GraphError,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// The nodeset id for a file name such as `nodeset18321.json`.
pub fn nodeset_id(file_name: &str) -> Option<&str> {
    let stem = file_name.strip_suffix(".json")?;
    let digits = stem.strip_prefix("nodeset")?;
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(stem)
}

/// Nodeset files in `dir`, sorted by id (numerically, then textually).
pub fn list_nodeset_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, CorpusError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let name = entry.file_name();
        if let Some(id) = name.to_str().and_then(nodeset_id) {
            out.push((id.to_string(), entry.path()));
        }
    }
    out.sort_by(|a, b| {
        let num = |s: &str| s["nodeset".len()..].parse::<u128>().ok();
        num(&a.0).cmp(&num(&b.0)).then_with(|| a.0.cmp(&b.0))
    });
    Ok(out)
}

pub fn read_nodeset(id: &str, path: &Path) -> Result<Nodeset, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_nodeset(id, &text).map_err(|source| CorpusError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Every nodeset in `dir`, parsed in parallel, in id order.
pub fn load_corpus(dir: &Path) -> Result<Vec<Nodeset>, CorpusError> {
    let files = list_nodeset_files(dir)?;
    crate::par::try_map(&files, |(id, path)| read_nodeset(id, path))
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        source: e.error,
    })?;
    Ok(())
}

/// Writes `ns` as `<dir>/<id>.json`.
pub fn write_nodeset(dir: &Path, ns: &Nodeset) -> Result<PathBuf, CorpusError> {
    let path = dir.join(format!("{}.json", ns.id()));
    write_atomic(&path, serialize_nodeset(ns).as_bytes())?;
    Ok(path)
}
