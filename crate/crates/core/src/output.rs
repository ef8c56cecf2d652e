//! Atomic file output and JSON metadata sidecars.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::{LexdivError, Result};
use crate::matrix::ScoreMatrix;

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes `bytes` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| LexdivError::invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp.{}.{}",
        name.to_string_lossy(),
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(LexdivError::io(path, e));
    }
    Ok(())
}

/// `scores.csv` → `scores.csv.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)
        .map_err(|e| LexdivError::invalid(format!("json encoding failed: {e}")))?;
    v.push(b'\n');
    Ok(v)
}

/// Tracks files written by one run so that a failed run leaves nothing
/// behind.
#[derive(Debug, Default)]
pub struct OutputSet {
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new() -> Self {
        OutputSet::default()
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        write_atomic(path, bytes)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    /// Writes `bytes` plus a sidecar holding `meta`.
    pub fn write_with_meta<T: Serialize>(&mut self, path: &Path, bytes: &[u8], meta: &T) -> Result<()> {
        self.write(path, bytes)?;
        self.write(&sidecar_path(path), &to_json(meta)?)
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<()> {
        self.write(path, &to_json(value)?)
    }

    pub fn write_matrix<T: Serialize>(&mut self, path: &Path, m: &ScoreMatrix, meta: &T) -> Result<()> {
        self.write_with_meta(path, m.to_csv_string().as_bytes(), meta)
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    /// Keeps the files; dropping an uncommitted set deletes them.
    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}
