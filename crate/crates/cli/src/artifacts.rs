//! Run configuration echo and artifact writers.
//!
//! JSON artifacts carry a `run` object; CSV files start with one `#` comment
//! line holding the same object. The thread count is left out of the echo so
//! that artifacts do not depend on it.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub flags: Value,
    pub version: &'static str,
}

impl RunConfig {
    pub fn new<T: Serialize>(subcommand: &'static str, flags: &T) -> Self {
        let flags = serde_json::to_value(flags).expect("flags serialize");
        Self { subcommand, flags, version: conelet::VERSION }
    }

    fn value(&self) -> Value {
        serde_json::to_value(self).expect("run config serializes")
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure { code: 4, message: format!("cannot create {}: {e}", dir.display()) })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure { code: 4, message: format!("cannot write {}: {e}", path.display()) })
}

/// Writes `body` with `run` and `version` keys added, keys sorted.
pub fn write_json<T: Serialize>(path: &Path, run: &RunConfig, body: &T) -> Result<PathBuf, Failure> {
    let mut value = serde_json::to_value(body).map_err(conelet::ConeletError::from)?;
    match &mut value {
        Value::Object(map) => {
            map.insert("run".into(), run.value());
            map.insert("version".into(), json!(conelet::VERSION));
        }
        other => {
            value = json!({ "data": other.take(), "run": run.value(), "version": conelet::VERSION });
        }
    }
    let mut text = conelet::shearlet_transform::io::to_sorted_json(&value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())?;
    Ok(path.to_path_buf())
}

/// Writes a CSV produced by `emit` behind the run comment line.
pub fn write_csv<F>(path: &Path, run: &RunConfig, emit: F) -> Result<PathBuf, Failure>
where
    F: FnOnce(&mut Vec<u8>) -> conelet::Result<()>,
{
    let mut buf = format!("# {}\n", serde_json::to_string(&run.value()).map_err(conelet::ConeletError::from)?).into_bytes();
    emit(&mut buf)?;
    write_bytes(path, &buf)?;
    Ok(path.to_path_buf())
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf, Failure> {
    write_bytes(path, text.as_bytes())?;
    Ok(path.to_path_buf())
}

pub fn run_value(run: &RunConfig) -> Value {
    run.value()
}
