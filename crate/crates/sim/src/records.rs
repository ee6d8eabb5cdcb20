//! Satellite record directories: one `sat_<id>.json` file per satellite.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lisl_core::topology::{validate_records, SatelliteRecord};
use lisl_core::SatId;

use crate::error::{Result, SimError};

pub fn file_name(id: SatId) -> String {
    format!("sat_{id}.json")
}

fn is_record_file(path: &Path) -> bool {
    let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
        return false;
    };
    name.strip_prefix("sat_")
        .and_then(|rest| rest.strip_suffix(".json"))
        .is_some_and(|id| !id.is_empty() && id.bytes().all(|b| b.is_ascii_digit()))
}

fn record_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| SimError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| SimError::io(dir, e))?.path();
        if path.is_file() && is_record_file(&path) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Writes one pretty-printed JSON file per record, replacing any record files
/// already in `dir` so the directory describes exactly one constellation.
pub fn write_records(dir: &Path, records: &[SatelliteRecord]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    for stale in record_files(dir)? {
        fs::remove_file(&stale).map_err(|e| SimError::io(&stale, e))?;
    }
    for r in records {
        let path = dir.join(file_name(r.id));
        let mut json = serde_json::to_string_pretty(r).expect("records serialize");
        json.push('\n');
        fs::write(&path, json).map_err(|e| SimError::io(&path, e))?;
    }
    Ok(())
}

/// Loads and validates every record file in `dir`, sorted by id.
pub fn read_records(dir: &Path) -> Result<Vec<SatelliteRecord>> {
    let load_err = |path: &Path, reason: String| SimError::Load {
        path: path.to_owned(),
        reason,
    };
    if !dir.is_dir() {
        return Err(load_err(dir, "not a directory".into()));
    }
    let files = record_files(dir)?;
    if files.is_empty() {
        return Err(load_err(dir, "no satellite records found".into()));
    }
    let mut records = Vec::with_capacity(files.len());
    let mut origin: BTreeMap<SatId, PathBuf> = BTreeMap::new();
    for path in files {
        let text = fs::read_to_string(&path).map_err(|e| SimError::io(&path, e))?;
        let record: SatelliteRecord =
            serde_json::from_str(&text).map_err(|e| load_err(&path, e.to_string()))?;
        origin.entry(record.id).or_insert_with(|| path.clone());
        records.push(record);
    }
    validate_records(records).map_err(|e| {
        let path = match &e {
            lisl_core::Error::Record { id, .. } => origin.get(id).map(PathBuf::as_path).unwrap_or(dir),
            _ => dir,
        };
        load_err(path, e.to_string())
    })
}
