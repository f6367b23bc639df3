//! Raw record directories.
//!
//! A record `<id>` is the file pair `<id>.sig.csv` (one amplitude per
//! line) and `<id>.ann.csv` (`sample_index,symbol` per line). A signal
//! file without its annotation sibling is an error, not a skip; records
//! load in sorted id order.

use crate::error::{CliError, Result};
use heartgan_core::data::{Annotation, RecordSource};
use std::fs;
use std::path::Path;

const SIG_SUFFIX: &str = ".sig.csv";
const ANN_SUFFIX: &str = ".ann.csv";

fn read_signal(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut signal = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::parse(path, idx + 1, format!("not a number: `{line}`"))
        })?;
        signal.push(v);
    }
    Ok(signal)
}

fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (index_part, symbol_part) = line.split_once(',').ok_or_else(|| {
            CliError::parse(path, idx + 1, format!("expected `sample_index,symbol`, found `{line}`"))
        })?;
        let sample_index: usize = index_part.trim().parse().map_err(|_| {
            CliError::parse(path, idx + 1, format!("bad sample index `{}`", index_part.trim()))
        })?;
        let symbol_part = symbol_part.trim();
        let mut chars = symbol_part.chars();
        let symbol = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => {
                return Err(CliError::parse(
                    path,
                    idx + 1,
                    format!("annotation symbol must be one character, found `{symbol_part}`"),
                ))
            }
        };
        out.push(Annotation { sample_index, symbol });
    }
    Ok(out)
}

fn load_record(dir: &Path, id: &str) -> Result<RecordSource> {
    let sig_path = dir.join(format!("{id}{SIG_SUFFIX}"));
    let ann_path = dir.join(format!("{id}{ANN_SUFFIX}"));
    if !ann_path.is_file() {
        return Err(CliError::config(format!(
            "record {id}: {} has no annotation sibling {}",
            sig_path.display(),
            ann_path.display()
        )));
    }
    let signal = read_signal(&sig_path)?;
    let annotations = read_annotations(&ann_path)?;
    Ok(RecordSource::new(id.to_string(), signal, annotations)?)
}

/// All records in `dir`, sorted by id.
pub fn scan_record_dir(dir: &Path) -> Result<Vec<RecordSource>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut ids = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(id) = name.strip_suffix(SIG_SUFFIX) {
            ids.push(id.to_string());
        }
    }
    if ids.is_empty() {
        return Err(CliError::config(format!(
            "{}: no record signals (*{SIG_SUFFIX}) found",
            dir.display()
        )));
    }
    ids.sort();
    ids.iter().map(|id| load_record(dir, id)).collect()
}
