//! Beat set files: one CSV row per beat.
//!
//! Header is `record_id,label,s0,...,s279`. Samples print in Rust's
//! shortest round-trip form, so writing and re-reading a set reproduces
//! every value bit for bit. Reading treats all rows as real beats with
//! the R peak at its canonical window offset; the synthetic flag is a
//! training-time notion that does not survive serialization.

use crate::error::{CliError, Result};
use heartgan_core::data::{Beat, BeatClass, BEAT_LEN, R_PEAK_OFFSET};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

fn header() -> String {
    let mut h = String::from("record_id,label");
    for i in 0..BEAT_LEN {
        let _ = write!(h, ",s{i}");
    }
    h
}

pub fn write_beats(path: &Path, beats: &[Beat]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut line = header();
    line.push('\n');
    for b in beats {
        let _ = write!(line, "{},{}", b.record_id, b.label.letter());
        for v in &b.samples {
            let _ = write!(line, ",{v}");
        }
        line.push('\n');
    }
    w.write_all(line.as_bytes()).map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_beats(path: &Path) -> Result<Vec<Beat>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let expected = header();
    let mut beats = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let line = idx + 1;
        let rec = rec.map_err(|e| CliError::parse(path, line, e.to_string()))?;
        if idx == 0 {
            let got = rec.iter().collect::<Vec<_>>().join(",");
            if got != expected {
                return Err(CliError::parse(
                    path,
                    line,
                    format!("bad header: expected `record_id,label,s0,...,s{}`", BEAT_LEN - 1),
                ));
            }
            continue;
        }
        if rec.len() != BEAT_LEN + 2 {
            return Err(CliError::parse(
                path,
                line,
                format!("expected {} fields, found {}", BEAT_LEN + 2, rec.len()),
            ));
        }
        let record_id = rec[0].to_string();
        let label_field = &rec[1];
        let mut chars = label_field.chars();
        let label = match (chars.next(), chars.next()) {
            (Some(c), None) => BeatClass::from_letter(c),
            _ => None,
        }
        .ok_or_else(|| {
            CliError::parse(path, line, format!("unknown class label `{label_field}`"))
        })?;
        let mut samples = Vec::with_capacity(BEAT_LEN);
        for (col, field) in rec.iter().skip(2).enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::parse(path, line, format!("field s{col}: not a number: `{field}`"))
            })?;
            samples.push(v);
        }
        let beat = Beat::new(samples, label, record_id, R_PEAK_OFFSET, false)
            .map_err(|e| CliError::parse(path, line, e.to_string()))?;
        beats.push(beat);
    }
    if beats.is_empty() {
        return Err(CliError::parse(path, 1, "no beats in file"));
    }
    Ok(beats)
}
