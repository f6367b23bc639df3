//! Training log and snapshot files.
//!
//! `train_log.csv` gets one row per optimization step. `time_ms` is 0
//! unless wall-clock timestamps were requested, keeping the default
//! output byte-identical across reruns. Snapshot files pair the fixed
//! per-class reference beat with the generator's current rendition of
//! it, one file per (epoch, class).

use crate::error::{CliError, Result};
use heartgan_core::data::{BeatClass, BEAT_LEN};
use heartgan_core::train::StepRecord;
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const TRAIN_LOG_HEADER: &str =
    "epoch,step,d_adv,d_class,d_total,g_adv,g_rec,g_class,g_total,time_ms";

pub struct TrainLogWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl TrainLogWriter {
    /// Creates the log with its header, or appends to an existing one
    /// when resuming.
    pub fn open(path: &Path, append: bool) -> Result<Self> {
        let exists = path.is_file();
        let file = OpenOptions::new()
            .create(true)
            .append(append)
            .write(true)
            .truncate(!append)
            .open(path)
            .map_err(|e| CliError::io(path, e))?;
        let mut out = BufWriter::new(file);
        if !append || !exists {
            writeln!(out, "{TRAIN_LOG_HEADER}").map_err(|e| CliError::io(path, e))?;
        }
        Ok(TrainLogWriter { path: path.to_path_buf(), out })
    }

    pub fn log(&mut self, rec: &StepRecord, time_ms: u64) -> Result<()> {
        let l = &rec.losses;
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{},{},{}",
            rec.epoch, rec.step, l.d_adv, l.d_class, l.d_total, l.g_adv, l.g_rec, l.g_class,
            l.g_total, time_ms
        )
        .map_err(|e| CliError::io(&self.path, e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

pub fn snapshot_file_name(epoch: usize, class: BeatClass) -> String {
    format!("epoch_{epoch}_{}.csv", class.letter())
}

/// One snapshot file: the reference beat and its synthetic counterpart.
pub fn write_snapshot(
    dir: &Path,
    epoch: usize,
    class: BeatClass,
    real: &[f64],
    generated: &[f64],
) -> Result<PathBuf> {
    let path = dir.join(snapshot_file_name(epoch, class));
    let mut text = String::from("epoch,class,kind");
    for i in 0..BEAT_LEN {
        let _ = write!(text, ",s{i}");
    }
    text.push('\n');
    for (kind, samples) in [("real", real), ("generated", generated)] {
        let _ = write!(text, "{epoch},{},{kind}", class.letter());
        for v in samples {
            let _ = write!(text, ",{v}");
        }
        text.push('\n');
    }
    crate::util::write_file(&path, text.as_bytes())?;
    Ok(path)
}

/// Parses `epoch_<n>_<class>.csv` back into its tag.
pub fn parse_snapshot_name(name: &str) -> Option<(usize, BeatClass)> {
    let rest = name.strip_prefix("epoch_")?.strip_suffix(".csv")?;
    let (epoch_part, class_part) = rest.rsplit_once('_')?;
    let epoch = epoch_part.parse().ok()?;
    let mut chars = class_part.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Some((epoch, BeatClass::from_letter(c)?)),
        _ => None,
    }
}

/// Reads the two sample rows of a snapshot file.
pub fn read_snapshot(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut real = None;
    let mut generated = None;
    for (idx, line) in text.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != BEAT_LEN + 3 {
            return Err(CliError::parse(
                path,
                idx + 1,
                format!("expected {} fields, found {}", BEAT_LEN + 3, fields.len()),
            ));
        }
        let mut samples = Vec::with_capacity(BEAT_LEN);
        for f in &fields[3..] {
            samples.push(f.parse::<f64>().map_err(|_| {
                CliError::parse(path, idx + 1, format!("not a number: `{f}`"))
            })?);
        }
        match fields[2] {
            "real" => real = Some(samples),
            "generated" => generated = Some(samples),
            other => {
                return Err(CliError::parse(path, idx + 1, format!("unknown kind `{other}`")))
            }
        }
    }
    match (real, generated) {
        (Some(r), Some(g)) => Ok((r, g)),
        _ => Err(CliError::parse(path, 1, "snapshot must hold a real and a generated row")),
    }
}
