//! Training configuration resolution.
//!
//! Three layers, later wins: built-in defaults, then an optional
//! `key = value` config file, then command-line flags. The file format
//! is one assignment per line; blank lines and lines starting with `#`
//! are skipped; unknown and duplicate keys are errors so typos cannot
//! silently fall back to a default.

use crate::error::{CliError, Result};
use crate::util::sha256_bytes;
use heartgan_core::model::{DiscriminatorArch, GeneratorArch};
use heartgan_core::train::TrainingConfig;
use std::path::Path;
use std::str::FromStr;

pub const DEFAULT_CHECKPOINT_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchChoice {
    Full,
    Halved,
}

impl ArchChoice {
    pub fn name(self) -> &'static str {
        match self {
            ArchChoice::Full => "full",
            ArchChoice::Halved => "halved",
        }
    }

    pub fn generator(self) -> GeneratorArch {
        match self {
            ArchChoice::Full => GeneratorArch::full(),
            ArchChoice::Halved => GeneratorArch::halved(),
        }
    }

    pub fn discriminator(self) -> DiscriminatorArch {
        match self {
            ArchChoice::Full => DiscriminatorArch::full(),
            ArchChoice::Halved => DiscriminatorArch::halved(),
        }
    }
}

impl FromStr for ArchChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(ArchChoice::Full),
            "halved" => Ok(ArchChoice::Halved),
            other => Err(format!("unknown architecture `{other}` (expected full or halved)")),
        }
    }
}

/// Everything `train` needs beyond its file arguments.
#[derive(Debug, Clone)]
pub struct TrainSettings {
    pub config: TrainingConfig,
    pub checkpoint_every: usize,
    pub arch: ArchChoice,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            config: TrainingConfig::default(),
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            arch: ArchChoice::Full,
        }
    }
}

/// One optional value per knob; `apply` writes the present ones.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub epsilon: Option<f64>,
    pub lambda_rec: Option<f64>,
    pub lambda_class: Option<f64>,
    pub seed: Option<u64>,
    pub noise_sigma: Option<f64>,
    pub snapshot_every: Option<usize>,
    pub checkpoint_every: Option<usize>,
    pub arch: Option<ArchChoice>,
}

impl Overrides {
    pub fn apply(&self, s: &mut TrainSettings) {
        let c = &mut s.config;
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.learning_rate {
            c.adam.alpha = v;
        }
        if let Some(v) = self.beta1 {
            c.adam.beta1 = v;
        }
        if let Some(v) = self.beta2 {
            c.adam.beta2 = v;
        }
        if let Some(v) = self.epsilon {
            c.adam.epsilon = v;
        }
        if let Some(v) = self.lambda_rec {
            c.lambda_rec = v;
        }
        if let Some(v) = self.lambda_class {
            c.lambda_class = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.noise_sigma {
            c.noise_sigma = v;
        }
        if let Some(v) = self.snapshot_every {
            c.snapshot_every = v;
        }
        if let Some(v) = self.checkpoint_every {
            s.checkpoint_every = v;
        }
        if let Some(v) = self.arch {
            s.arch = v;
        }
    }
}

fn parse_value<T: FromStr>(path: &Path, line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| {
        CliError::parse(path, line, format!("bad value for `{key}`: `{raw}`"))
    })
}

pub fn parse_config_file(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut o = Overrides::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| {
            CliError::parse(path, line, format!("expected `key = value`, found `{trimmed}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(CliError::parse(path, line, format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());
        match key {
            "epochs" => o.epochs = Some(parse_value(path, line, key, value)?),
            "batch_size" => o.batch_size = Some(parse_value(path, line, key, value)?),
            "learning_rate" => o.learning_rate = Some(parse_value(path, line, key, value)?),
            "beta1" => o.beta1 = Some(parse_value(path, line, key, value)?),
            "beta2" => o.beta2 = Some(parse_value(path, line, key, value)?),
            "epsilon" => o.epsilon = Some(parse_value(path, line, key, value)?),
            "lambda_rec" => o.lambda_rec = Some(parse_value(path, line, key, value)?),
            "lambda_class" => o.lambda_class = Some(parse_value(path, line, key, value)?),
            "seed" => o.seed = Some(parse_value(path, line, key, value)?),
            "noise_sigma" => o.noise_sigma = Some(parse_value(path, line, key, value)?),
            "snapshot_every" => o.snapshot_every = Some(parse_value(path, line, key, value)?),
            "checkpoint_every" => o.checkpoint_every = Some(parse_value(path, line, key, value)?),
            "arch" => {
                o.arch = Some(
                    value.parse().map_err(|e: String| CliError::parse(path, line, e))?,
                )
            }
            other => {
                return Err(CliError::parse(path, line, format!("unknown key `{other}`")));
            }
        }
    }
    Ok(o)
}

/// Defaults, then the config file, then the flags.
pub fn resolve_settings(config_path: Option<&Path>, flags: &Overrides) -> Result<TrainSettings> {
    let mut s = TrainSettings::default();
    if let Some(path) = config_path {
        parse_config_file(path)?.apply(&mut s);
    }
    flags.apply(&mut s);
    s.config.validate()?;
    Ok(s)
}

/// Hash of everything that pins the optimization trajectory: the
/// architecture, the optimizer and loss hyperparameters, the batch
/// size, the seed, the noise width, and content hash of the training
/// set. Epochs and output cadences are deliberately absent so a run can
/// be resumed toward a later epoch target; resuming under a different
/// trajectory hash is refused.
pub fn trajectory_sha(s: &TrainSettings, train_beats_sha256: &str) -> String {
    let c = &s.config;
    let payload = serde_json::json!({
        "arch": s.arch.name(),
        "alpha": c.adam.alpha,
        "beta1": c.adam.beta1,
        "beta2": c.adam.beta2,
        "epsilon": c.adam.epsilon,
        "lambda_rec": c.lambda_rec,
        "lambda_class": c.lambda_class,
        "batch_size": c.batch_size,
        "seed": c.seed,
        "noise_sigma": c.noise_sigma,
        "train_beats_sha256": train_beats_sha256,
    });
    sha256_bytes(payload.to_string().as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn precedence_is_defaults_then_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.conf");
        fs::write(
            &path,
            "# cadence\nepochs = 50\nlearning_rate = 0.001\n\nbatch_size = 32\narch = halved\n",
        )
        .unwrap();
        let flags = Overrides { epochs: Some(8), ..Overrides::default() };
        let s = resolve_settings(Some(&path), &flags).unwrap();
        assert_eq!(s.config.epochs, 8);
        assert_eq!(s.config.adam.alpha, 0.001);
        assert_eq!(s.config.batch_size, 32);
        assert_eq!(s.arch, ArchChoice::Halved);
        assert_eq!(s.config.seed, 42);
        assert_eq!(s.checkpoint_every, DEFAULT_CHECKPOINT_EVERY);
    }

    #[test]
    fn unknown_duplicate_and_bad_values_are_line_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.conf");

        fs::write(&path, "epochs = 5\nlerning_rate = 0.1\n").unwrap();
        let err = parse_config_file(&path).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("unknown key"), "{err}");

        fs::write(&path, "epochs = 5\nepochs = 6\n").unwrap();
        let err = parse_config_file(&path).unwrap_err();
        assert!(err.to_string().contains("duplicate key"), "{err}");

        fs::write(&path, "epochs = soon\n").unwrap();
        let err = parse_config_file(&path).unwrap_err();
        assert!(err.to_string().contains("bad value"), "{err}");
    }

    #[test]
    fn trajectory_sha_ignores_epochs_but_not_seed() {
        let base = TrainSettings::default();
        let mut later = base.clone();
        later.config.epochs += 100;
        later.checkpoint_every = 1;
        assert_eq!(trajectory_sha(&base, "x"), trajectory_sha(&later, "x"));

        let mut reseeded = base.clone();
        reseeded.config.seed = 43;
        assert_ne!(trajectory_sha(&base, "x"), trajectory_sha(&reseeded, "x"));
        assert_ne!(trajectory_sha(&base, "x"), trajectory_sha(&base, "y"));
    }
}
