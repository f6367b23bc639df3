//! `heartgan train`: fit the generator/discriminator pair.
//!
//! Outputs land in one directory: `train_log.csv` (a row per step),
//! `snapshots/` (per-class sample pairs on the snapshot cadence),
//! `checkpoints/` (periodic pairs), the final `generator.ckpt` and
//! `discriminator.ckpt`, and `manifest.json`. `--resume` picks the
//! newest checkpoint pair in the directory, refuses to continue under a
//! different trajectory (architecture, hyperparameters, seed, or
//! training data), and appends to the existing log.

use crate::checkpoint::{
    load_discriminator, load_generator, read_header, save_discriminator, save_generator,
    TrainState,
};
use crate::commands::TrainArgs;
use crate::config_file::{resolve_settings, trajectory_sha, Overrides, TrainSettings};
use crate::error::{CliError, Result};
use crate::formats::beats::read_beats;
use crate::formats::trainlog::{snapshot_file_name, write_snapshot, TrainLogWriter};
use crate::manifest::RunManifest;
use crate::util::{create_dir_all, sha256_file};
use heartgan_core::adam::Adam;
use heartgan_core::data::BeatClass;
use heartgan_core::model::{DiscriminatorModel, GeneratorModel};
use heartgan_core::train::{train, StepRecord, TrainObserver};
use std::path::{Path, PathBuf};
use std::time::Instant;

const FINAL_G: &str = "generator.ckpt";
const FINAL_D: &str = "discriminator.ckpt";

fn periodic_name(epoch: usize, kind: &str) -> String {
    format!("epoch_{epoch}_{kind}.ckpt")
}

/// Everything the training loop reports back to disk.
struct RunObserver {
    log: TrainLogWriter,
    snapshots_dir: PathBuf,
    checkpoints_dir: PathBuf,
    checkpoint_every: usize,
    seed: u64,
    sha: String,
    last_step: u64,
    started: Option<Instant>,
    outputs: Vec<String>,
    failure: Option<CliError>,
}

impl RunObserver {
    /// Parks the CLI error and hands the loop a core error so it stops;
    /// the command surfaces the parked error afterwards.
    fn stash(&mut self, e: CliError) -> heartgan_core::Error {
        let msg = e.to_string();
        self.failure = Some(e);
        heartgan_core::Error::invalid("train observer", msg)
    }
}

impl TrainObserver for RunObserver {
    fn on_step(&mut self, rec: &StepRecord) -> heartgan_core::Result<()> {
        self.last_step = rec.step;
        let ms = self.started.map(|t| t.elapsed().as_millis() as u64).unwrap_or(0);
        self.log.log(rec, ms).map_err(|e| self.stash(e))
    }

    fn on_snapshot(
        &mut self,
        epoch: usize,
        class: BeatClass,
        real: &[f64],
        generated: &[f64],
    ) -> heartgan_core::Result<()> {
        match write_snapshot(&self.snapshots_dir, epoch, class, real, generated) {
            Ok(_) => {
                self.outputs.push(format!("snapshots/{}", snapshot_file_name(epoch, class)));
                Ok(())
            }
            Err(e) => Err(self.stash(e)),
        }
    }

    fn on_epoch_end(
        &mut self,
        epoch: usize,
        g: &mut GeneratorModel,
        d: &mut DiscriminatorModel,
    ) -> heartgan_core::Result<()> {
        if self.checkpoint_every == 0 || epoch % self.checkpoint_every != 0 {
            return Ok(());
        }
        let ts = TrainState {
            training_step: self.last_step,
            epoch,
            seed: self.seed,
            config_sha256: self.sha.clone(),
        };
        let g_name = periodic_name(epoch, "generator");
        let d_name = periodic_name(epoch, "discriminator");
        let result = save_generator(&self.checkpoints_dir.join(&g_name), g, &ts)
            .and_then(|_| save_discriminator(&self.checkpoints_dir.join(&d_name), d, &ts));
        match result {
            Ok(()) => {
                self.outputs.push(format!("checkpoints/{g_name}"));
                self.outputs.push(format!("checkpoints/{d_name}"));
                Ok(())
            }
            Err(e) => Err(self.stash(e)),
        }
    }
}

/// The newest checkpoint pair under `out_dir`: the periodic pairs plus
/// the final pair, ranked by stored epoch.
fn find_resume(out_dir: &Path) -> Result<(PathBuf, PathBuf, usize)> {
    let mut best: Option<(usize, PathBuf, PathBuf)> = None;
    let mut consider = |g_path: PathBuf, d_path: PathBuf| -> Result<()> {
        if !g_path.is_file() || !d_path.is_file() {
            return Ok(());
        }
        let epoch = read_header(&g_path)?.epoch;
        if best.as_ref().map_or(true, |(e, _, _)| epoch > *e) {
            best = Some((epoch, g_path, d_path));
        }
        Ok(())
    };

    let ckpt_dir = out_dir.join("checkpoints");
    if ckpt_dir.is_dir() {
        let mut epochs = Vec::new();
        for entry in std::fs::read_dir(&ckpt_dir).map_err(|e| CliError::io(&ckpt_dir, e))? {
            let entry = entry.map_err(|e| CliError::io(&ckpt_dir, e))?;
            let name = entry.file_name();
            let Some(name) = name.to_str() else { continue };
            if let Some(n) = name
                .strip_prefix("epoch_")
                .and_then(|s| s.strip_suffix("_generator.ckpt"))
                .and_then(|s| s.parse::<usize>().ok())
            {
                epochs.push(n);
            }
        }
        epochs.sort_unstable();
        for n in epochs {
            consider(
                ckpt_dir.join(periodic_name(n, "generator")),
                ckpt_dir.join(periodic_name(n, "discriminator")),
            )?;
        }
    }
    consider(out_dir.join(FINAL_G), out_dir.join(FINAL_D))?;

    let Some((epoch, g, d)) = best else {
        return Err(CliError::config(format!(
            "{}: nothing to resume from (no checkpoint pair found)",
            out_dir.display()
        )));
    };
    Ok((g, d, epoch))
}

fn settings_json(s: &TrainSettings) -> serde_json::Value {
    serde_json::json!({
        "arch": s.arch.name(),
        "checkpoint_every": s.checkpoint_every,
        "train": s.config,
    })
}

pub fn run(args: &TrainArgs) -> Result<()> {
    let flags = Overrides {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        beta1: args.beta1,
        beta2: args.beta2,
        epsilon: args.epsilon,
        lambda_rec: args.lambda_rec,
        lambda_class: args.lambda_class,
        seed: args.seed,
        noise_sigma: args.noise_sigma,
        snapshot_every: args.snapshot_every,
        checkpoint_every: args.checkpoint_every,
        arch: args.arch,
    };
    let settings = resolve_settings(args.config.as_deref(), &flags)?;
    let cfg = settings.config.clone();

    let beats = read_beats(&args.train_beats)?;
    let beats_sha = sha256_file(&args.train_beats)?;
    let sha = trajectory_sha(&settings, &beats_sha);

    create_dir_all(&args.out_dir)?;
    let snapshots_dir = args.out_dir.join("snapshots");
    let checkpoints_dir = args.out_dir.join("checkpoints");
    create_dir_all(&snapshots_dir)?;
    create_dir_all(&checkpoints_dir)?;

    let (mut g, mut d, start_epoch) = if args.resume {
        let (g_path, d_path, _) = find_resume(&args.out_dir)?;
        let (g, gh) = load_generator(&g_path)?;
        let (d, dh) = load_discriminator(&d_path)?;
        if gh.epoch != dh.epoch {
            return Err(CliError::checkpoint(format!(
                "checkpoint pair disagrees on epoch ({} vs {})",
                gh.epoch, dh.epoch
            )));
        }
        for (path, header) in [(&g_path, &gh), (&d_path, &dh)] {
            if header.config_sha256 != sha {
                return Err(CliError::config(format!(
                    "{}: trained under a different trajectory (architecture, \
                     hyperparameters, seed, or training data changed); refusing to resume",
                    path.display()
                )));
            }
        }
        (g, d, gh.epoch)
    } else {
        (
            GeneratorModel::seeded(settings.arch.generator(), cfg.seed)?,
            DiscriminatorModel::seeded(settings.arch.discriminator(), cfg.seed)?,
            0,
        )
    };

    let mut opt_g = Adam::new(cfg.adam)?;
    let mut opt_d = Adam::new(cfg.adam)?;

    let mut observer = RunObserver {
        log: TrainLogWriter::open(&args.out_dir.join("train_log.csv"), args.resume)?,
        snapshots_dir,
        checkpoints_dir,
        checkpoint_every: settings.checkpoint_every,
        seed: cfg.seed,
        sha: sha.clone(),
        last_step: 0,
        started: args.timestamps.then(Instant::now),
        outputs: Vec::new(),
        failure: None,
    };

    let final_step = match train(
        &mut g,
        &mut d,
        &mut opt_g,
        &mut opt_d,
        &beats,
        &cfg,
        start_epoch,
        &mut observer,
    ) {
        Ok(step) => step,
        Err(core_err) => {
            return Err(match observer.failure.take() {
                Some(cli_err) => cli_err,
                None => core_err.into(),
            })
        }
    };
    observer.log.flush()?;

    let end_epoch = cfg.epochs.max(start_epoch);
    let ts = TrainState {
        training_step: final_step,
        epoch: end_epoch,
        seed: cfg.seed,
        config_sha256: sha.clone(),
    };
    save_generator(&args.out_dir.join(FINAL_G), &g, &ts)?;
    save_discriminator(&args.out_dir.join(FINAL_D), &d, &ts)?;

    let mut manifest = RunManifest::new("train");
    if args.timestamps {
        manifest.stamp();
    }
    manifest.input(&args.train_beats)?;
    if let Some(config_path) = &args.config {
        manifest.input(config_path)?;
    }
    manifest.config = settings_json(&settings);
    manifest.seeds = serde_json::json!({ "seed": cfg.seed });
    manifest.output("train_log.csv");
    manifest.output(FINAL_G);
    manifest.output(FINAL_D);
    for name in observer.outputs {
        manifest.output(name);
    }
    manifest.details = serde_json::json!({
        "start_epoch": start_epoch,
        "end_epoch": end_epoch,
        "final_step": final_step,
        "steps_per_epoch": beats.len() / cfg.batch_size,
        "n_train_beats": beats.len(),
        "trajectory_sha256": sha,
        "resumed": args.resume,
    });
    manifest.write(&args.out_dir.join("manifest.json"))
}
