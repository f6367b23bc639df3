//! `heartgan generate`: synthesize beats from a generator checkpoint.
//!
//! One synthetic beat per conditioning beat, under the beat's own
//! label. The noise stream matches `evaluate`, so the same checkpoint,
//! beats, seed, and sigma reproduce exactly the adversarial set the
//! evaluation scores.

use crate::checkpoint::load_generator;
use crate::commands::GenerateArgs;
use crate::error::Result;
use crate::formats::beats::{read_beats, write_beats};
use crate::manifest::RunManifest;
use heartgan_core::metrics::synthesize_set;

pub fn run(args: &GenerateArgs) -> Result<()> {
    let mut manifest = RunManifest::new("generate");
    if args.timestamps {
        manifest.stamp();
    }
    manifest.input(&args.generator)?;
    manifest.input(&args.beats)?;

    let (mut g, header) = load_generator(&args.generator)?;
    let beats = read_beats(&args.beats)?;
    let synth = synthesize_set(&mut g, &beats, args.noise_sigma, args.seed)?;
    write_beats(&args.out, &synth)?;

    let out_name = args
        .out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| args.out.display().to_string());
    manifest.output(out_name.clone());
    manifest.config = serde_json::json!({
        "noise_sigma": args.noise_sigma,
        "generator_epoch": header.epoch,
        "generator_step": header.training_step,
    });
    manifest.seeds = serde_json::json!({ "seed": args.seed });
    manifest.details = serde_json::json!({ "n_beats": synth.len() });

    let manifest_path = args.out.with_file_name(format!("{out_name}.manifest.json"));
    manifest.write(&manifest_path)
}
