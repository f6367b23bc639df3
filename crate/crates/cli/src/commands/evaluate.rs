//! `heartgan evaluate`: score a trained pair on held-out beats.
//!
//! Four files: `similarity.json` (generator fidelity, overall and per
//! class), `classification_real.csv` and `classification_adv.csv` (the
//! four-class head on real beats and on their synthetic counterparts),
//! and `detection.csv` (the real-vs-synthetic head over both halves).

use crate::checkpoint::{load_discriminator, load_generator};
use crate::commands::EvaluateArgs;
use crate::error::Result;
use crate::formats::beats::read_beats;
use crate::formats::reports::{write_classification, write_detection, write_similarity};
use crate::manifest::RunManifest;
use crate::util::create_dir_all;
use heartgan_core::metrics::{evaluate_discriminator, evaluate_generator, SsimConfig};

pub fn run(args: &EvaluateArgs) -> Result<()> {
    let mut manifest = RunManifest::new("evaluate");
    if args.timestamps {
        manifest.stamp();
    }
    manifest.input(&args.generator)?;
    manifest.input(&args.discriminator)?;
    manifest.input(&args.test_beats)?;

    let (mut g, _) = load_generator(&args.generator)?;
    let (mut d, _) = load_discriminator(&args.discriminator)?;
    let beats = read_beats(&args.test_beats)?;

    let ssim_cfg = SsimConfig::default();
    let similarity = evaluate_generator(&mut g, &beats, args.noise_sigma, args.seed, &ssim_cfg)?;
    let discrimination =
        evaluate_discriminator(&mut d, &mut g, &beats, args.noise_sigma, args.seed)?;

    create_dir_all(&args.out_dir)?;
    write_similarity(&args.out_dir.join("similarity.json"), &similarity)?;
    write_classification(
        &args.out_dir.join("classification_real.csv"),
        &discrimination.class_real,
    )?;
    write_classification(
        &args.out_dir.join("classification_adv.csv"),
        &discrimination.class_adversarial,
    )?;
    write_detection(&args.out_dir.join("detection.csv"), &discrimination.detection)?;
    for name in
        ["similarity.json", "classification_real.csv", "classification_adv.csv", "detection.csv"]
    {
        manifest.output(name);
    }

    manifest.config = serde_json::json!({
        "noise_sigma": args.noise_sigma,
        "ssim": ssim_cfg,
    });
    manifest.seeds = serde_json::json!({ "seed": args.seed });
    manifest.details = serde_json::json!({
        "n_beats": beats.len(),
        "class_accuracy_real": discrimination.class_real.accuracy,
        "class_accuracy_adversarial": discrimination.class_adversarial.accuracy,
        "detection_accuracy": discrimination.detection.accuracy,
        "detection_auc": discrimination.detection.auc,
    });
    manifest.write(&args.out_dir.join("manifest.json"))
}
