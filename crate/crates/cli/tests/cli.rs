//! End-to-end pipeline tests driven through the command layer.

use clap::Parser;
use heartgan::commands::{self, Cli};
use heartgan::formats::beats::{read_beats, write_beats};
use heartgan_core::data::{toy_beats, BeatClass};
use std::fs;
use std::path::Path;

fn run(args: &[&str]) -> heartgan::Result<()> {
    let mut argv = vec!["heartgan"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).expect("argv parses");
    commands::run(&cli)
}

fn s(path: &Path) -> String {
    path.to_str().expect("utf-8 path").to_string()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn read_bytes(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let all = dir.path().join("all_beats.csv");
    write_beats(&all, &toy_beats(120, 7)).unwrap();

    let prep = dir.path().join("prep");
    run(&["prepare", &s(&all), &s(&prep), "--seed", "42"]).unwrap();
    let train_beats = prep.join("train_beats.csv");
    let test_beats = prep.join("test_beats.csv");
    let train = read_beats(&train_beats).unwrap();
    let test = read_beats(&test_beats).unwrap();
    assert_eq!(test.len(), 24);
    let per_class = train.len() / 4;
    for class in BeatClass::ALL {
        assert_eq!(
            train.iter().filter(|b| b.label == class).count(),
            per_class,
            "balanced after oversampling"
        );
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&prep.join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "prepare");
    assert_eq!(manifest["inputs"][0]["name"], "all_beats.csv");

    let run_dir = dir.path().join("run");
    run(&[
        "train",
        &s(&train_beats),
        &s(&run_dir),
        "--epochs",
        "2",
        "--arch",
        "halved",
        "--batch-size",
        "16",
        "--snapshot-every",
        "1",
        "--checkpoint-every",
        "1",
    ])
    .unwrap();

    let steps = train.len() / 16;
    let log = read(&run_dir.join("train_log.csv"));
    let rows: Vec<&str> = log.lines().collect();
    assert_eq!(rows[0], "epoch,step,d_adv,d_class,d_total,g_adv,g_rec,g_class,g_total,time_ms");
    assert_eq!(rows.len(), 1 + 2 * steps);
    for epoch in [1usize, 2] {
        let n = rows[1..]
            .iter()
            .filter(|r| r.split(',').next() == Some(&epoch.to_string()))
            .count();
        assert_eq!(n, steps);
        for class in BeatClass::ALL {
            let snap = run_dir
                .join("snapshots")
                .join(format!("epoch_{epoch}_{}.csv", class.letter()));
            let (real, generated) = heartgan::formats::trainlog::read_snapshot(&snap).unwrap();
            assert_eq!(real.len(), 280);
            assert_eq!(generated.len(), 280);
        }
        for kind in ["generator", "discriminator"] {
            assert!(run_dir
                .join("checkpoints")
                .join(format!("epoch_{epoch}_{kind}.ckpt"))
                .is_file());
        }
    }
    let g_ckpt = run_dir.join("generator.ckpt");
    let d_ckpt = run_dir.join("discriminator.ckpt");
    assert!(g_ckpt.is_file() && d_ckpt.is_file());
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&run_dir.join("manifest.json"))).unwrap();
    assert_eq!(manifest["details"]["final_step"], 2 * steps);
    assert_eq!(manifest["details"]["steps_per_epoch"], steps);

    let synth = dir.path().join("synth.csv");
    run(&["generate", &s(&g_ckpt), &s(&test_beats), &s(&synth), "--seed", "5"]).unwrap();
    assert!(dir.path().join("synth.csv.manifest.json").is_file());
    let generated = read_beats(&synth).unwrap();
    assert_eq!(generated.len(), test.len());
    for (g, t) in generated.iter().zip(&test) {
        assert_eq!(g.label, t.label);
        assert_eq!(g.record_id, t.record_id);
        assert!(g.samples.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    let eval_dir = dir.path().join("eval");
    run(&[
        "evaluate",
        &s(&g_ckpt),
        &s(&d_ckpt),
        &s(&test_beats),
        &s(&eval_dir),
        "--seed",
        "5",
    ])
    .unwrap();
    let similarity: serde_json::Value =
        serde_json::from_str(&read(&eval_dir.join("similarity.json"))).unwrap();
    assert!(similarity["overall"]["ssim"].is_f64());
    assert_eq!(similarity["overall"]["n_pairs"], 24);
    for name in ["classification_real.csv", "classification_adv.csv", "detection.csv"] {
        let text = read(&eval_dir.join(name));
        assert_eq!(text.lines().count(), if name == "detection.csv" { 2 } else { 5 });
    }

    let plots = dir.path().join("plots");
    run(&["plot", &s(&run_dir.join("snapshots")), &s(&plots)]).unwrap();
    let beat_plots = dir.path().join("beat_plots");
    run(&["plot", &s(&test_beats), &s(&beat_plots), "--max-traces", "6"]).unwrap();
    for class in BeatClass::ALL {
        for base in [&plots, &beat_plots] {
            let svg = read(&base.join(format!("plot_{}.svg", class.letter())));
            assert!(svg.starts_with("<svg"));
            assert!(svg.contains(&format!("class {}", class.letter())));
            assert!(svg.trim_end().ends_with("</svg>"));
        }
    }
}

#[test]
fn resume_continues_deterministically_and_guards_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let train_csv = dir.path().join("train.csv");
    write_beats(&train_csv, &toy_beats(32, 3)).unwrap();
    let base = [
        "--arch",
        "halved",
        "--batch-size",
        "8",
        "--snapshot-every",
        "0",
        "--checkpoint-every",
        "0",
    ];

    let train_s = s(&train_csv);
    let train_run = |out: &Path, extra: &[&str]| {
        let out_s = s(out);
        let mut args = vec!["train", train_s.as_str(), out_s.as_str()];
        args.extend_from_slice(extra);
        args.extend_from_slice(&base);
        run(&args)
    };

    // Two interrupted runs (1 epoch, then resume to 2) must agree bit for bit.
    let mut finals = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        train_run(&out, &["--epochs", "1"]).unwrap();
        train_run(&out, &["--epochs", "2", "--resume"]).unwrap();
        finals.push((
            read_bytes(&out.join("generator.ckpt")),
            read_bytes(&out.join("discriminator.ckpt")),
            read(&out.join("train_log.csv")),
        ));
    }
    assert_eq!(finals[0], finals[1]);
    assert_eq!(finals[0].2.lines().count(), 1 + 8, "resume appends to the log");

    // A 0-epoch run checkpoints the untouched init, so resuming from it
    // reproduces a straight run of the same length exactly.
    let (c, d) = (dir.path().join("c"), dir.path().join("d"));
    train_run(&c, &["--epochs", "0"]).unwrap();
    assert_eq!(read(&c.join("train_log.csv")).lines().count(), 1);
    train_run(&c, &["--epochs", "1", "--resume"]).unwrap();
    train_run(&d, &["--epochs", "1"]).unwrap();
    for name in ["generator.ckpt", "discriminator.ckpt", "train_log.csv"] {
        assert_eq!(read_bytes(&c.join(name)), read_bytes(&d.join(name)), "{name}");
    }

    // Changed seed means a different trajectory: refuse rather than blend.
    let err = train_run(&c, &["--epochs", "2", "--resume", "--seed", "43"]).unwrap_err();
    assert!(err.to_string().contains("refusing to resume"), "{err}");

    // Nothing to resume from in a fresh directory.
    let empty = dir.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let err = train_run(&empty, &["--epochs", "1", "--resume"]).unwrap_err();
    assert!(err.to_string().contains("nothing to resume from"), "{err}");
}

#[test]
fn binary_reports_one_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_heartgan"))
        .args([
            "generate",
            &s(&dir.path().join("missing.ckpt")),
            &s(&dir.path().join("missing.csv")),
            &s(&dir.path().join("out.csv")),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.starts_with("error[io]: "), "{stderr}");

    let out = std::process::Command::new(env!("CARGO_BIN_EXE_heartgan"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
