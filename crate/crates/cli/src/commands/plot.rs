//! `heartgan plot`: SVG beat panels, one file per class.
//!
//! Two input shapes. A snapshots directory plots the fixed reference
//! beat against the generator's renditions across epochs, so a panel
//! reads as a convergence picture. A beats CSV plots the first few
//! beats of each class. Axes are fixed to the beat window: sample index
//! 0..=280 horizontally, normalized amplitude 0..=1 vertically. The SVG
//! is assembled from formatted strings only, so output is byte-stable.

use crate::commands::PlotArgs;
use crate::error::{CliError, Result};
use crate::formats::beats::read_beats;
use crate::formats::trainlog::{parse_snapshot_name, read_snapshot};
use crate::manifest::RunManifest;
use crate::util::{create_dir_all, write_file};
use heartgan_core::data::{BeatClass, BEAT_LEN};
use std::fmt::Write as _;
use std::path::Path;

const W: f64 = 640.0;
const H: f64 = 360.0;
const ML: f64 = 48.0;
const MR: f64 = 16.0;
const MT: f64 = 30.0;
const MB: f64 = 38.0;
const REAL_COLOR: &str = "#2b6cb0";
const GEN_COLOR: &str = "#c53030";

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Real,
    Generated,
}

struct Trace {
    kind: Kind,
    opacity: f64,
    samples: Vec<f64>,
}

fn x_of(i: usize) -> f64 {
    ML + (i as f64 / BEAT_LEN as f64) * (W - ML - MR)
}

fn y_of(v: f64) -> f64 {
    MT + (1.0 - v) * (H - MT - MB)
}

/// Up to `cap` indices spread evenly over `0..n`, endpoints included.
fn sample_indices(n: usize, cap: usize) -> Vec<usize> {
    if n <= cap || cap < 2 {
        return (0..n.min(cap.max(1))).collect();
    }
    (0..cap).map(|i| i * (n - 1) / (cap - 1)).collect()
}

fn render_panel(class: BeatClass, traces: &[Trace], legend: &[(&str, &str)]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r##"<rect width="{W}" height="{H}" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="19" font-family="sans-serif" font-size="14" fill="#222" text-anchor="middle">class {}</text>"##,
        ML + (W - ML - MR) / 2.0,
        class.letter()
    );

    for tick in [0usize, 70, 140, 210, 280] {
        let x = x_of(tick);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            MT,
            H - MB
        );
        let _ = writeln!(
            s,
            r##"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="#555" text-anchor="middle">{tick}</text>"##,
            H - MB + 14.0
        );
    }
    for tick in [0.0f64, 0.25, 0.5, 0.75, 1.0] {
        let y = y_of(tick);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            ML,
            W - MR
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="#555" text-anchor="end">{tick:.2}</text>"##,
            ML - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333333" stroke-width="1"/>"##,
        ML,
        MT,
        W - ML - MR,
        H - MT - MB
    );

    // Generated traces first so the reference stays on top.
    for pass in [Kind::Generated, Kind::Real] {
        for t in traces.iter().filter(|t| t.kind == pass) {
            let color = match t.kind {
                Kind::Real => REAL_COLOR,
                Kind::Generated => GEN_COLOR,
            };
            let mut points = String::new();
            for (i, v) in t.samples.iter().enumerate() {
                let _ = write!(points, "{:.2},{:.2} ", x_of(i), y_of(*v));
            }
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.3" opacity="{:.3}" points="{}"/>"#,
                t.opacity,
                points.trim_end()
            );
        }
    }

    let mut lx = W - MR - 150.0;
    for (label, color) in legend {
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="15" x2="{:.2}" y2="15" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="19" font-family="sans-serif" font-size="12" fill="#222">{label}</text>"##,
            lx + 23.0
        );
        lx += 18.0 + 8.0 * label.len() as f64 + 35.0;
    }
    s.push_str("</svg>\n");
    s
}

fn panels_from_snapshots(
    dir: &Path,
    max_traces: usize,
    manifest: &mut RunManifest,
) -> Result<Vec<(BeatClass, Vec<Trace>)>> {
    let mut by_class: [Vec<(usize, std::path::PathBuf)>; 4] = Default::default();
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some((epoch, class)) = parse_snapshot_name(name) {
            by_class[class.index()].push((epoch, entry.path()));
        }
    }
    let mut panels = Vec::new();
    for class in BeatClass::ALL {
        let files = &mut by_class[class.index()];
        if files.is_empty() {
            continue;
        }
        files.sort();
        for (_, path) in files.iter() {
            manifest.input(path)?;
        }
        // One generated trace per kept epoch, oldest faintest; the
        // reference beat is identical across a run's snapshots, so it
        // is read once from the newest file.
        let keep = sample_indices(files.len(), max_traces.saturating_sub(1).max(1));
        let mut traces = Vec::new();
        for (pos, &fi) in keep.iter().enumerate() {
            let (_, generated) = read_snapshot(&files[fi].1)?;
            traces.push(Trace {
                kind: Kind::Generated,
                opacity: 0.30 + 0.70 * (pos + 1) as f64 / keep.len() as f64,
                samples: generated,
            });
        }
        let (real, _) = read_snapshot(&files[files.len() - 1].1)?;
        traces.push(Trace { kind: Kind::Real, opacity: 1.0, samples: real });
        panels.push((class, traces));
    }
    if panels.is_empty() {
        return Err(CliError::config(format!(
            "{}: no snapshot files (epoch_<n>_<class>.csv) found",
            dir.display()
        )));
    }
    Ok(panels)
}

fn panels_from_beats(
    path: &Path,
    max_traces: usize,
    manifest: &mut RunManifest,
) -> Result<Vec<(BeatClass, Vec<Trace>)>> {
    manifest.input(path)?;
    let beats = read_beats(path)?;
    let mut panels = Vec::new();
    for class in BeatClass::ALL {
        let of_class: Vec<&heartgan_core::data::Beat> =
            beats.iter().filter(|b| b.label == class).collect();
        if of_class.is_empty() {
            continue;
        }
        let n = of_class.len().min(max_traces.max(1));
        let traces = of_class[..n]
            .iter()
            .enumerate()
            .map(|(i, b)| Trace {
                kind: Kind::Real,
                opacity: 0.35 + 0.65 * (i + 1) as f64 / n as f64,
                samples: b.samples.clone(),
            })
            .collect();
        panels.push((class, traces));
    }
    Ok(panels)
}

pub fn run(args: &PlotArgs) -> Result<()> {
    let mut manifest = RunManifest::new("plot");
    if args.timestamps {
        manifest.stamp();
    }

    let snapshot_mode = args.input.is_dir();
    let panels = if snapshot_mode {
        panels_from_snapshots(&args.input, args.max_traces, &mut manifest)?
    } else {
        panels_from_beats(&args.input, args.max_traces, &mut manifest)?
    };

    let legend: &[(&str, &str)] = if snapshot_mode {
        &[("real", REAL_COLOR), ("generated", GEN_COLOR)]
    } else {
        &[("beat", REAL_COLOR)]
    };

    create_dir_all(&args.out_dir)?;
    for (class, traces) in &panels {
        let name = format!("plot_{}.svg", class.letter());
        write_file(&args.out_dir.join(&name), render_panel(*class, traces, legend).as_bytes())?;
        manifest.output(name);
    }

    manifest.config = serde_json::json!({
        "max_traces": args.max_traces,
        "mode": if snapshot_mode { "snapshots" } else { "beats" },
    });
    manifest.seeds = serde_json::json!({});
    manifest.details = serde_json::json!({
        "panels": panels.iter().map(|(c, t)| {
            serde_json::json!({ "class": c.letter().to_string(), "traces": t.len() })
        }).collect::<Vec<_>>(),
    });
    manifest.write(&args.out_dir.join("manifest.json"))
}
