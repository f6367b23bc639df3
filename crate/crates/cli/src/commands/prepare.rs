//! `heartgan prepare`: raw input to train/test beat sets.

use crate::commands::{PrepareArgs, SplitChoice};
use crate::error::Result;
use crate::formats::beats::{read_beats, write_beats};
use crate::formats::records::scan_record_dir;
use crate::manifest::RunManifest;
use crate::util::create_dir_all;
use heartgan_core::data::{
    extract_beats, smote_balance, Beat, BeatClass, ClassCounts, Extraction, LabelMap, SplitMode,
    DS1, DS2, SMOTE_K,
};

fn counts_json(beats: &[Beat]) -> serde_json::Value {
    let c = ClassCounts::of(beats);
    let mut map = serde_json::Map::new();
    for class in BeatClass::ALL {
        map.insert(
            class.letter().to_string(),
            serde_json::json!(c.counts[class.index()]),
        );
    }
    serde_json::Value::Object(map)
}

pub fn run(args: &PrepareArgs) -> Result<()> {
    let mut manifest = RunManifest::new("prepare");
    if args.timestamps {
        manifest.stamp();
    }

    let from_records = args.input.is_dir();
    let (all_beats, extraction) = if from_records {
        let records = scan_record_dir(&args.input)?;
        let labels = LabelMap::default();
        let mut ext = Extraction::default();
        for r in &records {
            manifest.input(&args.input.join(format!("{}.sig.csv", r.record_id)))?;
            manifest.input(&args.input.join(format!("{}.ann.csv", r.record_id)))?;
            ext.merge(extract_beats(r, &labels));
        }
        let beats = std::mem::take(&mut ext.beats);
        (beats, Some(ext))
    } else {
        manifest.input(&args.input)?;
        (read_beats(&args.input)?, None)
    };
    let extracted_counts = counts_json(&all_beats);

    let mode = match args.mode {
        SplitChoice::Intra => SplitMode::Intra { train_fraction: args.train_fraction },
        SplitChoice::Inter => SplitMode::Inter,
    };
    let (train, test) = heartgan_core::data::build_split(all_beats, mode, args.seed)?;
    let train_raw_counts = counts_json(&train);

    let train = if args.no_smote {
        train
    } else {
        smote_balance(&train, SMOTE_K, args.seed)?
    };

    create_dir_all(&args.out_dir)?;
    write_beats(&args.out_dir.join("train_beats.csv"), &train)?;
    write_beats(&args.out_dir.join("test_beats.csv"), &test)?;
    manifest.output("train_beats.csv");
    manifest.output("test_beats.csv");

    let split_json = match args.mode {
        SplitChoice::Intra => serde_json::json!({
            "mode": "intra",
            "train_fraction": args.train_fraction,
        }),
        SplitChoice::Inter => serde_json::json!({
            "mode": "inter",
            "train_records": DS1,
            "test_records": DS2,
        }),
    };
    manifest.config = serde_json::json!({
        "mode": match args.mode { SplitChoice::Intra => "intra", SplitChoice::Inter => "inter" },
        "train_fraction": args.train_fraction,
        "smote": { "enabled": !args.no_smote, "k": SMOTE_K },
        "seed": args.seed,
    });
    manifest.seeds = serde_json::json!({ "seed": args.seed });
    let mut details = serde_json::json!({
        "classes": {
            "extracted": extracted_counts,
            "train": train_raw_counts,
            "train_balanced": counts_json(&train),
            "test": counts_json(&test),
        },
        "split": split_json,
    });
    if let Some(ext) = extraction {
        details["dropped"] = serde_json::json!({
            "boundary": ext.dropped_boundary,
            "degenerate": ext.dropped_degenerate,
            "unmapped": ext.skipped_unmapped,
        });
    }
    manifest.details = details;
    manifest.write(&args.out_dir.join("manifest.json"))
}
