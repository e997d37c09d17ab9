//! Score the heuristic engine on the bundled fixtures and render
//! comparison tables.
//!
//! cargo run --example evaluate

use std::path::PathBuf;

use squatlab::evaluator::{compare, compare_paired, evaluate, EvalReport, HeuristicEngine, PairedRow};
use squatlab::generator::load_dataset;
use squatlab::{ConfusableTable, DetectorConfig, ReferenceIndex};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let assets = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets");
    let dataset = load_dataset(assets.join("known_squats.jsonl"))?;
    let index = ReferenceIndex::from_file(assets.join("known_refs.txt"), ConfusableTable::bundled(), None)?;

    let mut reports = Vec::new();
    for (name, config) in [
        ("heuristic (defaults)", DetectorConfig::default()),
        ("heuristic (detector.conf)", DetectorConfig::from_file(assets.join("detector.conf"))?),
    ] {
        let engine = HeuristicEngine::new(index.clone(), config);
        let metrics = evaluate(&engine, &dataset)?;
        for (technique, r) in &metrics.per_technique {
            println!("{name}: {technique} {}/{}", r.detected, r.positives);
        }
        reports.push(EvalReport::new(name, &metrics));
    }
    println!("\n{}", compare(&reports));

    let rows: Vec<PairedRow> = serde_json::from_str(&std::fs::read_to_string(assets.join("model_results.json"))?)?;
    println!("\n{}", compare_paired(&rows));
    Ok(())
}
