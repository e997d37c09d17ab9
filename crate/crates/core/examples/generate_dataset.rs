//! Synthesize a labeled dataset from the bundled brand list.
//!
//! cargo run --example generate_dataset -- /tmp/squats.jsonl

use std::path::PathBuf;

use squatlab::generator::{build_dataset, save_dataset, BuildOptions};
use squatlab::{parse_domain, Domain};

fn read(name: &str) -> Result<Vec<Domain>, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("assets").join(name))?;
    let lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    Ok(lines.map(|l| parse_domain(l, None)).collect::<Result<_, _>>()?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let brands = read("brands.txt")?;
    let opts = BuildOptions { per_brand: 10, seed: 42, legit_domains: read("legit.txt")?, ..BuildOptions::default() };
    let dataset = build_dataset(&brands, &opts)?;
    let counts = &dataset.manifest.counts;
    println!("{} rows: {} positive, {} negative", counts.rows, counts.positives, counts.negatives);
    for (technique, n) in &counts.by_technique {
        println!("  {technique:20} {n}");
    }
    for row in dataset.examples.iter().take(5) {
        println!("  sample: {} label={}", row.domain, row.label);
    }
    if let Some(path) = std::env::args().nth(1) {
        save_dataset(&dataset, &path)?;
        println!("written to {path} with its manifest");
    }
    Ok(())
}
