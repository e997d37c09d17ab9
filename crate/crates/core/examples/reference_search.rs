//! Nearest-reference lookups by skeleton distance.
//!
//! cargo run --example reference_search -- gogle 1

use squatlab::{build_index, ConfusableTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let brands = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/brands.txt"))?;
    let domains: Vec<&str> = brands.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let index = build_index(domains, ConfusableTable::bundled(), None)?;

    let args: Vec<String> = std::env::args().skip(1).collect();
    let query = args.first().map_or("rnicrosoft", String::as_str);
    let radius = args.get(1).map_or(Ok(2), |r| r.parse())?;
    println!("{} references; neighbors of {query:?} within {radius}:", index.len());
    for n in index.nearest(query, radius) {
        println!("  {} (distance {})", n.reference, n.distance);
    }
    Ok(())
}
