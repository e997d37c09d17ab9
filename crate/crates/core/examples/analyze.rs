//! Heuristic analysis of candidate domains against a reference list.
//!
//! cargo run --example analyze -- go0gle.com paypal.co

use squatlab::{analyze, build_index, parse_domain, ConfusableTable, DetectorConfig};

const REFERENCES: [&str; 9] = [
    "google.com",
    "microsoft.com",
    "facebook.com",
    "paypal.com",
    "netflix.com",
    "apple.com",
    "bankofamerica.com",
    "dell.com",
    "ihg.com",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let index = build_index(REFERENCES, ConfusableTable::bundled(), None)?;
    let config = DetectorConfig::default().with_extra_terms(["hotels"]);
    let mut candidates: Vec<String> = std::env::args().skip(1).collect();
    if candidates.is_empty() {
        candidates = [
            "go0gle.com",
            "rnicrosoft.com",
            "paypal.co",
            "nutelix.com",
            "ihg-hotels.com",
            "google.com",
            "duke-energy.com",
        ]
        .map(String::from)
        .to_vec();
    }
    for raw in &candidates {
        let report = analyze(&parse_domain(raw, None)?, &index, &config);
        match &report.primary_match {
            Some(m) => println!("{raw:18} squat   {} of {} ({:.2}): {}", m.technique, m.reference, m.score, m.evidence),
            None => println!("{raw:18} clear   ({} weaker matches)", report.matches.len()),
        }
    }
    Ok(())
}
