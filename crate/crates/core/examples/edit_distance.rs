//! Edit distances, edit scripts and phonetic keys for label pairs.
//!
//! cargo run --example edit_distance -- gooogle google

use squatlab::distance::{damerau_levenshtein, edit_script, levenshtein, phonetic_key};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let pairs: Vec<(String, String)> = match args.as_slice() {
        [a, b] => vec![(a.clone(), b.clone())],
        _ => [
            ("gooogle", "google"),
            ("facbook", "facebook"),
            ("ca", "abc"),
            ("goolge", "google"),
            ("nutelix", "netflix"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect(),
    };
    for (a, b) in pairs {
        println!(
            "{a} -> {b}: levenshtein {}, damerau-levenshtein {}, script {}, keys {} / {}",
            levenshtein(&a, &b),
            damerau_levenshtein(&a, &b),
            edit_script(&a, &b),
            phonetic_key(&a),
            phonetic_key(&b)
        );
    }
}
