//! Typosquatting detection toolkit.
//!
//! - [`domain`]: parsing, punycode, confusable skeletons
//! - [`distance`]: Levenshtein, Damerau–Levenshtein, edit scripts, phonetic keys
//! - [`index`]: reference brand index with BK-tree neighbor search
//! - [`detector`]: per-technique analysis and the binary verdict
//! - [`generator`]: rule-based labeled dataset synthesis (JSONL)
//! - [`evaluator`]: accuracy protocol and comparison tables
//! - [`gateway`]: chat-completion client for external model endpoints
//! - [`cli`]: the `squatlab` command surface

pub mod cli;
pub mod detector;
pub mod distance;
pub mod domain;
pub mod evaluator;
pub mod gateway;
pub mod generator;
pub mod index;

pub use detector::{analyze, DetectionReport, Detector, DetectorConfig, Technique, TechniqueMatch};
pub use domain::{parse_domain, ConfusableTable, Domain, ParseError, SuffixRules};
pub use index::{build_index, ReferenceIndex};
