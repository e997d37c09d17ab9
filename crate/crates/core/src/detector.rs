//! Deterministic typosquat analysis of one candidate against a reference
//! index.
//!
//! Each technique check produces a [`TechniqueMatch`] with a score in
//! `[0, 1]`. Edit-distance based techniques score `1 - d / (bound + 1)`;
//! structural ones (TLD swap, deceptive addition, zero-distance homoglyph)
//! score `1.0`. The verdict is `true` when the best score reaches the
//! configured threshold.

use std::cell::OnceCell;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{damerau_levenshtein, edit_script, phonetic_key, Edit, EditScript, PhoneticKey};
use crate::domain::{strip_comment, Domain};
use crate::index::{ReferenceIndex, MAX_SEARCH_DISTANCE};

/// Misleading terms an attacker appends to or prefixes a brand with.
pub const DEFAULT_KEYWORDS: [&str; 6] = ["support", "login", "secure", "update", "verification", "helpdesk"];

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MAX_DISTANCE: usize = 2;

/// Phonetic keys shorter than this are too coarse to compare.
pub const MIN_PHONETIC_KEY: usize = 3;
/// Keys one symbol apart only match when both are at least this long.
pub const MIN_FUZZY_PHONETIC_KEY: usize = 5;

/// Largest skeleton distance at which two labels may still count as
/// sound-alikes. Grows with the reference length.
pub fn phonetic_distance_limit(reference_len: usize) -> usize {
    (reference_len / 3).max(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    Substitution,
    OmissionAddition,
    Homoglyph,
    Misspelling,
    TldManipulation,
    Phonetic,
    DeceptiveAddition,
    PunycodeAbuse,
}

impl Technique {
    pub const ALL: [Technique; 8] = [
        Technique::Substitution,
        Technique::OmissionAddition,
        Technique::Homoglyph,
        Technique::Misspelling,
        Technique::TldManipulation,
        Technique::Phonetic,
        Technique::DeceptiveAddition,
        Technique::PunycodeAbuse,
    ];

    /// Tie-break rank among equal scores; lower is more specific.
    pub fn priority(self) -> u8 {
        match self {
            Technique::Homoglyph => 0,
            Technique::Substitution => 1,
            Technique::OmissionAddition => 2,
            Technique::TldManipulation => 3,
            Technique::DeceptiveAddition => 4,
            Technique::Misspelling => 5,
            Technique::Phonetic => 6,
            Technique::PunycodeAbuse => 7,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Substitution => "substitution",
            Technique::OmissionAddition => "omission_addition",
            Technique::Homoglyph => "homoglyph",
            Technique::Misspelling => "misspelling",
            Technique::TldManipulation => "tld_manipulation",
            Technique::Phonetic => "phonetic",
            Technique::DeceptiveAddition => "deceptive_addition",
            Technique::PunycodeAbuse => "punycode_abuse",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown technique {0:?}")]
pub struct UnknownTechnique(pub String);

impl FromStr for Technique {
    type Err = UnknownTechnique;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Technique::ALL.into_iter().find(|t| t.as_str() == norm).ok_or_else(|| UnknownTechnique(s.to_string()))
    }
}

/// Evidence that one technique links the candidate to a reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TechniqueMatch {
    pub technique: Technique,
    pub reference: Domain,
    pub score: f64,
    pub evidence: String,
}

impl TechniqueMatch {
    fn cmp_rank(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| self.technique.priority().cmp(&other.technique.priority()))
            .then_with(|| self.reference.ascii().cmp(&other.reference.ascii()))
            .then_with(|| self.evidence.cmp(&other.evidence))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub candidate: Domain,
    pub verdict: bool,
    pub primary_match: Option<TechniqueMatch>,
    pub matches: Vec<TechniqueMatch>,
    /// Wall time of the analysis. Not serialized, so reports for identical
    /// inputs serialize identically.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl DetectionReport {
    pub fn techniques(&self) -> impl Iterator<Item = Technique> + '_ {
        self.matches.iter().map(|m| m.technique)
    }

    pub fn max_score(&self) -> Option<f64> {
        self.matches.first().map(|m| m.score)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected \"key = value\"")]
    Malformed { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for {key}: {reason}")]
    InvalidValue { line: usize, key: String, reason: String },
    #[error("reading detector config: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Largest edit distance the distance-based techniques consider.
    pub max_distance: usize,
    pub threshold: f64,
    pub keywords: Vec<String>,
    /// Further terms treated like keywords, e.g. `hotels`.
    pub extra_terms: Vec<String>,
    pub confusables: Option<PathBuf>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            max_distance: DEFAULT_MAX_DISTANCE,
            threshold: DEFAULT_THRESHOLD,
            keywords: DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            extra_terms: Vec::new(),
            confusables: None,
        }
    }
}

fn parse_list(value: &str) -> Vec<String> {
    value.split(',').map(|s| s.trim().to_lowercase()).filter(|s| !s.is_empty()).collect()
}

impl DetectorConfig {
    pub fn with_extra_terms<I, S>(mut self, terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.extra_terms.extend(terms.into_iter().map(|s| s.as_ref().to_lowercase()));
        self
    }

    /// Keywords followed by extra terms, deduplicated.
    pub fn terms(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in self.keywords.iter().chain(&self.extra_terms) {
            if !out.contains(&t.as_str()) {
                out.push(t);
            }
        }
        out
    }

    /// Parses `key = value` lines. Relative `confusables` paths resolve
    /// against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed { line: line_no });
            };
            let (key, value) = (key.trim(), value.trim());
            let invalid = |reason: &str| ConfigError::InvalidValue {
                line: line_no,
                key: key.to_string(),
                reason: reason.to_string(),
            };
            match key {
                "max_distance" => {
                    let v: usize = value.parse().map_err(|_| invalid("not a count"))?;
                    if v == 0 || v > MAX_SEARCH_DISTANCE {
                        return Err(invalid("must be between 1 and 3"));
                    }
                    config.max_distance = v;
                }
                "threshold" => {
                    let v: f64 = value.parse().map_err(|_| invalid("not a number"))?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(invalid("must lie in [0, 1]"));
                    }
                    config.threshold = v;
                }
                "keywords" => config.keywords = parse_list(value),
                "extra_terms" => config.extra_terms = parse_list(value),
                "confusables" => {
                    let p = PathBuf::from(value);
                    config.confusables = Some(match base_dir {
                        Some(dir) if p.is_relative() => dir.join(p),
                        _ => p,
                    });
                }
                other => return Err(ConfigError::UnknownKey { line: line_no, key: other.to_string() }),
            }
        }
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }

    fn distance_score(&self, distance: usize) -> f64 {
        1.0 - distance as f64 / (self.max_distance + 1) as f64
    }
}

/// Facts about one candidate/reference pair shared by several checks.
/// The skeleton distance and edit script are computed on first use.
struct Pair<'a> {
    candidate: &'a Domain,
    reference: &'a Domain,
    cand_skeleton: &'a str,
    ref_skeleton: &'a str,
    skeleton_distance: OnceCell<usize>,
    script: OnceCell<EditScript>,
    cand_key: OnceCell<PhoneticKey>,
    ref_key: OnceCell<PhoneticKey>,
}

impl<'a> Pair<'a> {
    fn new(candidate: &'a Domain, cand_skeleton: &'a str, reference: &'a Domain, ref_skeleton: &'a str) -> Self {
        Pair {
            candidate,
            reference,
            cand_skeleton,
            ref_skeleton,
            skeleton_distance: OnceCell::new(),
            script: OnceCell::new(),
            cand_key: OnceCell::new(),
            ref_key: OnceCell::new(),
        }
    }

    fn with_keys(self, cand_key: &PhoneticKey, ref_key: &PhoneticKey) -> Self {
        let _ = self.cand_key.set(cand_key.clone());
        let _ = self.ref_key.set(ref_key.clone());
        self
    }

    fn keys(&self) -> (&PhoneticKey, &PhoneticKey) {
        (
            self.cand_key.get_or_init(|| phonetic_key(self.candidate.sld())),
            self.ref_key.get_or_init(|| phonetic_key(self.reference.sld())),
        )
    }

    fn with_distance(self, distance: usize) -> Self {
        let _ = self.skeleton_distance.set(distance);
        self
    }

    fn skeleton_distance(&self) -> usize {
        *self.skeleton_distance.get_or_init(|| damerau_levenshtein(self.cand_skeleton, self.ref_skeleton))
    }

    fn script(&self) -> &EditScript {
        self.script.get_or_init(|| edit_script(self.candidate.sld(), self.reference.sld()))
    }

    /// Cheap lower bound on the raw edit distance.
    fn length_gap(&self) -> usize {
        self.candidate.sld().chars().count().abs_diff(self.reference.sld().chars().count())
    }

    fn found(&self, technique: Technique, score: f64, evidence: String) -> TechniqueMatch {
        TechniqueMatch { technique, reference: self.reference.clone(), score, evidence }
    }
}

/// Runs the analysis for one index and configuration.
#[derive(Debug, Clone, Copy)]
pub struct Detector<'a> {
    index: &'a ReferenceIndex,
    config: &'a DetectorConfig,
}

impl<'a> Detector<'a> {
    pub fn new(index: &'a ReferenceIndex, config: &'a DetectorConfig) -> Self {
        Self { index, config }
    }

    pub fn index(&self) -> &'a ReferenceIndex {
        self.index
    }

    pub fn config(&self) -> &'a DetectorConfig {
        self.config
    }

    fn check_pair<T>(&self, candidate: &Domain, reference: &Domain, f: impl FnOnce(&Pair<'_>) -> T) -> T {
        let table = self.index.table();
        let (cs, rs) = (table.skeleton(candidate.sld()), table.skeleton(reference.sld()));
        f(&Pair::new(candidate, &cs, reference, &rs))
    }

    pub fn analyze(&self, candidate: &Domain) -> DetectionReport {
        let start = Instant::now();
        if self.index.contains(candidate) {
            return DetectionReport {
                candidate: candidate.clone(),
                verdict: false,
                primary_match: None,
                matches: Vec::new(),
                elapsed: start.elapsed(),
            };
        }

        let table = self.index.table();
        let cand_skeleton = table.skeleton(candidate.sld());
        let key = phonetic_key(candidate.sld());
        let mut matches = Vec::new();
        let mut seen = HashSet::new();
        for n in self.index.nearest(&cand_skeleton, self.config.max_distance) {
            seen.insert(n.id);
            let reference = self.index.reference(n.id);
            let pair = Pair::new(candidate, &cand_skeleton, &reference.domain, &reference.skeleton)
                .with_distance(n.distance)
                .with_keys(&key, &reference.phonetic);
            matches.extend(self.pair_matches(&pair));
        }
        // Fuzzy key matches need long keys on both sides, so shorter keys
        // only look up their exact bucket.
        let phonetic_ids = if key.len() >= MIN_FUZZY_PHONETIC_KEY {
            self.index.phonetic_neighbors(&key)
        } else if key.len() >= MIN_PHONETIC_KEY {
            self.index.by_phonetic(&key).to_vec()
        } else {
            Vec::new()
        };
        // Raw edits are checked even when the skeletons drift apart.
        for n in self.index.nearest_raw(candidate.sld(), self.config.max_distance) {
            if !seen.insert(n.id) {
                continue;
            }
            let reference = self.index.reference(n.id);
            let pair = Pair::new(candidate, &cand_skeleton, &reference.domain, &reference.skeleton)
                .with_keys(&key, &reference.phonetic);
            matches.extend(self.pair_matches(&pair));
        }
        for id in phonetic_ids.into_iter().filter(|id| !seen.contains(id)) {
            let reference = self.index.reference(id);
            let pair = Pair::new(candidate, &cand_skeleton, &reference.domain, &reference.skeleton)
                .with_keys(&key, &reference.phonetic);
            matches.extend(self.phonetic(&pair));
        }
        matches.extend(self.deceptive_matches(candidate));
        self.finish(candidate, matches, start)
    }

    fn finish(&self, candidate: &Domain, mut matches: Vec<TechniqueMatch>, start: Instant) -> DetectionReport {
        matches.sort_by(TechniqueMatch::cmp_rank);
        matches.dedup_by(|a, b| a.technique == b.technique && a.reference == b.reference);
        let verdict = matches.first().is_some_and(|m| m.score >= self.config.threshold);
        DetectionReport {
            candidate: candidate.clone(),
            verdict,
            primary_match: if verdict { matches.first().cloned() } else { None },
            matches,
            elapsed: start.elapsed(),
        }
    }

    fn pair_matches(&self, pair: &Pair<'_>) -> Vec<TechniqueMatch> {
        let mut out: Vec<TechniqueMatch> = [
            self.homoglyph(pair),
            self.substitution(pair),
            self.omission_addition(pair),
            self.tld_swap(pair),
            self.misspelling(pair),
        ]
        .into_iter()
        .flatten()
        .collect();
        if let Some(m) = self.phonetic(pair) {
            out.push(m);
        }
        out
    }

    pub fn detect_substitution(&self, candidate: &Domain, reference: &Domain) -> Option<TechniqueMatch> {
        self.check_pair(candidate, reference, |p| self.substitution(p))
    }

    pub fn detect_omission_addition(&self, candidate: &Domain, reference: &Domain) -> Option<TechniqueMatch> {
        self.check_pair(candidate, reference, |p| self.omission_addition(p))
    }

    pub fn detect_homoglyph(&self, candidate: &Domain, reference: &Domain) -> Option<TechniqueMatch> {
        self.check_pair(candidate, reference, |p| self.homoglyph(p))
    }

    pub fn detect_misspelling(&self, candidate: &Domain, reference: &Domain) -> Option<TechniqueMatch> {
        self.check_pair(candidate, reference, |p| self.misspelling(p))
    }

    pub fn detect_tld_swap(&self, candidate: &Domain, reference: &Domain) -> Option<TechniqueMatch> {
        self.check_pair(candidate, reference, |p| self.tld_swap(p))
    }

    pub fn detect_phonetic(&self, candidate: &Domain, reference: &Domain) -> Option<TechniqueMatch> {
        self.check_pair(candidate, reference, |p| self.phonetic(p))
    }

    /// Brand plus a configured term, in either order, optionally
    /// hyphenated. The brand part is resolved through the index.
    pub fn detect_deceptive_addition(&self, candidate: &Domain) -> Option<TechniqueMatch> {
        let mut matches = self.deceptive_matches(candidate);
        matches.sort_by(TechniqueMatch::cmp_rank);
        matches.into_iter().next()
    }

    /// Every confusable substitution, scored by what remains once
    /// skeletons are compared (zero when all swaps are lookalikes).
    fn substitution(&self, pair: &Pair<'_>) -> Option<TechniqueMatch> {
        let table = self.index.table();
        if pair.length_gap() > 0 {
            return None;
        }
        let script = pair.script();
        if !script.only_substitutions() || script.len() > self.config.max_distance {
            return None;
        }
        let mut swaps = Vec::new();
        for edit in script.edits() {
            let Edit::Substitute { from, to, .. } = *edit else { return None };
            if table.skeleton(&from.to_string()) != table.skeleton(&to.to_string()) {
                return None;
            }
            swaps.push(format!("'{from}'→'{to}'"));
        }
        let score = self.config.distance_score(pair.skeleton_distance());
        Some(pair.found(Technique::Substitution, score, format!("lookalike substitution {}", swaps.join(", "))))
    }

    fn omission_addition(&self, pair: &Pair<'_>) -> Option<TechniqueMatch> {
        if pair.length_gap() > self.config.max_distance {
            return None;
        }
        let script = pair.script();
        let d = script.len();
        if !script.only_indels() || d > self.config.max_distance {
            return None;
        }
        let score = self.config.distance_score(d);
        Some(pair.found(Technique::OmissionAddition, score, format!("edits {script}")))
    }

    fn homoglyph(&self, pair: &Pair<'_>) -> Option<TechniqueMatch> {
        if pair.cand_skeleton != pair.ref_skeleton || pair.candidate.sld() == pair.reference.sld() {
            return None;
        }
        if pair.candidate.sld() != pair.candidate.ascii_sld() {
            let evidence = format!(
                "{} decodes to {:?}, skeleton {:?}",
                pair.candidate.ascii_sld(),
                pair.candidate.sld(),
                pair.cand_skeleton
            );
            return Some(pair.found(Technique::PunycodeAbuse, 1.0, evidence));
        }
        let evidence = format!("{:?} has skeleton {:?}", pair.candidate.sld(), pair.cand_skeleton);
        Some(pair.found(Technique::Homoglyph, 1.0, evidence))
    }

    fn misspelling(&self, pair: &Pair<'_>) -> Option<TechniqueMatch> {
        let d = pair.skeleton_distance();
        if d == 0 || d > self.config.max_distance {
            return None;
        }
        let score = self.config.distance_score(d);
        Some(pair.found(Technique::Misspelling, score, format!("skeleton distance {d}")))
    }

    fn tld_swap(&self, pair: &Pair<'_>) -> Option<TechniqueMatch> {
        let (ct, rt) = (pair.candidate.tld(), pair.reference.tld());
        if pair.cand_skeleton != pair.ref_skeleton || ct == rt {
            return None;
        }
        Some(pair.found(Technique::TldManipulation, 1.0, format!(".{ct} instead of .{rt}")))
    }

    /// Sound-alike labels. Only reported where nothing at skeleton distance
    /// 0 or 1 already explains the pair.
    fn phonetic(&self, pair: &Pair<'_>) -> Option<TechniqueMatch> {
        if pair.candidate.sld() == pair.reference.sld() {
            return None;
        }
        let (ck, rk) = pair.keys();
        if ck.len() < MIN_PHONETIC_KEY || rk.len() < MIN_PHONETIC_KEY {
            return None;
        }
        let key_distance = if ck == rk { 0 } else { damerau_levenshtein(ck.as_str(), rk.as_str()) };
        let fuzzy_ok = ck.len().min(rk.len()) >= MIN_FUZZY_PHONETIC_KEY;
        if key_distance > 1 || (key_distance == 1 && !fuzzy_ok) {
            return None;
        }
        let d = pair.skeleton_distance();
        let ref_len = pair.ref_skeleton.chars().count();
        if d <= 1 || d > phonetic_distance_limit(ref_len) {
            return None;
        }
        let score = self.config.distance_score(key_distance);
        Some(pair.found(Technique::Phonetic, score, format!("phonetic keys {ck} / {rk}")))
    }

    fn deceptive_matches(&self, candidate: &Domain) -> Vec<TechniqueMatch> {
        let table = self.index.table();
        let sld = candidate.sld();
        let mut out = Vec::new();
        for term in self.config.terms() {
            let splits = [
                sld.strip_suffix(term).map(|rest| (rest.trim_end_matches('-'), "appended")),
                sld.strip_prefix(term).map(|rest| (rest.trim_start_matches('-'), "prefixed")),
            ];
            for (brand_part, how) in splits.into_iter().flatten() {
                if brand_part.is_empty() {
                    continue;
                }
                for &id in self.index.by_skeleton(&table.skeleton(brand_part)) {
                    let reference = &self.index.reference(id).domain;
                    out.push(TechniqueMatch {
                        technique: Technique::DeceptiveAddition,
                        reference: reference.clone(),
                        score: 1.0,
                        evidence: format!("term {term:?} {how} to {brand_part:?}"),
                    });
                }
            }
        }
        out
    }
}

/// Analyzes `candidate` against `index` under `config`.
pub fn analyze(candidate: &Domain, index: &ReferenceIndex, config: &DetectorConfig) -> DetectionReport {
    Detector::new(index, config).analyze(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ConfusableTable;

    const KNOWN_REFS: [&str; 9] = [
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

    fn index_of(domains: &[&str]) -> ReferenceIndex {
        ReferenceIndex::build(domains.iter().copied(), ConfusableTable::bundled(), None).unwrap()
    }

    fn d(s: &str) -> Domain {
        Domain::parse(s).unwrap()
    }

    fn check(pairs: &[(&str, &str, bool)], f: impl Fn(&Detector<'_>, &Domain, &Domain) -> Option<TechniqueMatch>) {
        let index = index_of(&KNOWN_REFS);
        let config = DetectorConfig::default();
        let det = Detector::new(&index, &config);
        for &(c, r, expect) in pairs {
            assert_eq!(f(&det, &d(c), &d(r)).is_some(), expect, "{c} vs {r}");
        }
    }

    #[test]
    fn substitution_cases() {
        check(
            &[
                ("go0gle.com", "google.com", true),
                ("faceb0ok.com", "facebook.com", true),
                ("zzzzzz.com", "google.com", false),
            ],
            |det, c, r| det.detect_substitution(c, r),
        );
        let index = index_of(&KNOWN_REFS);
        let config = DetectorConfig::default();
        let m = Detector::new(&index, &config).detect_substitution(&d("go0gle.com"), &d("google.com")).unwrap();
        assert!(m.score >= 0.9);
        // a non-lookalike swap is not a substitution attack
        assert!(Detector::new(&index, &config).detect_substitution(&d("goxgle.com"), &d("google.com")).is_none());
    }

    #[test]
    fn omission_addition_cases() {
        check(
            &[
                ("gogle.com", "google.com", true),
                ("gooogle.com", "google.com", true),
                ("google.com", "google.com", false),
            ],
            |det, c, r| det.detect_omission_addition(c, r),
        );
    }

    #[test]
    fn homoglyph_cases() {
        check(&[("rnicrosoft.com", "microsoft.com", true), ("microsoft.com", "microsoft.com", false)], |det, c, r| {
            det.detect_homoglyph(c, r)
        });
        let index = index_of(&KNOWN_REFS);
        let config = DetectorConfig::default();
        let det = Detector::new(&index, &config);
        let m = det.detect_homoglyph(&d("p\u{0430}ypal.com"), &d("paypal.com")).unwrap();
        assert_eq!(m.technique, Technique::PunycodeAbuse);
        let ace = d("p\u{0430}ypal.com").ascii();
        let m = det.detect_homoglyph(&d(&ace), &d("paypal.com")).unwrap();
        assert_eq!(m.technique, Technique::PunycodeAbuse);
        assert_eq!(
            det.detect_homoglyph(&d("rnicrosoft.com"), &d("microsoft.com")).unwrap().technique,
            Technique::Homoglyph
        );
    }

    #[test]
    fn misspelling_cases() {
        check(
            &[
                ("facbook.com", "facebook.com", true),
                ("googel.com", "google.com", true),
                ("gxxxle.com", "google.com", false),
            ],
            |det, c, r| det.detect_misspelling(c, r),
        );
    }

    #[test]
    fn tld_swap_cases() {
        check(
            &[
                ("paypal.co", "paypal.com", true),
                ("paypal.com", "paypal.com", false),
                ("g00gle.org", "google.com", true),
            ],
            |det, c, r| det.detect_tld_swap(c, r),
        );
    }

    #[test]
    fn phonetic_cases() {
        check(
            &[
                ("nutelix.com", "netflix.com", true),
                ("nute1ix.com", "netflix.com", true),
                ("amazon.com", "netflix.com", false),
            ],
            |det, c, r| det.detect_phonetic(c, r),
        );
        // one edit away is a misspelling, not a sound-alike
        check(&[("netflx.com", "netflix.com", false)], |det, c, r| det.detect_phonetic(c, r));
    }

    #[test]
    fn deceptive_addition_cases() {
        let index = index_of(&KNOWN_REFS);
        let config = DetectorConfig::default();
        let det = Detector::new(&index, &config);
        for c in ["apple-support.com", "bankofamerica-login.com", "dellsupport.com", "secure-paypal.net"] {
            assert!(det.detect_deceptive_addition(&d(c)).is_some(), "{c}");
        }
        assert!(det.detect_deceptive_addition(&d("support.com")).is_none());
        assert!(det.detect_deceptive_addition(&d("ihg-hotels.com")).is_none());
        let extended = DetectorConfig::default().with_extra_terms(["hotels"]);
        let det = Detector::new(&index, &extended);
        let m = det.detect_deceptive_addition(&d("ihg-hotels.com")).unwrap();
        assert_eq!(m.reference.ascii(), "ihg.com");
    }

    #[test]
    fn analyze_examples() {
        let index = index_of(&KNOWN_REFS);
        let config = DetectorConfig::default().with_extra_terms(["hotels"]);
        let report = analyze(&d("dellsupport.com"), &index, &config);
        assert!(report.verdict);
        assert_eq!(report.primary_match.as_ref().unwrap().technique, Technique::DeceptiveAddition);
        let report = analyze(&d("google.com"), &index, &config);
        assert!(!report.verdict);
        assert!(report.matches.is_empty());
        assert!(analyze(&d("ihg-hotels.com"), &index, &config).verdict);
        assert!(analyze(&d("mail.google.com"), &index, &config).matches.is_empty());
    }

    #[test]
    fn duke_energy_false_positive_mirrors_observed_behavior() {
        let config = DetectorConfig::default().with_extra_terms(["energy"]);
        let with_brand = index_of(&["duke-energy.com", "duke.com"]);
        assert!(!analyze(&d("duke-energy.com"), &with_brand, &config).verdict);
        let without = index_of(&["duke.com"]);
        let report = analyze(&d("duke-energy.com"), &without, &config);
        assert!(report.verdict);
        assert_eq!(report.primary_match.unwrap().technique, Technique::DeceptiveAddition);
        let default = DetectorConfig::default();
        assert!(!analyze(&d("duke-energy.com"), &without, &default).verdict);
    }

    #[test]
    fn matches_are_ranked() {
        let index = index_of(&KNOWN_REFS);
        let config = DetectorConfig::default();
        let report = analyze(&d("g00gle.org"), &index, &config);
        assert!(report.verdict);
        let ranks: Vec<_> = report.matches.iter().map(|m| (m.score, m.technique.priority())).collect();
        for w in ranks.windows(2) {
            assert!(w[0].0 > w[1].0 || (w[0].0 == w[1].0 && w[0].1 <= w[1].1), "{ranks:?}");
        }
        assert_eq!(report.primary_match.as_ref(), report.matches.first());
        assert_eq!(report.matches[0].technique, Technique::Homoglyph);
    }

    #[test]
    fn threshold_only_changes_verdict() {
        let index = index_of(&KNOWN_REFS);
        let loose = DetectorConfig::default();
        let strict = DetectorConfig { threshold: 0.99, ..DetectorConfig::default() };
        for c in ["gogle.com", "go0gle.com", "googlle.com", "nutelix.com", "facebok.net"] {
            let a = analyze(&d(c), &index, &loose);
            let b = analyze(&d(c), &index, &strict);
            assert_eq!(a.matches, b.matches);
            assert_eq!(a.verdict, a.max_score().unwrap() >= 0.5);
            assert_eq!(b.verdict, b.max_score().unwrap() >= 0.99);
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let index = index_of(&KNOWN_REFS);
        let config = DetectorConfig::default();
        let a = serde_json::to_string(&analyze(&d("go0gle.com"), &index, &config)).unwrap();
        let b = serde_json::to_string(&analyze(&d("go0gle.com"), &index, &config)).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
    }

    #[test]
    fn config_file_parsing() {
        let text = "# tuned\nmax_distance = 1\nthreshold=0.7\nkeywords = support, Login\nextra_terms = hotels\nconfusables = table.tsv\n";
        let cfg = DetectorConfig::parse(text, Some(Path::new("/etc/squat"))).unwrap();
        assert_eq!(cfg.max_distance, 1);
        assert_eq!(cfg.threshold, 0.7);
        assert_eq!(cfg.keywords, ["support", "login"]);
        assert_eq!(cfg.terms(), ["support", "login", "hotels"]);
        assert_eq!(cfg.confusables.unwrap(), Path::new("/etc/squat/table.tsv"));
        assert!(matches!(DetectorConfig::parse("bogus = 1", None), Err(ConfigError::UnknownKey { line: 1, .. })));
        assert!(matches!(DetectorConfig::parse("threshold = 2", None), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(DetectorConfig::parse("max_distance = 9", None), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(DetectorConfig::parse("threshold", None), Err(ConfigError::Malformed { line: 1 })));
    }

    #[test]
    fn technique_names_round_trip() {
        for t in Technique::ALL {
            assert_eq!(t.as_str().parse::<Technique>().unwrap(), t);
        }
        assert_eq!("OmissionAddition".parse::<Technique>().ok(), None);
        assert_eq!("tld-manipulation".parse::<Technique>().unwrap(), Technique::TldManipulation);
    }
}
