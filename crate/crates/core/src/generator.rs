//! Rule-based synthesis of labeled typosquat datasets.
//!
//! Every variant comes from a table-driven transform of a brand domain,
//! seeded per item so output does not depend on thread scheduling.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::detector::{phonetic_distance_limit, Technique, DEFAULT_KEYWORDS, MIN_PHONETIC_KEY};
use crate::distance::{damerau_levenshtein, phonetic_key};
use crate::domain::{parse_domain, ConfusableTable, Domain, SuffixRules};

pub const TLD_POOL: [&str; 5] = ["co", "net", "org", "io", "cm"];
pub const DEFAULT_LEGIT_FRACTION: f64 = 0.35;

/// Fresh seeds tried per item before it is recorded as a duplicate.
const MAX_ATTEMPTS: u32 = 12;
/// Random draws inside one transform before it gives up on a brand.
const MAX_DRAWS: usize = 64;

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];
// Pairs sharing a phonetic class.
const SOUND_MATES: [(char, char); 7] =
    [('b', 'p'), ('f', 'v'), ('c', 'k'), ('s', 'z'), ('d', 't'), ('m', 'n'), ('g', 'j')];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{technique} is not applicable to {brand}")]
pub struct Inapplicable {
    pub brand: String,
    pub technique: Technique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Real,
    Synthetic,
}

/// One dataset row. Serializes to exactly the keys `domain`, `label`,
/// `brand`, `technique`, `source`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledExample {
    pub domain: String,
    pub label: bool,
    pub brand: Option<String>,
    pub technique: Option<Technique>,
    pub source: Source,
}

impl LabeledExample {
    pub fn positive(domain: String, brand: &Domain, technique: Technique, source: Source) -> Self {
        Self { domain, label: true, brand: Some(brand.ascii()), technique: Some(technique), source }
    }

    pub fn negative(domain: &Domain) -> Self {
        Self { domain: domain.ascii(), label: false, brand: None, technique: None, source: Source::Real }
    }

    fn check(&self) -> Result<(), String> {
        match (self.label, &self.brand, self.technique) {
            (true, Some(brand), Some(_)) if brand != &self.domain => Ok(()),
            (true, Some(_), Some(_)) => Err("positive row equals its brand".into()),
            (true, _, _) => Err("positive row needs brand and technique".into()),
            (false, _, Some(_)) => Err("negative row carries a technique".into()),
            (false, _, None) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub rows: usize,
    pub positives: usize,
    pub negatives: usize,
    pub by_technique: BTreeMap<Technique, usize>,
}

impl Counts {
    pub fn of(examples: &[LabeledExample]) -> Self {
        let mut c = Counts { rows: examples.len(), ..Counts::default() };
        for e in examples {
            if e.label {
                c.positives += 1;
            } else {
                c.negatives += 1;
            }
            if let Some(t) = e.technique {
                *c.by_technique.entry(t).or_default() += 1;
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedVariant {
    pub brand: String,
    pub technique: Technique,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: Option<u64>,
    pub counts: Counts,
    /// Negatives asked for by the legit fraction, before the pool cap.
    pub negatives_requested: Option<usize>,
    pub skipped: Vec<SkippedVariant>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    pub manifest: Manifest,
}

impl Dataset {
    /// Dataset from rows with a freshly computed manifest.
    pub fn from_examples(examples: Vec<LabeledExample>, seed: Option<u64>) -> Self {
        let counts = Counts::of(&examples);
        Self { examples, manifest: Manifest { seed, counts, ..Manifest::default() } }
    }

    pub fn seed(&self) -> Option<u64> {
        self.manifest.seed
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.examples {
            out.push_str(&serde_json::to_string(e).expect("rows serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("manifest does not match dataset: {0}")]
    Manifest(String),
    #[error("dataset I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// `<dataset path>.manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes the JSONL rows and the manifest sidecar.
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(dataset.to_jsonl().as_bytes())?;
    w.flush()?;
    let manifest = serde_json::to_string_pretty(&dataset.manifest).expect("manifest serializes");
    fs::write(manifest_path(path), manifest + "\n")?;
    Ok(())
}

const ROW_KEYS: [&str; 5] = ["domain", "label", "brand", "technique", "source"];

fn parse_row(line: &str) -> Result<LabeledExample, String> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("row is not a JSON object")?;
    for key in ROW_KEYS {
        if !obj.contains_key(key) {
            return Err(format!("missing key {key:?}"));
        }
    }
    let row: LabeledExample = serde_json::from_value(value).map_err(|e| e.to_string())?;
    row.check()?;
    let domain = parse_domain(&row.domain, None).map_err(|e| format!("domain {:?}: {e}", row.domain))?;
    if domain.ascii() != row.domain && domain.unicode() != row.domain {
        return Err(format!("domain {:?} is not normalized", row.domain));
    }
    Ok(row)
}

/// Reads JSONL rows plus the manifest sidecar when present. Blank lines
/// are skipped; errors carry the 1-based line number.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut examples = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row(line).map_err(|reason| DatasetError::Line { line: idx + 1, reason })?;
        if !seen.insert((row.domain.clone(), row.label)) {
            return Err(DatasetError::Line { line: idx + 1, reason: format!("duplicate row {:?}", row.domain) });
        }
        examples.push(row);
    }
    let counts = Counts::of(&examples);
    let sidecar = manifest_path(path);
    let manifest = if sidecar.exists() {
        let m: Manifest =
            serde_json::from_str(&fs::read_to_string(&sidecar)?).map_err(|e| DatasetError::Manifest(e.to_string()))?;
        if m.counts != counts {
            return Err(DatasetError::Manifest("counts differ from rows".into()));
        }
        m
    } else {
        Manifest { counts, ..Manifest::default() }
    };
    Ok(Dataset { examples, manifest })
}

/// Seed for one item: hash of the global seed and the item coordinates.
pub fn derive_seed(seed: u64, parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for p in parts {
        h.update([0u8]);
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Variant synthesis with a fixed confusable table and keyword list.
#[derive(Debug, Clone)]
pub struct Generator {
    table: ConfusableTable,
    keywords: Vec<String>,
    suffix_rules: Option<SuffixRules>,
}

impl Default for Generator {
    fn default() -> Self {
        Self::new(ConfusableTable::bundled(), DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect(), None)
    }
}

impl Generator {
    pub fn new(table: ConfusableTable, keywords: Vec<String>, suffix_rules: Option<SuffixRules>) -> Self {
        Self { table, keywords, suffix_rules }
    }

    pub fn table(&self) -> &ConfusableTable {
        &self.table
    }

    /// One domain realizing `technique` on `brand`, in ASCII form.
    pub fn generate_variant(
        &self,
        brand: &Domain,
        technique: Technique,
        rng_seed: u64,
    ) -> Result<String, Inapplicable> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let sld: Vec<char> = brand.sld().chars().collect();
        let rules = self.suffix_rules.as_ref();
        let inapplicable = || Inapplicable { brand: brand.ascii(), technique };
        let rebuild = |chars: &[char]| -> Option<Domain> {
            let s: String = chars.iter().collect();
            brand.with_sld(&s, rules).ok().filter(|d| d != brand)
        };

        let variant = match technique {
            Technique::Substitution => {
                let swaps = self.single_char_sources(|s| s.is_ascii());
                self.swap_one(&sld, &swaps, &mut rng).and_then(|c| rebuild(&c))
            }
            Technique::PunycodeAbuse => {
                let swaps = self.single_char_sources(|s| !s.is_ascii());
                self.swap_one(&sld, &swaps, &mut rng).and_then(|c| rebuild(&c))
            }
            Technique::Homoglyph => self.homoglyph(&sld, &mut rng).and_then(|c| rebuild(&c)),
            Technique::OmissionAddition => omission_addition(&sld, &mut rng).and_then(|c| rebuild(&c)),
            Technique::Misspelling => self.misspelling(&sld, &mut rng).and_then(|c| rebuild(&c)),
            Technique::TldManipulation => {
                let tld = brand.tld();
                let pool: Vec<&str> = TLD_POOL.iter().copied().filter(|t| *t != tld).collect();
                pool.choose(&mut rng).and_then(|t| brand.with_tld(t, rules).ok())
            }
            Technique::Phonetic => self.phonetic(&sld, &mut rng).and_then(|c| rebuild(&c)),
            Technique::DeceptiveAddition => {
                let kw = self.keywords.choose(&mut rng).ok_or_else(inapplicable)?;
                let sep = if rng.random_bool(0.5) { "-" } else { "" };
                let s = if rng.random_bool(0.5) {
                    format!("{}{sep}{kw}", brand.sld())
                } else {
                    format!("{kw}{sep}{}", brand.sld())
                };
                brand.with_sld(&s, rules).ok()
            }
        };
        variant.map(|d| d.ascii()).ok_or_else(inapplicable)
    }

    /// `(target letter, lookalike source)` for single-char sources passing
    /// `keep`.
    fn single_char_sources(&self, keep: impl Fn(&str) -> bool) -> Vec<(char, char)> {
        self.table
            .entries()
            .filter(|(s, r)| s.chars().count() == 1 && r.chars().count() == 1 && keep(s))
            .map(|(s, r)| (r.chars().next().unwrap(), s.chars().next().unwrap()))
            .collect()
    }

    fn swap_one(&self, sld: &[char], swaps: &[(char, char)], rng: &mut ChaCha8Rng) -> Option<Vec<char>> {
        let options: Vec<(usize, char)> = sld
            .iter()
            .enumerate()
            .flat_map(|(i, c)| swaps.iter().filter(move |(t, _)| t == c).map(move |(_, s)| (i, *s)))
            .collect();
        let &(i, s) = options.choose(rng)?;
        let mut out = sld.to_vec();
        out[i] = s;
        Some(out)
    }

    /// Replaces one letter with a multi-letter lookalike (`m` → `rn`).
    fn homoglyph(&self, sld: &[char], rng: &mut ChaCha8Rng) -> Option<Vec<char>> {
        let pairs: Vec<(char, Vec<char>)> = self
            .table
            .entries()
            .filter(|(s, r)| s.chars().count() == 2 && s.is_ascii() && r.chars().count() == 1)
            .map(|(s, r)| (r.chars().next().unwrap(), s.chars().collect()))
            .collect();
        let target: String = sld.iter().collect();
        let skeleton = self.table.skeleton(&target);
        let mut options: Vec<(usize, &Vec<char>)> = Vec::new();
        for (i, c) in sld.iter().enumerate() {
            for (t, src) in &pairs {
                if t == c {
                    options.push((i, src));
                }
            }
        }
        options.shuffle(rng);
        options.into_iter().find_map(|(i, src)| {
            let mut out = sld[..i].to_vec();
            out.extend(src);
            out.extend(&sld[i + 1..]);
            let s: String = out.iter().collect();
            (self.table.skeleton(&s) == skeleton).then_some(out)
        })
    }

    /// Adjacent transposition one skeleton edit away, else a vowel swap.
    fn misspelling(&self, sld: &[char], rng: &mut ChaCha8Rng) -> Option<Vec<char>> {
        let skeleton = self.table.skeleton(&sld.iter().collect::<String>());
        let one_off =
            |c: &[char]| damerau_levenshtein(&self.table.skeleton(&c.iter().collect::<String>()), &skeleton) == 1;
        let mut swaps: Vec<usize> = (0..sld.len().saturating_sub(1)).filter(|&i| sld[i] != sld[i + 1]).collect();
        swaps.shuffle(rng);
        for i in swaps {
            let mut out = sld.to_vec();
            out.swap(i, i + 1);
            if one_off(&out) {
                return Some(out);
            }
        }
        let mut vowels: Vec<usize> = (0..sld.len()).filter(|&i| VOWELS.contains(&sld[i])).collect();
        vowels.shuffle(rng);
        for i in vowels {
            let mut out = sld.to_vec();
            out[i] = **VOWELS.iter().filter(|v| **v != sld[i]).collect::<Vec<_>>().choose(rng)?;
            if one_off(&out) {
                return Some(out);
            }
        }
        None
    }

    /// Two sound-preserving rewrites: the phonetic key stays fixed while
    /// the skeleton moves at least two edits.
    fn phonetic(&self, sld: &[char], rng: &mut ChaCha8Rng) -> Option<Vec<char>> {
        let original: String = sld.iter().collect();
        let key = phonetic_key(&original);
        if key.len() < MIN_PHONETIC_KEY {
            return None;
        }
        let skeleton = self.table.skeleton(&original);
        let limit = phonetic_distance_limit(skeleton.chars().count());
        for _ in 0..MAX_DRAWS {
            let mut out = sld.to_vec();
            for _ in 0..2 {
                out = sound_rewrite(&out, rng)?;
            }
            let s: String = out.iter().collect();
            let d = damerau_levenshtein(&self.table.skeleton(&s), &skeleton);
            if phonetic_key(&s) == key && (2..=limit).contains(&d) {
                return Some(out);
            }
        }
        None
    }
}

fn omission_addition(sld: &[char], rng: &mut ChaCha8Rng) -> Option<Vec<char>> {
    for _ in 0..MAX_DRAWS {
        let mut out = sld.to_vec();
        match rng.random_range(0..3) {
            0 if sld.len() >= 2 => {
                out.remove(rng.random_range(0..sld.len()));
            }
            1 => {
                let i = rng.random_range(0..sld.len());
                out.insert(i, sld[i]);
            }
            _ => {
                let i = rng.random_range(0..=sld.len());
                out.insert(i, rng.random_range(b'a'..=b'z') as char);
            }
        }
        if out != sld && out.first() != Some(&'-') && out.last() != Some(&'-') {
            return Some(out);
        }
    }
    None
}

/// A vowel swaps for another (never the first letter), a consonant for a
/// class mate, or `ck` gains/loses its `c`.
fn sound_rewrite(sld: &[char], rng: &mut ChaCha8Rng) -> Option<Vec<char>> {
    let mut options: Vec<Vec<char>> = Vec::new();
    for (i, &c) in sld.iter().enumerate() {
        if i > 0 && VOWELS.contains(&c) {
            for &v in VOWELS.iter().filter(|&&v| v != c) {
                let mut out = sld.to_vec();
                out[i] = v;
                options.push(out);
            }
        }
        for &(a, b) in &SOUND_MATES {
            let mate = if c == a {
                b
            } else if c == b {
                a
            } else {
                continue;
            };
            let mut out = sld.to_vec();
            out[i] = mate;
            options.push(out);
        }
        if c == 'k' {
            let mut out = sld.to_vec();
            if i > 0 && sld[i - 1] == 'c' {
                out.remove(i - 1);
            } else {
                out.insert(i, 'c');
            }
            options.push(out);
        }
    }
    options.choose(rng).cloned()
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Empty means all eight.
    pub techniques: Vec<Technique>,
    pub per_brand: usize,
    pub legit_fraction: f64,
    pub seed: u64,
    /// Extra label-false domains beyond the brands themselves.
    pub legit_domains: Vec<Domain>,
    /// Worker threads; `None` lets rayon decide. Output is identical
    /// either way.
    pub threads: Option<usize>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            techniques: Technique::ALL.to_vec(),
            per_brand: 20,
            legit_fraction: DEFAULT_LEGIT_FRACTION,
            seed: 0,
            legit_domains: Vec::new(),
            threads: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("no brands given")]
    NoBrands,
    #[error("legit fraction {0} outside [0, 1]")]
    LegitFraction(f64),
    #[error("thread pool: {0}")]
    Threads(String),
}

struct BrandOutput {
    rows: Vec<LabeledExample>,
    skipped: Vec<SkippedVariant>,
}

impl Generator {
    fn brand_variants(
        &self,
        brand: &Domain,
        techniques: &[Technique],
        opts: &BuildOptions,
        taken: &HashSet<String>,
    ) -> BrandOutput {
        let mut rows = Vec::new();
        let mut skipped = Vec::new();
        let mut used: HashSet<String> = HashSet::new();
        let mut dead: HashSet<Technique> = HashSet::new();
        let ascii = brand.ascii();
        for ordinal in 0..opts.per_brand {
            let mut produced = false;
            for shift in 0..techniques.len() {
                let technique = techniques[(ordinal + shift) % techniques.len()];
                if dead.contains(&technique) {
                    continue;
                }
                let ord = ordinal.to_string();
                let mut last_reason = None;
                for attempt in 0..MAX_ATTEMPTS {
                    let seed = derive_seed(opts.seed, &[&ascii, technique.as_str(), &ord, &attempt.to_string()]);
                    match self.generate_variant(brand, technique, seed) {
                        Err(_) => {
                            last_reason = Some("inapplicable");
                            break;
                        }
                        Ok(v) if used.contains(&v) || taken.contains(&v) => last_reason = Some("duplicate"),
                        Ok(v) => {
                            used.insert(v.clone());
                            rows.push(LabeledExample::positive(v, brand, technique, Source::Synthetic));
                            last_reason = None;
                            break;
                        }
                    }
                }
                match last_reason {
                    None => {
                        produced = true;
                        break;
                    }
                    Some(reason) => {
                        if reason == "inapplicable" {
                            dead.insert(technique);
                        }
                        skipped.push(SkippedVariant { brand: ascii.clone(), technique, reason: reason.into() });
                    }
                }
            }
            if !produced {
                break;
            }
        }
        BrandOutput { rows, skipped }
    }

    /// Positives for every brand plus label-false rows, shuffled by seed.
    pub fn build_dataset(&self, brands: &[Domain], opts: &BuildOptions) -> Result<Dataset, BuildError> {
        if brands.is_empty() {
            return Err(BuildError::NoBrands);
        }
        if !(0.0..=1.0).contains(&opts.legit_fraction) {
            return Err(BuildError::LegitFraction(opts.legit_fraction));
        }
        let techniques: Vec<Technique> =
            if opts.techniques.is_empty() { Technique::ALL.to_vec() } else { opts.techniques.clone() };

        let mut seen_brand = HashSet::new();
        let brands: Vec<&Domain> = brands.iter().filter(|b| seen_brand.insert(b.ascii())).collect();
        let mut pool: Vec<&Domain> = brands.clone();
        for d in &opts.legit_domains {
            if seen_brand.insert(d.ascii()) {
                pool.push(d);
            }
        }
        let taken: HashSet<String> = seen_brand;

        let work = || -> Vec<BrandOutput> {
            brands.par_iter().map(|b| self.brand_variants(b, &techniques, opts, &taken)).collect()
        };
        let outputs = match opts.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| BuildError::Threads(e.to_string()))?
                .install(work),
            None => work(),
        };

        let mut examples = Vec::new();
        let mut skipped = Vec::new();
        let mut emitted = HashSet::new();
        for out in outputs {
            skipped.extend(out.skipped);
            for row in out.rows {
                if emitted.insert(row.domain.clone()) {
                    examples.push(row);
                } else {
                    skipped.push(SkippedVariant {
                        brand: row.brand.clone().unwrap_or_default(),
                        technique: row.technique.expect("positives carry a technique"),
                        reason: "duplicate".into(),
                    });
                }
            }
        }

        let positives = examples.len();
        let q = opts.legit_fraction;
        let requested = if q >= 1.0 { pool.len() } else { (positives as f64 * q / (1.0 - q)).round() as usize };
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &["negatives"]));
        pool.shuffle(&mut rng);
        examples.extend(pool.iter().take(requested).map(|d| LabeledExample::negative(d)));

        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, &["shuffle"]));
        examples.shuffle(&mut rng);
        let counts = Counts::of(&examples);
        Ok(Dataset {
            examples,
            manifest: Manifest { seed: Some(opts.seed), counts, negatives_requested: Some(requested), skipped },
        })
    }
}

/// [`Generator::generate_variant`] with the bundled table and keywords.
pub fn generate_variant(brand: &Domain, technique: Technique, rng_seed: u64) -> Result<String, Inapplicable> {
    Generator::default().generate_variant(brand, technique, rng_seed)
}

/// [`Generator::build_dataset`] with the bundled table and keywords.
pub fn build_dataset(brands: &[Domain], opts: &BuildOptions) -> Result<Dataset, BuildError> {
    Generator::default().build_dataset(brands, opts)
}
