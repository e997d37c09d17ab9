//! Confusable-character tables and skeleton computation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Entries shipped with the crate: leet digits, multi-letter lookalikes and
/// the Cyrillic letters that render identically to Latin ones.
pub const BUNDLED_ENTRIES: &[(&str, &str)] = &[
    ("0", "o"),
    ("1", "l"),
    ("3", "e"),
    ("5", "s"),
    ("7", "t"),
    ("rn", "m"),
    ("vv", "w"),
    ("cl", "d"),
    ("\u{0430}", "a"),
    ("\u{0435}", "e"),
    ("\u{043E}", "o"),
    ("\u{0440}", "p"),
    ("\u{0441}", "c"),
    ("\u{0445}", "x"),
    ("\u{0443}", "y"),
];

#[derive(Debug, Error)]
pub enum ConfusableError {
    #[error("line {line}: expected \"source<TAB>replacement\"")]
    Malformed { line: usize },
    #[error("source {source_seq:?} must be 1 or 2 characters")]
    SourceLength { source_seq: String },
    #[error("entry {source_seq:?} maps to itself")]
    Identity { source_seq: String },
    #[error("replacement {replacement:?} for {source_seq:?} must be non-empty and no longer than its source")]
    ReplacementLength { source_seq: String, replacement: String },
    #[error("replacement {replacement:?} for {source_seq:?} is itself rewritten by the table")]
    NotClosed { source_seq: String, replacement: String },
    #[error("reading confusable table: {0}")]
    Io(#[from] std::io::Error),
}

/// Mapping from 1–2 character source sequences to canonical replacements.
///
/// Every replacement is a fixed point of the table, so the skeleton
/// computed from it is well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusableTable {
    entries: BTreeMap<String, String>,
    // Sources indexed by first char, longest first.
    by_first: BTreeMap<char, Vec<(Vec<char>, String)>>,
}

impl Default for ConfusableTable {
    fn default() -> Self {
        Self::bundled()
    }
}

impl ConfusableTable {
    pub fn bundled() -> Self {
        Self::from_entries(BUNDLED_ENTRIES.iter().map(|(s, r)| (s.to_string(), r.to_string())))
            .expect("bundled confusable table is valid")
    }

    pub fn from_entries<I>(entries: I) -> Result<Self, ConfusableError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut map = BTreeMap::new();
        for (source, replacement) in entries {
            let source = source.to_lowercase();
            let replacement = replacement.to_lowercase();
            let n = source.chars().count();
            if !(1..=2).contains(&n) {
                return Err(ConfusableError::SourceLength { source_seq: source });
            }
            if source == replacement {
                return Err(ConfusableError::Identity { source_seq: source });
            }
            let r = replacement.chars().count();
            if r == 0 || r > n {
                return Err(ConfusableError::ReplacementLength { source_seq: source, replacement });
            }
            map.insert(source, replacement);
        }
        let table = Self::index(map);
        for (source, replacement) in &table.entries {
            if table.rewrite_once(replacement) != *replacement {
                return Err(ConfusableError::NotClosed {
                    source_seq: source.clone(),
                    replacement: replacement.clone(),
                });
            }
        }
        Ok(table)
    }

    /// Bundled entries extended (and overridden) by a user file.
    pub fn bundled_with_file(path: impl AsRef<Path>) -> Result<Self, ConfusableError> {
        let text = fs::read_to_string(path)?;
        let mut entries: BTreeMap<String, String> =
            BUNDLED_ENTRIES.iter().map(|(s, r)| (s.to_string(), r.to_string())).collect();
        entries.extend(parse_table_text(&text)?);
        Self::from_entries(entries)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfusableError> {
        let text = fs::read_to_string(path)?;
        Self::from_entries(parse_table_text(&text)?)
    }

    fn index(entries: BTreeMap<String, String>) -> Self {
        let mut by_first: BTreeMap<char, Vec<(Vec<char>, String)>> = BTreeMap::new();
        for (s, r) in &entries {
            let chars: Vec<char> = s.chars().collect();
            by_first.entry(chars[0]).or_default().push((chars, r.clone()));
        }
        for list in by_first.values_mut() {
            list.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        }
        Self { entries, by_first }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(s, r)| (s.as_str(), r.as_str()))
    }

    pub fn get(&self, source: &str) -> Option<&str> {
        self.entries.get(source).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One greedy left-to-right pass, longest source first.
    fn rewrite_once(&self, text: &str) -> String {
        let chars: Vec<char> = text.chars().collect();
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        'outer: while i < chars.len() {
            if let Some(candidates) = self.by_first.get(&chars[i]) {
                for (source, replacement) in candidates {
                    if chars[i..].starts_with(source) {
                        out.push_str(replacement);
                        i += source.len();
                        continue 'outer;
                    }
                }
            }
            out.push(chars[i]);
            i += 1;
        }
        out
    }

    /// Case-folds `text` and rewrites confusable sequences until nothing
    /// more applies. A replacement can create a new source across a
    /// boundary (`c` + `1` becomes `cl`), hence the repeated passes.
    pub fn skeleton(&self, text: &str) -> String {
        let mut current = text.to_lowercase();
        // Each changing pass shortens the text or turns a source char into a
        // replacement char; the cap only guards against exotic user tables.
        for _ in 0..=current.chars().count() * 2 + 1 {
            let next = self.rewrite_once(&current);
            if next == current {
                return current;
            }
            current = next;
        }
        current
    }
}

/// `source<TAB>replacement` lines; `#` starts a comment.
fn parse_table_text(text: &str) -> Result<Vec<(String, String)>, ConfusableError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(source), Some(replacement), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ConfusableError::Malformed { line: line_no });
        };
        let (source, replacement) = (source.trim(), replacement.trim());
        if source.is_empty() || replacement.is_empty() {
            return Err(ConfusableError::Malformed { line: line_no });
        }
        if !(1..=2).contains(&source.chars().count()) {
            return Err(ConfusableError::Malformed { line: line_no });
        }
        out.push((source.to_string(), replacement.to_string()));
    }
    Ok(out)
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

/// Skeleton under the bundled table.
pub fn confusable_skeleton(text: &str, table: &ConfusableTable) -> String {
    table.skeleton(text)
}
