//! Domain parsing and normalization.
//!
//! Input may be defanged (`go0gle[.]com`), mixed-case, or carry `xn--`
//! labels. A parsed [`Domain`] holds both the Unicode and the ASCII form of
//! every label, plus the registrable second-level label and the suffix.

mod confusable;
mod punycode;

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use confusable::{confusable_skeleton, ConfusableError, ConfusableTable, BUNDLED_ENTRIES};
pub use punycode::{punycode_decode, punycode_encode, PunycodeError, ACE_PREFIX};

pub(crate) use confusable::strip_comment;

const DEFANGED_DOT: &str = "[.]";
const MAX_LABEL_LEN: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty domain")]
    Empty,
    #[error("empty label in {0:?}")]
    EmptyLabel(String),
    #[error("label {label:?}: illegal character {ch:?}")]
    IllegalChar { label: String, ch: char },
    #[error("label {label:?}: leading or trailing hyphen")]
    EdgeHyphen { label: String },
    #[error("label {label:?}: longer than 63 octets")]
    TooLong { label: String },
    #[error("label {label:?}: invalid punycode ({source})")]
    Punycode { label: String, source: PunycodeError },
    #[error("label {label:?}: punycode decodes to plain ASCII")]
    NotInternational { label: String },
    #[error("{0:?} has no label before its suffix")]
    MissingSld(String),
}

/// Ordered set of public suffixes used to pick the TLD by longest match.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuffixRules {
    suffixes: HashSet<String>,
    max_labels: usize,
}

impl SuffixRules {
    pub fn new<I, S>(suffixes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut rules = Self::default();
        for s in suffixes {
            let s = s.as_ref().trim().trim_matches('.').to_lowercase();
            if s.is_empty() {
                continue;
            }
            rules.max_labels = rules.max_labels.max(s.split('.').count());
            rules.suffixes.insert(s);
        }
        rules
    }

    /// Newline-delimited suffixes, `#` comments.
    pub fn from_file(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(Self::new(text.lines().map(strip_comment)))
    }

    pub fn contains(&self, suffix: &str) -> bool {
        self.suffixes.contains(suffix)
    }

    pub fn len(&self) -> usize {
        self.suffixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    /// Number of trailing labels that form the suffix.
    fn suffix_len(&self, labels: &[String]) -> usize {
        let upper = self.max_labels.min(labels.len() - 1);
        for n in (2..=upper).rev() {
            let candidate = labels[labels.len() - n..].join(".");
            if self.suffixes.contains(&candidate) {
                return n;
            }
        }
        1
    }
}

/// A parsed, normalized domain name.
///
/// Equality ignores the raw input text: `go0gle[.]com` and `GO0GLE.com`
/// are the same domain.
#[derive(Debug, Clone)]
pub struct Domain {
    raw: String,
    labels: Vec<String>,
    ascii_labels: Vec<String>,
    suffix_labels: usize,
}

impl Domain {
    pub fn parse(raw: &str) -> Result<Self, ParseError> {
        parse_domain(raw, None)
    }

    /// The text this domain was parsed from.
    pub fn raw(&self) -> &str {
        &self.raw
    }

    /// Lowercase labels in Unicode form.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Labels in ASCII form (`xn--` for internationalized labels).
    pub fn ascii_labels(&self) -> &[String] {
        &self.ascii_labels
    }

    /// Registrable second-level label, Unicode form.
    pub fn sld(&self) -> &str {
        &self.labels[self.labels.len() - self.suffix_labels - 1]
    }

    pub fn ascii_sld(&self) -> &str {
        &self.ascii_labels[self.labels.len() - self.suffix_labels - 1]
    }

    /// Effective top-level suffix, e.g. `com` or `co.uk`.
    pub fn tld(&self) -> String {
        self.labels[self.labels.len() - self.suffix_labels..].join(".")
    }

    /// `sld.tld`, Unicode form.
    pub fn registrable(&self) -> String {
        self.labels[self.labels.len() - self.suffix_labels - 1..].join(".")
    }

    pub fn unicode(&self) -> String {
        self.labels.join(".")
    }

    pub fn ascii(&self) -> String {
        self.ascii_labels.join(".")
    }

    /// Whether some label was written in punycode or contains non-ASCII.
    pub fn is_international(&self) -> bool {
        self.labels.iter().zip(&self.ascii_labels).any(|(u, a)| u != a)
    }

    /// Same labels with a different suffix.
    pub fn with_tld(&self, tld: &str, suffix_rules: Option<&SuffixRules>) -> Result<Domain, ParseError> {
        let prefix = &self.ascii_labels[..self.labels.len() - self.suffix_labels];
        parse_domain(&format!("{}.{}", prefix.join("."), tld), suffix_rules)
    }

    /// Same domain with the registrable label replaced.
    pub fn with_sld(&self, sld: &str, suffix_rules: Option<&SuffixRules>) -> Result<Domain, ParseError> {
        let at = self.labels.len() - self.suffix_labels - 1;
        let mut labels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        labels[at] = sld;
        parse_domain(&labels.join("."), suffix_rules)
    }
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.ascii_labels == other.ascii_labels && self.suffix_labels == other.suffix_labels
    }
}

impl Eq for Domain {}

impl std::hash::Hash for Domain {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ascii_labels.hash(state);
        self.suffix_labels.hash(state);
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ascii())
    }
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.ascii())
    }
}

fn label_char_ok(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || (!c.is_ascii() && c.is_alphanumeric())
}

fn normalize_label(raw_label: &str) -> Result<(String, String), ParseError> {
    let lowered = raw_label.to_lowercase();
    let (unicode, ascii) = if punycode::strip_ace_prefix(&lowered).is_some() {
        let decoded = punycode_decode(&lowered)
            .map_err(|source| ParseError::Punycode { label: raw_label.to_string(), source })?
            .to_lowercase();
        if decoded.is_ascii() {
            return Err(ParseError::NotInternational { label: raw_label.to_string() });
        }
        let ascii = punycode_encode(&decoded)
            .map_err(|source| ParseError::Punycode { label: raw_label.to_string(), source })?;
        (decoded, ascii)
    } else if lowered.is_ascii() {
        (lowered.clone(), lowered)
    } else {
        let ascii = punycode_encode(&lowered)
            .map_err(|source| ParseError::Punycode { label: raw_label.to_string(), source })?;
        (lowered, ascii)
    };

    if let Some(ch) = unicode.chars().find(|&c| !label_char_ok(c)) {
        return Err(ParseError::IllegalChar { label: raw_label.to_string(), ch });
    }
    if unicode.starts_with('-') || unicode.ends_with('-') {
        return Err(ParseError::EdgeHyphen { label: raw_label.to_string() });
    }
    if ascii.len() > MAX_LABEL_LEN {
        return Err(ParseError::TooLong { label: raw_label.to_string() });
    }
    Ok((unicode, ascii))
}

/// Parses `raw` into a [`Domain`].
///
/// `[.]` is accepted in place of `.`. The TLD is the longest suffix found
/// in `suffix_rules`, or the final label when none match or no rules are
/// given.
pub fn parse_domain(raw: &str, suffix_rules: Option<&SuffixRules>) -> Result<Domain, ParseError> {
    let text = raw.trim();
    if text.is_empty() {
        return Err(ParseError::Empty);
    }
    let text = text.replace(DEFANGED_DOT, ".");
    let mut labels = Vec::new();
    let mut ascii_labels = Vec::new();
    for part in text.split('.') {
        if part.is_empty() {
            return Err(ParseError::EmptyLabel(raw.to_string()));
        }
        let (u, a) = normalize_label(part)?;
        labels.push(u);
        ascii_labels.push(a);
    }
    if labels.len() < 2 {
        return Err(ParseError::MissingSld(raw.to_string()));
    }
    let suffix_labels = suffix_rules.map_or(1, |rules| rules.suffix_len(&labels));
    Ok(Domain { raw: raw.to_string(), labels, ascii_labels, suffix_labels })
}
