//! Reference set of legitimate brand domains.
//!
//! Second-level labels are indexed by their confusable skeleton, so
//! `rnicrosoft` and `microsoft` share a key and sit at distance 0.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::distance::{damerau_levenshtein_bounded, phonetic_key, PhoneticKey};
use crate::domain::{parse_domain, strip_comment, ConfusableTable, Domain, ParseError, SuffixRules};

/// Largest radius `nearest` will search.
pub const MAX_SEARCH_DISTANCE: usize = 3;
pub const DEFAULT_SEARCH_DISTANCE: usize = 2;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("reference list is empty")]
    Empty,
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("reading reference list: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct Reference {
    pub domain: Domain,
    pub skeleton: String,
    pub phonetic: PhoneticKey,
}

#[derive(Debug, Clone, Default)]
struct BkNode {
    key: Vec<char>,
    ids: Vec<usize>,
    // Sorted by edge distance.
    children: Vec<(usize, usize)>,
}

/// Metric tree over skeleton SLDs under Damerau–Levenshtein distance.
/// Each node carries every reference sharing its key.
#[derive(Debug, Clone, Default)]
pub struct BkTree {
    nodes: Vec<BkNode>,
    len: usize,
}

impl BkTree {
    fn insert(&mut self, key: Vec<char>, id: usize) {
        self.len += 1;
        if self.nodes.is_empty() {
            self.nodes.push(BkNode { key, ids: vec![id], children: Vec::new() });
            return;
        }
        let mut cur = 0;
        loop {
            let dist = damerau_levenshtein_bounded(&self.nodes[cur].key, &key, usize::MAX);
            if dist == 0 {
                self.nodes[cur].ids.push(id);
                return;
            }
            let children = &self.nodes[cur].children;
            match children.binary_search_by_key(&dist, |&(d, _)| d) {
                Ok(pos) => cur = children[pos].1,
                Err(pos) => {
                    let new = self.nodes.len();
                    self.nodes.push(BkNode { key, ids: vec![id], children: Vec::new() });
                    self.nodes[cur].children.insert(pos, (dist, new));
                    return;
                }
            }
        }
    }

    /// Number of stored reference ids.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Calls `visit(id, distance)` for every id within `radius` of `query`.
    fn search(&self, query: &[char], radius: usize, mut visit: impl FnMut(usize, usize)) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            let max_edge = node.children.last().map_or(0, |&(d, _)| d);
            // Beyond this cap the node neither matches nor has eligible children.
            let cap = max_edge + radius + 1;
            let dist = damerau_levenshtein_bounded(&node.key, query, cap);
            if dist <= radius {
                for &id in &node.ids {
                    visit(id, dist);
                }
            }
            if dist == cap {
                continue;
            }
            let lo = dist.saturating_sub(radius);
            let hi = dist + radius;
            let start = node.children.partition_point(|&(d, _)| d < lo);
            for &(d, child) in &node.children[start..] {
                if d > hi {
                    break;
                }
                stack.push(child);
            }
        }
    }
}

/// Largest radius served by the deletion index; wider searches walk the
/// BK-tree.
const DELETION_RADIUS: usize = 2;

/// Maps every string reachable by up to `radius` deletions from a key
/// back to that key. Two strings within distance `k`
/// (transpositions included) share a variant with at most `k` deletions
/// on each side, so probing the query's variants finds every neighbor.
#[derive(Debug, Clone, Default)]
struct DeletionIndex {
    radius: usize,
    keys: Vec<Vec<char>>,
    ids: Vec<Vec<usize>>,
    slot: HashMap<String, usize>,
    variants: HashMap<String, Vec<usize>>,
}

impl DeletionIndex {
    fn new(radius: usize) -> Self {
        DeletionIndex { radius, ..Default::default() }
    }

    fn insert(&mut self, key: &str, id: usize) {
        if let Some(&k) = self.slot.get(key) {
            self.ids[k].push(id);
            return;
        }
        let k = self.keys.len();
        let chars: Vec<char> = key.chars().collect();
        for v in deletion_variants(&chars, self.radius) {
            self.variants.entry(v).or_default().push(k);
        }
        self.slot.insert(key.to_string(), k);
        self.keys.push(chars);
        self.ids.push(vec![id]);
    }

    fn search(&self, query: &[char], radius: usize, mut visit: impl FnMut(usize, usize)) {
        debug_assert!(radius <= self.radius);
        let mut slots: Vec<usize> =
            deletion_variants(query, radius).iter().filter_map(|v| self.variants.get(v)).flatten().copied().collect();
        slots.sort_unstable();
        slots.dedup();
        for k in slots {
            let dist = damerau_levenshtein_bounded(&self.keys[k], query, radius + 1);
            if dist <= radius {
                for &id in &self.ids[k] {
                    visit(id, dist);
                }
            }
        }
    }
}

/// Distinct strings obtained from `chars` by deleting at most `max` chars.
fn deletion_variants(chars: &[char], max: usize) -> HashSet<String> {
    let mut out = HashSet::new();
    let mut frontier = vec![chars.to_vec()];
    out.insert(chars.iter().collect());
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            for i in 0..s.len() {
                // Deleting either char of a run yields the same string.
                if i > 0 && s[i] == s[i - 1] {
                    continue;
                }
                let mut shorter = s.clone();
                shorter.remove(i);
                if out.insert(shorter.iter().collect()) {
                    next.push(shorter);
                }
            }
        }
        frontier = next;
    }
    out
}

/// A neighbor found by [`ReferenceIndex::nearest`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbor<'a> {
    pub id: usize,
    pub reference: &'a Domain,
    pub distance: usize,
}

#[derive(Debug, Clone)]
pub struct ReferenceIndex {
    references: Vec<Reference>,
    exact: HashSet<String>,
    by_sld: HashMap<String, Vec<usize>>,
    by_phonetic: HashMap<String, Vec<usize>>,
    phonetic_deletions: DeletionIndex,
    bktree: BkTree,
    deletions: DeletionIndex,
    raw_bktree: BkTree,
    raw_deletions: DeletionIndex,
    table: ConfusableTable,
    suffix_rules: Option<SuffixRules>,
}

impl ReferenceIndex {
    /// Builds an index from domain strings. Duplicates (after
    /// normalization) are dropped; order is normalized so the build is
    /// deterministic.
    pub fn build<I, S>(
        domains: I,
        table: ConfusableTable,
        suffix_rules: Option<SuffixRules>,
    ) -> Result<Self, IndexError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut parsed = BTreeMap::new();
        for (idx, raw) in domains.into_iter().enumerate() {
            let domain = parse_domain(raw.as_ref(), suffix_rules.as_ref())
                .map_err(|source| IndexError::Parse { line: idx + 1, source })?;
            parsed.entry(domain.unicode()).or_insert(domain);
        }
        Self::from_parsed(parsed.into_values().collect(), table, suffix_rules)
    }

    /// Newline-delimited domains, `#` comments. Errors carry the physical
    /// line number.
    pub fn from_file(
        path: impl AsRef<Path>,
        table: ConfusableTable,
        suffix_rules: Option<SuffixRules>,
    ) -> Result<Self, IndexError> {
        let text = fs::read_to_string(path)?;
        let mut parsed = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let entry = strip_comment(line).trim();
            if entry.is_empty() {
                continue;
            }
            let domain = parse_domain(entry, suffix_rules.as_ref())
                .map_err(|source| IndexError::Parse { line: idx + 1, source })?;
            parsed.entry(domain.unicode()).or_insert(domain);
        }
        Self::from_parsed(parsed.into_values().collect(), table, suffix_rules)
    }

    fn from_parsed(
        domains: Vec<Domain>,
        table: ConfusableTable,
        suffix_rules: Option<SuffixRules>,
    ) -> Result<Self, IndexError> {
        if domains.is_empty() {
            return Err(IndexError::Empty);
        }
        let mut index = ReferenceIndex {
            references: Vec::with_capacity(domains.len()),
            exact: HashSet::new(),
            by_sld: HashMap::new(),
            by_phonetic: HashMap::new(),
            phonetic_deletions: DeletionIndex::new(1),
            bktree: BkTree::default(),
            deletions: DeletionIndex::new(DELETION_RADIUS),
            raw_bktree: BkTree::default(),
            raw_deletions: DeletionIndex::new(DELETION_RADIUS),
            table,
            suffix_rules,
        };
        for domain in domains {
            let id = index.references.len();
            let skeleton = index.table.skeleton(domain.sld());
            let phonetic = phonetic_key(domain.sld());
            index.exact.insert(domain.unicode());
            index.by_sld.entry(skeleton.clone()).or_default().push(id);
            index.by_phonetic.entry(phonetic.as_str().to_string()).or_default().push(id);
            index.bktree.insert(skeleton.chars().collect(), id);
            index.deletions.insert(&skeleton, id);
            index.raw_bktree.insert(domain.sld().chars().collect(), id);
            index.raw_deletions.insert(domain.sld(), id);
            index.phonetic_deletions.insert(phonetic.as_str(), id);
            index.references.push(Reference { domain, skeleton, phonetic });
        }
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }

    pub fn references(&self) -> &[Reference] {
        &self.references
    }

    pub fn reference(&self, id: usize) -> &Reference {
        &self.references[id]
    }

    pub fn table(&self) -> &ConfusableTable {
        &self.table
    }

    pub fn suffix_rules(&self) -> Option<&SuffixRules> {
        self.suffix_rules.as_ref()
    }

    pub fn bktree(&self) -> &BkTree {
        &self.bktree
    }

    /// Whether `domain` (or its registrable part) is itself a reference.
    pub fn contains(&self, domain: &Domain) -> bool {
        self.exact.contains(&domain.unicode()) || self.exact.contains(&domain.registrable())
    }

    /// References whose skeleton SLD equals `skeleton`.
    pub fn by_skeleton(&self, skeleton: &str) -> &[usize] {
        self.by_sld.get(skeleton).map_or(&[], Vec::as_slice)
    }

    /// References whose SLD skeleton lies within `max_dist` of the
    /// skeleton of `query_sld`, ascending by distance then domain.
    /// `max_dist` is clamped to [`MAX_SEARCH_DISTANCE`].
    pub fn nearest(&self, query_sld: &str, max_dist: usize) -> Vec<Neighbor<'_>> {
        let query: Vec<char> = self.table.skeleton(query_sld).chars().collect();
        self.search(&self.deletions, &self.bktree, &query, max_dist)
    }

    /// Like [`nearest`](Self::nearest) but over the SLDs themselves.
    /// Collapsing confusables can separate skeletons of labels that are
    /// close as typed (`airnb` against `airbnb`).
    pub fn nearest_raw(&self, query_sld: &str, max_dist: usize) -> Vec<Neighbor<'_>> {
        let query: Vec<char> = query_sld.chars().collect();
        self.search(&self.raw_deletions, &self.raw_bktree, &query, max_dist)
    }

    fn search(&self, deletions: &DeletionIndex, bktree: &BkTree, query: &[char], max_dist: usize) -> Vec<Neighbor<'_>> {
        let radius = max_dist.min(MAX_SEARCH_DISTANCE);
        let mut found = Vec::new();
        let visit = |id, distance| found.push(Neighbor { id, reference: &self.references[id].domain, distance });
        if radius <= DELETION_RADIUS {
            deletions.search(query, radius, visit);
        } else {
            bktree.search(query, radius, visit);
        }
        found.sort_by(|a, b| {
            a.distance.cmp(&b.distance).then_with(|| a.reference.unicode().cmp(&b.reference.unicode()))
        });
        found
    }

    /// References whose phonetic key equals `key`.
    pub fn by_phonetic(&self, key: &PhoneticKey) -> &[usize] {
        self.by_phonetic.get(key.as_str()).map_or(&[], Vec::as_slice)
    }

    /// References whose phonetic key equals `key` or is one edit away,
    /// ascending by id.
    pub fn phonetic_neighbors(&self, key: &PhoneticKey) -> Vec<usize> {
        let query: Vec<char> = key.as_str().chars().collect();
        let mut ids = Vec::new();
        self.phonetic_deletions.search(&query, 1, |id, _| ids.push(id));
        ids.sort_unstable();
        ids
    }
}

/// [`ReferenceIndex::build`] as a free function.
pub fn build_index<I, S>(
    domains: I,
    table: ConfusableTable,
    suffix_rules: Option<SuffixRules>,
) -> Result<ReferenceIndex, IndexError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    ReferenceIndex::build(domains, table, suffix_rules)
}
