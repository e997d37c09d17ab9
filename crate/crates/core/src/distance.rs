//! String metrics over Unicode scalar values.
//!
//! [`damerau_levenshtein`] is the unrestricted (Lowrance–Wagner) distance,
//! so it is a true metric and can key a BK-tree. The restricted "optimal
//! string alignment" variant is not: `ca → ac → abc` costs 2 while OSA
//! reports 3 for `ca → abc`.

use std::fmt;

use serde::Serialize;

/// Unit-cost Levenshtein distance.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Unit-cost Damerau–Levenshtein distance with unrestricted adjacent
/// transpositions.
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    damerau_levenshtein_chars(&a, &b)
}

pub fn damerau_levenshtein_chars(a: &[char], b: &[char]) -> usize {
    bounded(a, b, usize::MAX)
}

/// `min(damerau_levenshtein(a, b), cap)`, computed with early exit once
/// every cell of a row exceeds the cap (row minima never decrease).
pub fn damerau_levenshtein_bounded(a: &[char], b: &[char], cap: usize) -> usize {
    bounded(a, b, cap)
}

/// Last row index (1-based) at which each char occurred in `a`.
/// Linear scan: domain labels are short and have few distinct chars.
struct LastSeen(Vec<(char, usize)>);

impl LastSeen {
    fn get(&self, c: char) -> usize {
        self.0.iter().find(|(k, _)| *k == c).map_or(0, |&(_, v)| v)
    }

    fn set(&mut self, c: char, row: usize) {
        match self.0.iter_mut().find(|(k, _)| *k == c) {
            Some(slot) => slot.1 = row,
            None => self.0.push((c, row)),
        }
    }
}

fn bounded(a: &[char], b: &[char], cap: usize) -> usize {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) >= cap {
        return cap;
    }
    if n == 0 || m == 0 {
        return (n + m).min(cap);
    }
    let width = m + 2;
    let sentinel = n + m;
    let mut d = vec![0usize; (n + 2) * width];
    // Shifted so d[(i + 1) * width + (j + 1)] holds the distance between
    // a[..i] and b[..j]; row/column 0 are the sentinel border.
    d[0] = sentinel;
    for i in 0..=n {
        d[(i + 1) * width] = sentinel;
        d[(i + 1) * width + 1] = i;
    }
    for j in 0..=m {
        d[j + 1] = sentinel;
        d[width + j + 1] = j;
    }
    let mut last = LastSeen(Vec::with_capacity(8));
    for i in 1..=n {
        let ai = a[i - 1];
        let mut last_match_col = 0;
        let mut row_min = i;
        for j in 1..=m {
            let bj = b[j - 1];
            let k = last.get(bj);
            let l = last_match_col;
            let cost = if ai == bj {
                last_match_col = j;
                0
            } else {
                1
            };
            let sub = d[i * width + j] + cost;
            let ins = d[(i + 1) * width + j] + 1;
            let del = d[i * width + j + 1] + 1;
            let trans = d[k * width + l] + (i - k - 1) + 1 + (j - l - 1);
            let v = sub.min(ins).min(del).min(trans);
            d[(i + 1) * width + j + 1] = v;
            row_min = row_min.min(v);
        }
        if row_min >= cap {
            return cap;
        }
        last.set(ai, i);
    }
    d[(n + 1) * width + m + 1].min(cap)
}

/// One primitive edit. Positions index the string as it stands when the
/// edit is applied (edits are applied in order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Edit {
    Insert {
        pos: usize,
        ch: char,
    },
    Delete {
        pos: usize,
        ch: char,
    },
    Substitute {
        pos: usize,
        from: char,
        to: char,
    },
    /// Swaps `chars.0` at `pos` with `chars.1` at `pos + 1`.
    Transpose {
        pos: usize,
        chars: (char, char),
    },
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edit::Insert { pos, ch } => write!(f, "insert({pos},{ch:?})"),
            Edit::Delete { pos, ch } => write!(f, "delete({pos},{ch:?})"),
            Edit::Substitute { pos, from, to } => write!(f, "substitute({pos},{from:?},{to:?})"),
            Edit::Transpose { pos, chars } => write!(f, "transpose({pos},{:?}{:?})", chars.0, chars.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApplyError {
    OutOfRange(Edit),
    Mismatch(Edit),
}

/// An optimal sequence of edits turning one string into another.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct EditScript {
    edits: Vec<Edit>,
}

impl EditScript {
    pub fn edits(&self) -> &[Edit] {
        &self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn only_substitutions(&self) -> bool {
        !self.is_empty() && self.edits.iter().all(|e| matches!(e, Edit::Substitute { .. }))
    }

    pub fn only_indels(&self) -> bool {
        !self.is_empty() && self.edits.iter().all(|e| matches!(e, Edit::Insert { .. } | Edit::Delete { .. }))
    }

    /// Replays the script on `source`, checking each edit's recorded chars.
    pub fn apply(&self, source: &str) -> Result<String, ApplyError> {
        let mut s: Vec<char> = source.chars().collect();
        for edit in &self.edits {
            match *edit {
                Edit::Insert { pos, ch } => {
                    if pos > s.len() {
                        return Err(ApplyError::OutOfRange(edit.clone()));
                    }
                    s.insert(pos, ch);
                }
                Edit::Delete { pos, ch } => match s.get(pos) {
                    Some(&c) if c == ch => {
                        s.remove(pos);
                    }
                    Some(_) => return Err(ApplyError::Mismatch(edit.clone())),
                    None => return Err(ApplyError::OutOfRange(edit.clone())),
                },
                Edit::Substitute { pos, from, to } => match s.get_mut(pos) {
                    Some(c) if *c == from => *c = to,
                    Some(_) => return Err(ApplyError::Mismatch(edit.clone())),
                    None => return Err(ApplyError::OutOfRange(edit.clone())),
                },
                Edit::Transpose { pos, chars } => {
                    if pos + 1 >= s.len() {
                        return Err(ApplyError::OutOfRange(edit.clone()));
                    }
                    if (s[pos], s[pos + 1]) != chars {
                        return Err(ApplyError::Mismatch(edit.clone()));
                    }
                    s.swap(pos, pos + 1);
                }
            }
        }
        Ok(s.into_iter().collect())
    }
}

impl fmt::Display for EditScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.edits.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Copy)]
enum Step {
    Origin,
    Diagonal,
    Insert,
    Delete,
    // Block from (k-1, l-1): a[k..i] and b[l..j] with a[k]=b[j], a[i]=b[l].
    Transpose { k: usize, l: usize },
}

/// Alignment-level operation, before positions are resolved.
enum Aligned {
    Keep,
    Sub(char, char),
    Ins(char),
    Del(char),
    Block { first: char, second: char, dropped: Vec<char>, added: Vec<char> },
}

/// Optimal Damerau–Levenshtein edit script from `a` to `b`.
///
/// Ties prefer substitute (or keep), then insert, then delete, then
/// transpose.
pub fn edit_script(a: &str, b: &str) -> EditScript {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let width = m + 2;
    let sentinel = n + m + 1;
    let mut d = vec![0usize; (n + 2) * width];
    let mut steps = vec![Step::Origin; (n + 2) * width];
    d[0] = sentinel;
    for i in 0..=n {
        d[(i + 1) * width] = sentinel;
        d[(i + 1) * width + 1] = i;
        if i > 0 {
            steps[(i + 1) * width + 1] = Step::Delete;
        }
    }
    for j in 0..=m {
        d[j + 1] = sentinel;
        d[width + j + 1] = j;
        if j > 0 {
            steps[width + j + 1] = Step::Insert;
        }
    }
    let mut last = LastSeen(Vec::new());
    for i in 1..=n {
        let ai = a[i - 1];
        let mut last_match_col = 0;
        for j in 1..=m {
            let bj = b[j - 1];
            let k = last.get(bj);
            let l = last_match_col;
            let cost = if ai == bj {
                last_match_col = j;
                0
            } else {
                1
            };
            let candidates = [
                (d[i * width + j] + cost, Step::Diagonal),
                (d[(i + 1) * width + j] + 1, Step::Insert),
                (d[i * width + j + 1] + 1, Step::Delete),
                (d[k * width + l] + (i - k - 1) + 1 + (j - l - 1), Step::Transpose { k, l }),
            ];
            let mut best = candidates[0];
            for c in &candidates[1..] {
                if c.0 < best.0 {
                    best = *c;
                }
            }
            d[(i + 1) * width + j + 1] = best.0;
            steps[(i + 1) * width + j + 1] = best.1;
        }
        last.set(ai, i);
    }

    let mut aligned = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match steps[(i + 1) * width + j + 1] {
            Step::Origin => unreachable!("traceback reached origin early"),
            Step::Diagonal => {
                let (x, y) = (a[i - 1], b[j - 1]);
                aligned.push(if x == y { Aligned::Keep } else { Aligned::Sub(x, y) });
                i -= 1;
                j -= 1;
            }
            Step::Insert => {
                aligned.push(Aligned::Ins(b[j - 1]));
                j -= 1;
            }
            Step::Delete => {
                aligned.push(Aligned::Del(a[i - 1]));
                i -= 1;
            }
            Step::Transpose { k, l } => {
                aligned.push(Aligned::Block {
                    first: a[k - 1],
                    second: a[i - 1],
                    dropped: a[k..i - 1].to_vec(),
                    added: b[l..j - 1].to_vec(),
                });
                i = k - 1;
                j = l - 1;
            }
        }
    }
    aligned.reverse();

    let mut edits = Vec::new();
    let mut pos = 0;
    for op in aligned {
        match op {
            Aligned::Keep => pos += 1,
            Aligned::Sub(from, to) => {
                edits.push(Edit::Substitute { pos, from, to });
                pos += 1;
            }
            Aligned::Ins(ch) => {
                edits.push(Edit::Insert { pos, ch });
                pos += 1;
            }
            Aligned::Del(ch) => edits.push(Edit::Delete { pos, ch }),
            Aligned::Block { first, second, dropped, added } => {
                for ch in dropped {
                    edits.push(Edit::Delete { pos: pos + 1, ch });
                }
                edits.push(Edit::Transpose { pos, chars: (first, second) });
                let added_len = added.len();
                for (offset, ch) in added.into_iter().enumerate() {
                    edits.push(Edit::Insert { pos: pos + 1 + offset, ch });
                }
                pos += 2 + added_len;
            }
        }
    }
    EditScript { edits }
}

/// Consonant-class key for sound-alike comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PhoneticKey(String);

impl PhoneticKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Equal keys, or keys one Damerau–Levenshtein edit apart.
    pub fn similar(&self, other: &PhoneticKey) -> bool {
        self == other || damerau_levenshtein(&self.0, &other.0) <= 1
    }
}

impl fmt::Display for PhoneticKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Every symbol a key can contain.
pub const PHONETIC_SYMBOLS: [char; 10] = ['A', 'H', 'P', 'F', 'K', 'S', 'T', 'L', 'R', 'M'];

pub(crate) fn unleet(c: char) -> char {
    match c {
        '0' => 'o',
        '1' => 'l',
        '3' => 'e',
        '5' => 's',
        '7' => 't',
        other => other,
    }
}

fn consonant_class(c: char) -> Option<&'static str> {
    Some(match c {
        'b' | 'p' => "P",
        'f' | 'v' | 'w' => "F",
        'c' | 'g' | 'j' | 'k' | 'q' => "K",
        's' | 'z' => "S",
        'x' => "KS",
        'd' | 't' => "T",
        'l' => "L",
        'r' => "R",
        'm' | 'n' => "M",
        _ => return None,
    })
}

/// Phonetic key: leet digits become letters, non-letters are dropped, the
/// first letter keeps its class (`A` for a vowel, `H` for h), later vowels
/// and h vanish, consonants map to their class, and adjacent repeats
/// collapse. Only ASCII letters contribute.
pub fn phonetic_key(s: &str) -> PhoneticKey {
    let mut raw = String::new();
    let letters = s.chars().flat_map(char::to_lowercase).map(unleet).filter(char::is_ascii_lowercase);
    for (idx, c) in letters.enumerate() {
        match consonant_class(c) {
            Some(class) => raw.push_str(class),
            None if idx == 0 => raw.push(if c == 'h' { 'H' } else { 'A' }),
            None => {}
        }
    }
    let mut key = String::with_capacity(raw.len());
    for c in raw.chars() {
        if !key.ends_with(c) {
            key.push(c);
        }
    }
    PhoneticKey(key)
}
