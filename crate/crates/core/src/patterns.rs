//! r-patterns: the order types of two disjoint r-edges.
//!
//! A pattern is written as a 2r-letter A/B word whose first letter is A (the
//! edge with the smaller minimum). Internally the word is a bit mask with bit
//! `i` set when position `i` holds a B, which caps r at 32.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::Vertex;

/// Largest r accepted by [`enumerate_patterns`] by default.
pub const DEFAULT_PATTERN_R_CAP: usize = 8;
const MAX_R: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    r: u8,
    mask: u64,
}

/// Orders by r, then lexicographically by word with A < B.
impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.r, self.mask.reverse_bits()).cmp(&(other.r, other.mask.reverse_bits()))
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Pattern {
    /// Parses an A/B word. A word starting with B is read with the letters
    /// swapped, so `BAAB` and `ABBA` name the same pattern.
    pub fn from_word(word: &str) -> Result<Self> {
        let bytes = word.trim().as_bytes();
        if bytes.is_empty() || !bytes.len().is_multiple_of(2) || bytes.len() > 2 * MAX_R {
            return Err(Error::Parse(format!("pattern word {word:?} must have even length 2..={}", 2 * MAX_R)));
        }
        let first = bytes[0];
        let mut mask = 0u64;
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'A' | b'B' => {
                    if b != first {
                        mask |= 1 << i;
                    }
                }
                _ => return Err(Error::Parse(format!("pattern word {word:?} may only use A and B"))),
            }
        }
        let r = bytes.len() / 2;
        if mask.count_ones() as usize != r {
            return Err(Error::Parse(format!("pattern word {word:?} needs {r} A's and {r} B's")));
        }
        Ok(Self { r: r as u8, mask })
    }

    pub(crate) fn from_mask(r: usize, mask: u64) -> Self {
        debug_assert_eq!(mask.count_ones() as usize, r);
        debug_assert_eq!(mask & 1, 0);
        Self { r: r as u8, mask }
    }

    pub fn r(&self) -> usize {
        self.r as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Letters as booleans, `true` for B.
    pub fn letters(&self) -> impl Iterator<Item = bool> + '_ {
        (0..2 * self.r()).map(move |i| self.mask >> i & 1 == 1)
    }

    pub fn word(&self) -> String {
        self.letters().map(|b| if b { 'B' } else { 'A' }).collect()
    }

    /// The unique splitting into blocks `A^t B^t` / `B^t A^t`, if any.
    pub fn split_blocks(&self) -> Option<BlockSplit> {
        let letters: Vec<bool> = self.letters().collect();
        let mut blocks = Vec::new();
        let mut p = 0;
        while p < letters.len() {
            let lead = letters[p];
            let t = letters[p..].iter().take_while(|&&l| l == lead).count();
            if p + 2 * t > letters.len() || letters[p + t..p + 2 * t].contains(&lead) {
                return None;
            }
            let orientation = if lead { Orientation::BFirst } else { Orientation::AFirst };
            blocks.push(Block { len: t, orientation });
            p += 2 * t;
        }
        Some(BlockSplit { blocks })
    }

    pub fn is_collectable(&self) -> bool {
        self.split_blocks().is_some()
    }

    pub fn composition(&self) -> Option<Vec<usize>> {
        self.split_blocks().map(|s| s.parts())
    }

    /// Removes the j-th A and the j-th B (1-based), re-canonicalizing the
    /// result so that it starts with A.
    pub fn delete_index(&self, j: usize) -> Result<Pattern> {
        let r = self.r();
        if r < 3 {
            return Err(Error::InvalidArgument(format!("index deletion needs r >= 3, got {r}")));
        }
        if j == 0 || j > r {
            return Err(Error::IndexOutOfRange { index: j, max: r });
        }
        let (mut seen_a, mut seen_b) = (0, 0);
        let mut kept = Vec::with_capacity(2 * r - 2);
        for is_b in self.letters() {
            let seen = if is_b { &mut seen_b } else { &mut seen_a };
            *seen += 1;
            if *seen != j {
                kept.push(is_b);
            }
        }
        let flip = kept[0];
        let mask = kept.iter().enumerate().fold(0u64, |m, (i, &b)| if b != flip { m | 1 << i } else { m });
        Ok(Pattern::from_mask(r - 1, mask))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Pattern::from_word(s)
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.word())
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Pattern::from_word(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    AFirst,
    BFirst,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::AFirst => Orientation::BFirst,
            Orientation::BFirst => Orientation::AFirst,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    /// Half-length t of the block `A^t B^t` or `B^t A^t`.
    pub len: usize,
    pub orientation: Orientation,
}

/// Splitting of a collectable pattern into consecutive blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockSplit {
    pub blocks: Vec<Block>,
}

impl BlockSplit {
    /// The composition of r given by the block half-lengths.
    pub fn parts(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len).collect()
    }

    pub fn orientations(&self) -> Vec<Orientation> {
        self.blocks.iter().map(|b| b.orientation).collect()
    }

    pub fn to_pattern(&self) -> Pattern {
        pattern_from_blocks(&self.blocks)
    }
}

pub fn pattern_from_blocks(blocks: &[Block]) -> Pattern {
    let mut mask = 0u64;
    let mut p = 0;
    for b in blocks {
        let offset = match b.orientation {
            Orientation::AFirst => b.len,
            Orientation::BFirst => 0,
        };
        for i in 0..b.len {
            mask |= 1 << (p + offset + i);
        }
        p += 2 * b.len;
    }
    Pattern::from_mask(p / 2, mask)
}

/// Pattern mask of two disjoint sorted edges of equal size, where `a[0] < b[0]`.
#[inline]
pub(crate) fn pair_mask(a: &[Vertex], b: &[Vertex]) -> u64 {
    let (mut i, mut j, mut pos, mut mask) = (0, 0, 0, 0u64);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            i += 1;
        } else {
            mask |= 1 << pos;
            j += 1;
        }
        pos += 1;
    }
    while j < b.len() {
        mask |= 1 << pos;
        pos += 1;
        j += 1;
    }
    mask
}

/// Order type of the pair of edges `{e, f}`; the edge with the smaller
/// minimum plays the role of A.
pub fn pattern_of_pair(e: &[Vertex], f: &[Vertex]) -> Result<Pattern> {
    if e.len() != f.len() || e.is_empty() {
        return Err(Error::SizeMismatch(format!("edges of sizes {} and {}", e.len(), f.len())));
    }
    if e.len() > MAX_R {
        return Err(Error::RTooLarge { r: e.len(), cap: MAX_R });
    }
    let mut a = e.to_vec();
    let mut b = f.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a.iter().any(|v| b.binary_search(v).is_ok()) {
        return Err(Error::EdgesIntersect);
    }
    if b[0] < a[0] {
        std::mem::swap(&mut a, &mut b);
    }
    Ok(Pattern::from_mask(a.len(), pair_mask(&a, &b)))
}

/// All r-patterns in lexicographic order (A < B).
pub fn enumerate_patterns(r: usize) -> Result<PatternSet> {
    enumerate_patterns_capped(r, DEFAULT_PATTERN_R_CAP)
}

pub fn enumerate_patterns_capped(r: usize, cap: usize) -> Result<PatternSet> {
    if r < 1 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if r > cap.min(MAX_R) {
        return Err(Error::RTooLarge { r, cap: cap.min(MAX_R) });
    }
    let mut members = BTreeSet::new();
    // The remaining 2r-1 positions hold r B's and r-1 A's.
    let mut stack = vec![(1usize, 0u64, 0usize)];
    while let Some((pos, mask, bs)) = stack.pop() {
        if pos == 2 * r {
            members.insert(Pattern::from_mask(r, mask));
            continue;
        }
        let as_used = pos - bs;
        if bs < r {
            stack.push((pos + 1, mask | 1 << pos, bs + 1));
        }
        if as_used < r {
            stack.push((pos + 1, mask, bs));
        }
    }
    Ok(PatternSet { r, members })
}

/// Number of collectable r-patterns, by filtering the full enumeration.
pub fn count_collectable(r: usize) -> Result<usize> {
    Ok(enumerate_patterns(r)?.iter().filter(|p| p.is_collectable()).count())
}

/// All patterns with the given composition: `2^(s-1)` of them.
pub fn patterns_with_composition(parts: &[usize]) -> Vec<Pattern> {
    let s = parts.len();
    if s == 0 {
        return Vec::new();
    }
    (0..1u64 << (s - 1))
        .map(|choice| {
            let blocks: Vec<Block> = parts
                .iter()
                .enumerate()
                .map(|(i, &len)| {
                    let b_first = i > 0 && choice >> (i - 1) & 1 == 1;
                    Block { len, orientation: if b_first { Orientation::BFirst } else { Orientation::AFirst } }
                })
                .collect();
            pattern_from_blocks(&blocks)
        })
        .collect()
}

/// The r-partite patterns: composition `(1, ..., 1)`.
pub fn r_partite_set(r: usize) -> Result<PatternSet> {
    if r == 0 || r > MAX_R {
        return Err(Error::InvalidArgument(format!("r must lie in 1..={MAX_R}")));
    }
    Ok(PatternSet { r, members: patterns_with_composition(&vec![1; r]).into_iter().collect() })
}

/// A set of r-patterns with a common r.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternSet {
    r: usize,
    members: BTreeSet<Pattern>,
}

impl PatternSet {
    pub fn new(r: usize, patterns: impl IntoIterator<Item = Pattern>) -> Result<Self> {
        let mut members = BTreeSet::new();
        for p in patterns {
            if p.r() != r {
                return Err(Error::RMismatch(r, p.r()));
            }
            members.insert(p);
        }
        Ok(Self { r, members })
    }

    pub fn from_words(words: &[&str]) -> Result<Self> {
        let patterns = words.iter().map(|w| Pattern::from_word(w)).collect::<Result<Vec<_>>>()?;
        let r = patterns.first().map(Pattern::r).ok_or(Error::EmptyInput)?;
        Self::new(r, patterns)
    }

    /// Parses a CLI pattern spec: comma-separated words, or one of the macros
    /// `@all:r`, `@collectable:r`, `@noncollectable:r`, `@partite:r`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix('@') {
            let (name, r) =
                rest.split_once(':').ok_or_else(|| Error::Parse(format!("macro {spec:?} needs the form @name:r")))?;
            let r: usize = r.trim().parse().map_err(|e| Error::Parse(format!("{r:?}: {e}")))?;
            return match name {
                "all" => enumerate_patterns(r),
                "collectable" => Ok(enumerate_patterns(r)?.filter(|p| p.is_collectable())),
                "noncollectable" => Ok(enumerate_patterns(r)?.filter(|p| !p.is_collectable())),
                "partite" => r_partite_set(r),
                _ => Err(Error::Parse(format!("unknown pattern macro {name:?}"))),
            };
        }
        let words: Vec<&str> = spec.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
        Self::from_words(&words)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.members.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pattern> {
        self.members.iter()
    }

    pub fn filter(&self, keep: impl Fn(&Pattern) -> bool) -> Self {
        Self { r: self.r, members: self.members.iter().copied().filter(|p| keep(p)).collect() }
    }

    pub fn is_subset(&self, other: &PatternSet) -> bool {
        self.r == other.r && self.members.is_subset(&other.members)
    }

    pub fn without(&self, p: &Pattern) -> Self {
        self.filter(|q| q != p)
    }

    /// Sorted masks for fast membership tests in solver loops.
    pub(crate) fn lookup(&self) -> PatternLookup {
        let mut masks: Vec<u64> = self.members.iter().map(|p| p.mask).collect();
        masks.sort_unstable();
        PatternLookup { masks }
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.members.iter().map(Pattern::word).collect();
        f.write_str(&words.join(","))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct PatternLookup {
    masks: Vec<u64>,
}

impl PatternLookup {
    #[inline]
    pub fn contains_mask(&self, mask: u64) -> bool {
        if self.masks.len() <= 8 {
            self.masks.contains(&mask)
        } else {
            self.masks.binary_search(&mask).is_ok()
        }
    }

    /// Whether the two sorted edges (`a[0] < b[0]`) form an allowed pattern.
    #[inline]
    pub fn allows(&self, a: &[Vertex], b: &[Vertex]) -> bool {
        self.contains_mask(pair_mask(a, b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    Identical,
    Harmonious,
    Mismatch,
    BothNonCollectable,
}

pub fn classify_pair(p: &Pattern, q: &Pattern) -> Result<PairClass> {
    if p.r() != q.r() {
        return Err(Error::RMismatch(p.r(), q.r()));
    }
    if p == q {
        return Ok(PairClass::Identical);
    }
    Ok(match (p.composition(), q.composition()) {
        (Some(a), Some(b)) if a == b => PairClass::Harmonious,
        (None, None) => PairClass::BothNonCollectable,
        _ => PairClass::Mismatch,
    })
}

/// A deletion index `j` under which a mismatched pair stays mismatched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InheritanceWitness {
    pub p: Pattern,
    pub q: Pattern,
    pub j: usize,
}

/// For every mismatched pair of r-patterns, finds the smallest `j` such that
/// `{P^-j, Q^-j}` is again a mismatch. Fails if some pair has no such `j`.
pub fn verify_mismatch_inheritance(r: usize) -> Result<Vec<InheritanceWitness>> {
    if !(3..=5).contains(&r) {
        return Err(Error::ExhaustionCapExceeded(r));
    }
    let all: Vec<Pattern> = enumerate_patterns(r)?.iter().copied().collect();
    let mut witnesses = Vec::new();
    for (a, p) in all.iter().enumerate() {
        for q in &all[a + 1..] {
            if classify_pair(p, q)? != PairClass::Mismatch {
                continue;
            }
            let mut found = None;
            for j in 1..=r {
                if classify_pair(&p.delete_index(j)?, &q.delete_index(j)?)? == PairClass::Mismatch {
                    found = Some(j);
                    break;
                }
            }
            match found {
                Some(j) => witnesses.push(InheritanceWitness { p: *p, q: *q, j }),
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "mismatched pair {{{p}, {q}}} has no inheriting deletion index"
                    )))
                }
            }
        }
    }
    Ok(witnesses)
}
