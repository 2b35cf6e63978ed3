//! Ordered r-uniform matchings and their text representations.
//!
//! A matching stores its edges sorted by their smallest vertex, each edge
//! listed in increasing order. Vertex labels are positive integers; a
//! matching is *canonical* when its vertex set is exactly `1..=rn`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::combin::factorial;
use crate::error::{Error, Result};

pub type Vertex = u32;

/// Default cap on the number of matchings [`enumerate_matchings`] will produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedMatching {
    r: usize,
    /// Edges flattened, `r` vertices per edge.
    vertices: Vec<Vertex>,
}

impl OrderedMatching {
    /// Builds a matching from arbitrary edges. Each edge is sorted and the
    /// edges are reordered by their minimum vertex.
    pub fn new(r: usize, edges: Vec<Vec<Vertex>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidMatching("uniformity must be at least 1".into()));
        }
        let mut sorted = Vec::with_capacity(edges.len());
        for mut e in edges {
            if e.len() != r {
                return Err(Error::InvalidMatching(format!("edge {e:?} has {} vertices, expected {r}", e.len())));
            }
            e.sort_unstable();
            if e[0] == 0 {
                return Err(Error::InvalidMatching("vertex labels must be positive".into()));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMatching(format!("edge {e:?} repeats a vertex")));
            }
            sorted.push(e);
        }
        let mut all: Vec<Vertex> = sorted.iter().flatten().copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::EdgesIntersect);
        }
        sorted.sort_unstable_by_key(|e| e[0]);
        Ok(Self { r, vertices: sorted.concat() })
    }

    pub fn empty(r: usize) -> Self {
        Self { r, vertices: Vec::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() / self.r
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> &[Vertex] {
        &self.vertices[i * self.r..(i + 1) * self.r]
    }

    pub fn edges(&self) -> std::slice::ChunksExact<'_, Vertex> {
        self.vertices.chunks_exact(self.r)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_canonical(&self) -> bool {
        self.vertices.iter().all(|&v| v as usize <= self.vertices.len())
    }

    pub(crate) fn require_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::NonCanonicalMatching)
        }
    }

    /// Relabels the vertices order-isomorphically onto `1..=rn`.
    pub fn canonicalize(&self) -> Self {
        let mut labels = self.vertices.clone();
        labels.sort_unstable();
        let rank = |v: Vertex| labels.binary_search(&v).expect("vertex present") as Vertex + 1;
        Self { r: self.r, vertices: self.vertices.iter().map(|&v| rank(v)).collect() }
    }

    /// Sub-matching on the given edge indices, keeping parent labels.
    pub fn submatching(&self, indices: &[usize]) -> Self {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut vertices = Vec::with_capacity(idx.len() * self.r);
        for i in idx {
            vertices.extend_from_slice(self.edge(i));
        }
        Self { r: self.r, vertices }
    }

    /// For a canonical matching: `(edge index, rank within edge)` of every
    /// vertex, indexed by `vertex - 1`.
    pub fn owners(&self) -> Result<Vec<(u32, u32)>> {
        self.require_canonical()?;
        let mut out = vec![(0, 0); self.vertices.len()];
        for (i, e) in self.edges().enumerate() {
            for (rank, &v) in e.iter().enumerate() {
                out[v as usize - 1] = (i as u32, rank as u32);
            }
        }
        Ok(out)
    }

    /// Parses a letter word such as `AABACDCDDBCB`. Any non-whitespace
    /// character may serve as a letter; edges are numbered by first occurrence.
    pub fn parse_word(text: &str) -> Result<Self> {
        let symbols: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        Self::from_symbols(&symbols)
    }

    /// Parses an integer word such as `1 1 2 2`: the i-th token names the edge
    /// containing vertex i.
    pub fn parse_int_word(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        Self::from_symbols(&tokens)
    }

    fn from_symbols<T: Eq + std::hash::Hash + Clone + fmt::Debug>(symbols: &[T]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let mut edges: Vec<Vec<Vertex>> = Vec::new();
        for (pos, s) in symbols.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(s).or_insert(next);
            if id == edges.len() {
                edges.push(Vec::new());
            }
            edges[id].push(pos as Vertex + 1);
        }
        let r = edges[0].len();
        if let Some(bad) = edges.iter().find(|e| e.len() != r) {
            let letter = symbols[bad[0] as usize - 1].clone();
            return Err(Error::UnequalMultiplicities(format!(
                "{letter:?} occurs {} times, first symbol occurs {r} times",
                bad.len()
            )));
        }
        Ok(Self { r, vertices: edges.concat() })
    }

    /// Parses edge-list lines, one comma-separated edge per line.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let edge = line
                .split(',')
                .map(|t| t.trim().parse::<Vertex>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            edges.push(edge);
        }
        if edges.is_empty() {
            return Err(Error::EmptyInput);
        }
        Self::new(edges[0].len(), edges)
    }

    /// Accepts any of the three text formats: edge lists (lines with commas),
    /// integer words (numeric tokens) or letter words.
    pub fn parse_any(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.contains(',') {
            Self::parse_edge_list(trimmed)
        } else if trimmed.split_whitespace().all(|t| t.chars().all(|c| c.is_ascii_digit()))
            && trimmed.split_whitespace().count() > 1
        {
            Self::parse_int_word(trimmed)
        } else {
            Self::parse_word(trimmed)
        }
    }

    fn labels(&self) -> Result<Vec<usize>> {
        let owners = self.owners()?;
        Ok(owners.into_iter().map(|(e, _)| e as usize).collect())
    }

    /// Canonical letter word; requires a canonical matching with at most 26 edges.
    pub fn to_word(&self) -> Result<MatchingWord> {
        if self.len() > 26 {
            return Err(Error::InvalidArgument(format!(
                "letter words support at most 26 edges, got {}; use the integer word format",
                self.len()
            )));
        }
        let text = self.labels()?.into_iter().map(|e| (b'A' + e as u8) as char).collect();
        Ok(MatchingWord(text))
    }

    /// Canonical integer word, edges numbered from 1 by first occurrence.
    pub fn to_int_word(&self) -> Result<String> {
        let labels = self.labels()?;
        Ok(labels.iter().map(|e| (e + 1).to_string()).collect::<Vec<_>>().join(" "))
    }

    pub fn to_edge_list(&self) -> String {
        self.edges()
            .map(|e| e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Chops a permutation of `1..=rn` into consecutive r-blocks.
    pub fn from_permutation(perm: &[Vertex], r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        if !perm.len().is_multiple_of(r) {
            return Err(Error::LengthNotDivisibleByR { len: perm.len(), r });
        }
        let mut seen = vec![false; perm.len()];
        for &v in perm {
            let ok = v >= 1 && (v as usize) <= perm.len() && !seen[v as usize - 1];
            if !ok {
                return Err(Error::InvalidArgument(format!("not a permutation of 1..={}", perm.len())));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Self::chop(perm, r))
    }

    /// `from_permutation` without validation, for the sampler's hot path.
    pub(crate) fn chop(perm: &[Vertex], r: usize) -> Self {
        let mut edges: Vec<Vec<Vertex>> = perm
            .chunks_exact(r)
            .map(|e| {
                let mut e = e.to_vec();
                e.sort_unstable();
                e
            })
            .collect();
        edges.sort_unstable_by_key(|e| e[0]);
        Self { r, vertices: edges.concat() }
    }

    /// The trace: position v holds the rank (from 1) of v within its edge.
    pub fn trace(&self) -> Result<Trace> {
        let owners = self.owners()?;
        Ok(Trace { r: self.r, symbols: owners.into_iter().map(|(_, rank)| rank + 1).collect() })
    }

    /// Checks whether every edge takes one vertex from each of the `r`
    /// consecutive blocks of size `n`. Returns the block boundaries
    /// `n, 2n, ..., (r-1)n` as witness.
    pub fn r_partite_boundaries(&self) -> Result<Option<Vec<usize>>> {
        self.require_canonical()?;
        let n = self.len();
        let partite = self.edges().all(|e| e.iter().enumerate().all(|(i, &v)| (v as usize - 1) / n.max(1) == i));
        Ok(partite.then(|| (1..self.r).map(|i| i * n).collect()))
    }

    pub fn is_r_partite(&self) -> Result<bool> {
        Ok(self.r_partite_boundaries()?.is_some())
    }
}

impl fmt::Display for OrderedMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Ok(w) = self.to_word() {
            return write!(f, "{w}");
        }
        if let Ok(w) = self.to_int_word() {
            return write!(f, "{w}");
        }
        let edges: Vec<String> = self
            .edges()
            .map(|e| format!("{{{}}}", e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}", edges.join(" "))
    }
}

/// A canonical letter word: first occurrences appear alphabetically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchingWord(String);

impl MatchingWord {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MatchingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialEq<&str> for MatchingWord {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Sequence of within-edge ranks, values in `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    r: usize,
    symbols: Vec<u32>,
}

impl Trace {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn parse(text: &str, r: usize) -> Result<Self> {
        let text = text.trim();
        let symbols: Vec<u32> = if text.contains(char::is_whitespace) {
            text.split_whitespace()
                .map(|t| t.parse().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad trace digit {c:?}"))))
                .collect::<Result<_>>()?
        };
        if symbols.iter().any(|&s| s == 0 || s as usize > r) {
            return Err(Error::Parse(format!("trace symbols must lie in 1..={r}")));
        }
        Ok(Self { r, symbols })
    }

    /// Every value occurs equally often and, in every prefix, value i occurs
    /// at least as often as value j whenever i < j.
    pub fn is_prefix_dominant(&self) -> bool {
        let mut counts = vec![0usize; self.r + 1];
        for &s in &self.symbols {
            counts[s as usize] += 1;
            if s > 1 && counts[s as usize] > counts[s as usize - 1] {
                return false;
            }
        }
        counts[1..].windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r <= 9 {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join(" "))
        }
    }
}

/// Number of ordered r-matchings of size n: `(rn)! / ((r!)^n n!)`.
pub fn count_matchings(r: usize, n: usize) -> BigUint {
    let rf = factorial(r as u64);
    factorial((r * n) as u64) / (num_traits::pow(rf, n) * factorial(n as u64))
}

/// Streams every canonical matching on `1..=rk` exactly once.
pub fn enumerate_matchings(r: usize, k: usize) -> Result<MatchingIter> {
    enumerate_matchings_capped(r, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_matchings_capped(r: usize, k: usize, cap: u64) -> Result<MatchingIter> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let count = count_matchings(r, k);
    if count.to_u64().is_none_or(|c| c > cap) {
        return Err(Error::EnumerationTooLarge { count: count.to_string(), cap });
    }
    Ok(MatchingIter::new(r, k))
}

struct Frame {
    anchor: usize,
    candidates: Vec<usize>,
    combo: Vec<usize>,
}

/// Depth-first canonical extension: every step covers the smallest
/// uncovered vertex together with r-1 larger uncovered vertices.
pub struct MatchingIter {
    r: usize,
    k: usize,
    free: Vec<bool>,
    stack: Vec<Frame>,
    started: bool,
    done: bool,
}

impl MatchingIter {
    fn new(r: usize, k: usize) -> Self {
        Self { r, k, free: vec![true; r * k], stack: Vec::new(), started: false, done: false }
    }

    fn set_chosen(&mut self, depth: usize, value: bool) {
        let f = &self.stack[depth];
        for &c in &f.combo {
            self.free[f.candidates[c]] = value;
        }
    }

    fn descend(&mut self) {
        while self.stack.len() < self.k {
            let anchor = self.free.iter().position(|&f| f).expect("uncovered vertex");
            self.free[anchor] = false;
            let candidates: Vec<usize> = (anchor + 1..self.free.len()).filter(|&v| self.free[v]).collect();
            let combo: Vec<usize> = (0..self.r - 1).collect();
            self.stack.push(Frame { anchor, candidates, combo });
            let d = self.stack.len() - 1;
            self.set_chosen(d, false);
        }
    }

    fn current(&self) -> OrderedMatching {
        let mut vertices = Vec::with_capacity(self.r * self.k);
        for f in &self.stack {
            vertices.push(f.anchor as Vertex + 1);
            vertices.extend(f.combo.iter().map(|&c| f.candidates[c] as Vertex + 1));
        }
        OrderedMatching { r: self.r, vertices }
    }
}

impl Iterator for MatchingIter {
    type Item = OrderedMatching;

    fn next(&mut self) -> Option<OrderedMatching> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
            if self.k == 0 {
                self.done = true;
            }
            return Some(self.current());
        }
        loop {
            let Some(depth) = self.stack.len().checked_sub(1) else {
                self.done = true;
                return None;
            };
            self.set_chosen(depth, true);
            let top = &mut self.stack[depth];
            let len = top.candidates.len();
            if crate::combin::next_combination(&mut top.combo, len) {
                self.set_chosen(depth, false);
                self.descend();
                return Some(self.current());
            }
            let anchor = top.anchor;
            self.free[anchor] = true;
            self.stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(word: &str) -> OrderedMatching {
        OrderedMatching::parse_word(word).unwrap()
    }

    #[test]
    fn parse_word_examples() {
        assert_eq!(m("AABB").edges().collect::<Vec<_>>(), vec![&[1, 2][..], &[3, 4]]);
        assert_eq!(m("ABAB").edges().collect::<Vec<_>>(), vec![&[1, 3][..], &[2, 4]]);
        let big = m("AABACDCDDBCB");
        assert_eq!(big.r(), 3);
        assert_eq!(big.edges().collect::<Vec<_>>(), vec![&[1, 2, 4][..], &[3, 10, 12], &[5, 7, 11], &[6, 8, 9]]);
        // the alternative spelling names the same matching
        assert_eq!(m("CCECDFDFFEDE"), big);
    }

    #[test]
    fn parse_word_errors() {
        assert_eq!(OrderedMatching::parse_word(""), Err(Error::EmptyInput));
        assert!(matches!(OrderedMatching::parse_word("AAB"), Err(Error::UnequalMultiplicities(_))));
    }

    #[test]
    fn to_word_examples() {
        let e = OrderedMatching::new(3, vec![vec![1, 2, 4], vec![3, 10, 12], vec![5, 7, 11], vec![6, 8, 9]]).unwrap();
        assert_eq!(e.to_word().unwrap(), "AABACDCDDBCB");
        assert_eq!(m("AABB").to_word().unwrap(), "AABB");
        assert_eq!(m("ABAB").to_word().unwrap(), "ABAB");
        let shifted = OrderedMatching::new(2, vec![vec![2, 5], vec![3, 4]]).unwrap();
        assert_eq!(shifted.to_word(), Err(Error::NonCanonicalMatching));
        assert_eq!(shifted.canonicalize().to_word().unwrap(), "ABBA");
    }

    #[test]
    fn other_formats() {
        let x = m("AABACDCDDBCB");
        assert_eq!(x.to_int_word().unwrap(), "1 1 2 1 3 4 3 4 4 2 3 2");
        assert_eq!(OrderedMatching::parse_int_word("7 7 2 7 9 4 9 4 4 2 9 2").unwrap(), x);
        assert_eq!(OrderedMatching::parse_edge_list(&x.to_edge_list()).unwrap(), x);
        assert_eq!(OrderedMatching::parse_any("1,2\n3,4").unwrap(), m("AABB"));
        assert_eq!(OrderedMatching::parse_any("1 2 1 2").unwrap(), m("ABAB"));
        assert_eq!(OrderedMatching::parse_any("ABBA\n").unwrap(), m("ABBA"));
    }

    #[test]
    fn invalid_construction() {
        assert_eq!(OrderedMatching::new(2, vec![vec![1, 2], vec![2, 3]]), Err(Error::EdgesIntersect));
        assert!(OrderedMatching::new(2, vec![vec![1, 2, 3]]).is_err());
        assert!(OrderedMatching::new(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn from_permutation_examples() {
        let chop = |p: &[u32]| OrderedMatching::from_permutation(p, 2).unwrap().to_word().unwrap();
        assert_eq!(chop(&[1, 2, 3, 4]), "AABB");
        assert_eq!(chop(&[1, 3, 2, 4]), "ABAB");
        assert_eq!(chop(&[2, 1, 4, 3]), "AABB");
        assert_eq!(
            OrderedMatching::from_permutation(&[1, 2, 3], 2),
            Err(Error::LengthNotDivisibleByR { len: 3, r: 2 })
        );
        assert!(OrderedMatching::from_permutation(&[1, 1, 2, 3], 2).is_err());
    }

    #[test]
    fn trace_examples() {
        assert_eq!(m("AABCBDBDACCD").trace().unwrap().to_string(), "121121323233");
        assert_eq!(m("AABCCDADDBBC").trace().unwrap().to_string(), "121121323233");
        assert_eq!(m("AABB").trace().unwrap().to_string(), "1212");
        let t = Trace::parse("121121323233", 3).unwrap();
        assert!(t.is_prefix_dominant());
        assert!(!Trace::parse("2112", 2).unwrap().is_prefix_dominant());
    }

    #[test]
    fn counts() {
        assert_eq!(count_matchings(2, 2), BigUint::from(3u32));
        assert_eq!(count_matchings(3, 2), BigUint::from(10u32));
        assert_eq!(count_matchings(2, 3), BigUint::from(15u32));
        assert_eq!(count_matchings(5, 0), BigUint::from(1u32));
    }

    #[test]
    fn enumeration_small() {
        let words: Vec<String> = enumerate_matchings(2, 2).unwrap().map(|m| m.to_word().unwrap().to_string()).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["AABB", "ABAB", "ABBA"]);
        assert_eq!(enumerate_matchings(2, 0).unwrap().count(), 1);
        assert_eq!(enumerate_matchings(1, 3).unwrap().count(), 1);
        assert!(matches!(enumerate_matchings_capped(3, 6, 1000), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn r_partite() {
        assert!(m("ABCDEFGACGEFBDGFEDCBA").is_r_partite().unwrap());
        assert_eq!(m("ABCDEFGACGEFBDGFEDCBA").r_partite_boundaries().unwrap(), Some(vec![7, 14]));
        assert!(!m("AABB").is_r_partite().unwrap());
        assert!(m("ABAB").is_r_partite().unwrap());
    }
}
