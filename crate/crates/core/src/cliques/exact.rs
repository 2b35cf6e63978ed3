//! Branch-and-bound maximum clique on the compatibility graph of a matching.
//!
//! Vertices are expanded in edge-index order and each branch is bounded by a
//! greedy coloring of its candidate set, so the first maximum clique reached
//! is the lexicographically first one.

use super::bitset::Bitset;
use super::{CliqueResult, SolverKind};
use crate::error::{Error, Result};
use crate::matching::OrderedMatching;
use crate::patterns::PatternSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactSolverConfig {
    /// Largest matching size accepted.
    pub max_edges: usize,
    /// Optional cap on search nodes.
    pub max_nodes: Option<u64>,
}

impl Default for ExactSolverConfig {
    fn default() -> Self {
        Self { max_edges: 400, max_nodes: None }
    }
}

pub(crate) fn compatibility_graph(m: &OrderedMatching, patterns: &PatternSet) -> Vec<Bitset> {
    let n = m.len();
    let lookup = patterns.lookup();
    let mut adj = vec![Bitset::new(n); n];
    for i in 0..n {
        let a = m.edge(i);
        for j in i + 1..n {
            if lookup.allows(a, m.edge(j)) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    adj
}

pub fn max_clique_exact(m: &OrderedMatching, patterns: &PatternSet) -> Result<CliqueResult> {
    max_clique_exact_with(m, patterns, &ExactSolverConfig::default())
}

pub fn max_clique_exact_with(
    m: &OrderedMatching,
    patterns: &PatternSet,
    config: &ExactSolverConfig,
) -> Result<CliqueResult> {
    if m.r() != patterns.r() {
        return Err(Error::RMismatch(m.r(), patterns.r()));
    }
    let n = m.len();
    if n > config.max_edges {
        return Err(Error::InstanceTooLarge { n, cap: config.max_edges });
    }
    if n == 0 {
        return Ok(CliqueResult::new(Vec::new(), SolverKind::Exact, true));
    }
    let mut search = Search {
        adj: compatibility_graph(m, patterns),
        best: Vec::new(),
        clique: Vec::new(),
        nodes: 0,
        max_nodes: config.max_nodes,
    };
    let mut all = Bitset::new(n);
    for i in 0..n {
        all.insert(i);
    }
    search.expand(&all)?;
    Ok(CliqueResult::new(search.best, SolverKind::Exact, true))
}

struct Search {
    adj: Vec<Bitset>,
    best: Vec<usize>,
    clique: Vec<usize>,
    nodes: u64,
    max_nodes: Option<u64>,
}

impl Search {
    fn expand(&mut self, cand: &Bitset) -> Result<()> {
        self.nodes += 1;
        if let Some(cap) = self.max_nodes {
            if self.nodes > cap {
                return Err(Error::BudgetExceeded(cap));
            }
        }
        let order: Vec<usize> = cand.iter().collect();
        let bounds = self.suffix_color_bounds(&order);
        for (idx, &v) in order.iter().enumerate() {
            if self.clique.len() + bounds[idx] <= self.best.len() {
                break;
            }
            self.clique.push(v);
            let next = cand.and_above(&self.adj[v], v);
            if next.is_empty() {
                if self.clique.len() > self.best.len() {
                    self.best = self.clique.clone();
                }
            } else {
                self.expand(&next)?;
            }
            self.clique.pop();
        }
        Ok(())
    }

    /// `bounds[i]` bounds the clique number of `order[i..]`: colors are
    /// assigned from the highest index down, so the colors used on a suffix
    /// form a proper coloring of it.
    fn suffix_color_bounds(&self, order: &[usize]) -> Vec<usize> {
        let mut classes: Vec<Bitset> = Vec::new();
        let mut bounds = vec![0; order.len()];
        let mut used = 0;
        for (idx, &v) in order.iter().enumerate().rev() {
            let k = classes.iter().position(|c| !c.intersects(&self.adj[v])).unwrap_or_else(|| {
                classes.push(Bitset::new(self.adj.len()));
                classes.len() - 1
            });
            classes[k].insert(v);
            used = used.max(k + 1);
            bounds[idx] = used;
        }
        bounds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(word: &str, spec: &str) -> CliqueResult {
        let m = OrderedMatching::parse_word(word).unwrap();
        max_clique_exact(&m, &PatternSet::parse_spec(spec).unwrap()).unwrap()
    }

    #[test]
    fn unique_cliques() {
        assert_eq!(solve("AABBCCDD", "AABB").size, 4);
        assert_eq!(solve("ABCDABCD", "ABAB").size, 4);
        assert_eq!(solve("ABCDDCBA", "ABBA").size, 4);
        assert_eq!(solve("ABCDDCBA", "ABAB").size, 1);
    }

    #[test]
    fn lexicographically_first_witness() {
        // Edges 0,1 and 2,3 are both AABB pairs; {0,1} comes first.
        let r = solve("AABBCDCD", "AABB");
        assert_eq!(r.size, 3);
        assert_eq!(r.witness, vec![0, 1, 2]);
    }

    #[test]
    fn guards() {
        let m = OrderedMatching::parse_word("AABB").unwrap();
        let p3 = PatternSet::parse_spec("AAABBB").unwrap();
        assert_eq!(max_clique_exact(&m, &p3), Err(Error::RMismatch(2, 3)));
        let cfg = ExactSolverConfig { max_edges: 1, max_nodes: None };
        let p = PatternSet::parse_spec("AABB").unwrap();
        assert_eq!(max_clique_exact_with(&m, &p, &cfg), Err(Error::InstanceTooLarge { n: 2, cap: 1 }));
        assert_eq!(max_clique_exact(&OrderedMatching::empty(2), &p).unwrap().size, 0);
    }
}
