//! The poset on an r-partite matching induced by one r-partite pattern `P`:
//! `e < f` when `min e < min f` and the coordinates of `e` and `f` compare
//! as the blocks of `P` dictate. Chains are `P`-cliques; antichains are
//! cliques for the remaining r-partite patterns.

use serde::Serialize;

use super::{CliqueResult, SolverKind};
use crate::error::{Error, Result};
use crate::matching::OrderedMatching;
use crate::patterns::Pattern;

/// Sign per coordinate: `true` when block i of the pattern is `AB`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetSpec {
    pub signs: Vec<bool>,
}

impl PosetSpec {
    pub fn from_pattern(p: &Pattern) -> Result<Self> {
        let split = p.split_blocks().ok_or_else(|| Error::NotCollectable(p.word()))?;
        if split.parts().iter().any(|&t| t != 1) {
            return Err(Error::InvalidArgument(format!("pattern {p} is not r-partite")));
        }
        Ok(Self { signs: split.orientations().iter().map(|&o| o == crate::patterns::Orientation::AFirst).collect() })
    }

    fn less(&self, e: &[u32], f: &[u32]) -> bool {
        e[0] < f[0] && self.signs.iter().zip(e.iter().zip(f)).all(|(&s, (x, y))| (x < y) == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PosetResult {
    pub chain: CliqueResult,
    pub antichain: CliqueResult,
}

/// Longest chain and largest antichain. The antichain is a maximum one,
/// obtained from a maximum matching in the comparability bipartite graph.
pub fn poset_chain_antichain(m: &OrderedMatching, spec: &PosetSpec) -> Result<PosetResult> {
    if !m.is_r_partite()? {
        return Err(Error::NotRPartite);
    }
    if spec.signs.len() != m.r() {
        return Err(Error::RMismatch(m.r(), spec.signs.len()));
    }
    let n = m.len();
    let less: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| spec.less(m.edge(i), m.edge(j))).collect()).collect();

    // Edges are sorted by minimum, so predecessors have smaller indices.
    let mut len = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    for j in 0..n {
        for i in 0..j {
            if less[i][j] && len[i] + 1 > len[j] {
                len[j] = len[i] + 1;
                prev[j] = i;
            }
        }
    }
    let mut chain = Vec::new();
    if let Some(end) = (0..n).max_by_key(|&j| (len[j], std::cmp::Reverse(j))) {
        let mut cur = end;
        loop {
            chain.push(cur);
            if prev[cur] == usize::MAX {
                break;
            }
            cur = prev[cur];
        }
        chain.reverse();
    }

    let antichain = max_antichain(&less);
    Ok(PosetResult {
        chain: CliqueResult::new(chain, SolverKind::PosetChain, true),
        antichain: CliqueResult::new(antichain, SolverKind::PosetAntichain, true),
    })
}

/// König: from a maximum matching between left and right copies of the
/// elements, the elements with neither copy in the minimum vertex cover
/// form a maximum antichain.
fn max_antichain(less: &[Vec<bool>]) -> Vec<usize> {
    let n = less.len();
    let mut match_right = vec![usize::MAX; n];
    let mut match_left = vec![usize::MAX; n];
    fn augment(u: usize, less: &[Vec<bool>], seen: &mut [bool], ml: &mut [usize], mr: &mut [usize]) -> bool {
        for v in 0..less.len() {
            if less[u][v] && !seen[v] {
                seen[v] = true;
                if mr[v] == usize::MAX || augment(mr[v], less, seen, ml, mr) {
                    mr[v] = u;
                    ml[u] = v;
                    return true;
                }
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = vec![false; n];
        augment(u, less, &mut seen, &mut match_left, &mut match_right);
    }
    // Alternating reachability from unmatched left vertices.
    let mut left_seen = vec![false; n];
    let mut right_seen = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&u| match_left[u] == usize::MAX).collect();
    for &u in &stack {
        left_seen[u] = true;
    }
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if less[u][v] && !right_seen[v] {
                right_seen[v] = true;
                let w = match_right[v];
                if w != usize::MAX && !left_seen[w] {
                    left_seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    // Cover = unreached left vertices plus reached right vertices.
    (0..n).filter(|&x| left_seen[x] && !right_seen[x]).collect()
}

/// The permutations `σ_1, …, σ_{r-1}` (0-based) of an r-partite matching:
/// `σ_i` sends the rank of an edge's vertex in block 1 to its rank in
/// block i+1.
pub fn clique_to_tuple(k: &OrderedMatching) -> Result<Vec<Vec<usize>>> {
    if !k.is_r_partite()? {
        return Err(Error::NotRPartite);
    }
    let n = k.len();
    Ok((1..k.r()).map(|i| k.edges().map(|e| e[i] as usize - 1 - i * n).collect()).collect())
}
