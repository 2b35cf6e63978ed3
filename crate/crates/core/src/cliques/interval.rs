//! Polynomial solvers for r = 2, where each edge is an interval `[l, r]`.
//!
//! * disjoint (`AABB`): pairwise non-overlapping intervals;
//! * nesting (`ABBA`): a decreasing sequence of right ends in left-end order;
//! * crossing (`ABAB`): intervals through a common point with increasing
//!   right ends;
//! * interval (`ABAB`, `ABBA`): intervals through a common point.

use super::{CliqueResult, SolverKind};
use crate::error::{Error, Result};
use crate::matching::OrderedMatching;

fn intervals(m: &OrderedMatching) -> Result<Vec<(u32, u32)>> {
    if m.r() != 2 {
        return Err(Error::WrongUniformity { expected: 2, actual: m.r() });
    }
    Ok(m.edges().map(|e| (e[0], e[1])).collect())
}

/// Maximum set of pairwise disjoint intervals; the witness is the
/// lexicographically first maximum set.
pub fn z_disjoint(m: &OrderedMatching) -> Result<CliqueResult> {
    let iv = intervals(m)?;
    let n = iv.len();
    // next[i]: first index whose interval starts after interval i ends.
    let next: Vec<usize> = iv.iter().map(|&(_, r)| iv.partition_point(|&(l, _)| l < r)).collect();
    // f[i]: longest disjoint chain starting at i; suf[i] = max f[i..].
    let mut f = vec![0usize; n];
    let mut suf = vec![0usize; n + 1];
    for i in (0..n).rev() {
        f[i] = 1 + suf[next[i]];
        suf[i] = suf[i + 1].max(f[i]);
    }
    let mut witness = Vec::with_capacity(suf[0]);
    let (mut from, mut need) = (0, suf[0]);
    while need > 0 {
        let i = (from..n).find(|&i| f[i] == need).expect("chain continues");
        witness.push(i);
        from = next[i];
        need -= 1;
    }
    Ok(CliqueResult::new(witness, SolverKind::Disjoint, true))
}

/// Fenwick tree for prefix maxima of `(value, index)` over positions `1..=size`.
struct MaxFenwick {
    tree: Vec<(usize, usize)>,
}

impl MaxFenwick {
    fn new(size: usize) -> Self {
        Self { tree: vec![(0, usize::MAX); size + 1] }
    }

    fn update(&mut self, mut pos: usize, val: (usize, usize)) {
        while pos < self.tree.len() {
            if better(val, self.tree[pos]) {
                self.tree[pos] = val;
            }
            pos += pos & pos.wrapping_neg();
        }
    }

    fn query(&self, mut pos: usize) -> (usize, usize) {
        let mut best = (0, usize::MAX);
        while pos > 0 {
            if better(self.tree[pos], best) {
                best = self.tree[pos];
            }
            pos &= pos - 1;
        }
        best
    }
}

/// Larger value wins; ties go to the smaller index.
fn better(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Longest chain of nested intervals; the witness is the lexicographically
/// first maximum chain.
pub fn z_nesting(m: &OrderedMatching) -> Result<CliqueResult> {
    let iv = intervals(m)?;
    let n = iv.len();
    let size = m.vertex_count().max(iv.iter().map(|&(_, r)| r as usize).max().unwrap_or(0));
    // g[i]: longest chain starting at i, continuing with later intervals
    // whose right end is smaller.
    let mut g = vec![0usize; n];
    let mut fw = MaxFenwick::new(size);
    for i in (0..n).rev() {
        let r = iv[i].1 as usize;
        g[i] = 1 + fw.query(r - 1).0;
        fw.update(r, (g[i], i));
    }
    let best = g.iter().copied().max().unwrap_or(0);
    let mut witness = Vec::with_capacity(best);
    let mut prev: Option<usize> = None;
    for i in 0..n {
        let need = best - witness.len();
        if need == 0 {
            break;
        }
        if g[i] == need && prev.is_none_or(|p| iv[i].1 < iv[p].1) {
            witness.push(i);
            prev = Some(i);
        }
    }
    Ok(CliqueResult::new(witness, SolverKind::Nesting, true))
}

/// Longest strictly increasing subsequence of `vals`, as positions.
fn lis_positions(vals: &[u32]) -> Vec<usize> {
    let mut tails: Vec<usize> = Vec::new();
    let mut parent = vec![usize::MAX; vals.len()];
    for (i, &v) in vals.iter().enumerate() {
        let k = tails.partition_point(|&t| vals[t] < v);
        if k > 0 {
            parent[i] = tails[k - 1];
        }
        if k == tails.len() {
            tails.push(i);
        } else {
            tails[k] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = (parent[i] != usize::MAX).then(|| parent[i]);
    }
    out.reverse();
    out
}

/// Largest family of pairwise crossing intervals.
///
/// Such a family has a common point and increasing right ends, so the answer
/// is the maximum over left endpoints `p` of the longest increasing run of
/// right ends among intervals through `p`. Between two evaluated points the
/// value can grow by at most the number of intervals starting in between,
/// which lets most points be skipped.
pub fn z_crossing(m: &OrderedMatching) -> Result<CliqueResult> {
    let iv = intervals(m)?;
    let n = iv.len();
    if n == 0 {
        return Ok(CliqueResult::new(Vec::new(), SolverKind::Crossing, true));
    }
    let eval = |t: usize| -> Vec<usize> {
        let p = iv[t].0;
        let active: Vec<usize> = (0..=t).filter(|&i| iv[i].1 > p).collect();
        let rights: Vec<u32> = active.iter().map(|&i| iv[i].1).collect();
        lis_positions(&rights).into_iter().map(|k| active[k]).collect()
    };
    let mut best = eval(n / 2);
    let mut best_t = n / 2;
    let mut t = 0;
    while t < n {
        let found = if t == best_t { best.clone() } else { eval(t) };
        if found.len() > best.len() {
            best = found.clone();
            best_t = t;
        }
        t += best.len() - found.len() + 1;
    }
    Ok(CliqueResult::new(best, SolverKind::Crossing, true))
}

/// Largest family of pairwise overlapping intervals: those covering the
/// leftmost point of maximum coverage.
pub fn z_interval(m: &OrderedMatching) -> Result<CliqueResult> {
    let iv = intervals(m)?;
    let mut events: Vec<(u32, i32)> = iv.iter().flat_map(|&(l, r)| [(l, 1), (r, -1)]).collect();
    events.sort_unstable();
    let (mut cover, mut best, mut at) = (0i32, 0i32, 0u32);
    for (pos, delta) in events {
        cover += delta;
        if cover > best {
            best = cover;
            at = pos;
        }
    }
    let witness = (0..iv.len()).filter(|&i| iv[i].0 <= at && at < iv[i].1).collect();
    Ok(CliqueResult::new(witness, SolverKind::Interval, true))
}
