//! r-partite sub-matchings: for a split of `1..=rn` into `r` consecutive
//! blocks, the edges with their i-th vertex in block i form an r-partite
//! clique, and every r-partite clique arises this way.

use serde::Serialize;

use super::{CliqueResult, SolverKind};
use crate::combin::binomial_u64;
use crate::error::{Error, Result};
use crate::matching::OrderedMatching;

/// Default limit on boundary tuples times edges for exact search at r >= 4.
pub const DEFAULT_PARTITE_WORK_CAP: u64 = 2_000_000_000;

/// Block boundaries `b_1 < ... < b_{r-1}`; block i is `(b_{i-1}, b_i]`
/// with `b_0 = 0` and `b_r = rn`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionProfile {
    pub boundaries: Vec<usize>,
}

impl PartitionProfile {
    pub fn equipartition(r: usize, n: usize) -> Self {
        Self { boundaries: (1..r).map(|i| i * n).collect() }
    }

    pub fn sizes(&self, total: usize) -> Vec<usize> {
        let mut prev = 0;
        let mut out: Vec<usize> = self
            .boundaries
            .iter()
            .map(|&b| {
                let s = b - prev;
                prev = b;
                s
            })
            .collect();
        out.push(total - prev);
        out
    }

    fn validate(&self, r: usize, total: usize) -> Result<()> {
        if self.boundaries.len() + 1 != r {
            return Err(Error::ProfileOutOfRange(format!("{} boundaries given for r = {r}", self.boundaries.len())));
        }
        let mut prev = 0;
        for &b in &self.boundaries {
            if b <= prev || b >= total {
                return Err(Error::ProfileOutOfRange(format!("{:?} within 1..{total}", self.boundaries)));
            }
            prev = b;
        }
        Ok(())
    }

    #[inline]
    fn spans(&self, e: &[u32]) -> bool {
        let mut lo = 0;
        for (i, &v) in e.iter().enumerate() {
            let v = v as usize;
            let hi = self.boundaries.get(i).copied().unwrap_or(usize::MAX);
            if v <= lo || v > hi {
                return false;
            }
            lo = hi;
        }
        true
    }
}

fn spanning_edges(m: &OrderedMatching, profile: &PartitionProfile) -> Vec<usize> {
    (0..m.len()).filter(|&i| profile.spans(m.edge(i))).collect()
}

/// Number of edges whose i-th vertex lies in block i for every i.
pub fn spanning_count(m: &OrderedMatching, profile: &PartitionProfile) -> Result<usize> {
    m.require_canonical()?;
    profile.validate(m.r(), m.vertex_count())?;
    Ok(spanning_edges(m, profile).len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartiteMode {
    Exact,
    Equipartition,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartiteResult {
    pub clique: CliqueResult,
    /// `None` only for the empty matching.
    pub profile: Option<PartitionProfile>,
}

pub fn largest_r_partite(m: &OrderedMatching, mode: PartiteMode) -> Result<PartiteResult> {
    largest_r_partite_with(m, mode, DEFAULT_PARTITE_WORK_CAP)
}

/// Exact mode returns the lexicographically first profile maximizing the
/// spanning count; equipartition mode evaluates the profile with all blocks
/// of size n, a lower bound.
pub fn largest_r_partite_with(m: &OrderedMatching, mode: PartiteMode, work_cap: u64) -> Result<PartiteResult> {
    m.require_canonical()?;
    let (r, n) = (m.r(), m.len());
    if n == 0 {
        let kind = if mode == PartiteMode::Exact { SolverKind::RPartiteExact } else { SolverKind::RPartiteEqui };
        return Ok(PartiteResult {
            clique: CliqueResult::new(Vec::new(), kind, mode == PartiteMode::Exact),
            profile: None,
        });
    }
    let profile = match mode {
        PartiteMode::Equipartition => {
            let profile = PartitionProfile::equipartition(r, n);
            let witness = spanning_edges(m, &profile);
            return Ok(PartiteResult {
                clique: CliqueResult::new(witness, SolverKind::RPartiteEqui, false),
                profile: Some(profile),
            });
        }
        PartiteMode::Exact => match r {
            1 => PartitionProfile { boundaries: Vec::new() },
            2 => best_profile_r2(m),
            3 => best_profile_r3(m),
            _ => {
                let work = binomial_u64((r * n - 1) as u64, (r - 1) as u64).saturating_mul(n as u64);
                if work > work_cap {
                    return Err(Error::ExactModeUnsupported(format!(
                        "r = {r}, n = {n} needs about {work} steps (cap {work_cap})"
                    )));
                }
                best_profile_generic(m)
            }
        },
    };
    let witness = spanning_edges(m, &profile);
    Ok(PartiteResult { clique: CliqueResult::new(witness, SolverKind::RPartiteExact, true), profile: Some(profile) })
}

fn best_profile_r2(m: &OrderedMatching) -> PartitionProfile {
    let total = m.vertex_count();
    let owners = m.owners().expect("canonical");
    let (mut count, mut best, mut at) = (0i64, -1i64, 1);
    for b in 1..total {
        // Moving the boundary past vertex b.
        count += if owners[b - 1].1 == 0 { 1 } else { -1 };
        if count > best {
            best = count;
            at = b;
        }
    }
    PartitionProfile { boundaries: vec![at] }
}

/// O((3n)^2) sweep: for each `b1`, the candidate edges are those with
/// `v1 <= b1 < v2`; moving `b2` right adds a candidate when it passes its
/// second vertex and drops it when it passes its third.
fn best_profile_r3(m: &OrderedMatching) -> PartitionProfile {
    let total = m.vertex_count();
    let owners = m.owners().expect("canonical");
    let mut candidate = vec![false; m.len()];
    let (mut best, mut at) = (-1i64, (1, 2));
    for b1 in 1..total - 1 {
        let (e, rank) = owners[b1 - 1];
        match rank {
            0 => candidate[e as usize] = true,
            1 => candidate[e as usize] = false,
            _ => {}
        }
        let mut count = 0i64;
        for b2 in b1 + 1..total {
            let (e, rank) = owners[b2 - 1];
            if candidate[e as usize] {
                match rank {
                    1 => count += 1,
                    2 => count -= 1,
                    _ => {}
                }
            }
            if count > best {
                best = count;
                at = (b1, b2);
            }
        }
    }
    PartitionProfile { boundaries: vec![at.0, at.1] }
}

/// Exhaustive search over boundary tuples in lexicographic order.
fn best_profile_generic(m: &OrderedMatching) -> PartitionProfile {
    struct Ctx<'a> {
        m: &'a OrderedMatching,
        total: usize,
        r: usize,
        bounds: Vec<usize>,
        best: Option<(usize, Vec<usize>)>,
    }
    fn rec(ctx: &mut Ctx, level: usize, cands: &[usize]) {
        let best_len = ctx.best.as_ref().map_or(0, |b| b.0);
        if ctx.best.is_some() && cands.len() <= best_len {
            return;
        }
        if level == ctx.r - 1 {
            ctx.best = Some((cands.len(), ctx.bounds.clone()));
            return;
        }
        let lo = ctx.bounds.last().copied().unwrap_or(0) + 1;
        let hi = ctx.total - (ctx.r - 1 - level);
        for b in lo..=hi {
            let next: Vec<usize> = cands
                .iter()
                .copied()
                .filter(|&i| {
                    let e = ctx.m.edge(i);
                    e[level] as usize <= b && e[level + 1] as usize > b
                })
                .collect();
            ctx.bounds.push(b);
            rec(ctx, level + 1, &next);
            ctx.bounds.pop();
        }
    }
    let mut ctx = Ctx { m, total: m.vertex_count(), r: m.r(), bounds: Vec::new(), best: None };
    let all: Vec<usize> = (0..m.len()).collect();
    rec(&mut ctx, 0, &all);
    PartitionProfile { boundaries: ctx.best.expect("some profile").1 }
}
