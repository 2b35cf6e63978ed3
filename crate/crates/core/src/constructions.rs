//! Explicit matchings: σ-products, canonical cliques for collectable and
//! harmonious patterns, copy containment, and the blow-up good-edge census.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{OrderedMatching, Vertex};
use crate::patterns::{classify_pair, pair_mask, PairClass, Pattern, PatternSet};
use crate::sampler::{rng_for, sample};

fn check_permutation(sigma: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if sigma.len() != k || sigma.iter().any(|&s| s >= k || std::mem::replace(&mut seen[s], true)) {
        return Err(Error::InvalidArgument(format!("{sigma:?} is not a permutation of 0..{k}")));
    }
    Ok(())
}

/// `M1 ×σ M2`: edge i of `M1` united with edge `σ(i)` of `M2` (0-based).
pub fn sigma_product(m1: &OrderedMatching, m2: &OrderedMatching, sigma: &[usize]) -> Result<OrderedMatching> {
    sigma_chain(&[m1.clone(), m2.clone()], &[sigma.to_vec()])
}

/// Iterated product: edge i is `e^1_i ∪ e^2_{σ_1(i)} ∪ … ∪ e^{h+1}_{σ_h(i)}`,
/// every σ taken relative to the first factor.
pub fn sigma_chain(factors: &[OrderedMatching], sigmas: &[Vec<usize>]) -> Result<OrderedMatching> {
    let first = factors.first().ok_or(Error::EmptyInput)?;
    let k = first.len();
    if sigmas.len() + 1 != factors.len() {
        return Err(Error::SizeMismatch(format!("{} factors need {} permutations", factors.len(), factors.len() - 1)));
    }
    if let Some(f) = factors.iter().find(|f| f.len() != k) {
        return Err(Error::SizeMismatch(format!("factor sizes {k} and {}", f.len())));
    }
    for s in sigmas {
        check_permutation(s, k)?;
    }
    let mut all: Vec<Vertex> = factors.iter().flat_map(|f| f.edges().flatten().copied()).collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::VerticesIntersect);
    }
    let r: usize = factors.iter().map(OrderedMatching::r).sum();
    let edges = (0..k)
        .map(|i| {
            let mut e = first.edge(i).to_vec();
            for (f, s) in factors[1..].iter().zip(sigmas) {
                e.extend_from_slice(f.edge(s[i]));
            }
            e
        })
        .collect();
    OrderedMatching::new(r, edges)
}

/// The r-partite matching with gluing permutations `sigmas`; inverse of
/// [`crate::cliques::clique_to_tuple`].
pub fn partite_from_tuple(k: usize, sigmas: &[Vec<usize>]) -> Result<OrderedMatching> {
    let factors: Vec<OrderedMatching> = (0..=sigmas.len())
        .map(|b| OrderedMatching::new(1, (0..k).map(|t| vec![(b * k + t + 1) as Vertex]).collect()))
        .collect::<Result<_>>()?;
    sigma_chain(&factors, sigmas)
}

/// Vertex positions of edge `slot` inside a block of half-length `t` shared
/// by `k` edges starting after `offset`.
fn block_positions(offset: usize, t: usize, slot: usize) -> impl Iterator<Item = Vertex> {
    (0..t).map(move |x| (offset + slot * t + x + 1) as Vertex)
}

/// Places edge `j` into every block, block `b` using slot `slot(b, j)`.
fn assemble(p: &Pattern, k: usize, slot: impl Fn(usize, usize) -> usize) -> Result<OrderedMatching> {
    let split = p.split_blocks().ok_or_else(|| Error::NotCollectable(p.word()))?;
    let mut edges = vec![Vec::with_capacity(p.r()); k];
    let mut offset = 0;
    for (b, block) in split.blocks.iter().enumerate() {
        for (j, e) in edges.iter_mut().enumerate() {
            let s = slot(b, j);
            let s = match block.orientation {
                crate::patterns::Orientation::AFirst => s,
                crate::patterns::Orientation::BFirst => k - 1 - s,
            };
            e.extend(block_positions(offset, block.len, s));
        }
        offset += k * block.len;
    }
    OrderedMatching::new(p.r(), edges)
}

/// The unique `{P}`-clique of size `k` on `1..=rk`.
pub fn build_unique_clique(p: &Pattern, k: usize) -> Result<OrderedMatching> {
    assemble(p, k, |_, j| j)
}

/// Blocks where two harmonious patterns agree (`t0`) and differ (`t1`),
/// 0-based, with the per-edge vertex counts `l0`, `l1` they carry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HarmoniousSplit {
    pub t0: Vec<usize>,
    pub t1: Vec<usize>,
    pub l0: usize,
    pub l1: usize,
}

pub fn harmonious_split(p: &Pattern, q: &Pattern) -> Result<HarmoniousSplit> {
    if classify_pair(p, q)? != PairClass::Harmonious {
        return Err(Error::NotHarmonious(p.word(), q.word()));
    }
    let (sp, sq) = (p.split_blocks().expect("collectable"), q.split_blocks().expect("collectable"));
    let mut out = HarmoniousSplit { t0: Vec::new(), t1: Vec::new(), l0: 0, l1: 0 };
    for (i, (a, b)) in sp.blocks.iter().zip(&sq.blocks).enumerate() {
        if a.orientation == b.orientation {
            out.t0.push(i);
            out.l0 += a.len;
        } else {
            out.t1.push(i);
            out.l1 += a.len;
        }
    }
    Ok(out)
}

/// The `{P,Q}`-clique where edges `j < j'` form `P` when
/// `σ(j) < σ(j')` and `Q` otherwise.
pub fn build_harmonious_clique(p: &Pattern, q: &Pattern, sigma: &[usize]) -> Result<OrderedMatching> {
    let split = harmonious_split(p, q)?;
    let k = sigma.len();
    check_permutation(sigma, k)?;
    let mut differs = vec![false; split.t0.len() + split.t1.len()];
    for &b in &split.t1 {
        differs[b] = true;
    }
    assemble(p, k, |b, j| if differs[b] { sigma[j] } else { j })
}

/// Searches for a sub-matching of `m` order-isomorphic to `h`. Returns the
/// indices of the `m`-edges playing the edges of `h`, in order.
///
/// Order-isomorphic images keep the edge order, and the pairwise patterns
/// fix the relative order of all vertices, so it suffices to match patterns
/// pair by pair.
pub fn contains_copy(m: &OrderedMatching, h: &OrderedMatching, budget: u64) -> Result<Option<Vec<usize>>> {
    if m.r() != h.r() {
        return Err(Error::RMismatch(m.r(), h.r()));
    }
    let k = h.len();
    let want: Vec<Vec<u64>> = (0..k).map(|a| (0..a).map(|b| pair_mask(h.edge(b), h.edge(a))).collect()).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut nodes = 0u64;
    fn rec(
        m: &OrderedMatching,
        want: &[Vec<u64>],
        chosen: &mut Vec<usize>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        let a = chosen.len();
        if a == want.len() {
            return Ok(true);
        }
        let start = chosen.last().map_or(0, |&c| c + 1);
        let remaining = want.len() - a;
        for c in start..m.len().saturating_sub(remaining - 1) {
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::BudgetExceeded(budget));
            }
            let e = m.edge(c);
            if chosen.iter().enumerate().all(|(b, &x)| pair_mask(m.edge(x), e) == want[a][b]) {
                chosen.push(c);
                if rec(m, want, chosen, nodes, budget)? {
                    return Ok(true);
                }
                chosen.pop();
            }
        }
        Ok(false)
    }
    Ok(rec(m, &want, &mut chosen, &mut nodes, budget)?.then_some(chosen))
}

/// Fraction of `samples` uniform random r-matchings of size `n` that
/// contain a copy of `h`.
pub fn planted_h_frequency(h: &OrderedMatching, r: usize, n: usize, samples: u64, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut hits = 0u64;
    for s in 0..samples {
        let m = sample(r, n, &mut rng_for(seed, r, n, s))?;
        if contains_copy(&m, h, u64::MAX)?.is_some() {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// Blow-up layout: coordinate `h` (0-based) occupies positions
/// `(h·kℓ, (h+1)·kℓ]`, split into `k` cells of `ℓ` consecutive vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GoodEdgeParams {
    pub r0: usize,
    pub r1: usize,
    pub k: usize,
    pub l: usize,
}

impl GoodEdgeParams {
    /// `k = floor(n^(1/(r-1)))`, `ℓ = floor(n/k)`.
    pub fn default_for(r: usize, n: usize, r0: usize) -> Result<Self> {
        if r < 3 || r0 == 0 || r0 >= r {
            return Err(Error::ParamsInconsistent(format!("need r >= 3 and 1 <= r0 < r, got r = {r}, r0 = {r0}")));
        }
        let mut k = (n as f64).powf(1.0 / (r - 1) as f64).floor() as usize;
        // Guard against floating error just below an exact power.
        while (k + 1).checked_pow((r - 1) as u32).is_some_and(|p| p <= n) {
            k += 1;
        }
        let k = k.max(1);
        Ok(Self { r0, r1: r - r0, k, l: n / k })
    }

    fn validate(&self, r: usize, n: usize) -> Result<()> {
        if r < 3 || self.r0 == 0 || self.r1 == 0 || self.r0 + self.r1 != r {
            return Err(Error::ParamsInconsistent(format!("r0 + r1 = {} + {} against r = {r}", self.r0, self.r1)));
        }
        if self.k == 0 || self.l == 0 || self.k * self.l > n {
            return Err(Error::ParamsInconsistent(format!("k·ℓ = {}·{} exceeds n = {n}", self.k, self.l)));
        }
        Ok(())
    }

    /// The pair `((AB)^r, (AB)^r0 (BA)^r1)` that separated good edges form.
    pub fn patterns(&self) -> Result<PatternSet> {
        let p = "AB".repeat(self.r0 + self.r1);
        let q = format!("{}{}", "AB".repeat(self.r0), "BA".repeat(self.r1));
        PatternSet::from_words(&[&p, &q])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodEdgeReport {
    /// `(edge index, i, j)` for every good edge of type `(i, j)`.
    pub good: Vec<(usize, usize, usize)>,
    /// Number of good edges.
    pub y: usize,
    /// Number of good-edge pairs sharing `i` or `j`.
    pub z: usize,
    /// Greedily chosen pairwise separated good edges (edge indices).
    pub separated: Vec<usize>,
}

pub fn good_edge_census(m: &OrderedMatching, params: &GoodEdgeParams) -> Result<GoodEdgeReport> {
    let (r, n) = (m.r(), m.len());
    params.validate(r, n)?;
    m.require_canonical()?;
    let span = params.k * params.l;
    let mut good = Vec::new();
    'edges: for (idx, e) in m.edges().enumerate() {
        let mut cells = [0usize; 2];
        for (h, &v) in e.iter().enumerate() {
            let v = v as usize - 1;
            if v < h * span || v >= (h + 1) * span {
                continue 'edges;
            }
            let cell = (v - h * span) / params.l;
            let side = usize::from(h >= params.r0);
            if h == 0 || h == params.r0 {
                cells[side] = cell;
            } else if cells[side] != cell {
                continue 'edges;
            }
        }
        good.push((idx, cells[0], cells[1]));
    }
    let mut by_i = vec![0usize; params.k];
    let mut by_j = vec![0usize; params.k];
    let mut by_ij = std::collections::HashMap::new();
    for &(_, i, j) in &good {
        by_i[i] += 1;
        by_j[j] += 1;
        *by_ij.entry((i, j)).or_insert(0usize) += 1;
    }
    let pairs = |c: usize| c * c.saturating_sub(1) / 2;
    let z = by_i.iter().map(|&c| pairs(c)).sum::<usize>() + by_j.iter().map(|&c| pairs(c)).sum::<usize>()
        - by_ij.values().map(|&c| pairs(c)).sum::<usize>();
    let mut used_i = vec![false; params.k];
    let mut used_j = vec![false; params.k];
    let mut separated = Vec::new();
    for &(idx, i, j) in &good {
        if !used_i[i] && !used_j[j] {
            used_i[i] = true;
            used_j[j] = true;
            separated.push(idx);
        }
    }
    Ok(GoodEdgeReport { y: good.len(), good, z, separated })
}
