//! Exhaustive counts over all matchings of a given size: clique censuses,
//! deterministic clique caps, trace injectivity, exact expectations and
//! permutation-tuple avoidance.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::combin::{binomial, factorial, falling, next_combination, permutations};
use crate::error::{Error, Result};
use crate::matching::{count_matchings, OrderedMatching, Vertex};
use crate::patterns::PatternSet;

/// Default node budget for the backtracking searches.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;
/// Default cap on `(k!)^d` for [`count_avoiding_tuples`].
pub const DEFAULT_TUPLE_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMethod {
    Backtracking,
    Formula,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusResult {
    pub r: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_display")]
    pub patterns: PatternSet,
    #[serde(serialize_with = "ser_display")]
    pub count: BigUint,
    pub method: CensusMethod,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Canonical-extension search over the `P`-cliques on `1..=rk`: the
/// smallest free vertex always opens the next edge, and each partially
/// chosen edge is checked against every placed edge as soon as the prefix
/// of their pattern is determined.
struct CliqueSearch {
    r: usize,
    k: usize,
    allowed: Vec<u64>,
    free: Vec<bool>,
    edges: Vec<Vec<Vertex>>,
    nodes: u64,
    budget: u64,
}

type Visit<'a> = dyn FnMut(&[Vec<Vertex>]) -> ControlFlow<()> + 'a;

impl CliqueSearch {
    fn new(patterns: &PatternSet, k: usize, budget: u64) -> Self {
        let r = patterns.r();
        Self {
            r,
            k,
            allowed: patterns.iter().map(|p| p.mask()).collect(),
            free: vec![true; r * k + 1],
            edges: Vec::with_capacity(k),
            nodes: 0,
            budget,
        }
    }

    fn run(&mut self, visit: &mut Visit) -> Result<()> {
        if self.k >= 2 && self.allowed.is_empty() {
            return Ok(());
        }
        self.free[0] = false;
        self.next_edge(visit).map(drop)
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn next_edge(&mut self, visit: &mut Visit) -> Result<ControlFlow<()>> {
        if self.edges.len() == self.k {
            return Ok(visit(&self.edges));
        }
        let anchor = (1..self.free.len()).find(|&v| self.free[v]).expect("free vertex remains");
        self.free[anchor] = false;
        let mut edge = vec![anchor as Vertex];
        let flow = self.extend(&mut edge, visit);
        self.free[anchor] = true;
        flow
    }

    fn extend(&mut self, edge: &mut Vec<Vertex>, visit: &mut Visit) -> Result<ControlFlow<()>> {
        if edge.len() == self.r {
            self.edges.push(edge.clone());
            let flow = self.next_edge(visit);
            self.edges.pop();
            return flow;
        }
        let last = *edge.last().expect("anchor") as usize;
        let still_needed = self.r - edge.len();
        for v in last + 1..self.free.len() {
            if self.free.len() - v < still_needed {
                break;
            }
            if !self.free[v] {
                continue;
            }
            self.tick()?;
            edge.push(v as Vertex);
            if self.prefix_ok(edge) {
                self.free[v] = false;
                let flow = self.extend(edge, visit)?;
                self.free[v] = true;
                if flow.is_break() {
                    edge.pop();
                    return Ok(flow);
                }
            }
            edge.pop();
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Whether every placed edge `e` and the partial edge `f` agree with
    /// some allowed pattern on the positions up to `f`'s last vertex.
    fn prefix_ok(&self, f: &[Vertex]) -> bool {
        let complete = f.len() == self.r;
        self.edges.iter().all(|e| {
            let (mut i, mut pos, mut mask) = (0, 0, 0u64);
            for &x in f {
                while i < e.len() && e[i] < x {
                    i += 1;
                    pos += 1;
                }
                mask |= 1 << pos;
                pos += 1;
            }
            let len = if complete { 2 * self.r } else { pos };
            let low = if len == 64 { !0 } else { (1u64 << len) - 1 };
            self.allowed.iter().any(|&m| (m ^ mask) & low == 0)
        })
    }
}

fn to_matching(r: usize, edges: &[Vec<Vertex>]) -> OrderedMatching {
    OrderedMatching::new(r, edges.to_vec()).expect("search produces valid matchings")
}

fn check_k(k: usize) -> Result<()> {
    if k > 64 {
        return Err(Error::InvalidArgument(format!("k = {k} is far beyond exhaustive reach")));
    }
    Ok(())
}

/// Number of `P`-cliques among all matchings on `1..=rk`.
pub fn count_cliques(patterns: &PatternSet, k: usize) -> Result<CensusResult> {
    count_cliques_with(patterns, k, DEFAULT_NODE_BUDGET)
}

pub fn count_cliques_with(patterns: &PatternSet, k: usize, budget: u64) -> Result<CensusResult> {
    check_k(k)?;
    let mut count: u64 = 0;
    CliqueSearch::new(patterns, k, budget).run(&mut |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(CensusResult {
        r: patterns.r(),
        k,
        patterns: patterns.clone(),
        count: count.into(),
        method: CensusMethod::Backtracking,
    })
}

/// Calls `f` on every `P`-clique of size `k`, in canonical-extension order.
pub fn for_each_clique(patterns: &PatternSet, k: usize, budget: u64, mut f: impl FnMut(OrderedMatching)) -> Result<()> {
    check_k(k)?;
    let r = patterns.r();
    CliqueSearch::new(patterns, k, budget).run(&mut |edges| {
        f(to_matching(r, edges));
        ControlFlow::Continue(())
    })?;
    Ok(())
}

/// First `P`-clique of size `k` in canonical-extension order, if any.
pub fn find_clique(patterns: &PatternSet, k: usize, budget: u64) -> Result<Option<OrderedMatching>> {
    check_k(k)?;
    let r = patterns.r();
    let mut found = None;
    CliqueSearch::new(patterns, k, budget).run(&mut |edges| {
        found = Some(to_matching(r, edges));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

pub fn catalan(k: u64) -> BigUint {
    binomial(2 * k, k) / (k + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZMax {
    /// Largest clique size found, at most the cap.
    pub value: usize,
    /// True when a clique of size `cap` exists, so the true maximum may be larger.
    pub at_least: bool,
    #[serde(serialize_with = "ser_display")]
    pub witness: OrderedMatching,
}

/// The largest `k <= cap` for which some matching is a `P`-clique.
pub fn z_max_deterministic(patterns: &PatternSet, cap: usize) -> Result<ZMax> {
    z_max_deterministic_with(patterns, cap, DEFAULT_NODE_BUDGET)
}

pub fn z_max_deterministic_with(patterns: &PatternSet, cap: usize, budget: u64) -> Result<ZMax> {
    if cap < 2 {
        return Err(Error::InvalidArgument(format!("cap must be at least 2, got {cap}")));
    }
    let r = patterns.r();
    let mut best = OrderedMatching::new(r, vec![(1..=r as Vertex).collect()])?;
    for k in 2..=cap {
        match find_clique(patterns, k, budget)? {
            Some(m) => best = m,
            None => return Ok(ZMax { value: k - 1, at_least: false, witness: best }),
        }
    }
    Ok(ZMax { value: cap, at_least: true, witness: best })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub injective: bool,
    /// Number of cliques examined.
    pub cliques: u64,
    pub counterexample: Option<(String, String, String)>,
}

/// Whether distinct `P`-cliques of size `k` always have distinct traces.
/// A counterexample is reported as two clique words and their common trace.
pub fn trace_injectivity(patterns: &PatternSet, k: usize) -> Result<TraceReport> {
    check_k(k)?;
    let r = patterns.r();
    let mut seen: HashMap<Vec<u32>, OrderedMatching> = HashMap::new();
    let mut cliques = 0;
    let mut clash = None;
    CliqueSearch::new(patterns, k, DEFAULT_NODE_BUDGET).run(&mut |edges| {
        cliques += 1;
        let m = to_matching(r, edges);
        let trace = m.trace().expect("canonical");
        match seen.get(trace.symbols()) {
            Some(other) => {
                clash = Some((other.to_string(), m.to_string(), trace.to_string()));
                ControlFlow::Break(())
            }
            None => {
                seen.insert(trace.symbols().to_vec(), m);
                ControlFlow::Continue(())
            }
        }
    })?;
    Ok(TraceReport { injective: clash.is_none(), cliques, counterexample: clash })
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Expected number of `P`-cliques of size `k` in a uniform random
/// r-matching of size `n`: `(r!)^k / (rk)! · a_P(k) · n!/(n-k)!`.
pub fn expected_clique_count(r: usize, n: usize, k: usize, patterns: &PatternSet) -> Result<BigRational> {
    if patterns.r() != r {
        return Err(Error::RMismatch(r, patterns.r()));
    }
    if k > n {
        return Ok(BigRational::zero());
    }
    let a = count_cliques(patterns, k)?.count;
    Ok(expectation_factored(r, n, k, &a))
}

pub fn expectation_factored(r: usize, n: usize, k: usize, a: &BigUint) -> BigRational {
    let (r, n, k) = (r as u64, n as u64, k as u64);
    ratio(factorial(r).pow(k as u32) * a * falling(n, k), factorial(r * k))
}

/// The same expectation as `C(rn, rk) · a_P(k) · α_{n-k} / α_n`.
pub fn expectation_binomial(r: usize, n: usize, k: usize, a: &BigUint) -> BigRational {
    let choose = binomial((r * n) as u64, (r * k) as u64);
    ratio(choose * a * count_matchings(r, n - k), count_matchings(r, n))
}

/// Expected number of edges spanning blocks of the given sizes:
/// `Π b_i / C(rn-1, r-1)`.
pub fn expected_spanning(r: usize, n: usize, sizes: &[usize]) -> Result<BigRational> {
    if sizes.len() != r || r == 0 {
        return Err(Error::InvalidArgument(format!("need {r} block sizes, got {}", sizes.len())));
    }
    let total: usize = sizes.iter().sum();
    if total != r * n {
        return Err(Error::SizesDontSum { expected: r * n, actual: total });
    }
    let prod = sizes.iter().fold(BigUint::one(), |acc, &b| acc * b);
    Ok(ratio(prod, binomial((r * n - 1) as u64, (r - 1) as u64)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstMomentReport {
    pub c_prime: f64,
    pub c_double_prime: f64,
    pub k0: u64,
    /// Natural log of `(C' n / k0^(r-x))^k0`.
    pub log_bound: f64,
    pub bound: f64,
}

/// Markov-bound diagnostic for `a_P(k) <= C^k k!^x`: with
/// `C' = C r! e^r / r^r` and `C'' = margin · C'^(1/(r-x))`, evaluates
/// `(C' n / k0^(r-x))^k0` at `k0 = ceil(C'' n^(1/(r-x)))`.
pub fn first_moment_threshold(r: usize, n: u64, c: f64, x: f64, margin: f64) -> Result<FirstMomentReport> {
    let rf = r as f64;
    if !(0.0..rf).contains(&x) {
        return Err(Error::XOutOfRange { x: x.to_string(), r });
    }
    if c <= 0.0 || margin <= 1.0 || n == 0 {
        return Err(Error::InvalidArgument("need C > 0, margin > 1 and n >= 1".into()));
    }
    let r_fact = (1..=r).map(|i| i as f64).product::<f64>();
    let c_prime = c * r_fact * rf.exp() * rf.powf(-rf);
    let e = 1.0 / (rf - x);
    let c_double_prime = margin * c_prime.powf(e);
    let k0 = (c_double_prime * (n as f64).powf(e)).ceil() as u64;
    let log_bound = k0 as f64 * (c_prime.ln() + (n as f64).ln() - (rf - x) * (k0 as f64).ln());
    Ok(FirstMomentReport { c_prime, c_double_prime, k0, log_bound, bound: log_bound.exp() })
}

/// Parses a permutation in one-line notation, e.g. `"2 1 3"` or `"213"`
/// (single digits only without spaces). Returns 0-based values.
pub fn parse_permutation(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let vals: Vec<usize> = if text.contains(char::is_whitespace) {
        text.split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<_>>()?
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Parse(format!("{text:?}"))))
            .collect::<Result<_>>()?
    };
    let m = vals.len();
    let mut seen = vec![false; m];
    for &v in &vals {
        if v == 0 || v > m || seen[v - 1] {
            return Err(Error::Parse(format!("{text:?} is not a permutation of 1..={m}")));
        }
        seen[v - 1] = true;
    }
    Ok(vals.into_iter().map(|v| v - 1).collect())
}

fn order_isomorphic(values: &[usize], idx: &[usize], tau: &[usize]) -> bool {
    idx.iter().enumerate().all(|(a, &i)| {
        idx[a + 1..].iter().enumerate().all(|(b, &j)| (values[i] < values[j]) == (tau[a] < tau[a + 1 + b]))
    })
}

/// Number of d-tuples of permutations of `0..k` that avoid the tuple
/// `taboo`: no index set on which every `σ_j` is order-isomorphic to `τ_j`.
pub fn count_avoiding_tuples(k: usize, taboo: &[Vec<usize>]) -> Result<BigUint> {
    count_avoiding_tuples_with(k, taboo, DEFAULT_TUPLE_CAP)
}

pub fn count_avoiding_tuples_with(k: usize, taboo: &[Vec<usize>], cap: u64) -> Result<BigUint> {
    let d = taboo.len();
    if d == 0 {
        return Err(Error::InvalidArgument("taboo tuple is empty".into()));
    }
    let m = taboo[0].len();
    if taboo.iter().any(|t| t.len() != m) {
        return Err(Error::SizeMismatch("taboo permutations differ in length".into()));
    }
    let total = factorial(k as u64).pow(d as u32);
    if total.to_u64().is_none_or(|t| t > cap) {
        return Err(Error::BudgetExceeded(cap));
    }
    let perms = permutations(k);
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    if m <= k && m > 0 {
        let mut c: Vec<usize> = (0..m).collect();
        loop {
            subsets.push(c.clone());
            if !next_combination(&mut c, k) {
                break;
            }
        }
    }
    // Per factor: which index subsets realize τ_j.
    let hits: Vec<Vec<Vec<bool>>> = taboo
        .iter()
        .map(|tau| perms.iter().map(|p| subsets.iter().map(|s| order_isomorphic(p, s, tau)).collect()).collect())
        .collect();
    let mut choice = vec![0usize; d];
    let mut avoiding = 0u64;
    loop {
        let contains = (0..subsets.len()).any(|s| (0..d).all(|j| hits[j][choice[j]][s]));
        if !contains {
            avoiding += 1;
        }
        // Odometer over perms^d.
        let mut j = 0;
        loop {
            if j == d {
                return Ok(avoiding.into());
            }
            choice[j] += 1;
            if choice[j] < perms.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}
