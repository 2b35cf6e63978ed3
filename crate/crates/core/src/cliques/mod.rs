//! Largest pattern-constrained cliques in a single matching.

mod bitset;
pub mod exact;
pub mod interval;
pub mod partite;
pub mod poset;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::OrderedMatching;
use crate::patterns::{r_partite_set, PatternSet};

pub use exact::{max_clique_exact, max_clique_exact_with, ExactSolverConfig};
pub use interval::{z_crossing, z_disjoint, z_interval, z_nesting};
pub use partite::{largest_r_partite, spanning_count, PartiteMode, PartiteResult, PartitionProfile};
pub use poset::{clique_to_tuple, poset_chain_antichain, PosetResult, PosetSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    Interval,
    Nesting,
    Crossing,
    Disjoint,
    RPartiteExact,
    RPartiteEqui,
    PosetChain,
    PosetAntichain,
    Trivial,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Interval => "interval",
            SolverKind::Nesting => "nesting",
            SolverKind::Crossing => "crossing",
            SolverKind::Disjoint => "disjoint",
            SolverKind::RPartiteExact => "rpartite-exact",
            SolverKind::RPartiteEqui => "rpartite-equi",
            SolverKind::PosetChain => "poset-chain",
            SolverKind::PosetAntichain => "poset-antichain",
            SolverKind::Trivial => "trivial",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueResult {
    pub size: usize,
    /// Edge indices into the matching, increasing.
    pub witness: Vec<usize>,
    pub solver: SolverKind,
    /// Whether `size` is proven optimal.
    pub exact: bool,
}

impl CliqueResult {
    pub fn new(witness: Vec<usize>, solver: SolverKind, exact: bool) -> Self {
        Self { size: witness.len(), witness, solver, exact }
    }
}

/// Solver selection for [`solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Auto,
    Exact,
    Interval,
    Nesting,
    Crossing,
    Disjoint,
    RPartiteExact,
    RPartiteEqui,
}

impl FromStr for Solver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Solver::Auto,
            "exact" => Solver::Exact,
            "interval" => Solver::Interval,
            "nesting" => Solver::Nesting,
            "crossing" => Solver::Crossing,
            "disjoint" => Solver::Disjoint,
            "rpartite-exact" => Solver::RPartiteExact,
            "rpartite-equi" => Solver::RPartiteEqui,
            _ => return Err(Error::Parse(format!("unknown solver {s:?}"))),
        })
    }
}

/// Whether every pair of witness edges forms a pattern in `patterns`.
pub fn verify_clique(m: &OrderedMatching, patterns: &PatternSet, witness: &[usize]) -> bool {
    if m.r() != patterns.r() || witness.iter().any(|&i| i >= m.len()) {
        return false;
    }
    let lookup = patterns.lookup();
    let mut idx = witness.to_vec();
    idx.sort_unstable();
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    idx.iter().enumerate().all(|(a, &i)| idx[a + 1..].iter().all(|&j| lookup.allows(m.edge(i), m.edge(j))))
}

/// Dispatches to the specialized solver the pattern set allows, or to the
/// named solver. Specialized solvers are only valid for their own pattern
/// set; asking for one with a different set is an error.
pub fn solve(
    m: &OrderedMatching,
    patterns: &PatternSet,
    solver: Solver,
    config: &ExactSolverConfig,
) -> Result<CliqueResult> {
    if m.r() != patterns.r() {
        return Err(Error::RMismatch(m.r(), patterns.r()));
    }
    let words: Vec<String> = patterns.iter().map(|p| p.word()).collect();
    let words: Vec<&str> = words.iter().map(String::as_str).collect();
    let partite = r_partite_set(m.r())? == *patterns;
    let require = |ok: bool, name: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("solver {name} does not apply to patterns {patterns}")))
        }
    };
    match solver {
        Solver::Auto => {
            if m.len() <= 1 {
                return Ok(CliqueResult::new((0..m.len()).collect(), SolverKind::Trivial, true));
            }
            match (m.r(), words.as_slice()) {
                (2, ["AABB"]) => z_disjoint(m),
                (2, ["ABBA"]) => z_nesting(m),
                (2, ["ABAB"]) => z_crossing(m),
                (2, ["ABAB", "ABBA"]) => z_interval(m),
                (3, _) if partite => Ok(largest_r_partite(m, PartiteMode::Exact)?.clique),
                _ => max_clique_exact_with(m, patterns, config),
            }
        }
        Solver::Exact => max_clique_exact_with(m, patterns, config),
        Solver::Disjoint => {
            require(words == ["AABB"], "disjoint")?;
            z_disjoint(m)
        }
        Solver::Nesting => {
            require(words == ["ABBA"], "nesting")?;
            z_nesting(m)
        }
        Solver::Crossing => {
            require(words == ["ABAB"], "crossing")?;
            z_crossing(m)
        }
        Solver::Interval => {
            require(words == ["ABAB", "ABBA"], "interval")?;
            z_interval(m)
        }
        Solver::RPartiteExact => {
            require(partite, "rpartite-exact")?;
            Ok(largest_r_partite(m, PartiteMode::Exact)?.clique)
        }
        Solver::RPartiteEqui => {
            require(partite, "rpartite-equi")?;
            Ok(largest_r_partite(m, PartiteMode::Equipartition)?.clique)
        }
    }
}
