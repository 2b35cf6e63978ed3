//! Seeded Monte Carlo experiments over a grid of sizes, with log-log fits
//! and CSV/JSON output.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cliques::{
    largest_r_partite, max_clique_exact_with, z_crossing, z_disjoint, z_interval, z_nesting, ExactSolverConfig,
    PartiteMode,
};
use crate::constructions::{contains_copy, good_edge_census, GoodEdgeParams};
use crate::error::{Error, Result};
use crate::matching::OrderedMatching;
use crate::patterns::{classify_pair, r_partite_set, PairClass, PatternSet};
use crate::sampler::{rng_for, sample, stream_id};

/// One estimator entry of an experiment config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    /// Name used in the output; defaults to `name`, or `name:patterns`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl EstimatorSpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.into(), patterns: None, params: None, label: None }
    }

    pub fn with_patterns(name: &str, patterns: &str) -> Self {
        Self { patterns: Some(patterns.into()), ..Self::named(name) }
    }

    pub fn label(&self) -> String {
        match (&self.label, &self.patterns) {
            (Some(l), _) => l.clone(),
            (None, Some(p)) => format!("{}:{p}", self.name),
            (None, None) => self.name.clone(),
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub r: usize,
    pub n_grid: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub estimators: Vec<EstimatorSpec>,
    /// When false, `elapsed_s` is written as 0 so reruns are byte-identical.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub r: usize,
    pub n: usize,
    pub sample: u64,
    pub estimator: String,
    pub value: f64,
    pub elapsed_s: f64,
    pub stream_id: u64,
}

#[derive(Clone, Debug)]
enum Estimator {
    ZInterval,
    ZCrossing,
    ZNesting,
    ZDisjoint,
    RPartiteExact,
    RPartiteEqui,
    CliqueExact { patterns: PatternSet, config: ExactSolverConfig },
    GoodEdges { r0: usize },
    Plant { h: OrderedMatching },
}

fn param_usize(spec: &EstimatorSpec, key: &str) -> Result<Option<usize>> {
    match spec.params.as_ref().and_then(|p| p.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|x| Some(x as usize))
            .ok_or_else(|| Error::Parse(format!("parameter {key} of {} must be a nonnegative integer", spec.name))),
    }
}

fn unavailable(spec: &EstimatorSpec, why: impl std::fmt::Display) -> Error {
    Error::EstimatorUnavailable(format!("{}: {why}", spec.label()))
}

impl Estimator {
    fn from_spec(spec: &EstimatorSpec, r: usize) -> Result<Self> {
        let need_r2 = |e: Estimator| if r == 2 { Ok(e) } else { Err(unavailable(spec, "requires r = 2")) };
        match spec.name.as_str() {
            "z-interval" => need_r2(Estimator::ZInterval),
            "z-crossing" => need_r2(Estimator::ZCrossing),
            "z-nesting" => need_r2(Estimator::ZNesting),
            "z-disjoint" => need_r2(Estimator::ZDisjoint),
            "rpartite-exact" => Ok(Estimator::RPartiteExact),
            "rpartite-equi" => Ok(Estimator::RPartiteEqui),
            "clique-exact" => {
                let text = spec.patterns.as_deref().ok_or_else(|| unavailable(spec, "needs a pattern set"))?;
                let patterns = PatternSet::parse_spec(text)?;
                if patterns.r() != r {
                    return Err(unavailable(spec, format!("patterns have r = {}", patterns.r())));
                }
                let mut config = ExactSolverConfig::default();
                if let Some(cap) = param_usize(spec, "max_edges")? {
                    config.max_edges = cap;
                }
                Ok(Estimator::CliqueExact { patterns, config })
            }
            "goodedges" => {
                let r0 = param_usize(spec, "r0")?.unwrap_or(1);
                if r < 3 || r0 == 0 || r0 >= r {
                    return Err(unavailable(spec, "requires r >= 3 and 1 <= r0 < r"));
                }
                Ok(Estimator::GoodEdges { r0 })
            }
            "plant" => {
                let word = spec
                    .params
                    .as_ref()
                    .and_then(|p| p.get("h"))
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| unavailable(spec, "needs params.h"))?;
                let h = OrderedMatching::parse_any(word)?;
                if h.r() != r {
                    return Err(unavailable(spec, format!("H has r = {}", h.r())));
                }
                Ok(Estimator::Plant { h })
            }
            other => Err(Error::EstimatorUnavailable(format!("unknown estimator {other:?}"))),
        }
    }

    fn evaluate(&self, m: &OrderedMatching) -> Result<f64> {
        let size = match self {
            Estimator::ZInterval => z_interval(m)?.size,
            Estimator::ZCrossing => z_crossing(m)?.size,
            Estimator::ZNesting => z_nesting(m)?.size,
            Estimator::ZDisjoint => z_disjoint(m)?.size,
            Estimator::RPartiteExact => largest_r_partite(m, PartiteMode::Exact)?.clique.size,
            Estimator::RPartiteEqui => largest_r_partite(m, PartiteMode::Equipartition)?.clique.size,
            Estimator::CliqueExact { patterns, config } => max_clique_exact_with(m, patterns, config)?.size,
            Estimator::GoodEdges { r0 } => {
                let params = GoodEdgeParams::default_for(m.r(), m.len(), *r0)?;
                good_edge_census(m, &params)?.separated.len()
            }
            Estimator::Plant { h } => usize::from(contains_copy(m, h, u64::MAX)?.is_some()),
        };
        Ok(size as f64)
    }
}

/// Runs every estimator on `samples` random matchings per grid size.
/// Records are ordered by `(n, sample, estimator order)`; each cell draws
/// its matching from its own stream, so results do not depend on the
/// number of threads.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<ExperimentRecord>> {
    if config.n_grid.is_empty() {
        return Err(Error::InvalidArgument("n_grid is empty".into()));
    }
    if config.samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if config.estimators.is_empty() {
        return Err(Error::InvalidArgument("no estimators configured".into()));
    }
    let estimators: Vec<(String, Estimator)> =
        config.estimators.iter().map(|s| Ok((s.label(), Estimator::from_spec(s, config.r)?))).collect::<Result<_>>()?;
    let mut grid = config.n_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let cells: Vec<(usize, u64)> = grid.iter().flat_map(|&n| (0..config.samples).map(move |s| (n, s))).collect();

    let run_cell = |&(n, s): &(usize, u64)| -> Result<Vec<ExperimentRecord>> {
        let m = sample(config.r, n, &mut rng_for(config.seed, config.r, n, s))?;
        let id = stream_id(config.seed, config.r, n, s);
        estimators
            .iter()
            .map(|(label, est)| {
                let start = Instant::now();
                let value = est.evaluate(&m).map_err(|e| match e {
                    Error::EstimatorUnavailable(_) => e,
                    other => Error::EstimatorUnavailable(format!("{label} at n = {n}, sample {s}: {other}")),
                })?;
                let elapsed_s = if config.record_timing { start.elapsed().as_secs_f64() } else { 0.0 };
                Ok(ExperimentRecord {
                    r: config.r,
                    n,
                    sample: s,
                    estimator: label.clone(),
                    value,
                    elapsed_s,
                    stream_id: id,
                })
            })
            .collect()
    };
    let run_all = || cells.par_iter().map(run_cell).collect::<Result<Vec<_>>>();
    let nested = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run_all)?,
        None => run_all()?,
    };
    Ok(nested.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in records {
        w.serialize(rec).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
}

pub fn write_json<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, records).map_err(|e| Error::InvalidArgument(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub estimator: String,
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean and spread per `(estimator, n)`.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for rec in records {
        groups.entry((rec.estimator.clone(), rec.n)).or_default().push(rec.value);
    }
    groups
        .into_iter()
        .map(|((estimator, n), vals)| {
            let count = vals.len();
            let mean = vals.iter().sum::<f64>() / count as f64;
            let var =
                if count > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64 } else { 0.0 };
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            CellSummary { estimator, n, count, mean, sd: var.sqrt(), min, max }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// Least-squares slope of `ln value` against `ln n`.
    pub exponent: f64,
    pub exponent_stderr: f64,
    /// Mean of `value / n^theory`.
    pub constant: f64,
    pub constant_sd: f64,
    pub theory_exponent: f64,
    pub points: usize,
    pub distinct_n: usize,
}

/// Fits the records of one estimator. Records with value 0 are left out
/// of the log-log regression but kept in the constant.
pub fn fit(records: &[ExperimentRecord], estimator: &str, theory_exponent: f64) -> Result<FitResult> {
    let recs: Vec<&ExperimentRecord> = records.iter().filter(|r| r.estimator == estimator).collect();
    let mut ns: Vec<usize> = recs.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::GridTooSmall(ns.len()));
    }
    let pts: Vec<(f64, f64)> =
        recs.iter().filter(|r| r.value > 0.0).map(|r| ((r.n as f64).ln(), r.value.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = if pts.len() > 2 { (sse / (m - 2.0) / sxx).sqrt() } else { f64::NAN };
    let ratios: Vec<f64> = recs.iter().map(|r| r.value / (r.n as f64).powf(theory_exponent)).collect();
    let c = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let c_sd = if ratios.len() > 1 {
        (ratios.iter().map(|x| (x - c).powi(2)).sum::<f64>() / (ratios.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(FitResult {
        exponent: slope,
        exponent_stderr: stderr,
        constant: c,
        constant_sd: c_sd,
        theory_exponent,
        points: pts.len(),
        distinct_n: ns.len(),
    })
}

/// Asymptotic target for an estimator: growth exponent and, for sharp
/// asymptotics, the constant in front of `n^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Target {
    pub exponent: f64,
    pub constant: Option<f64>,
}

fn r_partite_constant(r: usize) -> f64 {
    let fact: f64 = (1..r).map(|i| i as f64).product();
    fact / (r as f64).powi(r as i32 - 1)
}

/// The known target for `spec` at uniformity `r`, if there is one.
pub fn target(spec: &EstimatorSpec, r: usize) -> Option<Target> {
    let sharp = |exponent: f64, c: f64| Some(Target { exponent, constant: Some(c) });
    let growth = |exponent: f64| Some(Target { exponent, constant: None });
    match spec.name.as_str() {
        "z-interval" => sharp(1.0, 0.5),
        "z-crossing" | "z-nesting" => sharp(0.5, 2f64.sqrt()),
        "z-disjoint" => sharp(0.5, 1.0 / std::f64::consts::PI.sqrt()),
        "rpartite-exact" | "rpartite-equi" => sharp(1.0, r_partite_constant(r)),
        "goodedges" => growth(1.0 / (r as f64 - 1.0)),
        "clique-exact" => {
            let set = PatternSet::parse_spec(spec.patterns.as_deref()?).ok()?;
            let rf = r as f64;
            let partite = r_partite_set(r).ok()?;
            if set == partite {
                return sharp(1.0, r_partite_constant(r));
            }
            if set.is_subset(&partite) && set.len() + 1 == partite.len() && r >= 2 {
                return growth(1.0 - 1.0 / rf);
            }
            let ps: Vec<_> = set.iter().copied().collect();
            match ps.as_slice() {
                [p] if p.is_collectable() => growth(1.0 / rf),
                [p] if !p.is_collectable() => growth(0.0),
                [p, q] => match classify_pair(p, q).ok()? {
                    PairClass::Harmonious => growth(1.0 / (rf - 1.0)),
                    PairClass::Mismatch => growth(1.0 / rf),
                    PairClass::BothNonCollectable => growth(0.0),
                    PairClass::Identical => None,
                },
                _ => None,
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(estimators: Vec<EstimatorSpec>, grid: Vec<usize>) -> ExperimentConfig {
        ExperimentConfig { r: 2, n_grid: grid, samples: 3, seed: 5, estimators, record_timing: false }
    }

    #[test]
    fn records_are_ordered_and_reproducible() {
        let c = cfg(vec![EstimatorSpec::named("z-interval"), EstimatorSpec::named("z-disjoint")], vec![40, 20]);
        let a = run_experiment(&c, None).unwrap();
        assert_eq!(a.len(), 12);
        assert_eq!((a[0].n, a[0].sample, a[0].estimator.as_str()), (20, 0, "z-interval"));
        assert_eq!((a[1].n, a[1].sample, a[1].estimator.as_str()), (20, 0, "z-disjoint"));
        let b = run_experiment(&c, Some(1)).unwrap();
        let (mut x, mut y) = (Vec::new(), Vec::new());
        write_csv(&a, &mut x).unwrap();
        write_csv(&b, &mut y).unwrap();
        assert_eq!(x, y);
        let text = String::from_utf8(x).unwrap();
        assert!(text.starts_with("r,n,sample,estimator,value,elapsed_s,stream_id\n"));
    }

    #[test]
    fn config_errors() {
        assert!(run_experiment(&cfg(vec![EstimatorSpec::named("z-interval")], vec![]), None).is_err());
        let bad = cfg(vec![EstimatorSpec::named("goodedges")], vec![10]);
        assert!(matches!(run_experiment(&bad, None), Err(Error::EstimatorUnavailable(_))));
        let bad = cfg(vec![EstimatorSpec::named("nope")], vec![10]);
        assert!(matches!(run_experiment(&bad, None), Err(Error::EstimatorUnavailable(_))));
    }

    #[test]
    fn config_json() {
        let c = ExperimentConfig::from_json(
            r#"{"r":3,"n_grid":[10],"samples":2,"seed":1,
                "estimators":[{"name":"clique-exact","patterns":"AAABBB","params":{"max_edges":50}}]}"#,
        )
        .unwrap();
        assert!(c.record_timing);
        assert_eq!(c.estimators[0].label(), "clique-exact:AAABBB");
        let recs = run_experiment(&c, None).unwrap();
        assert!(recs.iter().all(|r| r.value >= 1.0 && r.value <= 10.0));
    }

    #[test]
    fn fit_recovers_power_law() {
        let recs: Vec<ExperimentRecord> = [100usize, 200, 400, 800]
            .iter()
            .map(|&n| ExperimentRecord {
                r: 2,
                n,
                sample: 0,
                estimator: "x".into(),
                value: 3.0 * (n as f64).sqrt(),
                elapsed_s: 0.0,
                stream_id: 0,
            })
            .collect();
        let f = fit(&recs, "x", 0.5).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-9);
        assert!((f.constant - 3.0).abs() < 1e-9);
        assert_eq!(fit(&recs[..2], "x", 0.5), Err(Error::GridTooSmall(2)));
    }

    #[test]
    fn targets() {
        let t = target(&EstimatorSpec::named("rpartite-equi"), 3).unwrap();
        assert!((t.constant.unwrap() - 2.0 / 9.0).abs() < 1e-12);
        let t = target(&EstimatorSpec::with_patterns("clique-exact", "ABABAB,ABBABA"), 3).unwrap();
        assert_eq!(t.exponent, 0.5);
        let t = target(&EstimatorSpec::with_patterns("clique-exact", "AAABBB,ABABAB"), 3).unwrap();
        assert!((t.exponent - 1.0 / 3.0).abs() < 1e-12);
    }
}
