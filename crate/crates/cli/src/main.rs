use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ordmatch::census::{count_cliques, expected_clique_count, trace_injectivity, z_max_deterministic};
use ordmatch::cliques::{solve, ExactSolverConfig, Solver};
use ordmatch::constructions::{good_edge_census, planted_h_frequency, GoodEdgeParams};
use ordmatch::lab::{run_experiment, write_csv, write_json, ExperimentConfig};
use ordmatch::sampler::{rng_for, sample};
use ordmatch::{OrderedMatching, PatternSet};

#[derive(Parser)]
#[command(name = "ordmatch", version, about = "Random ordered matchings: sampling, cliques, census and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Word,
    Intword,
    Edges,
    Trace,
}

#[derive(Subcommand)]
enum Command {
    /// Draw uniform random r-matchings of size n.
    Sample {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Word)]
        format: Format,
    },
    /// Largest clique of a matching read from FILE ("-" for stdin).
    Clique {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        patterns: String,
        #[arg(long, default_value = "auto")]
        solver: String,
        /// Edge cap for the exact branch-and-bound solver.
        #[arg(long)]
        max_edges: Option<usize>,
    },
    /// Count P-cliques on 1..=rk.
    Census {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        patterns: String,
    },
    /// Largest P-clique size over all matchings, searched up to a cap.
    Zmax {
        #[arg(long)]
        patterns: String,
        #[arg(long, default_value_t = 6)]
        cap: usize,
    },
    /// Exact expected number of size-k P-cliques in a random r-matching of size n.
    Expected {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        patterns: String,
    },
    /// Trace injectivity on P-cliques of size k.
    Traces {
        #[arg(long)]
        patterns: String,
        #[arg(long)]
        k: usize,
        /// Exit with status 1 when two cliques share a trace.
        #[arg(long)]
        check_injective: bool,
    },
    /// Fraction of random matchings containing a copy of H.
    Plant {
        #[arg(long)]
        h_word: String,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Good-edge counts and separated sets on random matchings.
    Goodedges {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        r0: usize,
        #[arg(long, default_value_t = 10)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a Monte Carlo grid from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn patterns(spec: &str) -> Result<PatternSet> {
    PatternSet::parse_spec(spec).with_context(|| format!("bad pattern set {spec:?}"))
}

fn read_input(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn render(m: &OrderedMatching, format: Format) -> Result<String> {
    Ok(match format {
        Format::Word => m.to_word()?.to_string(),
        Format::Intword => m.to_int_word()?,
        Format::Edges => m.to_edge_list(),
        Format::Trace => m.trace()?.to_string(),
    })
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Sample { r, n, count, seed, format } => {
            for s in 0..count {
                let m = sample(r, n, &mut rng_for(seed, r, n, s))?;
                writeln!(out, "{}", render(&m, format)?)?;
            }
        }
        Command::Clique { input, patterns: spec, solver, max_edges } => {
            let m = OrderedMatching::parse_any(&read_input(&input)?)?;
            let set = patterns(&spec)?;
            let solver: Solver = solver.parse()?;
            let mut config = ExactSolverConfig::default();
            if let Some(cap) = max_edges {
                config.max_edges = cap;
            }
            let res = solve(&m, &set, solver, &config)?;
            writeln!(out, "{}", serde_json::to_string(&res)?)?;
        }
        Command::Census { r, k, patterns: spec } => {
            let set = patterns(&spec)?;
            if set.r() != r {
                bail!("patterns have r = {}, expected {r}", set.r());
            }
            writeln!(out, "{}", serde_json::to_string(&count_cliques(&set, k)?)?)?;
        }
        Command::Zmax { patterns: spec, cap } => {
            let z = z_max_deterministic(&patterns(&spec)?, cap)?;
            writeln!(out, "{}", serde_json::to_string(&z)?)?;
        }
        Command::Expected { r, n, k, patterns: spec } => {
            let e = expected_clique_count(r, n, k, &patterns(&spec)?)?;
            let decimal = num_to_f64(&e);
            writeln!(out, "{e}\t{decimal:e}")?;
        }
        Command::Traces { patterns: spec, k, check_injective } => {
            let rep = trace_injectivity(&patterns(&spec)?, k)?;
            writeln!(out, "{}", serde_json::to_string(&rep)?)?;
            if check_injective && !rep.injective {
                out.flush()?;
                std::process::exit(1);
            }
        }
        Command::Plant { h_word, r, n, samples, seed } => {
            let h = OrderedMatching::parse_any(&h_word)?;
            let f = planted_h_frequency(&h, r, n, samples, seed)?;
            writeln!(out, "{}", json!({ "h": h.to_string(), "r": r, "n": n, "samples": samples, "frequency": f }))?;
        }
        Command::Goodedges { r, n, r0, samples, seed } => {
            let params = GoodEdgeParams::default_for(r, n, r0)?;
            for s in 0..samples {
                let m = sample(r, n, &mut rng_for(seed, r, n, s))?;
                let rep = good_edge_census(&m, &params)?;
                let line = json!({
                    "sample": s, "k": params.k, "l": params.l,
                    "y": rep.y, "z": rep.z, "separated": rep.separated.len(),
                });
                writeln!(out, "{line}")?;
            }
        }
        Command::Experiment { config, out: csv_path, json, threads } => {
            let config = ExperimentConfig::from_json(&read_input(&config)?)?;
            let records = run_experiment(&config, threads)?;
            let csv = File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
            write_csv(&records, BufWriter::new(csv))?;
            if let Some(path) = json {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_json(&records, BufWriter::new(f))?;
            }
            writeln!(out, "{} records written to {}", records.len(), csv_path.display())?;
        }
    }
    Ok(())
}

fn num_to_f64(q: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}
