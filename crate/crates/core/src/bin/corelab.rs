// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use corelab::harness::{report, run_experiment, ExperimentConfig, RunOptions};
use corelab::linalg::{
    fraction_free_rank, random_prime, rank_gf2, rank_mod_p, rational_rank, BitMatrix, Certainty,
    ModMatrix, RankCertificate, RankMethod, DEFAULT_FRACTION_FREE_CAP,
};
use corelab::rng::{tag_id, RngStream};
use corelab::structure::{
    build_q, check_ukp_f2, expansion1_falsify, expansion2_check, goodness, joined_pairs,
};
use corelab::theory::{cw_mod, delta_star, rank_analysis, TruncPoisson, BETA_FLOOR};
use corelab::{anticonc, graph, samplers, Graph, Result, VertexSet};

const USAGE: u8 = 1;
const THRESHOLD: u8 = 2;

#[derive(Parser)]
#[command(
    name = "corelab",
    version,
    about = "Exact-rank experiments on random graphs and their k-cores"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Gnp,
    Gnm,
    Config,
    Core,
}

#[derive(Clone, Copy, ValueEnum)]
enum Field {
    Gf2,
    Modp,
    Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Good,
    Ukp,
    Exp1,
    Exp2,
    Joined,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnticoncMode {
    Linear,
    Quad,
}

#[derive(Clone, Copy, ValueEnum)]
enum Vector {
    Balanced,
    Ramp,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a random graph and print it as an edge list.
    Sample {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mean degree for `gnp` and `core` (edge probability lambda/n).
        #[arg(long, default_value_t = 10.0)]
        lambda: f64,
        /// Edge count for `gnm`, and for `config` when no degrees are given.
        #[arg(long)]
        m: Option<usize>,
        /// Minimum degree for `core`, and for truncated-Poisson `config` degrees.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Comma-separated degree sequence for `config`.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
    },
    /// Print the k-core of an edge list, relabeled to 0..|core|.
    Kcore {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Print a JSON summary with the host ids instead of the edge list.
        #[arg(long)]
        summary: bool,
    },
    /// Rank of an adjacency matrix as a JSON certificate.
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        field: Field,
        /// Modulus for `modp`; drawn from the seed when omitted.
        #[arg(long)]
        prime: Option<u64>,
        /// Number of random primes for `rational`.
        #[arg(long, default_value_t = 3)]
        primes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Degree-law constants and the rank-analysis verdicts.
    Theory {
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Mean degree of the core.
        #[arg(long)]
        c: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long = "Delta", alias = "delta")]
        delta: usize,
        /// Also search thresholds up to this value for the smallest one
        /// from which every verdict holds.
        #[arg(long)]
        search_max: Option<usize>,
    },
    /// Structural checks on an edge list, as JSON.
    Check {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        theta: f64,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, default_value_t = 6)]
        r: u32,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Comma-separated vertex subset; all vertices when omitted.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
    /// Largest slice atoms across slice sizes, as CSV.
    Anticonc {
        #[arg(long, value_enum)]
        mode: AnticoncMode,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
        d: Vec<usize>,
        /// Linear test vector.
        #[arg(long, value_enum, default_value = "balanced")]
        vector: Vector,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Configured experiment campaigns.
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Run (or resume) the experiment described by a config file. Output
    /// goes under `CORELAB_OUTPUT_DIR`, using `CORELAB_THREADS` workers.
    Run { config: PathBuf },
    /// Summarize every records file under a results directory.
    Report {
        dir: PathBuf,
        /// Where to write the tables; defaults to `<dir>/report`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_graph(path: &Path) -> Result<Graph> {
    if path == Path::new("-") {
        graph::read_edge_list(io::stdin().lock())
    } else {
        graph::read_edge_list(BufReader::new(File::open(path)?))
    }
}

fn subset(g: &Graph, set: Option<Vec<usize>>) -> VertexSet {
    set.map_or_else(|| g.vertices(), VertexSet::new)
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}

fn exact(
    rows: usize,
    cols: usize,
    rank: usize,
    method: RankMethod,
    primes: Vec<u64>,
) -> RankCertificate {
    RankCertificate {
        rows,
        cols,
        rank,
        method,
        primes,
        certainty: Certainty::Exact,
        failure_bound: 0.0,
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Sample {
            model,
            n,
            seed,
            lambda,
            m,
            k,
            degrees,
        } => {
            let mut rng = RngStream::new(seed, tag_id("sample"));
            let need_m =
                || m.ok_or_else(|| corelab::Error::InvalidArgument("--m is required".into()));
            let g = match model {
                Model::Gnp => {
                    samplers::gnp(n, (lambda / n.max(1) as f64).clamp(0.0, 1.0), &mut rng)
                }
                Model::Gnm => samplers::gnm(n, need_m()?, &mut rng)?,
                Model::Config => {
                    let d = match degrees {
                        Some(d) if d.len() == n => d,
                        Some(d) => {
                            return Err(corelab::Error::InvalidArgument(format!(
                                "{} degrees given for n = {n}",
                                d.len()
                            )))
                        }
                        None => {
                            samplers::truncated_poisson_degrees(n, need_m()?, k, &mut rng, 100 * n)?
                        }
                    };
                    samplers::uniform_graph_with_degrees(
                        &d,
                        &mut rng,
                        samplers::DEFAULT_MAX_REJECTIONS,
                    )?
                }
                Model::Core => samplers::sample_core(n, lambda, k, &mut rng).core,
            };
            graph::write_edge_list(&g, BufWriter::new(io::stdout().lock()))?;
        }
        Cmd::Kcore { input, k, summary } => {
            let g = load_graph(&input)?;
            let (vertices, sub) = graph::k_core(&g, k);
            if summary {
                print_json(&json!({
                    "n": g.n(),
                    "m": g.m(),
                    "k": k,
                    "core_size": vertices.len(),
                    "core_edges": sub.graph.m(),
                    "vertices": vertices,
                }))?;
            } else {
                graph::write_edge_list(&sub.graph, BufWriter::new(io::stdout().lock()))?;
            }
        }
        Cmd::Rank {
            input,
            field,
            prime,
            primes,
            seed,
        } => {
            let g = load_graph(&input)?;
            let n = g.n();
            let mut rng = RngStream::new(seed, tag_id("rank"));
            let cert = match field {
                Field::Gf2 => exact(
                    n,
                    n,
                    rank_gf2(&BitMatrix::adjacency(&g)),
                    RankMethod::Gf2,
                    Vec::new(),
                ),
                Field::Modp => {
                    let p = prime.unwrap_or_else(|| random_prime(&mut rng));
                    let mut a = ModMatrix::zeros(n, n, p)?;
                    for (u, v) in g.edges() {
                        a.set(u, v, 1);
                        a.set(v, u, 1);
                    }
                    exact(n, n, rank_mod_p(&a), RankMethod::ModP, vec![p])
                }
                Field::Rational => {
                    if primes == 0 {
                        return Err(corelab::Error::InvalidArgument(
                            "--primes must be positive".into(),
                        ));
                    }
                    let cert = rational_rank(&g, primes, &mut rng);
                    if cert.certainty != Certainty::Exact && n <= DEFAULT_FRACTION_FREE_CAP {
                        let r = fraction_free_rank(&g, DEFAULT_FRACTION_FREE_CAP)?;
                        exact(n, n, r, RankMethod::FractionFree, Vec::new())
                    } else {
                        cert
                    }
                }
            };
            print_json(&cert)?;
        }
        Cmd::Theory {
            k,
            c,
            alpha,
            delta,
            search_max,
        } => {
            let tp = TruncPoisson::for_mean_degree(k, c)?;
            let q = cw_mod(&tp, alpha, delta, c)?;
            if q.beta < BETA_FLOOR {
                return Err(corelab::Error::InvalidArgument(format!(
                    "beta = {:e} is below {BETA_FLOOR:e} at Delta = {delta}; lower Delta",
                    q.beta
                )));
            }
            let ra = rank_analysis(k, c, alpha, delta)?;
            let head = |xs: &[f64]| xs.iter().take(delta + 2).copied().collect::<Vec<_>>();
            let rho: Vec<f64> = (0..delta + 2).map(|t| tp.rho(t)).collect();
            let mut out = json!({
                "k": k,
                "c": c,
                "alpha": alpha,
                "Delta": delta,
                "lambda": tp.lambda,
                "beta": ra.beta,
                "gamma": ra.gamma,
                "rho": rho,
                "delta": head(&q.delta),
                "delta_prime": head(&q.delta_prime),
                "mu": head(q.mu().as_slice()),
                "m_mu_at_0": ra.m_mu_at_0,
                "max_m_mu": ra.sup_m_mu,
                "argmax_m_mu": ra.argmax,
                "sup_m_mu_minus_m_nu": ra.sup_m_diff,
                "sup_within_beta_16": ra.sup_within_beta_16(),
                "diff_within_beta_32": ra.diff_within_beta_32(),
                "nu_log_concave": ra.log_concave.passes,
            });
            if let Some(max) = search_max {
                let ds = delta_star(k, c, alpha, max, 1e-12)?;
                out["delta_star"] = json!(ds.delta_star);
                out["delta_max_resolvable"] = json!(ds.delta_max);
            }
            print_json(&out)?;
        }
        Cmd::Check {
            which,
            input,
            theta,
            eta,
            ell,
            r,
            budget,
            set,
        } => {
            let g = load_graph(&input)?;
            match which {
                Which::Good => print_json(&goodness(&g, &subset(&g, set), theta, eta)?)?,
                Which::Ukp => {
                    let u = subset(&g, set);
                    let h = g.induced(&u).graph;
                    let q = build_q(&h, &h.vertices())?;
                    print_json(&check_ukp_f2(&BitMatrix::adjacency(&h), ell, &q, eta)?)?;
                }
                Which::Exp1 => print_json(&expansion1_falsify(&g, eta, theta, budget))?,
                Which::Exp2 => print_json(&expansion2_check(&g, eta, budget)?)?,
                Which::Joined => {
                    let pairs = joined_pairs(&g, &subset(&g, set), r)?;
                    print_json(&json!({ "r": r, "count": pairs.len(), "pairs": pairs }))?;
                }
            }
        }
        Cmd::Anticonc {
            mode,
            d,
            vector,
            trials,
            seed,
        } => {
            let mut rng = RngStream::new(seed, tag_id("anticonc"));
            let rows = match (mode, vector) {
                (AnticoncMode::Linear, Vector::Balanced) => anticonc::balanced_linear_rate(&d)?,
                (AnticoncMode::Linear, Vector::Ramp) => {
                    anticonc::ramp_linear_rate(&d, trials, &mut rng)?
                }
                (AnticoncMode::Quad, _) => anticonc::quadratic_rate(&d, trials, &mut rng)?,
            };
            let mut out = BufWriter::new(io::stdout().lock());
            writeln!(out, "d,atom,normalization,ci_lo,ci_hi,exact")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.d, r.atom, r.normalized, r.ci_lo, r.ci_hi, r.exact
                )?;
            }
            out.flush()?;
        }
        Cmd::Experiment { cmd } => match cmd {
            ExperimentCmd::Run { config } => {
                let cfg = ExperimentConfig::load(&config)?;
                let summary = run_experiment(&cfg, &RunOptions::from_env()?)?;
                println!(
                    "{} {} trials={} dir={}",
                    summary.experiment,
                    summary.config_hash,
                    summary.records,
                    summary.dir.display()
                );
                for v in &summary.verdicts {
                    let mark = if v.passed { "PASS" } else { "FAIL" };
                    println!(
                        "{mark} {} = {} (threshold {})",
                        v.name, v.value, v.threshold
                    );
                }
                if !summary.passed() {
                    return Ok(THRESHOLD);
                }
            }
            ExperimentCmd::Report { dir, out } => {
                let out = out.unwrap_or_else(|| dir.join("report"));
                let rep = report(&dir, &out)?;
                for issue in &rep.issues {
                    eprintln!(
                        "skipped {}:{}: {}",
                        issue.file.display(),
                        issue.line,
                        issue.msg
                    );
                }
                if rep.tables.is_empty() {
                    return Err(corelab::Error::InvalidArgument(format!(
                        "no records under {}",
                        dir.display()
                    )));
                }
                for t in &rep.tables {
                    println!("{}", t.display());
                }
            }
        },
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE)
        }
    }
}
