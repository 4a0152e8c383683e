// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks at full scale. Prints one line per
//! criterion and fails if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::Rng;

use corelab::anticonc::{
    balanced_linear_rate, coupled_slice_sampler, rational, slice_atom_exact, slice_atom_mc,
    slice_law_exact, SliceSpec,
};
use corelab::harness::{
    run_experiment, ExperimentConfig, RunOptions, RunSummary, RECORDS_FILE, SUMMARY_FILE,
};
use corelab::linalg::{
    fraction_free_rank, random_prime, rank_gf2, rank_mod_p, BitMatrix, IntMatrix, ModMatrix,
};
use corelab::pipeline::{rotate_core_exhaustive, uniformity_test_extraction};
use corelab::rng::RngStream;
use corelab::stats::{chi_square_uniform, wilson};
use corelab::theory::{
    cw_mod, delta_star, max_m_with_grid, rank_analysis, TruncPoisson, MAX_M_GRID,
};

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn(&Path) -> Outcome,
}

fn mins(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn campaign(root: &Path, text: &str) -> Result<RunSummary, String> {
    let cfg = ExperimentConfig::parse(text).map_err(|e| e.to_string())?;
    run_experiment(
        &cfg,
        &RunOptions {
            output_root: root.to_path_buf(),
            threads: threads(),
        },
    )
    .map_err(|e| e.to_string())
}

fn verdict_text(s: &RunSummary) -> String {
    s.verdicts
        .iter()
        .map(|v| {
            format!(
                "{}={:.4}{}{}",
                v.name,
                v.value,
                if v.passed { ">=" } else { "<" },
                v.threshold
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Single-bit Gaussian elimination over GF(2).
fn naive_rank_gf2(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x & 1 == 1).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c]) else {
            continue;
        };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && m[i][c] {
                for j in 0..cols {
                    let b = m[rank][j];
                    m[i][j] ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank_oracles(_: &Path) -> Outcome {
    let mut rng = RngStream::new(1, 1);
    let (mut disagreements, mut singular) = (0, 0);
    let e = |e: corelab::Error| e.to_string();
    for _ in 0..1000 {
        let n = rng.random_range(1..=40);
        let density: f64 = rng.random_range(0.02..0.6);
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let b = rng.random_bool(density) as i64;
                rows[i][j] = b;
                rows[j][i] = b;
            }
        }
        let exact = fraction_free_rank(&IntMatrix::from_rows(&rows).map_err(e)?, 64).map_err(e)?;
        singular += (exact < n) as usize;
        let bits: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x == 1).collect())
            .collect();
        let r2 = rank_gf2(&BitMatrix::from_rows(&bits));
        let mut ok = r2 == naive_rank_gf2(&rows)
            && r2 == rank_mod_p(&ModMatrix::from_rows(&rows, 2).map_err(e)?);
        ok &= r2 <= exact;
        let mut primes = Vec::new();
        while primes.len() < 5 {
            let p = random_prime(&mut rng);
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
        for p in primes {
            ok &= rank_mod_p(&ModMatrix::from_rows(&rows, p).map_err(e)?) == exact;
        }
        disagreements += !ok as usize;
    }
    Ok((
        disagreements == 0,
        format!(
            "1000 symmetric matrices (n <= 40, {singular} singular), {disagreements} disagreements"
        ),
    ))
}

fn rotate_core(_: &Path) -> Outcome {
    let r = rotate_core_exhaustive(7, 3).map_err(|e| e.to_string())?;
    Ok((
        r.uniform && r.graphs == 1 << 21,
        format!(
            "{} graphs, {} (V, m) classes, {} non-uniform",
            r.graphs, r.classes, r.nonuniform_classes
        ),
    ))
}

fn extraction_uniformity(_: &Path) -> Outcome {
    let r = uniformity_test_extraction(7, 3).map_err(|e| e.to_string())?;
    let with_t_prime: usize = r.classes_by_t_prime.iter().skip(1).sum();
    Ok((
        r.passed,
        format!(
            "{} graphs, {} instances, {} classes with nonempty T', {} violations",
            r.graphs, r.instances, with_t_prime, r.violations
        ),
    ))
}

fn degree_laws(root: &Path) -> Outcome {
    let s = campaign(
        root,
        "[experiment]\nname = degree-law\nseed = 4\ntrials = 50\n\
         [graph]\nn = 100000\nlambda = 10\nk = 3\n\
         [extraction]\nalpha = 0.1\ndelta = 20\n\
         [acceptance]\ntv_max = 0.02\nmin_pass_fraction = 0.96\n",
    )?;
    Ok((s.passed() && s.records == 50, verdict_text(&s)))
}

fn bls_functional(_: &Path) -> Outcome {
    let (k, c, alpha) = (3, 4.0, 0.05);
    let e = |e: corelab::Error| e.to_string();
    let ds = delta_star(k, c, alpha, 100, 1e-12).map_err(e)?;
    let Some(d) = ds.delta_star else {
        return Ok((
            false,
            format!(
                "no threshold up to {} satisfies every verdict",
                ds.delta_max
            ),
        ));
    };
    let ra = rank_analysis(k, c, alpha, d).map_err(e)?;
    let mu = cw_mod(
        &TruncPoisson::for_mean_degree(k, c).map_err(e)?,
        alpha,
        d,
        c,
    )
    .map_err(e)?
    .mu();
    let (_, coarse) = max_m_with_grid(&mu, MAX_M_GRID).map_err(e)?;
    let (_, fine) = max_m_with_grid(&mu, 2 * MAX_M_GRID).map_err(e)?;
    let m0 = ra.m_mu_at_0.abs() <= 1e-12 && (ra.m_mu_at_0 - ra.m_mu_at_0_identity).abs() <= 1e-12;
    let stable = (coarse - fine).abs() <= 1e-8;
    Ok((
        m0 && stable && d <= 100 && ra.all_hold(1e-12),
        format!(
            "Delta*={d}, M(0)={:.2e}, max_M={:.3e} (grid change {:.1e}), beta/16 {}, beta/32 {}, log-concave {}",
            ra.m_mu_at_0,
            ra.sup_m_mu,
            (coarse - fine).abs(),
            ra.sup_within_beta_16(),
            ra.diff_within_beta_32(),
            ra.log_concave.passes
        ),
    ))
}

fn corank_bounds(root: &Path) -> Outcome {
    let s = campaign(
        root,
        "[experiment]\nname = corank\nseed = 6\ntrials = 200\n\
         [graph]\nn = 2000\nlambda = 10\nk = 3\n\
         [extraction]\nalpha = 0.1\ndelta = 20\n\
         [acceptance]\nmin_pass_fraction = 0.95\nbls_slack = 0.01\n",
    )?;
    Ok((s.passed() && s.records == 200, verdict_text(&s)))
}

fn main_theorem(root: &Path) -> Outcome {
    let s = campaign(
        root,
        "[experiment]\nname = main-theorem\nseed = 7\ntrials = 200\n\
         [graph]\nn = 500,1000,2000\nlambda = 10\nk = 3\nlambda_whole = 2\n\
         [acceptance]\nmin_separation = 0.5\nmin_whole_singular = 0.95\n",
    )?;
    Ok((s.passed() && s.records == 600, verdict_text(&s)))
}

fn anticoncentration(_: &Path) -> Outcome {
    let mut rng = RngStream::new(8, 8);
    let e = |e: corelab::Error| e.to_string();

    // Calibration: every (vector, target) case against its exact atom, with
    // the confidence level split across cases.
    let mut cases: Vec<(Vec<BigRational>, SliceSpec)> = Vec::new();
    for n in [6usize, 10, 16] {
        for d in [2, n / 2] {
            let spec = SliceSpec::new(n, d).map_err(e)?;
            let ramp: Vec<BigRational> = (1..=n as i64).map(rational).collect();
            let balanced: Vec<BigRational> = (0..n).map(|i| rational((i < n / 2) as i64)).collect();
            let small: Vec<BigRational> =
                (0..n).map(|_| rational(rng.random_range(-3..=3))).collect();
            let halves: Vec<BigRational> = (1..=n as i64)
                .map(|i| BigRational::new(i.into(), 2.into()))
                .collect();
            for v in [ramp, balanced, small, halves] {
                cases.push((v, spec));
            }
        }
    }
    let checks = 2 * cases.len();
    let confidence = 1.0 - 0.01 / checks as f64;
    let trials = 200_000;
    let mut misses = 0;
    for (v, spec) in &cases {
        let law = slice_law_exact(v, *spec).map_err(e)?;
        let modal = law.iter().max_by(|a, b| a.1.cmp(&b.1)).unwrap().0.clone();
        let lowest = law[0].0.clone();
        for target in [modal, lowest] {
            let exact = slice_atom_exact(v, *spec, &target).map_err(e)?;
            let mc = slice_atom_mc(v, *spec, &target, trials, &mut rng).map_err(e)?;
            let ci = wilson(mc.successes, mc.trials, confidence);
            let p = num_traits::ToPrimitive::to_f64(&exact).unwrap();
            misses += !(ci.ci_lo <= p && p <= ci.ci_hi) as usize;
        }
    }

    let spec = SliceSpec::new(8, 3).map_err(e)?;
    let mut index = std::collections::HashMap::new();
    let mut counts = Vec::new();
    for _ in 0..1_000_000 {
        let x = coupled_slice_sampler(spec, &mut rng).map_err(e)?;
        let mask = x
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, &b)| m | ((b as u32) << i));
        let next = index.len();
        let slot = *index.entry(mask).or_insert(next);
        if slot == counts.len() {
            counts.push(0u64);
        }
        counts[slot] += 1;
    }
    let chi = chi_square_uniform(&counts);
    let chi_ok = counts.len() == 56 && chi.p_value >= 0.001;

    let rows = balanced_linear_rate(&(4..=64).collect::<Vec<_>>()).map_err(e)?;
    let hi = rows.iter().map(|r| r.normalized).fold(f64::MIN, f64::max);
    let lo = rows.iter().map(|r| r.normalized).fold(f64::MAX, f64::min);
    Ok((
        misses == 0 && chi_ok && hi / lo <= 3.0,
        format!(
            "{misses}/{checks} calibration misses, chi-square p={:.4} over {} cells, normalized atom band {:.3}..{:.3} (ratio {:.3})",
            chi.p_value,
            counts.len(),
            lo,
            hi,
            hi / lo
        ),
    ))
}

fn random_walk(root: &Path) -> Outcome {
    let s = campaign(
        root,
        "[experiment]\nname = random-walk\nseed = 9\ntrials = 1\n\
         [walk]\np = 0.001,0.01\nsteps = 100\nx0 = 50\nwalks = 100000\n",
    )?;
    Ok((s.passed() && s.records == 2, verdict_text(&s)))
}

fn boosting(root: &Path) -> Outcome {
    let s = campaign(
        root,
        "[experiment]\nname = boost\nseed = 10\ntrials = 100\n\
         [graph]\nn = 2000\nlambda = 10\nk = 3\n\
         [acceptance]\nmin_success = 0.9\n",
    )?;
    Ok((s.passed() && s.records == 100, verdict_text(&s)))
}

fn determinism(root: &Path) -> Outcome {
    let configs = [
        "[experiment]\nname = degree-law\nseed = 11\ntrials = 8\n[graph]\nn = 20000\n",
        "[experiment]\nname = boost\nseed = 11\ntrials = 8\n[graph]\nn = 400\n",
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for text in configs {
        let cfg = ExperimentConfig::parse(text).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for (run, t) in [1usize, 4, 4].into_iter().enumerate() {
            let dir = root.join(format!("det-{run}"));
            let s = run_experiment(
                &cfg,
                &RunOptions {
                    output_root: dir,
                    threads: t,
                },
            )
            .map_err(|e| e.to_string())?;
            let records = std::fs::read(s.dir.join(RECORDS_FILE)).map_err(|e| e.to_string())?;
            let summary = std::fs::read(s.dir.join(SUMMARY_FILE)).map_err(|e| e.to_string())?;
            outputs.push((records, summary));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        ok &= same && !outputs[0].0.is_empty();
        notes.push(format!(
            "{}: {}",
            cfg.name().unwrap(),
            if same { "identical" } else { "differs" }
        ));
    }
    Ok((ok, format!("threads 1/4/4 rerun, {}", notes.join(", "))))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "rank oracle equivalence",
            limit: mins(1),
            run: rank_oracles,
        },
        Criterion {
            id: 2,
            name: "core law exactness (n=7)",
            limit: mins(10),
            run: rotate_core,
        },
        Criterion {
            id: 3,
            name: "extraction uniformity (|V|<=7)",
            limit: mins(30),
            run: extraction_uniformity,
        },
        Criterion {
            id: 4,
            name: "degree laws (n=1e5)",
            limit: mins(20),
            run: degree_laws,
        },
        Criterion {
            id: 5,
            name: "rank-analysis functional",
            limit: mins(1),
            run: bls_functional,
        },
        Criterion {
            id: 6,
            name: "corank bounds (n=2000)",
            limit: mins(120),
            run: corank_bounds,
        },
        Criterion {
            id: 7,
            name: "core singularity trend",
            limit: mins(180),
            run: main_theorem,
        },
        Criterion {
            id: 8,
            name: "anti-concentration",
            limit: mins(15),
            run: anticoncentration,
        },
        Criterion {
            id: 9,
            name: "adversarial random walk",
            limit: mins(5),
            run: random_walk,
        },
        Criterion {
            id: 10,
            name: "boosting end-to-end",
            limit: mins(120),
            run: boosting,
        },
        Criterion {
            id: 11,
            name: "determinism",
            limit: mins(30),
            run: determinism,
        },
    ];
    let only: Option<Vec<u32>> = std::env::var("CORELAB_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let root = tempfile::tempdir().expect("temporary directory");
    let mut failed = Vec::new();
    for c in &criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&c.id)) {
            continue;
        }
        let start = Instant::now();
        let result = (c.run)(&root.path().join(format!("c{}", c.id)));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok((_, detail)) if elapsed > c.limit => {
                (false, format!("{detail}; over the {:?} limit", c.limit))
            }
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {:>2} {} {}: {detail} [{:.1} s]",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64()
        );
        if !pass {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
