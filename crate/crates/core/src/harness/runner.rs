// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::registry::{normalize, Plan, RunSummary};
use super::summary::{singularity_table, summarize, write_singularity_csv, write_summary_csv};
use super::TrialRecord;
use crate::error::{Error, Result};
use crate::rng::{tag_id, RngStream};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const CONFIG_FILE: &str = "config.txt";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const VERDICTS_FILE: &str = "verdicts.csv";
pub const SINGULARITY_FILE: &str = "singularity.csv";
/// Per-trial wall times; kept apart so the records stay byte-reproducible.
pub const TIMINGS_FILE: &str = "timings.csv";

/// Where results go and how many worker threads to use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub output_root: PathBuf,
    pub threads: usize,
}

impl RunOptions {
    /// `CORELAB_OUTPUT_DIR` (default `results`) and `CORELAB_THREADS`
    /// (default: all cores).
    pub fn from_env() -> Result<Self> {
        let output_root = std::env::var_os("CORELAB_OUTPUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("results"));
        let threads = match std::env::var("CORELAB_THREADS") {
            Ok(s) => s.parse().ok().filter(|&t: &usize| t > 0).ok_or_else(|| {
                Error::invalid(format!("CORELAB_THREADS = `{s}` is not a positive integer"))
            })?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(RunOptions {
            output_root,
            threads,
        })
    }
}

/// Results directory `<root>/<experiment>/<config hash>`.
pub fn results_dir(root: &Path, cfg: &ExperimentConfig) -> Result<PathBuf> {
    let cfg = normalize(cfg)?;
    Ok(root.join(cfg.name()?).join(cfg.hash()))
}

fn conflict(dir: &Path, msg: impl Into<String>) -> Error {
    Error::ResumeConflict {
        dir: dir.display().to_string(),
        msg: msg.into(),
    }
}

/// Reads the completed prefix of a records file. A final line without a
/// newline is an interrupted write and is cut off.
fn load_prefix(dir: &Path, path: &Path, hash: &str) -> Result<Vec<TrialRecord>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let complete = text.rfind('\n').map_or(0, |i| i + 1);
    if complete < text.len() {
        let f = OpenOptions::new().write(true).open(path)?;
        f.set_len(complete as u64)?;
    }
    let mut out = Vec::new();
    for (i, line) in text[..complete].lines().enumerate() {
        let r: TrialRecord = serde_json::from_str(line)
            .map_err(|e| conflict(dir, format!("line {} of {RECORDS_FILE}: {e}", i + 1)))?;
        if r.config_hash != hash {
            return Err(conflict(
                dir,
                format!("line {} has config hash {}", i + 1, r.config_hash),
            ));
        }
        if r.trial != i as u64 {
            return Err(conflict(
                dir,
                format!("line {} holds trial {}", i + 1, r.trial),
            ));
        }
        out.push(r);
    }
    Ok(out)
}

/// Runs every trial not already on disk, then writes the summary files.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    let cfg = normalize(cfg)?;
    let plan = Plan::from_config(&cfg)?;
    let name = cfg.name()?.to_owned();
    let hash = cfg.hash();
    let seed: u64 = cfg.parsed("experiment.seed")?;
    let trials: u64 = cfg.parsed("experiment.trials")?;
    let dir = opts.output_root.join(&name).join(&hash);
    fs::create_dir_all(&dir)?;

    let config_path = dir.join(CONFIG_FILE);
    match fs::read_to_string(&config_path) {
        Ok(existing) if existing != cfg.canonical() => {
            return Err(conflict(&dir, "stored configuration differs"));
        }
        Ok(_) => {}
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            fs::write(&config_path, cfg.canonical())?
        }
        Err(e) => return Err(e.into()),
    }

    let records_path = dir.join(RECORDS_FILE);
    let mut records = load_prefix(&dir, &records_path, &hash)?;
    let total = trials * plan.grid_len() as u64;
    if records.len() as u64 > total {
        return Err(conflict(
            &dir,
            format!(
                "{} records exceed the {total} configured trials",
                records.len()
            ),
        ));
    }

    let stream_id = tag_id(&name);
    let root = RngStream::new(seed, stream_id);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let mut out = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&records_path)?;
    let timings_path = dir.join(TIMINGS_FILE);
    let new_timings = !timings_path.exists();
    let mut timings = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&timings_path)?;
    if new_timings {
        timings.write_all(b"trial,wall_ms\n")?;
    }

    let chunk = (opts.threads.max(1) * 4) as u64;
    let mut next = records.len() as u64;
    while next < total {
        let end = (next + chunk).min(total);
        let batch: Vec<Result<(TrialRecord, f64)>> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map(|i| {
                    let start = Instant::now();
                    let outcome = plan.run_trial(i, trials, &root.child(i))?;
                    if let Some((k, v)) = outcome.metrics.iter().find(|(_, v)| !v.is_finite()) {
                        return Err(Error::invalid(format!(
                            "trial {i}: metric `{k}` = {v} is not finite"
                        )));
                    }
                    let rec = TrialRecord {
                        experiment: name.clone(),
                        config_hash: hash.clone(),
                        trial: i,
                        seed,
                        stream_id,
                        metrics: outcome.metrics,
                        tags: outcome.tags,
                    };
                    Ok((rec, start.elapsed().as_secs_f64() * 1e3))
                })
                .collect()
        });
        for item in batch {
            let (rec, ms) = item?;
            let mut line = serde_json::to_string(&rec)?;
            line.push('\n');
            out.write_all(line.as_bytes())?;
            writeln!(timings, "{},{ms:.3}", rec.trial)?;
            records.push(rec);
        }
        out.flush()?;
        next = end;
    }

    let summary = summarize(&name, &records);
    write_summary_csv(&summary, File::create(dir.join(SUMMARY_FILE))?)?;
    let verdicts = if records.is_empty() {
        Vec::new()
    } else {
        plan.verdicts(&records)
    };
    let mut vf = File::create(dir.join(VERDICTS_FILE))?;
    writeln!(vf, "verdict,value,threshold,passed")?;
    for v in &verdicts {
        writeln!(vf, "{},{},{},{}", v.name, v.value, v.threshold, v.passed)?;
    }
    if name == "main-theorem" {
        write_singularity_csv(
            &singularity_table(&records),
            File::create(dir.join(SINGULARITY_FILE))?,
        )?;
    }
    Ok(RunSummary {
        experiment: name,
        config_hash: hash,
        dir,
        records: records.len(),
        summary,
        verdicts,
    })
}

/// A record line that could not be read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportIssue {
    pub file: PathBuf,
    pub line: usize,
    pub msg: String,
}

/// Reads every `records.jsonl` under `dir`, skipping unreadable lines.
pub fn read_records(dir: &Path) -> Result<(Vec<TrialRecord>, Vec<ReportIssue>)> {
    let mut files = Vec::new();
    collect_record_files(dir, &mut files)?;
    files.sort();
    let mut records = Vec::new();
    let mut issues = Vec::new();
    for file in files {
        for (i, line) in BufReader::new(File::open(&file)?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<TrialRecord>(&line) {
                Ok(r) => records.push(r),
                Err(e) => issues.push(ReportIssue {
                    file: file.clone(),
                    line: i + 1,
                    msg: e.to_string(),
                }),
            }
        }
    }
    Ok((records, issues))
}

fn collect_record_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if dir.is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_record_files(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == RECORDS_FILE) {
            out.push(path);
        }
    }
    Ok(())
}

/// Plot-ready tables written by [`report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportOutput {
    pub tables: Vec<PathBuf>,
    pub issues: Vec<ReportIssue>,
}

/// Writes one summary table per `(experiment, config hash)` found under
/// `dir` into `out_dir`, plus the singularity table for main-theorem runs.
pub fn report(dir: &Path, out_dir: &Path) -> Result<ReportOutput> {
    let (records, issues) = read_records(dir)?;
    let mut groups: std::collections::BTreeMap<(String, String), Vec<TrialRecord>> =
        Default::default();
    for r in records {
        groups
            .entry((r.experiment.clone(), r.config_hash.clone()))
            .or_default()
            .push(r);
    }
    fs::create_dir_all(out_dir)?;
    let mut tables = Vec::new();
    for ((exp, hash), mut recs) in groups {
        recs.sort_by_key(|r| r.trial);
        let path = out_dir.join(format!("{exp}-{hash}.csv"));
        write_summary_csv(&summarize(&exp, &recs), File::create(&path)?)?;
        tables.push(path);
        if exp == "main-theorem" {
            let path = out_dir.join(format!("{exp}-{hash}-singularity.csv"));
            write_singularity_csv(&singularity_table(&recs), File::create(&path)?)?;
            tables.push(path);
        }
    }
    Ok(ReportOutput { tables, issues })
}
