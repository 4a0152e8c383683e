// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;

use corelab::harness::{
    run_experiment, ExperimentConfig, RunOptions, RECORDS_FILE, SINGULARITY_FILE, SUMMARY_FILE,
};

const CONFIGS: [&str; 4] = [
    "[experiment]\nname = main-theorem\nseed = 3\ntrials = 4\n[graph]\nn = 60,120\n",
    "[experiment]\nname = corank\nseed = 3\ntrials = 5\n[graph]\nn = 300\n[extraction]\ndelta = 10\n",
    "[experiment]\nname = random-walk\nseed = 3\ntrials = 3\n[walk]\np = 0.001,0.01,0.1\nwalks = 500\nsteps = 20\nx0 = 5\n",
    "[experiment]\nname = boost\nseed = 3\ntrials = 5\n[graph]\nn = 300\n[structure]\ncheck_ukp = true\n",
];

fn run(root: &Path, text: &str, threads: usize) -> (Vec<u8>, Vec<u8>, std::path::PathBuf) {
    let cfg = ExperimentConfig::parse(text).unwrap();
    let s = run_experiment(
        &cfg,
        &RunOptions {
            output_root: root.to_path_buf(),
            threads,
        },
    )
    .unwrap();
    (
        fs::read(s.dir.join(RECORDS_FILE)).unwrap(),
        fs::read(s.dir.join(SUMMARY_FILE)).unwrap(),
        s.dir,
    )
}

#[test]
fn records_are_byte_identical_across_thread_counts() {
    for text in CONFIGS {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let (ra, sa, _) = run(a.path(), text, 1);
        let (rb, sb, _) = run(b.path(), text, 5);
        assert!(!ra.is_empty());
        assert_eq!(ra, rb, "{text}");
        assert_eq!(sa, sb, "{text}");
    }
}

#[test]
fn resuming_from_any_prefix_reproduces_the_records() {
    let text = CONFIGS[0];
    let root = tempfile::tempdir().unwrap();
    let (full, summary, dir) = run(root.path(), text, 2);
    let table = fs::read(dir.join(SINGULARITY_FILE)).unwrap();
    let ends: Vec<usize> = full
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == b'\n')
        .map(|(i, _)| i + 1)
        .collect();
    for cut in [0, ends[0], ends[2] - 5, ends[5]] {
        fs::write(dir.join(RECORDS_FILE), &full[..cut]).unwrap();
        let (again, s, _) = run(root.path(), text, 3);
        assert_eq!(again, full, "cut at byte {cut}");
        assert_eq!(s, summary);
        assert_eq!(fs::read(dir.join(SINGULARITY_FILE)).unwrap(), table);
    }
}

#[test]
fn main_theorem_table_has_one_row_per_n() {
    let root = tempfile::tempdir().unwrap();
    let (_, _, dir) = run(root.path(), CONFIGS[0], 1);
    let table = fs::read_to_string(dir.join(SINGULARITY_FILE)).unwrap();
    let mut lines = table.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("n,singular_frac,ci_lo,ci_hi,certainty_tag_counts,trials"));
    let ns: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["60", "120"]);
}
