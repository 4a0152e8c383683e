// SPDX-License-Identifier: Apache-2.0

//! Config-driven experiment runs with resumable JSONL output.

mod config;
mod registry;
mod runner;
mod summary;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use config::ExperimentConfig;
pub use registry::{normalize, Plan, RunSummary, Verdict, EXPERIMENTS};
pub use runner::{
    read_records, report, results_dir, run_experiment, ReportIssue, ReportOutput, RunOptions,
    CONFIG_FILE, RECORDS_FILE, SINGULARITY_FILE, SUMMARY_FILE, TIMINGS_FILE, VERDICTS_FILE,
};
pub use summary::{
    singularity_table, summarize, write_singularity_csv, write_summary_csv, SingularityRow,
    Summary, SummaryRow, SUMMARY_CONFIDENCE,
};

/// One line of `records.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: String,
    pub config_hash: String,
    pub trial: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub metrics: BTreeMap<String, f64>,
    pub tags: BTreeMap<String, String>,
}

impl TrialRecord {
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}
