// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::registry::x_axis_of;
use super::TrialRecord;
use crate::error::Result;
use crate::stats::{wilson, Proportion};

/// Confidence level of every interval in summaries and reports.
pub const SUMMARY_CONFIDENCE: f64 = 0.99;

/// One metric aggregated over one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub x: String,
    pub metric: String,
    pub count: usize,
    pub mean: f64,
    /// Wilson bounds, present when every value is 0 or 1.
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub x_axis: String,
    pub rows: Vec<SummaryRow>,
}

fn fmt_x(x: f64) -> String {
    format!("{x}")
}

/// Records grouped by the value of metric `axis`, in increasing order.
pub fn group_by_x<'a>(records: &'a [TrialRecord], axis: &str) -> Vec<(f64, Vec<&'a TrialRecord>)> {
    let mut groups: Vec<(f64, Vec<&TrialRecord>)> = Vec::new();
    for r in records {
        let x = r.metric(axis).unwrap_or(f64::NAN);
        match groups.iter_mut().find(|(g, _)| g.total_cmp(&x).is_eq()) {
            Some((_, v)) => v.push(r),
            None => groups.push((x, vec![r])),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    groups
}

/// Wilson interval for the fraction of records whose `metric` equals 1.
pub fn flag_rate(group: &[&TrialRecord], metric: &str) -> Proportion {
    let k = group
        .iter()
        .filter(|r| r.metric(metric) == Some(1.0))
        .count();
    wilson(k as u64, group.len() as u64, SUMMARY_CONFIDENCE)
}

fn rows_for(x: &str, group: &[&TrialRecord]) -> Vec<SummaryRow> {
    let mut by_metric: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in group {
        for (k, &v) in &r.metrics {
            by_metric.entry(k).or_default().push(v);
        }
    }
    by_metric
        .into_iter()
        .map(|(metric, vals)| {
            let count = vals.len();
            let mean = vals.iter().sum::<f64>() / count as f64;
            let (ci_lo, ci_hi) = if vals.iter().all(|&v| v == 0.0 || v == 1.0) {
                let ones = vals.iter().filter(|&&v| v == 1.0).count();
                let p = wilson(ones as u64, count as u64, SUMMARY_CONFIDENCE);
                (Some(p.ci_lo), Some(p.ci_hi))
            } else {
                (None, None)
            };
            SummaryRow {
                x: x.to_owned(),
                metric: metric.to_owned(),
                count,
                mean,
                ci_lo,
                ci_hi,
            }
        })
        .collect()
}

/// Means and intervals for every metric, per grid point. Trials flagged
/// `empty_core` are left out and counted in an `excluded_empty_core` row,
/// present whenever the records carry that flag.
pub fn summarize(experiment: &str, records: &[TrialRecord]) -> Summary {
    let axis = x_axis_of(experiment);
    let counts_empty =
        experiment != "main-theorem" && records.iter().any(|r| r.metric("empty_core").is_some());
    let kept: Vec<TrialRecord> = records
        .iter()
        .filter(|r| !counts_empty || r.metric("empty_core") != Some(1.0))
        .cloned()
        .collect();
    let mut rows = Vec::new();
    match axis {
        Some(a) => {
            for (x, group) in group_by_x(&kept, a) {
                rows.extend(rows_for(&fmt_x(x), &group));
            }
        }
        None => rows.extend(rows_for("all", &kept.iter().collect::<Vec<_>>())),
    }
    if counts_empty {
        let excluded = records.len() - kept.len();
        rows.push(SummaryRow {
            x: "all".into(),
            metric: "excluded_empty_core".into(),
            count: records.len(),
            mean: excluded as f64,
            ci_lo: None,
            ci_hi: None,
        });
    }
    Summary {
        x_axis: axis.unwrap_or("all").to_owned(),
        rows,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// `x_axis,x,metric,count,mean,ci_lo,ci_hi`; intervals blank when not a
/// proportion.
pub fn write_summary_csv<W: Write>(s: &Summary, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(["x_axis", "x", "metric", "count", "mean", "ci_lo", "ci_hi"])
        .map_err(csv_err)?;
    for r in &s.rows {
        out.write_record([
            s.x_axis.clone(),
            r.x.clone(),
            r.metric.clone(),
            r.count.to_string(),
            r.mean.to_string(),
            opt(r.ci_lo),
            opt(r.ci_hi),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// One row of the singularity table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityRow {
    pub n: usize,
    pub trials: usize,
    pub singular_frac: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub whole_singular_frac: f64,
    pub whole_ci_lo: f64,
    pub whole_ci_hi: f64,
    /// `tag:count` pairs joined by `;`, in tag order.
    pub certainty_tag_counts: String,
}

pub fn singularity_table(records: &[TrialRecord]) -> Vec<SingularityRow> {
    group_by_x(records, "n")
        .into_iter()
        .map(|(n, group)| {
            let core = flag_rate(&group, "core_singular");
            let whole = flag_rate(&group, "whole_singular");
            let mut tags: BTreeMap<&str, usize> = BTreeMap::new();
            for r in &group {
                if let Some(t) = r.tags.get("certainty") {
                    *tags.entry(t).or_default() += 1;
                }
            }
            SingularityRow {
                n: n as usize,
                trials: group.len(),
                singular_frac: core.estimate,
                ci_lo: core.ci_lo,
                ci_hi: core.ci_hi,
                whole_singular_frac: whole.estimate,
                whole_ci_lo: whole.ci_lo,
                whole_ci_hi: whole.ci_hi,
                certainty_tag_counts: tags
                    .iter()
                    .map(|(t, c)| format!("{t}:{c}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            }
        })
        .collect()
}

pub fn write_singularity_csv<W: Write>(rows: &[SingularityRow], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record([
        "n",
        "singular_frac",
        "ci_lo",
        "ci_hi",
        "certainty_tag_counts",
        "trials",
        "whole_singular_frac",
        "whole_ci_lo",
        "whole_ci_hi",
    ])
    .map_err(csv_err)?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            r.singular_frac.to_string(),
            r.ci_lo.to_string(),
            r.ci_hi.to_string(),
            r.certainty_tag_counts.clone(),
            r.trials.to_string(),
            r.whole_singular_frac.to_string(),
            r.whole_ci_lo.to_string(),
            r.whole_ci_hi.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}
