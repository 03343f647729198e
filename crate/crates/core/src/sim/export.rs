use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ScenarioConfig;
use super::experiment::ExperimentResult;
use super::metrics::MetricsReport;
use crate::error::{Error, Result};

/// Significant digits kept for every exported float.
pub const EXPORT_DIGITS: usize = 9;

/// `x` rounded to [`EXPORT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", EXPORT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn fmt_float(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"));
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ScenarioConfig,
    pub report: MetricsReport,
}

impl ExperimentSummary {
    pub fn of(result: &ExperimentResult) -> Self {
        ExperimentSummary {
            config: result.config.clone(),
            report: result.report.clone(),
        }
    }

    fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("summary serializes");
        round_json(&mut v);
        v
    }

    /// The summary as it reads back after export.
    pub fn rounded(&self) -> Self {
        serde_json::from_value(self.to_value()).expect("rounded summary deserializes")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("summary serializes");
        s.push('\n');
        s
    }
}

pub fn import_summary(path: &Path) -> Result<ExperimentSummary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Files written by [`export_results`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportPaths {
    pub summary: PathBuf,
    pub cdf: PathBuf,
    pub runs: PathBuf,
    pub clusters: PathBuf,
    pub trace: PathBuf,
    pub config: PathBuf,
}

impl ExportPaths {
    pub fn in_dir(dir: &Path) -> Self {
        ExportPaths {
            summary: dir.join("summary.json"),
            cdf: dir.join("cdf.csv"),
            runs: dir.join("runs.csv"),
            clusters: dir.join("clusters.json"),
            trace: dir.join("trace.csv"),
            config: dir.join("config.cfg"),
        }
    }
}

pub fn cdf_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("approach,ue_rate_bps\n");
    for summary in &result.report.approaches {
        for run in &result.runs {
            for r in run.results.iter().filter(|r| r.approach == summary.approach) {
                for &x in &r.ue_rates {
                    let _ = writeln!(out, "{},{}", r.approach, fmt_float(x));
                }
            }
        }
    }
    out
}

pub fn runs_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(
        "run,seed,approach,sum_rate_bps,mean_ue_rate_bps,iterations,clusters,mean_cluster_size,\
         proposals,accepted,overhead_bound,d2d_ues,lemma_approved,lemma_violations\n",
    );
    for run in &result.runs {
        for r in &run.results {
            let mean = r.sum_rate / r.ue_rates.len().max(1) as f64;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                run.run,
                run.seed,
                r.approach,
                fmt_float(r.sum_rate),
                fmt_float(mean),
                r.iterations,
                r.cluster_count,
                fmt_float(r.mean_cluster_size),
                r.proposals,
                r.accepted,
                fmt_float(r.overhead_bound),
                r.d2d_ues,
                r.lemma.approved,
                r.lemma.violations
            );
        }
    }
    out
}

pub fn trace_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("run,t,cluster,count,gamma_current,gamma_best,accepted,proposal_count\n");
    for run in &result.runs {
        for tr in &run.trace {
            let r = &tr.row;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                tr.run,
                r.t,
                r.cluster,
                r.count,
                fmt_float(r.gamma_current),
                fmt_float(r.gamma_best),
                u8::from(r.accepted),
                r.proposal_count
            );
        }
    }
    out
}

pub fn clusters_json(result: &ExperimentResult) -> String {
    let runs: Vec<Value> = result
        .runs
        .iter()
        .filter_map(|run| {
            run.partition.as_ref().map(|p| {
                serde_json::json!({
                    "run": run.run,
                    "seed": run.seed,
                    "partition": p.to_json(&run.anchors),
                })
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&runs).expect("clusters serialize");
    s.push('\n');
    s
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes every result file into `dir`, creating it if needed.
pub fn export_results(result: &ExperimentResult, dir: &Path) -> Result<ExportPaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = ExportPaths::in_dir(dir);
    write(&paths.summary, &ExperimentSummary::of(result).to_json())?;
    write(&paths.cdf, &cdf_csv(result))?;
    write(&paths.runs, &runs_csv(result))?;
    write(&paths.clusters, &clusters_json(result))?;
    write(&paths.trace, &trace_csv(result))?;
    write(&paths.config, &result.config.to_text())?;
    Ok(paths)
}
