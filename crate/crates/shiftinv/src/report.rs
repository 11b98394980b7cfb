//! Report documents and their JSON and CSV renderings.

use std::fs;
use std::path::Path;

use serde::Serialize;
use shiftinv_core::criteria::{Consensus, CriterionReport, Hypotheses};
use shiftinv_core::geometry::TraceRow;
use shiftinv_core::registry::GroundTruth;
use shiftinv_core::Verdict;

use crate::config::RunConfig;
use crate::Error;

pub const TOOL: &str = "shiftinv";

/// Compact description of one trace series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub series: String,
    pub points: usize,
    pub x_first: f64,
    pub x_last: f64,
    pub first: f64,
    pub last: f64,
    pub min: f64,
    pub max: f64,
}

/// Summaries of each series, in order of first appearance.
pub fn summarize(trace: &[TraceRow]) -> Vec<SeriesSummary> {
    let mut out: Vec<SeriesSummary> = Vec::new();
    for row in trace {
        match out.iter_mut().find(|s| s.series == row.series) {
            Some(s) => {
                s.points += 1;
                s.x_last = row.x;
                s.last = row.value;
                s.min = s.min.min(row.value);
                s.max = s.max.max(row.value);
            }
            None => out.push(SeriesSummary {
                series: row.series.clone(),
                points: 1,
                x_first: row.x,
                x_last: row.x,
                first: row.value,
                last: row.value,
                min: row.value,
                max: row.value,
            }),
        }
    }
    out
}

/// Wall-clock fields, left out of deterministic reports.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Timing {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Timing {
    pub fn capture(deterministic: bool, started: std::time::Instant) -> Self {
        if deterministic {
            return Self::default();
        }
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or_default();
        Self { generated_unix: Some(now), elapsed_ms: Some(started.elapsed().as_millis() as u64) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSummary {
    pub criterion_id: String,
    pub verdict: Verdict,
    pub score: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub trace_summary: Vec<SeriesSummary>,
}

impl From<&CriterionReport> for CriterionSummary {
    fn from(r: &CriterionReport) -> Self {
        Self {
            criterion_id: r.id.as_str().to_string(),
            verdict: r.verdict,
            score: r.score,
            tolerance: r.tolerance,
            note: r.note.clone(),
            trace_summary: summarize(&r.trace),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub example: String,
    pub region: String,
    pub j_max: Option<u32>,
    #[serde(flatten)]
    pub timing: Timing,
    /// Set when a hypothesis of the criteria fails and no verdicts were computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis_violated: Option<String>,
    pub hypotheses: Option<Hypotheses>,
    pub consensus: Option<Consensus>,
    pub ground_truth: Option<GroundTruth>,
    pub matches: Option<bool>,
    pub exit_code: i32,
    pub criteria: Vec<CriterionSummary>,
    pub config: RunConfig,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

/// Per-criterion summary table.
pub fn summary_csv(doc: &CriteriaDocument) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["criterion_id", "verdict", "score", "tolerance", "note"])?;
    for c in &doc.criteria {
        w.write_record([
            c.criterion_id.clone(),
            c.verdict.to_string(),
            c.score.to_string(),
            c.tolerance.to_string(),
            c.note.clone().unwrap_or_default(),
        ])?;
    }
    let consensus = doc.consensus.map(|c| c.to_string()).unwrap_or_default();
    w.write_record(["consensus", consensus.as_str(), "", "", ""])?;
    csv_string(w)
}

/// Rows `series, x, value` of one criterion.
pub fn trace_csv(trace: &[TraceRow]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["series", "x", "value"])?;
    for row in trace {
        w.write_record([row.series.clone(), row.x.to_string(), row.value.to_string()])?;
    }
    csv_string(w)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, Error> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// File name of the trace export of a criterion.
pub fn trace_file_name(criterion_id: &str) -> String {
    format!("trace_{criterion_id}.csv")
}

/// Python script plotting every `trace_*.csv` next to it, one figure per criterion.
pub fn criteria_plot_script(trace_dir: &Path) -> String {
    format!(
        r#"#!/usr/bin/env python3
import csv, glob, os
import matplotlib.pyplot as plt

TRACE_DIR = {dir:?}

for path in sorted(glob.glob(os.path.join(TRACE_DIR, "trace_*.csv"))):
    series = {{}}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            xs, ys = series.setdefault(row["series"], ([], []))
            xs.append(float(row["x"]))
            ys.append(float(row["value"]))
    if not series:
        continue
    fig, ax = plt.subplots()
    for name, (xs, ys) in series.items():
        ax.plot(xs, ys, marker=".", label=name)
    ax.set_title(os.path.basename(path)[len("trace_"):-len(".csv")])
    ax.set_xlabel("x")
    ax.legend(fontsize="small")
    fig.savefig(path[:-len(".csv")] + ".png", dpi=120)
    plt.close(fig)
"#,
        dir = trace_dir.display().to_string()
    )
}

/// Python script plotting a spectral grid written by the `spectral` command.
pub fn spectral_plot_script(csv_path: &Path, dim: usize) -> String {
    let body = if dim == 1 {
        "ax.plot(cols[0], cols[-1])\nax.set_xlabel(\"xi_1\")\nax.set_ylabel(\"value\")"
    } else {
        "sc = ax.scatter(cols[0], cols[1], c=cols[-1], s=1)\nfig.colorbar(sc)\nax.set_xlabel(\"xi_1\")\nax.set_ylabel(\"xi_2\")"
    };
    format!(
        r#"#!/usr/bin/env python3
import csv
import matplotlib.pyplot as plt

PATH = {path:?}

with open(PATH, newline="") as fh:
    reader = csv.reader(fh)
    next(reader)
    cols = list(zip(*[[float(v) for v in row] for row in reader]))
fig, ax = plt.subplots()
{body}
fig.savefig(PATH.rsplit(".", 1)[0] + ".png", dpi=120)
"#,
        path = csv_path.display().to_string()
    )
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
