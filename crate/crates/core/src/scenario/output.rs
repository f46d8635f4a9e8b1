use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::report::{pooled_rmse, RunReport};
use crate::obsv::GramianReport;
use crate::Result;

pub const SUMMARY_FILE: &str = "summary.json";
pub const GRAMIAN_FILE: &str = "gramian.json";

pub fn csv_name(report: &RunReport) -> String {
    format!("errors_{}_{}.csv", report.filter, report.run)
}

pub fn csv_header(n_landmarks: usize) -> String {
    let mut cols: Vec<String> = [
        "t", "ep_x", "ep_y", "ep_z", "ev_x", "ev_y", "ev_z", "eg_x", "eg_y", "eg_z",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend((1..=n_landmarks).map(|i| format!("er_{i}")));
    cols.push("res_r1".into());
    cols.push("res_s8".into());
    cols.join(",")
}

/// CSV body of one report. Floats carry 17 significant digits so they read
/// back bit-exact.
pub fn render_csv(report: &RunReport, n_landmarks: usize) -> String {
    let mut out = csv_header(n_landmarks);
    out.push('\n');
    for r in &report.records {
        let mut fields = vec![r.t];
        fields.extend(r.ep.iter().chain(r.ev.iter()).chain(r.eg.iter()));
        fields.extend(&r.er);
        fields.push(r.res_r1);
        fields.push(r.res_s8);
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

/// Writes `contents` through a temporary file in the same directory, so the
/// target either keeps its old contents or holds the complete new ones.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunEntry {
    pub run: usize,
    pub seed: u64,
    pub rmse_position: f64,
    pub rmse_velocity: f64,
    pub rmse_gravity: f64,
    pub convergence_time: Option<f64>,
    pub diverged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FilterSummary {
    pub runs: usize,
    pub diverged_runs: usize,
    /// Pooled over runs that did not diverge.
    pub rmse_position: f64,
    pub rmse_velocity: f64,
    pub rmse_gravity: f64,
    /// Mean over runs that converged.
    pub mean_convergence_time: Option<f64>,
    pub per_run: Vec<RunEntry>,
}

pub fn summarize_reports(reports: &[RunReport]) -> BTreeMap<String, FilterSummary> {
    let mut grouped: BTreeMap<String, Vec<&RunReport>> = BTreeMap::new();
    for r in reports {
        grouped.entry(r.filter.to_string()).or_default().push(r);
    }
    grouped
        .into_iter()
        .map(|(name, runs)| {
            let ok: Vec<_> = runs.iter().filter(|r| !r.summary.diverged).collect();
            let times: Vec<f64> = ok.iter().filter_map(|r| r.summary.convergence_time).collect();
            let summary = FilterSummary {
                runs: runs.len(),
                diverged_runs: runs.len() - ok.len(),
                rmse_position: pooled_rmse(ok.iter().map(|r| r.summary.rmse_position)),
                rmse_velocity: pooled_rmse(ok.iter().map(|r| r.summary.rmse_velocity)),
                rmse_gravity: pooled_rmse(ok.iter().map(|r| r.summary.rmse_gravity)),
                mean_convergence_time: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
                per_run: runs
                    .iter()
                    .map(|r| RunEntry {
                        run: r.run,
                        seed: r.seed,
                        rmse_position: r.summary.rmse_position,
                        rmse_velocity: r.summary.rmse_velocity,
                        rmse_gravity: r.summary.rmse_gravity,
                        convergence_time: r.summary.convergence_time,
                        diverged: r.summary.diverged,
                        failure: r.failure.clone(),
                    })
                    .collect(),
            };
            (name, summary)
        })
        .collect()
}

/// One CSV per report plus `summary.json`. Returns the written paths.
pub fn emit_outputs(reports: &[RunReport], n_landmarks: usize, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::with_capacity(reports.len() + 1);
    for report in reports {
        let path = out_dir.join(csv_name(report));
        write_atomic(&path, render_csv(report, n_landmarks).as_bytes())?;
        written.push(path);
    }
    let path = out_dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(&summarize_reports(reports)).map_err(std::io::Error::other)?;
    write_atomic(&path, json.as_bytes())?;
    written.push(path);
    Ok(written)
}

pub fn write_gramian<T: Serialize>(report: &T, out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(GRAMIAN_FILE);
    let json = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    write_atomic(&path, json.as_bytes())?;
    Ok(path)
}

/// Compact view of a windowed Gramian sweep.
#[derive(Clone, Debug, Serialize)]
pub struct WindowSweep {
    pub window: f64,
    pub min_eigenvalue: f64,
    pub windows: Vec<WindowEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowEntry {
    pub interval: (f64, f64),
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub condition_number: Option<f64>,
}

impl WindowSweep {
    pub fn new(window: f64, reports: &[GramianReport]) -> Self {
        Self {
            window,
            min_eigenvalue: reports.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min),
            windows: reports
                .iter()
                .map(|r| WindowEntry {
                    interval: r.interval,
                    min_eigenvalue: r.min_eigenvalue,
                    max_eigenvalue: r.max_eigenvalue,
                    condition_number: r.condition_number,
                })
                .collect(),
        }
    }
}
