//! Running a plan to CSV files plus a JSON manifest, and reading it back.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::plan::{Cell, ExperimentPlan};
use super::table::{read_table, write_table, Column};
use crate::error::{Error, Result};
use crate::observables::{
    estimate_global_entropy_series, estimate_half_chain, estimate_mutual_information,
    estimate_purification_time, EnsembleRecord, Observable, Samples,
};
use crate::scaling::RawCell;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Incomplete,
    Complete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub file: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub status: RunStatus,
    pub config_sha256: String,
    pub seed: u64,
    pub build: String,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub config: ExperimentPlan,
    pub cells: Vec<Cell>,
    #[serde(default)]
    pub failures: Vec<CellFailure>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn store(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST);
        let tmp = dir.join(format!("{MANIFEST}.tmp"));
        std::fs::write(&tmp, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }
}

pub fn run_cell(cell: &Cell) -> Result<EnsembleRecord> {
    let c = &cell.config;
    match cell.observable {
        Observable::HalfChain => estimate_half_chain(c, cell.n),
        Observable::MutualInformation => estimate_mutual_information(c, cell.n),
        Observable::PurificationTime => estimate_purification_time(c, cell.n, cell.depth_cap),
        Observable::GlobalEntropy => {
            let times = cell.times.clone().unwrap_or_default();
            estimate_global_entropy_series(c, cell.n, &times)
        }
    }
}

fn value_unit(obs: Observable) -> &'static str {
    match obs {
        Observable::PurificationTime => "steps",
        _ => "bits",
    }
}

pub fn write_record(path: &Path, record: &EnsembleRecord) -> Result<()> {
    let unit = value_unit(record.observable);
    match &record.samples {
        Samples::Scalar(v) => {
            let rows: Vec<Vec<f64>> = v.iter().enumerate().map(|(i, &x)| vec![i as f64, x]).collect();
            write_table(path, &[("trajectory_index", "-"), ("value", unit)], &rows)
        }
        Samples::Series { times, values } => {
            let rows: Vec<Vec<f64>> = values
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    times.iter().zip(row).map(move |(&t, &x)| vec![i as f64, t as f64, x])
                })
                .collect();
            let cols: [Column; 3] = [("trajectory_index", "-"), ("t", "steps"), ("value", unit)];
            write_table(path, &cols, &rows)
        }
    }
}

/// Outcome of [`simulate`]: the final manifest.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub manifest: Manifest,
    pub dir: PathBuf,
}

/// Runs every cell of `plan` into `dir`. The manifest is written first with
/// status `incomplete` and only marked `complete` once every file exists.
/// Failing cells are recorded and the remaining cells still run.
pub fn simulate(plan: &ExperimentPlan, dir: &Path, build: &str) -> Result<RunReport> {
    plan.validate()?;
    let cells = plan.cells()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let clock = Instant::now();
    let mut manifest = Manifest {
        status: RunStatus::Incomplete,
        config_sha256: plan.digest()?,
        seed: plan.seed,
        build: build.to_string(),
        started_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        wall_time_s: 0.0,
        config: plan.clone(),
        cells: cells.clone(),
        failures: Vec::new(),
    };
    manifest.store(dir)?;
    for cell in &cells {
        let result = run_cell(cell).and_then(|r| write_record(&dir.join(&cell.file), &r));
        if let Err(e) = result {
            manifest.failures.push(CellFailure {
                file: cell.file.clone(),
                error: e.to_string(),
            });
        }
    }
    manifest.wall_time_s = clock.elapsed().as_secs_f64();
    if manifest.failures.is_empty() {
        manifest.status = RunStatus::Complete;
    }
    manifest.store(dir)?;
    Ok(RunReport {
        manifest,
        dir: dir.to_path_buf(),
    })
}

/// Reads the raw samples of one cell back from its CSV file.
pub fn load_cell(dir: &Path, cell: &Cell) -> Result<RawCell> {
    let path = dir.join(&cell.file);
    let table = read_table(&path)?;
    let bad = |line: u64, msg: &str| Error::Csv {
        path: path.clone(),
        line,
        msg: msg.to_string(),
    };
    let value = table.column("value").ok_or_else(|| bad(1, "missing column \"value\""))?;
    let samples = match &cell.times {
        None => Samples::Scalar(table.rows.iter().map(|(_, r)| r[value]).collect()),
        Some(times) => {
            let tcol = table.column("t").ok_or_else(|| bad(1, "missing column \"t\""))?;
            if table.rows.len() % times.len().max(1) != 0 {
                return Err(bad(0, "row count is not a multiple of the recorded times"));
            }
            let mut values = Vec::new();
            for chunk in table.rows.chunks(times.len().max(1)) {
                for ((line, r), &t) in chunk.iter().zip(times) {
                    if r[tcol] != t as f64 {
                        return Err(bad(*line, &format!("expected t = {t}")));
                    }
                }
                values.push(chunk.iter().map(|(_, r)| r[value]).collect());
            }
            Samples::Series {
                times: times.clone(),
                values,
            }
        }
    };
    Ok(RawCell {
        l: cell.config.l,
        p: cell.config.p,
        samples,
        depth_cap: cell.depth_cap,
    })
}

/// The manifest of a finished run and the raw cells it lists.
pub fn load_run(dir: &Path) -> Result<(Manifest, Vec<(Cell, RawCell)>)> {
    let manifest = Manifest::load(dir)?;
    let failed: Vec<&str> = manifest.failures.iter().map(|f| f.file.as_str()).collect();
    let cells = manifest
        .cells
        .iter()
        .filter(|c| !failed.contains(&c.file.as_str()))
        .map(|c| Ok((c.clone(), load_cell(dir, c)?)))
        .collect::<Result<_>>()?;
    Ok((manifest, cells))
}
