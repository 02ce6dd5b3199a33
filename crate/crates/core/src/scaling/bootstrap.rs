//! Bootstrap confidence intervals for collapse parameters.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::collapse::{
    fit_prepared, refit_warm, Collapse, CollapseForm, CollapseParams, DataPoint, InitGrid, ScalingFit,
};
use crate::error::{Error, Result};
use crate::observables::{mean_estimate, median_estimate, EnsembleRecord, Samples};
use crate::rng::{derive_seed, stream};

/// Smallest error bar passed to the collapse cost, so that noise-free
/// ensembles stay usable.
pub const DY_FLOOR: f64 = 1e-9;

/// Raw samples of one `(L, p)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawCell {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub samples: Samples,
    /// Purification cap; samples at or above it are censored.
    pub depth_cap: Option<usize>,
}

impl From<&EnsembleRecord> for RawCell {
    fn from(r: &EnsembleRecord) -> Self {
        Self {
            l: r.l,
            p: r.p,
            samples: r.samples.clone(),
            depth_cap: r.depth_cap,
        }
    }
}

impl RawCell {
    fn censored_fraction(&self, values: &[f64]) -> f64 {
        match self.depth_cap {
            Some(cap) if !values.is_empty() => {
                values.iter().filter(|&&v| v >= cap as f64).count() as f64 / values.len() as f64
            }
            _ => 0.0,
        }
    }
}

/// Summary points of `cells` for `form`, with `pick(cell)` choosing which
/// trajectories enter. Returns `None` for a cell whose median is censored.
fn cell_points(
    cell: &RawCell,
    form: CollapseForm,
    pick: Option<&[usize]>,
) -> Option<Vec<DataPoint>> {
    let select = |v: &[f64]| -> Vec<f64> {
        match pick {
            Some(idx) => idx.iter().map(|&i| v[i]).collect(),
            None => v.to_vec(),
        }
    };
    match (&cell.samples, form) {
        (Samples::Scalar(v), CollapseForm::TauP) => {
            let s = select(v);
            if cell.censored_fraction(&s) > 0.5 {
                return None;
            }
            let e = median_estimate(&s);
            Some(vec![DataPoint::new(cell.l, cell.p, e.value, e.stderr.max(DY_FLOOR))])
        }
        (Samples::Scalar(v), _) => {
            let e = mean_estimate(&select(v));
            Some(vec![DataPoint::new(cell.l, cell.p, e.value, e.stderr.max(DY_FLOOR))])
        }
        (Samples::Series { times, values }, _) => {
            let rows: Vec<&Vec<f64>> = match pick {
                Some(idx) => idx.iter().map(|&i| &values[i]).collect(),
                None => values.iter().collect(),
            };
            Some(
                times
                    .iter()
                    .enumerate()
                    .map(|(k, &t)| {
                        let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
                        let e = mean_estimate(&col);
                        DataPoint::at_time(cell.l, cell.p, t as f64, e.value, e.stderr.max(DY_FLOOR))
                    })
                    .collect(),
            )
        }
    }
}

/// Central summary points. Purification cells whose median is censored are
/// left out; their count is returned alongside.
pub fn cells_to_points(cells: &[RawCell], form: CollapseForm) -> Result<(Vec<DataPoint>, usize)> {
    check_cells(cells, form)?;
    let mut out = Vec::new();
    let mut excluded = 0;
    for c in cells.iter().filter(|c| !c.samples.is_empty()) {
        match cell_points(c, form, None) {
            Some(p) => out.extend(p),
            None => excluded += 1,
        }
    }
    Ok((out, excluded))
}

fn check_cells(cells: &[RawCell], form: CollapseForm) -> Result<()> {
    for c in cells {
        let series = matches!(c.samples, Samples::Series { .. });
        if series != (form == CollapseForm::GlobalS) {
            return Err(Error::Domain(format!(
                "cell L = {}, p = {}: sample shape does not match form {}",
                c.l,
                c.p,
                form.tag()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub n_boot: usize,
    /// Resample size per cell; defaults to `n - 100` (or `n` when `n ≤ 100`).
    pub subsample: Option<usize>,
    pub seed: u64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            n_boot: 2500,
            subsample: None,
            seed: 0,
        }
    }
}

fn subsample_size(n: usize, requested: Option<usize>) -> usize {
    match requested {
        Some(m) => m.max(1),
        None if n > 100 => n - 100,
        None => n,
    }
}

/// Percentile interval with linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}

/// Fits the central data, then refits `n_boot` resampled data sets.
///
/// Each replicate redraws every cell's trajectories with replacement,
/// recomputes the summary statistic (median for `tau_p`, mean otherwise) and
/// refits from the central optimum and the best start-grid point. A
/// replicate in which any needed purification cell is more than half
/// censored is dropped; the fit is flagged when over 10% are dropped.
pub fn bootstrap_exponents(
    cells: &[RawCell],
    form: CollapseForm,
    grid: &InitGrid,
    opts: &BootstrapOptions,
) -> Result<ScalingFit> {
    let (points, _) = cells_to_points(cells, form)?;
    let central = Collapse::new(&points, form)?;
    let mut fit = fit_prepared(&central, grid)?;
    let center = fit.params();
    let used: Vec<&RawCell> = cells
        .iter()
        .filter(|c| !c.samples.is_empty() && cell_points(c, form, None).is_some())
        .collect();
    let base = derive_seed(opts.seed, &[0xB0_07]);

    let replicates: Vec<Option<[f64; 3]>> = (0..opts.n_boot as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(base, b);
            let mut data = Vec::new();
            for cell in &used {
                let n = cell.samples.len();
                let m = subsample_size(n, opts.subsample);
                let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
                data.extend(cell_points(cell, form, Some(&idx))?);
            }
            if data == points {
                return Some([center.p_c, center.nu, center.exponent]);
            }
            let c = Collapse::new(&data, form).ok()?;
            refit_warm(&c, grid, center).map(|p| [p.p_c, p.nu, p.exponent])
        })
        .collect();

    let kept: Vec<[f64; 3]> = replicates.iter().flatten().copied().collect();
    fit.n_boot = opts.n_boot;
    fit.dropped = opts.n_boot - kept.len();
    fit.flagged |= fit.dropped * 10 > opts.n_boot;
    fit.ci95 = ci95(&kept, center);
    fit.bootstrap = kept;
    Ok(fit)
}

/// Percentile intervals, widened when needed so that each brackets the
/// point estimate.
fn ci95(reps: &[[f64; 3]], center: CollapseParams) -> Option<[[f64; 2]; 3]> {
    if reps.is_empty() {
        return None;
    }
    let point = [center.p_c, center.nu, center.exponent];
    let mut out = [[0.0; 2]; 3];
    for k in 0..3 {
        let mut v: Vec<f64> = reps.iter().map(|r| r[k]).collect();
        v.sort_by(f64::total_cmp);
        out[k] = [
            percentile(&v, 0.025).min(point[k]),
            percentile(&v, 0.975).max(point[k]),
        ];
    }
    Some(out)
}
