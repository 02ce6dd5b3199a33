//! Finite-size scaling collapse quality and fits.

use serde::{Deserialize, Serialize};

use super::optimize::{nelder_mead, NelderMeadOptions};
use crate::error::{Error, Result};

/// One ensemble summary: `y ± dy` at size `L`, rate `p` and, for the global
/// entropy form, time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub y: f64,
    pub dy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl DataPoint {
    pub fn new(l: usize, p: f64, y: f64, dy: f64) -> Self {
        Self { l, p, y, dy, t: None }
    }

    pub fn at_time(l: usize, p: f64, t: f64, y: f64, dy: f64) -> Self {
        Self {
            l,
            p,
            y,
            dy,
            t: Some(t),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseForm {
    /// `y = L^z g((p - p_c) L^{1/ν})`.
    TauP,
    /// `y = L^β f((p - p_c) L^{1/ν})`.
    Iab,
    /// `y(t) = h((p - p_c) L^{1/ν}, t / L^z)`, compared on fixed slices of
    /// `t / L^z`.
    GlobalS,
}

impl CollapseForm {
    pub fn tag(self) -> &'static str {
        match self {
            CollapseForm::TauP => "tau_p",
            CollapseForm::Iab => "iab",
            CollapseForm::GlobalS => "global_s",
        }
    }
}

impl std::str::FromStr for CollapseForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau_p" | "tau-p" => Ok(CollapseForm::TauP),
            "iab" => Ok(CollapseForm::Iab),
            "global_s" | "global-s" => Ok(CollapseForm::GlobalS),
            _ => Err(Error::Parse(format!(
                "unknown collapse form {s:?} (expected tau_p, iab or global_s)"
            ))),
        }
    }
}

/// `(p_c, ν, exponent)`; the exponent is `z` or `β` depending on the form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseParams {
    pub p_c: f64,
    pub nu: f64,
    pub exponent: f64,
}

impl CollapseParams {
    pub fn new(p_c: f64, nu: f64, exponent: f64) -> Self {
        Self { p_c, nu, exponent }
    }

    fn as_array(self) -> [f64; 3] {
        [self.p_c, self.nu, self.exponent]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Time slices `t = c L^z` used by the global entropy form.
pub const GLOBAL_S_SLICES: [f64; 3] = [0.5, 2.0 / 3.0, 2.0];

/// A point on the master curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaledPoint {
    #[serde(rename = "L")]
    pub l: usize,
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "dY")]
    pub dy: f64,
    /// Index into `GLOBAL_S_SLICES` for the global entropy form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<usize>,
}

#[derive(Clone, Debug)]
struct Series {
    p: f64,
    /// `(t, y, dy)` sorted by `t`.
    points: Vec<(f64, f64, f64)>,
}

/// Pre-sorted data for repeated quality evaluations.
#[derive(Clone, Debug)]
pub struct Collapse {
    form: CollapseForm,
    /// Distinct sizes, ascending.
    sizes: Vec<usize>,
    /// Per size: `(p, y, dy)` sorted, for the scalar forms.
    scalar: Vec<Vec<(f64, f64, f64)>>,
    /// Per size: series sorted by `p`, for the global entropy form.
    series: Vec<Vec<Series>>,
    p_range: (f64, f64),
}

impl Collapse {
    pub fn new(data: &[DataPoint], form: CollapseForm) -> Result<Self> {
        let mut bad = Vec::new();
        for (k, d) in data.iter().enumerate() {
            if !(d.dy > 0.0 && d.dy.is_finite()) {
                bad.push(format!("point {k}: dy = {}", d.dy));
            } else if !d.y.is_finite() || !d.p.is_finite() {
                bad.push(format!("point {k}: non-finite value"));
            } else if form == CollapseForm::GlobalS && !d.t.is_some_and(f64::is_finite) {
                bad.push(format!("point {k}: missing time"));
            }
        }
        if !bad.is_empty() {
            return Err(Error::Domain(format!("invalid collapse data: {}", bad.join("; "))));
        }
        let mut sizes: Vec<usize> = data.iter().map(|d| d.l).collect();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() < 3 {
            return Err(Error::Diagnostic(format!(
                "collapse needs at least 3 system sizes, got {}",
                sizes.len()
            )));
        }
        let key = |a: &(f64, f64, f64), b: &(f64, f64, f64)| {
            a.0.total_cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.total_cmp(&b.2))
        };
        let mut scalar = Vec::new();
        let mut series = Vec::new();
        for &l in &sizes {
            let pts = data.iter().filter(|d| d.l == l);
            match form {
                CollapseForm::GlobalS => {
                    let mut by_p: Vec<Series> = Vec::new();
                    let mut raw: Vec<(f64, f64, f64, f64)> =
                        pts.map(|d| (d.p, d.t.unwrap(), d.y, d.dy)).collect();
                    raw.sort_by(|a, b| {
                        a.0.total_cmp(&b.0)
                            .then(a.1.total_cmp(&b.1))
                            .then(a.2.total_cmp(&b.2))
                            .then(a.3.total_cmp(&b.3))
                    });
                    for (p, t, y, dy) in raw {
                        match by_p.last_mut() {
                            Some(s) if s.p == p => s.points.push((t, y, dy)),
                            _ => by_p.push(Series {
                                p,
                                points: vec![(t, y, dy)],
                            }),
                        }
                    }
                    series.push(by_p);
                }
                _ => {
                    let mut v: Vec<(f64, f64, f64)> = pts.map(|d| (d.p, d.y, d.dy)).collect();
                    v.sort_by(key);
                    scalar.push(v);
                }
            }
        }
        let p_range = data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d.p), hi.max(d.p)));
        Ok(Self {
            form,
            sizes,
            scalar,
            series,
            p_range,
        })
    }

    pub fn form(&self) -> CollapseForm {
        self.form
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Smallest and largest sampled rate.
    pub fn p_range(&self) -> (f64, f64) {
        self.p_range
    }

    /// Rescaled curves grouped by slice and size, each sorted by `x`.
    fn curves(&self, params: CollapseParams) -> Vec<Vec<Vec<(f64, f64, f64)>>> {
        let CollapseParams { p_c, nu, exponent } = params;
        match self.form {
            CollapseForm::TauP | CollapseForm::Iab => {
                let per_size = self
                    .sizes
                    .iter()
                    .zip(&self.scalar)
                    .map(|(&l, pts)| {
                        let lf = l as f64;
                        let sx = lf.powf(1.0 / nu);
                        let sy = lf.powf(-exponent);
                        pts.iter()
                            .map(|&(p, y, dy)| ((p - p_c) * sx, y * sy, dy * sy))
                            .collect()
                    })
                    .collect();
                vec![per_size]
            }
            CollapseForm::GlobalS => GLOBAL_S_SLICES
                .iter()
                .map(|&c| {
                    self.sizes
                        .iter()
                        .zip(&self.series)
                        .map(|(&l, per_p)| {
                            let lf = l as f64;
                            let sx = lf.powf(1.0 / nu);
                            let t = c * lf.powf(exponent);
                            per_p
                                .iter()
                                .filter_map(|s| {
                                    interpolate_series(&s.points, t)
                                        .map(|(y, dy)| ((s.p - p_c) * sx, y, dy))
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn rescale(&self, params: CollapseParams) -> Vec<RescaledPoint> {
        let slices = self.curves(params);
        let multi = self.form == CollapseForm::GlobalS;
        let mut out = Vec::new();
        for (s, per_size) in slices.iter().enumerate() {
            for (&l, pts) in self.sizes.iter().zip(per_size) {
                out.extend(pts.iter().map(|&(x, y, dy)| RescaledPoint {
                    l,
                    x,
                    y,
                    dy,
                    slice: multi.then_some(s),
                }));
            }
        }
        out
    }

    /// Mean squared deviation from the other sizes' interpolated curves in
    /// units of the combined variance.
    pub fn quality(&self, params: CollapseParams) -> Result<f64> {
        if !(params.nu > 0.0) || !params.nu.is_finite() || !params.p_c.is_finite() {
            return Err(Error::Domain(format!("invalid collapse parameters {params:?}")));
        }
        let slices = self.curves(params);
        for (s, per_size) in slices.iter().enumerate() {
            let missing: Vec<String> = self
                .sizes
                .iter()
                .zip(per_size)
                .filter(|(_, pts)| pts.len() < 2)
                .map(|(l, _)| l.to_string())
                .collect();
            if !missing.is_empty() {
                return Err(Error::Diagnostic(format!(
                    "slice {s} is outside the recorded times for L = {}",
                    missing.join(", ")
                )));
            }
        }
        let mut total = 0.0;
        let mut used = 0usize;
        for per_size in &slices {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (g, pts) in per_size.iter().enumerate() {
                for &(x, y, dy) in pts {
                    for (h, other) in per_size.iter().enumerate() {
                        if h == g {
                            continue;
                        }
                        if let Some((yi, var)) = interpolate_curve(other, x) {
                            let denom = dy * dy + var;
                            sum += (y - yi).powi(2) / denom;
                            count += 1;
                        }
                    }
                }
            }
            if count > 0 {
                total += sum / count as f64;
                used += 1;
            }
        }
        if used == 0 {
            return Err(Error::Diagnostic(
                "no point can be interpolated on another size's curve".into(),
            ));
        }
        Ok(total / used as f64)
    }
}

/// Linear interpolation of a curve sorted by `x`; returns `(y, variance)`.
fn interpolate_curve(curve: &[(f64, f64, f64)], x: f64) -> Option<(f64, f64)> {
    if curve.len() < 2 || x < curve[0].0 || x > curve[curve.len() - 1].0 {
        return None;
    }
    let j = curve.partition_point(|c| c.0 <= x);
    let (a, b) = if j >= curve.len() {
        (curve[curve.len() - 2], curve[curve.len() - 1])
    } else if j == 0 {
        (curve[0], curve[1])
    } else {
        (curve[j - 1], curve[j])
    };
    let span = b.0 - a.0;
    let w = if span > 0.0 { (x - a.0) / span } else { 0.0 };
    let y = (1.0 - w) * a.1 + w * b.1;
    let var = (1.0 - w).powi(2) * a.2 * a.2 + w * w * b.2 * b.2;
    Some((y, var))
}

/// Linear interpolation of `(t, y, dy)` samples at time `t`.
fn interpolate_series(points: &[(f64, f64, f64)], t: f64) -> Option<(f64, f64)> {
    if points.is_empty() || t < points[0].0 || t > points[points.len() - 1].0 {
        return None;
    }
    if points.len() == 1 {
        return Some((points[0].1, points[0].2));
    }
    let j = points.partition_point(|p| p.0 <= t).clamp(1, points.len() - 1);
    let (a, b) = (points[j - 1], points[j]);
    let span = b.0 - a.0;
    let w = if span > 0.0 { (t - a.0) / span } else { 0.0 };
    let y = (1.0 - w) * a.1 + w * b.1;
    let var = (1.0 - w).powi(2) * a.2 * a.2 + w * w * b.2 * b.2;
    Some((y, var.sqrt()))
}

/// Collapse cost of `data` under `params`.
pub fn collapse_quality(data: &[DataPoint], params: CollapseParams, form: CollapseForm) -> Result<f64> {
    Collapse::new(data, form)?.quality(params)
}

/// Starting grid for the simplex restarts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitGrid {
    pub p_c: (f64, f64),
    pub nu: (f64, f64),
    pub exponent: (f64, f64),
    pub points_per_axis: usize,
}

impl Default for InitGrid {
    fn default() -> Self {
        Self {
            p_c: (0.05, 0.5),
            nu: (0.7, 3.0),
            exponent: (0.0, 2.0),
            points_per_axis: 5,
        }
    }
}

impl InitGrid {
    fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
        if n <= 1 {
            return vec![0.5 * (range.0 + range.1)];
        }
        (0..n)
            .map(|k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn points(&self) -> Vec<CollapseParams> {
        let n = self.points_per_axis;
        let mut out = Vec::with_capacity(n * n * n);
        for &a in &Self::axis(self.p_c, n) {
            for &b in &Self::axis(self.nu, n) {
                for &c in &Self::axis(self.exponent, n) {
                    out.push(CollapseParams::new(a, b, c));
                }
            }
        }
        out
    }

    fn steps(&self) -> [f64; 3] {
        let n = self.points_per_axis.max(2) as f64 - 1.0;
        [
            ((self.p_c.1 - self.p_c.0) / n).max(1e-3),
            ((self.nu.1 - self.nu.0) / n).max(1e-3),
            ((self.exponent.1 - self.exponent.0) / n).max(1e-3),
        ]
    }
}

/// Result of a collapse fit, optionally with bootstrap replicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub form: CollapseForm,
    pub p_c: f64,
    pub nu: f64,
    /// `z` for `tau_p` and `global_s`, `β` for `iab`.
    pub exponent: f64,
    pub quality: f64,
    pub converged: bool,
    pub n_boot: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bootstrap: Vec<[f64; 3]>,
    /// 95% intervals for `(p_c, ν, exponent)`.
    pub ci95: Option<[[f64; 2]; 3]>,
    #[serde(default)]
    pub dropped: usize,
    /// Set when too many bootstrap replicates had to be dropped or the best
    /// simplex run did not converge.
    #[serde(default)]
    pub flagged: bool,
}

impl ScalingFit {
    pub fn params(&self) -> CollapseParams {
        CollapseParams::new(self.p_c, self.nu, self.exponent)
    }
}

/// Fit objective. `p_c` is confined to the sampled range: outside it the
/// size curves barely overlap and the average runs over a handful of terms.
fn objective(c: &Collapse) -> impl Fn(&[f64; 3]) -> f64 + '_ {
    move |x| {
        let (lo, hi) = c.p_range;
        if x[0] < lo || x[0] > hi {
            return f64::INFINITY;
        }
        c.quality(CollapseParams::from_array(*x)).unwrap_or(f64::INFINITY)
    }
}

/// Best simplex descent over starts `starts`.
pub(crate) fn descend(c: &Collapse, starts: &[CollapseParams], step: [f64; 3]) -> (CollapseParams, f64, bool) {
    let f = objective(c);
    let mut best: Option<(CollapseParams, f64, bool)> = None;
    for s in starts {
        let m = nelder_mead(&f, s.as_array(), step, NelderMeadOptions::default());
        let better = match &best {
            None => true,
            Some((_, v, _)) => m.value < *v,
        };
        if better {
            best = Some((CollapseParams::from_array(m.x), m.value, m.converged));
        }
    }
    best.expect("at least one start")
}

/// Minimizes the collapse cost with simplex runs restarted from every grid
/// point.
pub fn fit_collapse(data: &[DataPoint], form: CollapseForm, grid: &InitGrid) -> Result<ScalingFit> {
    let c = Collapse::new(data, form)?;
    fit_prepared(&c, grid)
}

/// The grid with its `p_c` axis restricted to the sampled rates.
fn clip_to_data(grid: &InitGrid, c: &Collapse) -> InitGrid {
    let (lo, hi) = c.p_range;
    let mut g = grid.clone();
    let (a, b) = (grid.p_c.0.max(lo), grid.p_c.1.min(hi));
    g.p_c = if a <= b { (a, b) } else { (lo, hi) };
    g
}

pub(crate) fn fit_prepared(c: &Collapse, grid: &InitGrid) -> Result<ScalingFit> {
    let grid = &clip_to_data(grid, c);
    let starts = grid.points();
    let (params, quality, converged) = descend(c, &starts, grid.steps());
    if !quality.is_finite() {
        return Err(Error::Diagnostic(
            "collapse cost is not finite anywhere on the start grid".into(),
        ));
    }
    Ok(ScalingFit {
        form: c.form(),
        p_c: params.p_c,
        nu: params.nu,
        exponent: params.exponent,
        quality,
        converged,
        n_boot: 0,
        bootstrap: Vec::new(),
        ci95: None,
        dropped: 0,
        flagged: !converged,
    })
}

/// Refit from a known optimum and the best point of the start grid.
pub(crate) fn refit_warm(c: &Collapse, grid: &InitGrid, center: CollapseParams) -> Option<CollapseParams> {
    let grid = &clip_to_data(grid, c);
    let f = objective(c);
    let best_grid = grid
        .points()
        .into_iter()
        .min_by(|a, b| f(&a.as_array()).total_cmp(&f(&b.as_array())))?;
    let (params, value, _) = descend(c, &[center, best_grid], grid.steps());
    value.is_finite().then_some(params)
}
