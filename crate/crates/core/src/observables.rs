//! Ensemble estimators for the four diagnostics: half-chain entropy,
//! antipodal mutual information, purification time and the global entropy
//! of an initially maximally mixed chain.
//!
//! Every estimator keeps the raw per-trajectory samples so that bootstrap
//! analyses can resample them later. Trajectory `i` always uses stream `i` of
//! the configuration seed, so results do not depend on the thread count.

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{run_trajectory, CircuitConfig, InitialState};
use crate::error::{Error, Result};
use crate::tableau::{Region, StabilizerState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    HalfChain,
    MutualInformation,
    PurificationTime,
    GlobalEntropy,
}

impl Observable {
    pub fn tag(self) -> &'static str {
        match self {
            Observable::HalfChain => "half-chain",
            Observable::MutualInformation => "mutual-information",
            Observable::PurificationTime => "purification-time",
            Observable::GlobalEntropy => "global-entropy",
        }
    }

    pub fn is_series(self) -> bool {
        matches!(self, Observable::GlobalEntropy)
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Observable::HalfChain,
            Observable::MutualInformation,
            Observable::PurificationTime,
            Observable::GlobalEntropy,
        ]
        .into_iter()
        .find(|o| o.tag() == s)
        .ok_or_else(|| Error::Parse(format!("unknown observable {s:?}")))
    }
}

/// Point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Raw per-trajectory data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Samples {
    Scalar(Vec<f64>),
    /// `values[i][k]` is trajectory `i` at `times[k]`.
    Series { times: Vec<usize>, values: Vec<Vec<f64>> },
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Scalar(v) => v.len(),
            Samples::Series { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRecord {
    #[serde(rename = "L")]
    pub l: usize,
    pub alpha: f64,
    pub p: f64,
    pub observable: Observable,
    pub samples: Samples,
    /// One entry for scalar observables, one per recorded time for series.
    pub summary: Vec<Estimate>,
    pub n: usize,
    /// Purification runs only: the step cap and the number of censored samples.
    pub depth_cap: Option<usize>,
    pub censored: usize,
}

impl EnsembleRecord {
    pub fn new(l: usize, alpha: f64, p: f64, observable: Observable, samples: Samples) -> Self {
        let mut r = Self {
            l,
            alpha,
            p,
            observable,
            n: samples.len(),
            samples,
            summary: Vec::new(),
            depth_cap: None,
            censored: 0,
        };
        r.summary = r.summarize();
        r
    }

    fn with_cap(mut self, cap: usize) -> Self {
        self.depth_cap = Some(cap);
        if let Samples::Scalar(v) = &self.samples {
            self.censored = v.iter().filter(|&&t| t >= cap as f64).count();
        }
        self
    }

    /// Recomputes the summary from the raw samples: the median for
    /// purification times, the mean otherwise.
    pub fn summarize(&self) -> Vec<Estimate> {
        match &self.samples {
            Samples::Scalar(v) if self.observable == Observable::PurificationTime => {
                vec![median_estimate(v)]
            }
            Samples::Scalar(v) => vec![mean_estimate(v)],
            Samples::Series { times, values } => (0..times.len())
                .map(|k| mean_estimate(&values.iter().map(|row| row[k]).collect::<Vec<_>>()))
                .collect(),
        }
    }

    /// Whether more than half of the purification samples hit the cap, so
    /// the median is only a lower bound.
    pub fn median_is_censored(&self) -> bool {
        self.depth_cap.is_some() && 2 * self.censored > self.n
    }

    pub fn scalar_samples(&self) -> Option<&[f64]> {
        match &self.samples {
            Samples::Scalar(v) => Some(v),
            Samples::Series { .. } => None,
        }
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn mean_estimate(v: &[f64]) -> Estimate {
    match v.len() {
        0 => Estimate {
            value: f64::NAN,
            stderr: f64::NAN,
        },
        1 => Estimate {
            value: v[0],
            stderr: 0.0,
        },
        n => {
            let m = mean(v);
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            Estimate {
                value: m,
                stderr: (var / n as f64).sqrt(),
            }
        }
    }
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    median_sorted(&s)
}

fn median_sorted(s: &[f64]) -> f64 {
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Median with a distribution-free standard error from the order statistics
/// `n/2 ± √n / 2`, which bracket the median with ≈68% probability. Floored at
/// half a time step because purification times are integers.
pub fn median_estimate(v: &[f64]) -> Estimate {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        return Estimate {
            value: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let half = (n as f64).sqrt() / 2.0;
    let lo = ((n as f64 / 2.0 - half).floor().max(0.0)) as usize;
    let hi = ((n as f64 / 2.0 + half).ceil() as usize).min(n - 1);
    Estimate {
        value: median_sorted(&s),
        stderr: (0.5 * (s[hi] - s[lo])).max(0.5),
    }
}

/// Late-time window: every `L/4` steps over the final quarter of the run.
pub fn steady_state_times(steps: usize, l: usize) -> Vec<usize> {
    let stride = (l / 4).max(1);
    let start = steps - steps / 4;
    let mut times: Vec<usize> = (0..)
        .map(|k| steps.saturating_sub(k * stride))
        .take_while(|&t| t >= start.max(1))
        .collect();
    times.reverse();
    times
}

pub fn half_chain_region(l: usize) -> Region {
    Region::contiguous(l, 0, l / 2)
}

/// Antipodal regions `[0, L/8)` and `[L/2, L/2 + L/8)`.
pub fn antipodal_regions(l: usize) -> Result<(Region, Region)> {
    if l % 8 != 0 || l == 0 {
        return Err(Error::Domain(format!(
            "mutual information needs L divisible by 8, got L = {l}"
        )));
    }
    Ok((
        Region::contiguous(l, 0, l / 8),
        Region::contiguous(l, l / 2, l / 8),
    ))
}

pub fn mutual_information(state: &StabilizerState, a: &Region, b: &Region) -> f64 {
    let sa = state.subsystem_entropy(a) as f64;
    let sb = state.subsystem_entropy(b) as f64;
    sa + sb - state.subsystem_entropy(&a.union(b)) as f64
}

/// Averages `f(state)` over the late-time window of one product-state run.
fn steady_state_average(
    config: &CircuitConfig,
    index: u64,
    mut f: impl FnMut(&StabilizerState) -> f64,
) -> Result<f64> {
    let times = steady_state_times(config.steps(), config.l);
    let mut next = 0;
    let mut acc = 0.0;
    run_trajectory(config, InitialState::ProductZero, index, |t, s| {
        if next < times.len() && times[next] == t {
            acc += f(s);
            next += 1;
        }
        ControlFlow::Continue(())
    })?;
    Ok(acc / times.len() as f64)
}

pub fn half_chain_sample(config: &CircuitConfig, index: u64) -> Result<f64> {
    let region = half_chain_region(config.l);
    steady_state_average(config, index, |s| s.subsystem_entropy(&region) as f64)
}

pub fn mutual_information_sample(config: &CircuitConfig, index: u64) -> Result<f64> {
    let (a, b) = antipodal_regions(config.l)?;
    steady_state_average(config, index, |s| mutual_information(s, &a, &b))
}

/// First step `t ≥ 1` with zero global entropy, or `cap` if none by then.
pub fn purification_sample(config: &CircuitConfig, index: u64, cap: usize) -> Result<f64> {
    let mut cfg = config.clone();
    cfg.depth = cap.div_ceil(cfg.l).max(1);
    let mut hit = None;
    let mut circuit = crate::circuit::Circuit::new(cfg.clone())?;
    let mut rng = cfg.trajectory_rng(index);
    circuit.run_trajectory(InitialState::ScrambledSingleMixed, &mut rng, Some(cap), |t, s| {
        if t >= 1 && s.is_pure() {
            hit = Some(t);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(hit.unwrap_or(cap) as f64)
}

/// Global entropy at each of `times` (ascending) for a maximally mixed start.
pub fn global_entropy_sample(config: &CircuitConfig, index: u64, times: &[usize]) -> Result<Vec<f64>> {
    let last = times.last().copied().unwrap_or(0);
    let mut out = Vec::with_capacity(times.len());
    let mut next = 0;
    let mut circuit = crate::circuit::Circuit::new(config.clone())?;
    let mut rng = config.trajectory_rng(index);
    circuit.run_trajectory(InitialState::MaximallyMixed, &mut rng, Some(last), |t, s| {
        while next < times.len() && times[next] == t {
            out.push(s.global_entropy() as f64);
            next += 1;
        }
        // Once pure the state stays pure, so the rest of the series is zero.
        if s.is_pure() && t >= 1 {
            out.resize(times.len(), 0.0);
            next = times.len();
        }
        if next == times.len() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(out)
}

fn collect_scalar(n: usize, f: impl Fn(u64) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
    (0..n as u64).into_par_iter().map(f).collect()
}

pub fn estimate_half_chain(config: &CircuitConfig, n: usize) -> Result<EnsembleRecord> {
    config.validate()?;
    let v = collect_scalar(n, |i| half_chain_sample(config, i))?;
    Ok(EnsembleRecord::new(
        config.l,
        config.alpha,
        config.p,
        Observable::HalfChain,
        Samples::Scalar(v),
    ))
}

pub fn estimate_mutual_information(config: &CircuitConfig, n: usize) -> Result<EnsembleRecord> {
    config.validate()?;
    antipodal_regions(config.l)?;
    let v = collect_scalar(n, |i| mutual_information_sample(config, i))?;
    Ok(EnsembleRecord::new(
        config.l,
        config.alpha,
        config.p,
        Observable::MutualInformation,
        Samples::Scalar(v),
    ))
}

/// Purification times with the step cap defaulting to `16L`.
pub fn estimate_purification_time(
    config: &CircuitConfig,
    n: usize,
    depth_cap: Option<usize>,
) -> Result<EnsembleRecord> {
    config.validate()?;
    let cap = depth_cap.unwrap_or(16 * config.l);
    if cap == 0 {
        return Err(Error::Domain("purification cap must be positive".into()));
    }
    let v = collect_scalar(n, |i| purification_sample(config, i, cap))?;
    Ok(EnsembleRecord::new(
        config.l,
        config.alpha,
        config.p,
        Observable::PurificationTime,
        Samples::Scalar(v),
    )
    .with_cap(cap))
}

/// Default recording times: multiples of `L/8` up to the configured depth.
pub fn default_series_times(config: &CircuitConfig) -> Vec<usize> {
    let stride = (config.l / 8).max(1);
    (1..=config.steps() / stride).map(|k| k * stride).collect()
}

pub fn estimate_global_entropy_series(
    config: &CircuitConfig,
    n: usize,
    times: &[usize],
) -> Result<EnsembleRecord> {
    config.validate()?;
    let steps = config.steps();
    let bad: Vec<String> = times
        .iter()
        .filter(|&&t| t < 1 || t > steps)
        .map(|t| t.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(Error::Domain(format!(
            "sample times outside [1, {steps}]: {}",
            bad.join(", ")
        )));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("sample times must be strictly increasing".into()));
    }
    let values: Vec<Vec<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| global_entropy_sample(config, i, times))
        .collect::<Result<_>>()?;
    Ok(EnsembleRecord::new(
        config.l,
        config.alpha,
        config.p,
        Observable::GlobalEntropy,
        Samples::Series {
            times: times.to_vec(),
            values,
        },
    ))
}
