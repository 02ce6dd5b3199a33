//! Sweep plans read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{CircuitConfig, MeasurementScheme};
use crate::error::{Error, Result};
use crate::observables::Observable;
use crate::tableau::ScrambleMethod;

/// Either an explicit list or an inclusive `start..=stop` range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid<T> {
    List(Vec<T>),
    Range { start: T, stop: T, step: T },
}

impl<T: Default> Default for Grid<T> {
    fn default() -> Self {
        Grid::List(Vec::new())
    }
}

/// Values are rounded to twelve decimals so that `0.1 + 2 * 0.05` prints as
/// `0.2`.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

impl Grid<f64> {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::List(v) => Ok(v.clone()),
            Grid::Range { start, stop, step } => {
                if !(*step > 0.0) || !start.is_finite() || !stop.is_finite() {
                    return Err(Error::Config(format!(
                        "range start = {start}, stop = {stop}, step = {step} needs finite bounds and step > 0"
                    )));
                }
                let n = ((stop - start) / step + 1e-9).floor();
                if n < 0.0 {
                    return Ok(Vec::new());
                }
                Ok((0..=n as usize).map(|k| tidy(start + k as f64 * step)).collect())
            }
        }
    }
}

impl Grid<usize> {
    pub fn values(&self) -> Result<Vec<usize>> {
        match self {
            Grid::List(v) => Ok(v.clone()),
            Grid::Range { start, stop, step } => {
                if *step == 0 {
                    return Err(Error::Config("range step must be positive".into()));
                }
                Ok((*start..=*stop).step_by(*step).collect())
            }
        }
    }
}

/// How many gates per time step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateCount {
    #[default]
    HalfChain,
    FullChain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(rename = "L")]
    pub l: Grid<usize>,
    pub alpha: Grid<f64>,
    pub p: Grid<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub seed: u64,
    /// Trajectories per cell.
    pub n: usize,
    /// Time steps in units of `L`.
    #[serde(default = "default_depth")]
    pub depth: usize,
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub gates: GateCount,
    #[serde(default)]
    pub measurement_scheme: MeasurementScheme,
    #[serde(default)]
    pub scramble: ScrambleMethod,
    /// Purification cap in units of `L`.
    #[serde(default = "default_cap")]
    pub purification_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub grid: SweepGrid,
}

fn default_depth() -> usize {
    32
}

fn default_cap() -> usize {
    16
}

/// One `(L, α, p, observable)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub observable: Observable,
    pub config: CircuitConfig,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<usize>>,
    pub file: String,
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> Result<String> {
        let hash = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Checks every field and reports all offenders at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let ls = self.grid.l.values().unwrap_or_else(|e| {
            bad.push(format!("L: {e}"));
            Vec::new()
        });
        let alphas = self.grid.alpha.values().unwrap_or_else(|e| {
            bad.push(format!("alpha: {e}"));
            Vec::new()
        });
        let ps = self.grid.p.values().unwrap_or_else(|e| {
            bad.push(format!("p: {e}"));
            Vec::new()
        });
        let needs_eight = self.observables.contains(&Observable::MutualInformation);
        for &l in &ls {
            if l < 4 || l % 2 != 0 {
                bad.push(format!("L = {l} (need an even L >= 4)"));
            } else if needs_eight && l % 8 != 0 {
                bad.push(format!("L = {l} (mutual information needs L divisible by 8)"));
            }
        }
        for &a in &alphas {
            if !(a >= 0.0) || !a.is_finite() {
                bad.push(format!("alpha = {a} (need a finite alpha >= 0)"));
            }
        }
        for &p in &ps {
            if !(0.0..=1.0).contains(&p) {
                bad.push(format!("p = {p} (need 0 <= p <= 1)"));
            }
        }
        for (name, empty) in [("L", ls.is_empty()), ("alpha", alphas.is_empty()), ("p", ps.is_empty())] {
            if empty {
                bad.push(format!("grid {name} is empty"));
            }
        }
        if self.depth == 0 {
            bad.push("depth = 0 (need at least one step per site)".into());
        }
        if self.purification_cap == 0 {
            bad.push("purification_cap = 0".into());
        }
        if self.observables.is_empty() {
            bad.push("no observables selected".into());
        }
        if self.workers == Some(0) {
            bad.push("workers = 0".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }

    /// All cells in a fixed order: observable, then `L`, `α`, `p`.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        self.validate()?;
        let (ls, alphas, ps) = (
            self.grid.l.values()?,
            self.grid.alpha.values()?,
            self.grid.p.values()?,
        );
        let mut out = Vec::new();
        for &obs in &self.observables {
            for &l in &ls {
                for &alpha in &alphas {
                    for &p in &ps {
                        let mut config = CircuitConfig::new(l, alpha, p)
                            .with_depth(self.depth)
                            .with_seed(self.seed)
                            .with_scheme(self.measurement_scheme);
                        config.scramble = self.scramble;
                        if self.gates == GateCount::FullChain {
                            config = config.with_gates_per_layer(l);
                        }
                        let depth_cap =
                            (obs == Observable::PurificationTime).then_some(self.purification_cap * l);
                        let times = obs
                            .is_series()
                            .then(|| crate::observables::default_series_times(&config));
                        out.push(Cell {
                            observable: obs,
                            file: format!("{}_L{l}_a{alpha}_p{p}.csv", obs.tag()),
                            config,
                            n: self.n,
                            depth_cap,
                            times,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}
