//! Long-range hybrid circuits: power-law gate layers interleaved with
//! projective Z measurements on a periodic chain.

use std::ops::ControlFlow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::CliffordGate2Q;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream, StreamRng};
use crate::tableau::{Measurement, ScrambleMethod, StabilizerState};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementScheme {
    /// `round(pL)` distinct sites per layer.
    #[default]
    FixedCount,
    /// Each site independently with probability `p`.
    PerSiteBernoulli,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    ProductZero,
    ScrambledSingleMixed,
    MaximallyMixed,
}

/// Parameters of one trajectory family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub alpha: f64,
    pub p: f64,
    pub gates_per_layer: usize,
    /// Number of time steps in units of `L`.
    pub depth: usize,
    #[serde(default)]
    pub measurement_scheme: MeasurementScheme,
    #[serde(default)]
    pub scramble: ScrambleMethod,
    pub seed: u64,
}

impl CircuitConfig {
    /// Defaults: `L/2` gates per step, depth `32L`, fixed-count measurements.
    pub fn new(l: usize, alpha: f64, p: f64) -> Self {
        Self {
            l,
            alpha,
            p,
            gates_per_layer: l / 2,
            depth: 32,
            measurement_scheme: MeasurementScheme::FixedCount,
            scramble: ScrambleMethod::Uniform,
            seed: 0,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_scheme(mut self, scheme: MeasurementScheme) -> Self {
        self.measurement_scheme = scheme;
        self
    }

    pub fn with_gates_per_layer(mut self, gates: usize) -> Self {
        self.gates_per_layer = gates;
        self
    }

    pub fn steps(&self) -> usize {
        self.depth * self.l
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.l < 4 {
            bad.push(format!("L = {} (need L >= 4)", self.l));
        }
        if !(self.alpha >= 0.0) {
            bad.push(format!("alpha = {} (need alpha >= 0)", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.p) {
            bad.push(format!("p = {} (need 0 <= p <= 1)", self.p));
        }
        if self.depth < 1 {
            bad.push("depth = 0 (need depth >= 1)".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }

    /// Independent stream for trajectory `index` of this configuration.
    pub fn trajectory_rng(&self, index: u64) -> StreamRng {
        let cell = derive_seed(
            self.seed,
            &[self.l as u64, self.alpha.to_bits(), self.p.to_bits()],
        );
        stream(cell, index)
    }
}

/// `P(r) ∝ r^{-α}` on `r = 1..=L/2`, sampled from a cumulative table.
#[derive(Clone, Debug)]
pub struct DistanceSampler {
    cdf: Vec<f64>,
}

impl DistanceSampler {
    pub fn new(l: usize, alpha: f64) -> Self {
        assert!(l >= 2, "distance sampler needs L >= 2");
        let weights = distance_weights(l, alpha);
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        *cdf.last_mut().unwrap() = 1.0;
        Self { cdf }
    }

    pub fn max_distance(&self) -> usize {
        self.cdf.len()
    }

    pub fn probability(&self, r: usize) -> f64 {
        match r {
            0 => 0.0,
            1 => self.cdf[0],
            r if r <= self.cdf.len() => self.cdf[r - 1] - self.cdf[r - 2],
            _ => 0.0,
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) + 1
    }
}

/// Unnormalized weights `r^{-α}` for `r = 1..=L/2`.
pub fn distance_weights(l: usize, alpha: f64) -> Vec<f64> {
    (1..=l / 2).map(|r| (r as f64).powf(-alpha)).collect()
}

/// Draws one distance from `P(r) ∝ r^{-α}` on the ring of `L` sites.
pub fn sample_distance<R: Rng + ?Sized>(rng: &mut R, l: usize, alpha: f64) -> usize {
    DistanceSampler::new(l, alpha).sample(rng)
}

/// Reusable per-configuration state for running layers.
#[derive(Clone, Debug)]
pub struct Circuit {
    config: CircuitConfig,
    distances: DistanceSampler,
    scratch: Vec<bool>,
}

/// Result of `run_trajectory`.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    /// Completed time steps.
    pub steps: usize,
    /// Whether the observer stopped the run before the configured depth.
    pub stopped_early: bool,
    pub state: StabilizerState,
}

impl Circuit {
    pub fn new(config: CircuitConfig) -> Result<Self> {
        config.validate()?;
        let distances = DistanceSampler::new(config.l, config.alpha);
        let scratch = vec![false; config.l];
        Ok(Self {
            config,
            distances,
            scratch,
        })
    }

    pub fn config(&self) -> &CircuitConfig {
        &self.config
    }

    pub fn distances(&self) -> &DistanceSampler {
        &self.distances
    }

    pub fn prepare<R: Rng + ?Sized>(&self, initial: InitialState, rng: &mut R) -> StabilizerState {
        let l = self.config.l;
        match initial {
            InitialState::ProductZero => StabilizerState::zero(l),
            InitialState::MaximallyMixed => StabilizerState::maximally_mixed(l),
            InitialState::ScrambledSingleMixed => {
                let mut s = StabilizerState::zero_with_mixed_site(l, 0);
                s.scramble_global(rng, self.config.scramble);
                s
            }
        }
    }

    /// Picks the next gate: site, partner, gate. Draw order is part of the
    /// reproducibility contract.
    #[inline]
    pub fn draw_gate<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize, CliffordGate2Q) {
        let l = self.config.l;
        let i = rng.gen_range(0..l);
        let r = self.distances.sample(rng);
        let j = if rng.gen::<bool>() {
            (i + r) % l
        } else {
            (i + l - r) % l
        };
        (i, j, CliffordGate2Q::sample(rng))
    }

    pub fn apply_unitary_layer<R: Rng + ?Sized>(&self, state: &mut StabilizerState, rng: &mut R) {
        for _ in 0..self.config.gates_per_layer {
            let (i, j, g) = self.draw_gate(rng);
            state
                .apply_gate(&g, i, j)
                .expect("partner distance is in 1..=L/2, so i != j");
        }
    }

    /// Sites measured in this layer, in ascending order.
    pub fn draw_measured_sites<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<usize> {
        let l = self.config.l;
        match self.config.measurement_scheme {
            MeasurementScheme::FixedCount => {
                let m = ((self.config.p * l as f64).round() as usize).min(l);
                // Floyd's algorithm for m distinct values in 0..l.
                self.scratch.fill(false);
                for j in (l - m)..l {
                    let t = rng.gen_range(0..=j);
                    if self.scratch[t] {
                        self.scratch[j] = true;
                    } else {
                        self.scratch[t] = true;
                    }
                }
                (0..l).filter(|&s| self.scratch[s]).collect()
            }
            MeasurementScheme::PerSiteBernoulli => {
                let p = self.config.p;
                (0..l).filter(|_| rng.gen::<f64>() < p).collect()
            }
        }
    }

    pub fn apply_measurement_layer<R: Rng + ?Sized>(
        &mut self,
        state: &mut StabilizerState,
        rng: &mut R,
    ) -> Vec<(usize, Measurement)> {
        let sites = self.draw_measured_sites(rng);
        sites
            .into_iter()
            .map(|q| (q, state.measure_z(q, rng).expect("site drawn inside register")))
            .collect()
    }

    /// One time step: unitary layer then measurement layer.
    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut StabilizerState, rng: &mut R) {
        self.apply_unitary_layer(state, rng);
        self.apply_measurement_layer(state, rng);
        if cfg!(debug_assertions) && self.config.l <= 32 {
            if let Err(e) = state.check_invariants() {
                panic!("tableau invariant violated: {e}");
            }
        }
    }

    /// Prepares `initial` and runs up to `config.steps()` time steps.
    ///
    /// `observer` sees the prepared state at step 0 and the state after every
    /// completed step; returning `ControlFlow::Break` ends the run.
    pub fn run_trajectory<R, F>(
        &mut self,
        initial: InitialState,
        rng: &mut R,
        max_steps: Option<usize>,
        mut observer: F,
    ) -> TrajectoryRecord
    where
        R: Rng + ?Sized,
        F: FnMut(usize, &StabilizerState) -> ControlFlow<()>,
    {
        let mut state = self.prepare(initial, rng);
        let total = max_steps.unwrap_or_else(|| self.config.steps());
        if observer(0, &state).is_break() {
            return TrajectoryRecord {
                steps: 0,
                stopped_early: total > 0,
                state,
            };
        }
        for t in 1..=total {
            self.step(&mut state, rng);
            if observer(t, &state).is_break() {
                return TrajectoryRecord {
                    steps: t,
                    stopped_early: t < total,
                    state,
                };
            }
        }
        TrajectoryRecord {
            steps: total,
            stopped_early: false,
            state,
        }
    }
}

/// Convenience wrapper: runs trajectory `index` of `config`.
pub fn run_trajectory<F>(
    config: &CircuitConfig,
    initial: InitialState,
    index: u64,
    observer: F,
) -> Result<TrajectoryRecord>
where
    F: FnMut(usize, &StabilizerState) -> ControlFlow<()>,
{
    let mut circuit = Circuit::new(config.clone())?;
    let mut rng = config.trajectory_rng(index);
    Ok(circuit.run_trajectory(initial, &mut rng, None, observer))
}
