//! WebAssembly bindings for the browser demo in `www/`.

use wasm_bindgen::prelude::*;

use lrmipt::circuit::{Circuit, CircuitConfig, DistanceSampler, InitialState};
use lrmipt::heff::{centered_block, heff_ground_state, renyi2_from_state, HeffSpec};
use lrmipt::observables::half_chain_region;
use lrmipt::scaling::crossing_exponent;

/// `P(r)` for `r = 1..=L/2`.
#[wasm_bindgen]
pub fn distance_distribution(l: usize, alpha: f64) -> Vec<f64> {
    if l < 2 {
        return Vec::new();
    }
    let s = DistanceSampler::new(l, alpha);
    (1..=s.max_distance()).map(|r| s.probability(r)).collect()
}

/// Crossing exponents on an `α` grid, as `[α0, μ0, α1, μ1, ...]`, fitted
/// over sizes `64, 128, ..., l_max`.
#[wasm_bindgen]
pub fn crossing_exponents(alpha_min: f64, alpha_max: f64, points: usize, l_max: usize) -> Vec<f64> {
    let sizes: Vec<usize> = (6..=20).map(|k| 1usize << k).filter(|&l| l <= l_max).collect();
    if sizes.len() < 2 || points == 0 {
        return Vec::new();
    }
    let step = if points > 1 { (alpha_max - alpha_min) / (points - 1) as f64 } else { 0.0 };
    (0..points)
        .flat_map(|k| {
            let a = alpha_min + step * k as f64;
            let mu = crossing_exponent(&sizes, a).map_or(f64::NAN, |f| f.mu);
            [a, mu]
        })
        .collect()
}

/// Half-chain entropy after each of `steps` time steps of one trajectory
/// started from the product state.
#[wasm_bindgen]
pub fn entropy_trace(l: usize, alpha: f64, p: f64, steps: usize, seed: u64) -> Vec<f64> {
    let config = CircuitConfig::new(l, alpha, p).with_seed(seed);
    let Ok(mut circuit) = Circuit::new(config.clone()) else {
        return Vec::new();
    };
    let mut rng = config.trajectory_rng(0);
    let mut state = circuit.prepare(InitialState::ProductZero, &mut rng);
    let region = half_chain_region(l);
    (0..steps)
        .map(|_| {
            circuit.step(&mut state, &mut rng);
            state.subsystem_entropy(&region) as f64
        })
        .collect()
}

/// `S^{(2)}` of centered blocks of size `0..=L/2` (NaN where undefined),
/// with `J = 1`. Limited to `L ≤ 10` to keep the page responsive.
#[wasm_bindgen]
pub fn renyi_profile(l: usize, alpha: f64, gamma_over_j: f64) -> Vec<f64> {
    if l > 10 {
        return Vec::new();
    }
    let Ok(spec) = HeffSpec::new(l, 1.0, gamma_over_j, alpha) else {
        return Vec::new();
    };
    let Ok(gs) = heff_ground_state(&spec) else {
        return Vec::new();
    };
    (0..=l / 2)
        .map(|k| renyi2_from_state(&gs.vector, l, &centered_block(l, k)).unwrap_or(f64::NAN))
        .collect()
}
