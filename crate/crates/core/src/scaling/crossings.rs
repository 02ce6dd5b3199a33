//! Single-layer crossing count of the half-chain cut.

use super::power::{fit_power_law, PowerFit};
use crate::circuit::DistanceSampler;
use crate::error::Result;

/// Expected number of gates in one layer whose two sites lie on opposite
/// halves of the periodic chain.
///
/// A gate at distance `r ≤ L/2` from a uniform site straddles the cut for
/// `2r` of the `L` starting sites, whichever direction it points.
pub fn expected_crossings(l: usize, alpha: f64, gates_per_layer: usize) -> f64 {
    let sampler = DistanceSampler::new(l, alpha);
    let per_gate: f64 = (1..=sampler.max_distance())
        .map(|r| sampler.probability(r) * 2.0 * r as f64 / l as f64)
        .sum();
    gates_per_layer as f64 * per_gate
}

/// Power-law exponent of `expected_crossings(L, α, L/2)` over `sizes`.
pub fn crossing_exponent(sizes: &[usize], alpha: f64) -> Result<PowerFit> {
    let pts: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&l| (l as f64, expected_crossings(l, alpha, l / 2)))
        .collect();
    fit_power_law(&pts, 0.0)
}
