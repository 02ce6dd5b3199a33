//! Second Rényi entropy from the domain-wall matrix element
//! `e^{-S_A} = ⟨I| ∏_{i∈A} X_i |ψ⟩ / ⟨I|ψ⟩`.

use super::hamiltonian::{HeffSpec, Hamiltonian};
use super::lanczos::{ground_state, GroundState, Sector};
use crate::error::{Error, Result};

/// Smallest `|⟨I|ψ⟩|` accepted before the ratio is considered meaningless.
pub const OVERLAP_FLOOR: f64 = 1e-12;

/// Amplitudes `(↑, ↓)` of the single-site reference state, normalized.
pub fn reference_site() -> (f64, f64) {
    let s3 = 3f64.sqrt();
    let n = 8f64.sqrt();
    ((s3 + 1.0) / n, (s3 - 1.0) / n)
}

/// `⟨I|s⟩` for the basis state `s` on `l` sites (bit set = ↓).
fn reference_amplitude(s: usize, l: usize) -> f64 {
    let (up, down) = reference_site();
    let downs = (s & ((1 << l) - 1)).count_ones() as i32;
    up.powi(l as i32 - downs) * down.powi(downs)
}

/// `S_A^{(2)}` of a normalized state `psi` on `l` sites for the sites in
/// `region`.
pub fn renyi2_from_state(psi: &[f64], l: usize, region: &[usize]) -> Result<f64> {
    let mask = region.iter().fold(0usize, |m, &q| m | (1 << q));
    let mut den = 0.0;
    let mut num = 0.0;
    for (s, &a) in psi.iter().enumerate() {
        den += reference_amplitude(s, l) * a;
        // ⟨I| X_A |s⟩ = ⟨I|s ⊕ A⟩.
        num += reference_amplitude(s ^ mask, l) * a;
    }
    if den.abs() < OVERLAP_FLOOR {
        return Err(Error::DegenerateOverlap(den.abs()));
    }
    let ratio = num / den;
    if !(ratio > 0.0) {
        return Err(Error::Domain(format!(
            "matrix element ratio {ratio:e} is not positive"
        )));
    }
    Ok(-ratio.ln())
}

/// Ground state of the effective Hamiltonian in the flip-even sector.
pub fn heff_ground_state(spec: &HeffSpec) -> Result<GroundState> {
    ground_state(&Hamiltonian::new(spec)?, Sector::Even)
}

pub fn renyi2_entropy(spec: &HeffSpec, region: &[usize]) -> Result<f64> {
    if let Some(&q) = region.iter().find(|&&q| q >= spec.l) {
        return Err(Error::Domain(format!("site {q} outside chain of {} sites", spec.l)));
    }
    let gs = heff_ground_state(spec)?;
    renyi2_from_state(&gs.vector, spec.l, region)
}

/// Centered block of `size` sites.
pub fn centered_block(l: usize, size: usize) -> Vec<usize> {
    let start = (l - size.min(l)) / 2;
    (start..start + size.min(l)).collect()
}

/// `S^{(2)}` of centered blocks of sizes `0..=max_size` from one ground state.
pub fn renyi2_profile(spec: &HeffSpec, max_size: usize) -> Result<Vec<f64>> {
    let gs = heff_ground_state(spec)?;
    (0..=max_size.min(spec.l))
        .map(|k| renyi2_from_state(&gs.vector, spec.l, &centered_block(spec.l, k)))
        .collect()
}
