//! Exact diagonalization of the effective long-range Ising model and its
//! second Rényi entropy matrix element.

mod hamiltonian;
mod lanczos;
mod renyi;
mod zeta;

pub use hamiltonian::{build_hamiltonian, Hamiltonian, HeffSpec, MAX_DENSE_SITES, MAX_SITES};
pub use lanczos::{ground_state, GroundState, Sector, RESIDUAL_TOL};
pub use renyi::{
    centered_block, heff_ground_state, reference_site, renyi2_entropy, renyi2_from_state,
    renyi2_profile, OVERLAP_FLOOR,
};
pub use zeta::zeta;
