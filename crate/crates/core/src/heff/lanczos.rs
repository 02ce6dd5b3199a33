//! Lowest eigenpair by restarted Lanczos with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};

pub const RESIDUAL_TOL: f64 = 1e-10;

/// Which symmetry sector to search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    Full,
    /// Even under the global flip `∏ X`.
    #[default]
    Even,
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    /// Normalized, with a non-negative sum of amplitudes.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn symmetrize(h: &Hamiltonian, v: &mut [f64]) {
    let flipped = h.parity_flip(v);
    for (x, y) in v.iter_mut().zip(flipped) {
        *x = 0.5 * (*x + y);
    }
}

/// Lowest eigenpair of `h` in `sector` with `‖Hψ − Eψ‖ < 1e-10`.
pub fn ground_state(h: &Hamiltonian, sector: Sector) -> Result<GroundState> {
    let dim = h.dim();
    let krylov = dim.min(120);
    let max_restarts = 30;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_705);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() + 0.5).collect();
    let mut hv = vec![0.0; dim];
    let mut total_iters = 0;
    let mut best_residual = f64::INFINITY;

    for _ in 0..max_restarts {
        if sector == Sector::Even {
            symmetrize(h, &mut start);
        }
        let n0 = norm(&start);
        let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / n0).collect()];
        let mut alphas = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut ritz = (0.0, vec![1.0]);
        for k in 0..krylov {
            total_iters += 1;
            h.apply(&basis[k], &mut hv);
            let mut w = hv.clone();
            if sector == Sector::Even {
                symmetrize(h, &mut w);
            }
            alphas.push(dot(&basis[k], &w));
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    for (x, y) in w.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
            }
            let beta = norm(&w);
            let last = k + 1 == krylov || beta < 1e-12;
            if last || k % 8 == 7 {
                ritz = lowest_ritz(&alphas, &betas);
                let estimate = beta * ritz.1[k].abs();
                if last || estimate < 0.1 * RESIDUAL_TOL {
                    break;
                }
            }
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        }
        let (energy, y) = ritz;
        let mut psi = vec![0.0; dim];
        for (c, b) in y.iter().zip(&basis) {
            for (x, v) in psi.iter_mut().zip(b) {
                *x += c * v;
            }
        }
        let n = norm(&psi);
        psi.iter_mut().for_each(|x| *x /= n);
        if psi.iter().sum::<f64>() < 0.0 {
            psi.iter_mut().for_each(|x| *x = -*x);
        }
        h.apply(&psi, &mut hv);
        let residual = norm(
            &hv.iter()
                .zip(&psi)
                .map(|(a, b)| a - energy * b)
                .collect::<Vec<_>>(),
        );
        best_residual = best_residual.min(residual);
        if residual < RESIDUAL_TOL {
            return Ok(GroundState {
                energy,
                vector: psi,
                residual,
                iterations: total_iters,
            });
        }
        start = psi;
    }
    Err(Error::NoConvergence {
        residual: best_residual,
        iterations: total_iters,
    })
}

/// Lowest eigenpair of the tridiagonal matrix with diagonal `a` and
/// off-diagonal `b`.
fn lowest_ritz(a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    let m = a.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            a[i]
        } else if i + 1 == j {
            b[i]
        } else if j + 1 == i {
            b[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    (val, eig.eigenvectors.column(idx).iter().copied().collect())
}
