//! The effective long-range Ising Hamiltonian on an open chain,
//! `H = Σ_{i<j} -J/|i-j|^α (3 Z_i Z_j - X_i X_j) - h Σ_j X_j`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::zeta::zeta;
use crate::error::{Error, Result};

pub const MAX_SITES: usize = 14;
/// Largest chain for which a dense matrix is materialized.
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeffSpec {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub alpha: f64,
}

impl HeffSpec {
    pub fn new(l: usize, j: f64, gamma: f64, alpha: f64) -> Result<Self> {
        let spec = Self { l, j, gamma, alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(2..=MAX_SITES).contains(&self.l) {
            bad.push(format!("L = {} (need 2 <= L <= {MAX_SITES})", self.l));
        }
        if !(self.alpha > 1.0) {
            bad.push(format!("alpha = {} (the field sum needs alpha > 1)", self.alpha));
        }
        if !self.j.is_finite() || !self.gamma.is_finite() {
            bad.push("J and Gamma must be finite".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Domain(bad.join("; ")))
        }
    }

    /// `h = Γ/3 + J ζ(α)/9`.
    pub fn h(&self) -> f64 {
        self.gamma / 3.0 + self.j * zeta(self.alpha) / 9.0
    }
}

/// Matrix-free Hamiltonian in the `Z` basis; bit `q` of a basis index is
/// site `q` (`0 = ↑`).
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    l: usize,
    /// `(mask with bits i and j, J_ij)` for each pair.
    pairs: Vec<(usize, f64)>,
    h: f64,
    diag: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(spec: &HeffSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self::with_field(spec.l, spec.j, spec.alpha, spec.h()))
    }

    /// The same operator with an explicit transverse field.
    pub fn with_field(l: usize, j: f64, alpha: f64, h: f64) -> Self {
        assert!((2..=MAX_SITES).contains(&l), "L out of range");
        let mut pairs = Vec::new();
        for a in 0..l {
            for b in a + 1..l {
                pairs.push(((1 << a) | (1 << b), j / ((b - a) as f64).powf(alpha)));
            }
        }
        let diag = (0..1usize << l)
            .map(|s| {
                pairs
                    .iter()
                    .map(|&(m, c)| {
                        // Z_i Z_j = +1 when the two bits agree.
                        let zz = if (s & m).count_ones() == 1 { -1.0 } else { 1.0 };
                        -3.0 * c * zz
                    })
                    .sum()
            })
            .collect();
        Self { l, pairs, h, diag }
    }

    pub fn num_sites(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        1 << self.l
    }

    pub fn field(&self) -> f64 {
        self.h
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (s, o) in out.iter_mut().enumerate() {
            let mut acc = self.diag[s] * v[s];
            for &(m, c) in &self.pairs {
                acc += c * v[s ^ m];
            }
            for q in 0..self.l {
                acc -= self.h * v[s ^ (1 << q)];
            }
            *o = acc;
        }
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.l > MAX_DENSE_SITES {
            return Err(Error::Domain(format!(
                "dense matrix limited to L <= {MAX_DENSE_SITES}, got {}",
                self.l
            )));
        }
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        let mut e = vec![0.0; d];
        let mut col = vec![0.0; d];
        for s in 0..d {
            e[s] = 1.0;
            self.apply(&e, &mut col);
            e[s] = 0.0;
            m.set_column(s, &nalgebra::DVector::from_column_slice(&col));
        }
        Ok(m)
    }

    /// Global spin flip `∏ X`.
    pub fn parity_flip(&self, v: &[f64]) -> Vec<f64> {
        let all = self.dim() - 1;
        (0..self.dim()).map(|s| v[s ^ all]).collect()
    }
}

/// The Hamiltonian of `spec` as a dense matrix (L ≤ 12).
pub fn build_hamiltonian(spec: &HeffSpec) -> Result<DMatrix<f64>> {
    Hamiltonian::new(spec)?.to_dense()
}
