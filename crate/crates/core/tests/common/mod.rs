//! Dense density-matrix simulator used as an independent oracle for the
//! tableau. Qubit `q` is bit `q` of the computational-basis index.

#![allow(dead_code)]

use lrmipt::clifford::{Clifford, CliffordGate2Q};
use lrmipt::pauli::PauliOperator;
use lrmipt::tableau::StabilizerState;
use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;

fn i_pow(r: u8) -> C64 {
    match r & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Matrix of `i^r X^x Z^z`.
pub fn pauli_matrix(p: &PauliOperator) -> Mat {
    let n = p.num_qubits();
    let dim = 1usize << n;
    let mut xm = 0usize;
    let mut zm = 0usize;
    for q in 0..n {
        if p.x_bit(q) {
            xm |= 1 << q;
        }
        if p.z_bit(q) {
            zm |= 1 << q;
        }
    }
    let ph = i_pow(p.phase_exponent());
    let mut m = Mat::zeros(dim, dim);
    for b in 0..dim {
        // Z^z acts first on |b>, then X^x flips.
        let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[(b ^ xm, b)] = ph * sign;
    }
    m
}

/// `P v` for a Pauli operator `P`.
pub fn pauli_apply(p: &PauliOperator, v: &DVector<C64>) -> DVector<C64> {
    let n = p.num_qubits();
    let (mut xm, mut zm) = (0usize, 0usize);
    for q in 0..n {
        xm |= (p.x_bit(q) as usize) << q;
        zm |= (p.z_bit(q) as usize) << q;
    }
    let ph = i_pow(p.phase_exponent());
    let mut out = DVector::zeros(v.len());
    for b in 0..v.len() {
        let sign = if (b & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ xm] = ph * sign * v[b];
    }
    out
}

/// `U|0…0⟩` up to a global phase: the joint +1 eigenvector of the images of
/// every `Z_q`.
fn clifford_on_zero(c: &Clifford) -> DVector<C64> {
    let n = c.num_qubits();
    let dim = 1usize << n;
    for seed in 0..dim {
        let mut v = DVector::<C64>::zeros(dim);
        v[seed] = C64::new(1.0, 0.0);
        for q in 0..n {
            v = (&v + pauli_apply(c.image_z(q), &v)) * C64::new(0.5, 0.0);
        }
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
    unreachable!("stabilizer projector cannot vanish on every basis vector")
}

/// `U|b⟩` for the basis state with bits `b`, consistent across `b`.
pub fn clifford_on_basis(c: &Clifford, psi0: &DVector<C64>, b: usize) -> DVector<C64> {
    let mut v = psi0.clone();
    for q in 0..c.num_qubits() {
        if (b >> q) & 1 == 1 {
            v = pauli_apply(c.image_x(q), &v);
        }
    }
    v
}

/// A unitary whose conjugation action matches `c` (global phase arbitrary).
pub fn clifford_unitary(c: &Clifford) -> Mat {
    let dim = 1usize << c.num_qubits();
    let psi0 = clifford_on_zero(c);
    let mut u = Mat::zeros(dim, dim);
    for b in 0..dim {
        u.set_column(b, &clifford_on_basis(c, &psi0, b));
    }
    u
}

/// `U` applied to `|0…0⟩` and `|1 0…0⟩`.
pub fn clifford_first_two(c: &Clifford) -> (DVector<C64>, DVector<C64>) {
    let psi0 = clifford_on_zero(c);
    (clifford_on_basis(c, &psi0, 0), clifford_on_basis(c, &psi0, 1))
}

pub fn gate_unitary(g: &CliffordGate2Q) -> Mat {
    clifford_unitary(&g.to_clifford())
}

/// `ρ ← U ρ U†` with a 4×4 `u` acting on sites `(i, j)` (gate qubit 0 on `i`).
pub fn apply_two_qubit(rho: &mut Mat, u: &Mat, i: usize, j: usize) {
    let dim = rho.nrows();
    let local = |b: usize| ((b >> i) & 1) | (((b >> j) & 1) << 1);
    let with_local = |b: usize, l: usize| {
        let b = (b & !(1 << i)) | ((l & 1) << i);
        (b & !(1 << j)) | (((l >> 1) & 1) << j)
    };
    // left multiply
    let mut tmp = Mat::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..dim {
            let v = rho[(row, col)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let lr = local(row);
            for out in 0..4 {
                tmp[(with_local(row, out), col)] += u[(out, lr)] * v;
            }
        }
    }
    // right multiply by U†
    let mut res = Mat::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            let v = tmp[(row, col)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let lc = local(col);
            for out in 0..4 {
                res[(row, with_local(col, out))] += v * u[(out, lc)].conj();
            }
        }
    }
    *rho = res;
}

pub fn apply_full(rho: &mut Mat, u: &Mat) {
    *rho = u * &*rho * u.adjoint();
}

/// Projects onto outcome `m` of `Z_q`; returns the outcome probability.
pub fn measure(rho: &mut Mat, q: usize, m: u8) -> f64 {
    let dim = rho.nrows();
    for r in 0..dim {
        for c in 0..dim {
            if ((r >> q) & 1) as u8 != m || ((c >> q) & 1) as u8 != m {
                rho[(r, c)] = C64::new(0.0, 0.0);
            }
        }
    }
    let prob = rho.trace().re;
    if prob > 1e-12 {
        *rho /= C64::new(prob, 0.0);
    }
    prob
}

pub fn zero_state(n: usize) -> Mat {
    let dim = 1usize << n;
    let mut m = Mat::zeros(dim, dim);
    m[(0, 0)] = C64::new(1.0, 0.0);
    m
}

pub fn maximally_mixed(n: usize) -> Mat {
    let dim = 1usize << n;
    Mat::identity(dim, dim) / C64::new(dim as f64, 0.0)
}

/// `|0…0⟩⟨0…0|` with qubit `site` fully mixed.
pub fn zero_with_mixed(n: usize, site: usize) -> Mat {
    let mut m = zero_state(n);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(1 << site, 1 << site)] = C64::new(0.5, 0.0);
    m
}

/// `2^{-n} ∏ (I + g)` over the tableau's generators.
pub fn tableau_density(s: &StabilizerState) -> Mat {
    let n = s.num_qubits();
    let dim = 1usize << n;
    let id = Mat::identity(dim, dim);
    let mut rho = id.clone();
    for g in s.generators() {
        rho = (&id + pauli_matrix(&g)) * rho;
    }
    rho / C64::new(dim as f64, 0.0)
}

/// Reduced density matrix on `sites` (ordered as given).
pub fn partial_trace(rho: &Mat, n: usize, sites: &[usize]) -> Mat {
    let k = sites.len();
    let dim_a = 1usize << k;
    let rest: Vec<usize> = (0..n).filter(|q| !sites.contains(q)).collect();
    let dim_b = 1usize << rest.len();
    let compose = |a: usize, b: usize| {
        let mut idx = 0usize;
        for (t, &q) in sites.iter().enumerate() {
            idx |= ((a >> t) & 1) << q;
        }
        for (t, &q) in rest.iter().enumerate() {
            idx |= ((b >> t) & 1) << q;
        }
        idx
    };
    let mut out = Mat::zeros(dim_a, dim_a);
    for a1 in 0..dim_a {
        for a2 in 0..dim_a {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..dim_b {
                acc += rho[(compose(a1, b), compose(a2, b))];
            }
            out[(a1, a2)] = acc;
        }
    }
    out
}

/// Von Neumann entropy in bits of a state with a flat spectrum, which every
/// stabilizer state has: `ρ² = Tr(ρ²) ρ` and `S = -log2 Tr(ρ²)`. Panics if the
/// spectrum is not flat.
pub fn von_neumann_bits(rho: &Mat) -> f64 {
    let sq = rho * rho;
    let purity = sq.trace().re;
    let flat = &sq - rho * C64::new(purity, 0.0);
    assert!(
        flat.iter().all(|z| z.norm() < 1e-9),
        "spectrum is not flat"
    );
    -purity.log2()
}

pub fn region_entropy(rho: &Mat, n: usize, sites: &[usize]) -> f64 {
    if sites.is_empty() {
        return 0.0;
    }
    von_neumann_bits(&partial_trace(rho, n, sites))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub type Vector = DVector<C64>;

/// `ψ ← U ψ` with a 4×4 `u` on sites `(i, j)`.
pub fn apply_two_qubit_vec(psi: &mut Vector, u: &Mat, i: usize, j: usize) {
    let dim = psi.len();
    let mut out = Vector::zeros(dim);
    for b in 0..dim {
        let v = psi[b];
        if v == C64::new(0.0, 0.0) {
            continue;
        }
        let l = ((b >> i) & 1) | (((b >> j) & 1) << 1);
        let base = b & !(1 << i) & !(1 << j);
        for o in 0..4 {
            let idx = base | ((o & 1) << i) | (((o >> 1) & 1) << j);
            out[idx] += u[(o, l)] * v;
        }
    }
    *psi = out;
}

/// Zeroes amplitudes with `Z_q ≠ m`; returns the remaining squared norm.
pub fn project_vec(psi: &mut Vector, q: usize, m: u8) -> f64 {
    for b in 0..psi.len() {
        if ((b >> q) & 1) as u8 != m {
            psi[b] = C64::new(0.0, 0.0);
        }
    }
    psi.norm_squared()
}

pub fn basis_zero(n: usize) -> Vector {
    let mut v = Vector::zeros(1 << n);
    v[0] = C64::new(1.0, 0.0);
    v
}

/// Density matrix `Σ_k |ψ_k⟩⟨ψ_k|` normalized to unit trace.
pub fn mixture(states: &[Vector]) -> Mat {
    let dim = states[0].len();
    let mut rho = Mat::zeros(dim, dim);
    for s in states {
        rho += s * s.adjoint();
    }
    let tr = rho.trace();
    rho / tr
}
