//! Clifford unitaries described by their conjugation action on Pauli generators.
//!
//! Uniform sampling walks the symplectic group one anticommuting pair at a
//! time: the image of `X_k` is a uniformly random nonzero vector in the
//! symplectic complement of the pairs chosen so far, and the image of `Z_k`
//! is uniform among complement vectors that anticommute with it. Independent
//! uniform signs on all `2n` images complete a uniform draw from the Clifford
//! group modulo global phase.

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{get_bit, words_for, Pauli, PauliOperator};

/// An `n`-qubit Clifford, stored as the images of `X_0, Z_0, X_1, Z_1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clifford {
    n: usize,
    images: Vec<PauliOperator>,
}

impl Clifford {
    pub fn identity(n: usize) -> Self {
        let images = (0..n)
            .flat_map(|q| {
                [
                    PauliOperator::single(n, q, Pauli::X),
                    PauliOperator::single(n, q, Pauli::Z),
                ]
            })
            .collect();
        Self { n, images }
    }

    /// Builds a Clifford from generator images, ordered `X_0, Z_0, X_1, ...`.
    pub fn from_images(images: Vec<PauliOperator>) -> Result<Self> {
        if images.len() % 2 != 0 {
            return Err(Error::Domain("odd number of generator images".into()));
        }
        let n = images.len() / 2;
        if images.iter().any(|p| p.num_qubits() != n || !p.is_hermitian()) {
            return Err(Error::Domain(
                "images must be Hermitian operators on the same register".into(),
            ));
        }
        let c = Self { n, images };
        if !c.is_symplectic() {
            return Err(Error::Domain("images do not preserve the symplectic form".into()));
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[PauliOperator] {
        &self.images
    }

    pub fn image_x(&self, q: usize) -> &PauliOperator {
        &self.images[2 * q]
    }

    pub fn image_z(&self, q: usize) -> &PauliOperator {
        &self.images[2 * q + 1]
    }

    /// Checks that generator images satisfy the canonical commutation relations.
    pub fn is_symplectic(&self) -> bool {
        let m = self.images.len();
        for a in 0..m {
            for b in (a + 1)..m {
                let expected = b == a + 1 && a % 2 == 0;
                if self.images[a].anticommutes_with(&self.images[b]) != expected {
                    return false;
                }
            }
        }
        true
    }

    /// Uniformly random Clifford modulo global phase.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let w = words_for(n);
        let tail = if n % 64 == 0 {
            u64::MAX
        } else {
            (1u64 << (n % 64)) - 1
        };
        let random_vec = |rng: &mut R| {
            let mut x: Vec<u64> = (0..w).map(|_| rng.gen()).collect();
            let mut z: Vec<u64> = (0..w).map(|_| rng.gen()).collect();
            x[w - 1] &= tail;
            z[w - 1] &= tail;
            PauliOperator::from_raw(n, x, z, 0)
        };

        let mut pairs: Vec<(PauliOperator, PauliOperator)> = Vec::with_capacity(n);
        for _ in 0..n {
            let v = loop {
                let mut v = random_vec(rng);
                project_out(&mut v, &pairs);
                if !v.is_identity_up_to_phase() {
                    break v;
                }
            };
            let u = loop {
                let mut u = random_vec(rng);
                project_out(&mut u, &pairs);
                if u.anticommutes_with(&v) {
                    break u;
                }
            };
            pairs.push((v, u));
        }

        let mut images = Vec::with_capacity(2 * n);
        for (v, u) in pairs {
            for mut p in [v, u] {
                let negative: bool = rng.gen();
                make_hermitian(&mut p, negative);
                images.push(p);
            }
        }
        Self { n, images }
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        assert_eq!(p.num_qubits(), self.n);
        let mut out = PauliOperator::identity(self.n);
        out.phase = p.phase;
        for q in 0..self.n {
            if get_bit(&p.x, q) {
                out.mul_assign_right(&self.images[2 * q]);
            }
            if get_bit(&p.z, q) {
                out.mul_assign_right(&self.images[2 * q + 1]);
            }
        }
        out
    }

    /// The Clifford that applies `self` first and `next` second.
    pub fn then(&self, next: &Clifford) -> Clifford {
        assert_eq!(self.n, next.n);
        Clifford {
            n: self.n,
            images: self.images.iter().map(|p| next.conjugate(p)).collect(),
        }
    }

    pub fn inverse(&self) -> Clifford {
        let n = self.n;
        // Coefficient of generator b in U⁻¹(g_a) is <g_a, U(dual(g_b))>, where
        // dual swaps X_q and Z_q.
        let mut images = Vec::with_capacity(2 * n);
        for a in 0..2 * n {
            let ga = generator(n, a);
            let mut x = vec![false; n];
            let mut z = vec![false; n];
            for b in 0..2 * n {
                let dual = &self.images[b ^ 1];
                if ga.anticommutes_with(dual) {
                    if b % 2 == 0 {
                        x[b / 2] = true;
                    } else {
                        z[b / 2] = true;
                    }
                }
            }
            let mut cand = PauliOperator::from_bits(n, &x, &z, false);
            if self.conjugate(&cand).phase != ga.phase {
                cand.negate();
            }
            images.push(cand);
        }
        Clifford { n, images }
    }

    pub fn hadamard(n: usize, q: usize) -> Self {
        let mut c = Self::identity(n);
        c.images[2 * q] = PauliOperator::single(n, q, Pauli::Z);
        c.images[2 * q + 1] = PauliOperator::single(n, q, Pauli::X);
        c
    }

    /// The phase gate `S = diag(1, i)`.
    pub fn phase_gate(n: usize, q: usize) -> Self {
        let mut c = Self::identity(n);
        c.images[2 * q] = PauliOperator::single(n, q, Pauli::Y);
        c
    }

    pub fn cnot(n: usize, control: usize, target: usize) -> Self {
        assert_ne!(control, target);
        let mut c = Self::identity(n);
        let mut xx = PauliOperator::single(n, control, Pauli::X);
        xx.set(target, Pauli::X);
        let mut zz = PauliOperator::single(n, control, Pauli::Z);
        zz.set(target, Pauli::Z);
        c.images[2 * control] = xx;
        c.images[2 * target + 1] = zz;
        c
    }
}

/// The `a`-th generator in the order `X_0, Z_0, X_1, Z_1, ...`.
fn generator(n: usize, a: usize) -> PauliOperator {
    let letter = if a % 2 == 0 { Pauli::X } else { Pauli::Z };
    PauliOperator::single(n, a / 2, letter)
}

fn make_hermitian(p: &mut PauliOperator, negative: bool) {
    let y: u32 = p
        .x
        .iter()
        .zip(&p.z)
        .map(|(a, b)| (a & b).count_ones())
        .sum();
    p.phase = ((y & 3) as u8 + if negative { 2 } else { 0 }) & 3;
}

/// Removes the components of `v` along the symplectic pairs, leaving a vector
/// in their symplectic complement. Phases are irrelevant here.
fn project_out(v: &mut PauliOperator, pairs: &[(PauliOperator, PauliOperator)]) {
    for (a, b) in pairs {
        let with_b = v.anticommutes_with(b);
        let with_a = v.anticommutes_with(a);
        if with_b {
            xor_into(v, a);
        }
        if with_a {
            xor_into(v, b);
        }
    }
}

fn xor_into(v: &mut PauliOperator, other: &PauliOperator) {
    for (s, o) in v.x.iter_mut().zip(&other.x) {
        *s ^= o;
    }
    for (s, o) in v.z.iter_mut().zip(&other.z) {
        *s ^= o;
    }
}

// ---------------------------------------------------------------------------
// Two-qubit gates in compact form.
//
// A local two-qubit Pauli is a nibble: bit 0 = x on the first qubit, bit 1 =
// z on the first, bit 2 = x on the second, bit 3 = z on the second. The
// operator is `i^r X_a^b0 Z_a^b1 X_b^b2 Z_b^b3`.

const X_MASK: u8 = 0b0101;

#[inline]
fn parity8(v: u8) -> u8 {
    (v.count_ones() & 1) as u8
}

#[inline]
fn local_symplectic(a: u8, b: u8) -> u8 {
    parity8(a & X_MASK & (b >> 1)) ^ parity8((a >> 1) & X_MASK & b)
}

#[inline]
fn local_mul((r1, a): (u8, u8), (r2, b): (u8, u8)) -> (u8, u8) {
    let dp = 2 * parity8((a >> 1) & X_MASK & b);
    ((r1 + r2 + dp) & 3, a ^ b)
}

#[inline]
fn local_hermitian_offset(a: u8) -> u8 {
    (a & X_MASK & (a >> 1)).count_ones() as u8
}

fn local_project(mut v: u8, pairs: &[(u8, u8)]) -> u8 {
    for &(a, b) in pairs {
        let with_b = local_symplectic(v, b);
        let with_a = local_symplectic(v, a);
        if with_b == 1 {
            v ^= a;
        }
        if with_a == 1 {
            v ^= b;
        }
    }
    v
}

/// A two-qubit Clifford with a precomputed 16-entry conjugation table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CliffordGate2Q {
    /// `(phase, nibble)` images of `X_a, Z_a, X_b, Z_b`.
    images: [(u8, u8); 4],
    /// For each input nibble: output nibble in the low four bits, phase
    /// increment in bits 4..6.
    table: [u8; 16],
}

impl CliffordGate2Q {
    fn from_local_images(images: [(u8, u8); 4]) -> Self {
        let mut table = [0u8; 16];
        for (m, slot) in table.iter_mut().enumerate() {
            let mut acc = (0u8, 0u8);
            for (g, &img) in images.iter().enumerate() {
                if (m >> g) & 1 == 1 {
                    acc = local_mul(acc, img);
                }
            }
            *slot = acc.1 | (acc.0 << 4);
        }
        Self { images, table }
    }

    pub fn identity() -> Self {
        Self::from_local_images([(0, 0b0001), (0, 0b0010), (0, 0b0100), (0, 0b1000)])
    }

    /// Uniformly random element of the two-qubit Clifford group (11,520
    /// elements modulo global phase).
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut pairs: [(u8, u8); 2] = [(0, 0); 2];
        for k in 0..2 {
            let done = &pairs[..k];
            let v = loop {
                let v = local_project(rng.gen::<u8>() & 0xF, done);
                if v != 0 {
                    break v;
                }
            };
            let u = loop {
                let u = local_project(rng.gen::<u8>() & 0xF, done);
                if local_symplectic(v, u) == 1 {
                    break u;
                }
            };
            pairs[k] = (v, u);
        }
        let signs: u8 = rng.gen::<u8>() & 0xF;
        let vecs = [pairs[0].0, pairs[0].1, pairs[1].0, pairs[1].1];
        let mut images = [(0u8, 0u8); 4];
        for g in 0..4 {
            let r = (local_hermitian_offset(vecs[g]) + 2 * ((signs >> g) & 1)) & 3;
            images[g] = (r, vecs[g]);
        }
        Self::from_local_images(images)
    }

    /// Conjugation of a local nibble; returns `(nibble, phase increment)`.
    #[inline]
    pub fn act(&self, nibble: u8) -> (u8, u8) {
        let e = self.table[(nibble & 0xF) as usize];
        (e & 0xF, e >> 4)
    }

    pub fn local_images(&self) -> [(u8, u8); 4] {
        self.images
    }

    pub fn to_clifford(&self) -> Clifford {
        let images = self
            .images
            .iter()
            .map(|&(r, v)| {
                let x = vec![(v & 1) as u64 | (((v >> 2) & 1) as u64) << 1];
                let z = vec![((v >> 1) & 1) as u64 | (((v >> 3) & 1) as u64) << 1];
                PauliOperator::from_raw(2, x, z, r)
            })
            .collect();
        Clifford { n: 2, images }
    }

    pub fn from_clifford(c: &Clifford) -> Result<Self> {
        if c.num_qubits() != 2 {
            return Err(Error::Domain(format!(
                "expected a two-qubit Clifford, got {} qubits",
                c.num_qubits()
            )));
        }
        let mut images = [(0u8, 0u8); 4];
        for (g, p) in c.images.iter().enumerate() {
            let nib = (p.x_bit(0) as u8)
                | (p.z_bit(0) as u8) << 1
                | (p.x_bit(1) as u8) << 2
                | (p.z_bit(1) as u8) << 3;
            images[g] = (p.phase_exponent(), nib);
        }
        Ok(Self::from_local_images(images))
    }

    pub fn inverse(&self) -> Self {
        Self::from_clifford(&self.to_clifford().inverse()).expect("two-qubit inverse")
    }

    pub fn then(&self, next: &Self) -> Self {
        Self::from_clifford(&self.to_clifford().then(&next.to_clifford())).expect("two-qubit")
    }

    /// CNOT with the first qubit as control.
    pub fn cnot() -> Self {
        Self::from_clifford(&Clifford::cnot(2, 0, 1)).expect("two-qubit")
    }

    pub fn hadamard_first() -> Self {
        Self::from_clifford(&Clifford::hadamard(2, 0)).expect("two-qubit")
    }

    pub fn phase_first() -> Self {
        Self::from_clifford(&Clifford::phase_gate(2, 0)).expect("two-qubit")
    }

    pub fn swap() -> Self {
        Self::from_local_images([(0, 0b0100), (0, 0b1000), (0, 0b0001), (0, 0b0010)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_two_qubit_paulis() -> Vec<PauliOperator> {
        let letters = ["I", "X", "Y", "Z"];
        let mut out = Vec::new();
        for a in letters {
            for b in letters {
                out.push(format!("{a}{b}").parse().unwrap());
            }
        }
        out
    }

    #[test]
    fn textbook_gate_actions() {
        let cx = Clifford::cnot(2, 0, 1);
        assert_eq!(cx.conjugate(&"XI".parse().unwrap()).to_string(), "+XX");
        assert_eq!(cx.conjugate(&"IZ".parse().unwrap()).to_string(), "+ZZ");
        assert_eq!(cx.conjugate(&"ZI".parse().unwrap()).to_string(), "+ZI");
        let s = Clifford::phase_gate(1, 0);
        assert_eq!(s.conjugate(&"Y".parse().unwrap()).to_string(), "-X");
        let h = Clifford::hadamard(1, 0);
        assert_eq!(h.conjugate(&"Y".parse().unwrap()).to_string(), "-Y");
    }

    #[test]
    fn random_cliffords_are_symplectic_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 2, 5, 70] {
            let c = Clifford::random(n, &mut rng);
            assert!(c.is_symplectic());
            assert!(c.images().iter().all(|p| p.is_hermitian()));
        }
    }

    #[test]
    fn inverse_undoes_random_clifford() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 3, 8] {
            let c = Clifford::random(n, &mut rng);
            let id = c.then(&c.inverse());
            assert_eq!(id, Clifford::identity(n));
            let id2 = c.inverse().then(&c);
            assert_eq!(id2, Clifford::identity(n));
        }
    }

    #[test]
    fn two_qubit_sample_composed_with_inverse_is_identity_on_all_paulis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let g = CliffordGate2Q::sample(&mut rng);
            let round = g.then(&g.inverse()).to_clifford();
            for p in all_two_qubit_paulis() {
                assert_eq!(round.conjugate(&p), p);
            }
        }
    }

    #[test]
    fn compact_table_matches_generic_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let g = CliffordGate2Q::sample(&mut rng);
            let c = g.to_clifford();
            assert!(c.is_symplectic());
            for m in 0u8..16 {
                let p = PauliOperator::from_raw(
                    2,
                    vec![(m & 1) as u64 | (((m >> 2) & 1) as u64) << 1],
                    vec![((m >> 1) & 1) as u64 | (((m >> 3) & 1) as u64) << 1],
                    0,
                );
                let img = c.conjugate(&p);
                let (nib, dp) = g.act(m);
                let expect = (img.x_bit(0) as u8)
                    | (img.z_bit(0) as u8) << 1
                    | (img.x_bit(1) as u8) << 2
                    | (img.z_bit(1) as u8) << 3;
                assert_eq!(nib, expect);
                assert_eq!(dp, img.phase_exponent());
            }
        }
    }

    #[test]
    fn same_seed_same_gate_sequence() {
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            assert_eq!(CliffordGate2Q::sample(&mut a), CliffordGate2Q::sample(&mut b));
        }
    }

    #[test]
    fn from_images_rejects_non_symplectic() {
        let imgs: Vec<PauliOperator> = ["XI", "XI", "IX", "IZ"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert!(Clifford::from_images(imgs).is_err());
    }
}
