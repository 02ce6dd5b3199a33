//! Mixed-state stabilizer tableau.
//!
//! The state on `L` qubits is described by `k ≤ L` commuting, independent
//! stabilizer generators. Alongside them the tableau keeps a full symplectic
//! basis of the Pauli group: one destabilizer per stabilizer and `L − k`
//! logical pairs spanning the maximally mixed part. The basis is stored as
//! `L` slots of two rows each:
//!
//! * slot `s < k`: row `2s` is the destabilizer, row `2s + 1` the stabilizer;
//! * slot `s ≥ k`: rows `2s`, `2s + 1` are an anticommuting logical pair.
//!
//! Rows anticommute only with their slot partner. Measurement outcomes and
//! purification events then cost `O(L)` row operations.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::clifford::{Clifford, CliffordGate2Q};
use crate::error::{Error, Result};
use crate::gf2;
use crate::pauli::{and_parity, words_for, PauliOperator};

/// A set of sites, stored as a bit mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    n: usize,
    mask: Vec<u64>,
}

impl Region {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            mask: vec![0; words_for(n)],
        }
    }

    pub fn from_sites(n: usize, sites: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Self::empty(n);
        for s in sites {
            assert!(s < n, "site {s} outside register of {n} qubits");
            r.mask[s >> 6] |= 1 << (s & 63);
        }
        r
    }

    /// `len` consecutive sites starting at `start`, wrapping around the ring.
    pub fn contiguous(n: usize, start: usize, len: usize) -> Self {
        Self::from_sites(n, (0..len.min(n)).map(|d| (start + d) % n))
    }

    pub fn len(&self) -> usize {
        self.mask.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, site: usize) -> bool {
        (self.mask[site >> 6] >> (site & 63)) & 1 == 1
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let mut mask: Vec<u64> = self.mask.iter().map(|w| !w).collect();
        if self.n % 64 != 0 {
            let last = mask.len() - 1;
            mask[last] &= (1u64 << (self.n % 64)) - 1;
        }
        Self { n: self.n, mask }
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&s| self.contains(s))
    }
}

/// Which branch of the measurement rule fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementKind {
    /// `Z` anticommuted with a stabilizer: random outcome, `k` unchanged.
    Random,
    /// `±Z` was already in the stabilizer group.
    Deterministic,
    /// `Z` commuted with the group but was independent of it: `k → k + 1`.
    Purifying,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// `0` for the `+1` eigenvalue, `1` for `−1`.
    pub outcome: u8,
    pub kind: MeasurementKind,
}

/// How `scramble_global` draws its `L`-qubit Clifford.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScrambleMethod {
    /// Exactly uniform over the Clifford group.
    #[default]
    Uniform,
    /// `2L` rounds of random two-qubit gates on random perfect matchings.
    Brickwork,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    w: usize,
    k: usize,
    data: Vec<u64>,
    phases: Vec<u8>,
}

impl StabilizerState {
    /// The pure product state `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        assert!(n > 0, "empty register");
        let w = words_for(n);
        let mut s = Self {
            n,
            w,
            k: n,
            data: vec![0; 2 * n * 2 * w],
            phases: vec![0; 2 * n],
        };
        for q in 0..n {
            s.set_single(2 * q, q, true, false);
            s.set_single(2 * q + 1, q, false, true);
        }
        s
    }

    /// The maximally mixed state `I / 2^L`.
    pub fn maximally_mixed(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.k = 0;
        s
    }

    /// `|0…0⟩` with qubit `site` replaced by a maximally mixed qubit.
    pub fn zero_with_mixed_site(n: usize, site: usize) -> Self {
        assert!(site < n);
        let mut s = Self::zero(n);
        s.swap_slots(site, n - 1);
        s.k = n - 1;
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of stabilizer generators `k`.
    pub fn num_generators(&self) -> usize {
        self.k
    }

    /// `L − k` bits.
    pub fn global_entropy(&self) -> usize {
        self.n - self.k
    }

    pub fn is_pure(&self) -> bool {
        self.k == self.n
    }

    pub fn generators(&self) -> Vec<PauliOperator> {
        (0..self.k).map(|s| self.row_operator(2 * s + 1)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliOperator> {
        (0..self.k).map(|s| self.row_operator(2 * s)).collect()
    }

    /// Logical pairs spanning the mixed part of the state.
    pub fn logical_pairs(&self) -> Vec<(PauliOperator, PauliOperator)> {
        (self.k..self.n)
            .map(|s| (self.row_operator(2 * s), self.row_operator(2 * s + 1)))
            .collect()
    }

    fn row_operator(&self, r: usize) -> PauliOperator {
        let row = self.row(r);
        PauliOperator::from_raw(
            self.n,
            row[..self.w].to_vec(),
            row[self.w..].to_vec(),
            self.phases[r],
        )
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        let rw = 2 * self.w;
        &self.data[r * rw..(r + 1) * rw]
    }

    #[inline]
    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        let rw = 2 * self.w;
        &mut self.data[r * rw..(r + 1) * rw]
    }

    #[inline]
    fn x_bit(&self, r: usize, q: usize) -> bool {
        (self.data[r * 2 * self.w + (q >> 6)] >> (q & 63)) & 1 == 1
    }

    fn set_single(&mut self, r: usize, q: usize, xb: bool, zb: bool) {
        let w = self.w;
        let row = self.row_mut(r);
        row.fill(0);
        if xb {
            row[q >> 6] |= 1 << (q & 63);
        }
        if zb {
            row[w + (q >> 6)] |= 1 << (q & 63);
        }
        // Y would need phase 1; only X and Z are written here.
        self.phases[r] = 0;
    }

    /// Row `dst ← dst · src`.
    fn row_mul(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.w;
        let rw = 2 * w;
        let (d, s) = if dst < src {
            let (a, b) = self.data.split_at_mut(src * rw);
            (&mut a[dst * rw..(dst + 1) * rw], &b[..rw])
        } else {
            let (a, b) = self.data.split_at_mut(dst * rw);
            (&mut b[..rw], &a[src * rw..(src + 1) * rw])
        };
        let dp = 2 * and_parity(&d[w..], &s[..w]) as u8;
        for (a, b) in d.iter_mut().zip(s) {
            *a ^= b;
        }
        self.phases[dst] = (self.phases[dst] + self.phases[src] + dp) & 3;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let rw = 2 * self.w;
        self.data.copy_within(src * rw..(src + 1) * rw, dst * rw);
        self.phases[dst] = self.phases[src];
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let rw = 2 * self.w;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (x, y) = self.data.split_at_mut(hi * rw);
        x[lo * rw..(lo + 1) * rw].swap_with_slice(&mut y[..rw]);
        self.phases.swap(a, b);
    }

    fn swap_slots(&mut self, a: usize, b: usize) {
        if a != b {
            self.swap_rows(2 * a, 2 * b);
            self.swap_rows(2 * a + 1, 2 * b + 1);
        }
    }

    fn check_sites(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::Domain(format!(
                "sites ({i}, {j}) outside register of {} qubits",
                self.n
            )));
        }
        if i == j {
            return Err(Error::Domain(format!("two-qubit gate on a single site {i}")));
        }
        Ok(())
    }

    /// Conjugates every row by `gate` acting on sites `(i, j)`.
    pub fn apply_gate(&mut self, gate: &CliffordGate2Q, i: usize, j: usize) -> Result<()> {
        self.check_sites(i, j)?;
        let w = self.w;
        let rw = 2 * w;
        let (wi, bi) = (i >> 6, i & 63);
        let (wj, bj) = (j >> 6, j & 63);
        for (row, phase) in self.data.chunks_exact_mut(rw).zip(self.phases.iter_mut()) {
            let nib = ((row[wi] >> bi) & 1)
                | ((row[w + wi] >> bi) & 1) << 1
                | ((row[wj] >> bj) & 1) << 2
                | ((row[w + wj] >> bj) & 1) << 3;
            if nib == 0 {
                continue;
            }
            let (out, dp) = gate.act(nib as u8);
            let out = out as u64;
            row[wi] = (row[wi] & !(1 << bi)) | (out & 1) << bi;
            row[w + wi] = (row[w + wi] & !(1 << bi)) | ((out >> 1) & 1) << bi;
            row[wj] = (row[wj] & !(1 << bj)) | ((out >> 2) & 1) << bj;
            row[w + wj] = (row[w + wj] & !(1 << bj)) | ((out >> 3) & 1) << bj;
            *phase = (*phase + dp) & 3;
        }
        Ok(())
    }

    /// Conjugates every row by an `L`-qubit Clifford.
    pub fn apply_clifford(&mut self, c: &Clifford) {
        assert_eq!(c.num_qubits(), self.n);
        for r in 0..2 * self.n {
            let img = c.conjugate(&self.row_operator(r));
            let w = self.w;
            let row = self.row_mut(r);
            row[..w].copy_from_slice(img.x_words());
            row[w..].copy_from_slice(img.z_words());
            self.phases[r] = img.phase_exponent();
        }
    }

    /// Projective measurement of `Z_site`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<Measurement> {
        if site >= self.n {
            return Err(Error::Domain(format!(
                "measurement site {site} outside register of {} qubits",
                self.n
            )));
        }
        let q = site;
        let total = 2 * self.n;

        // (a) a stabilizer anticommutes with Z_q.
        if let Some(p) = (0..self.k).find(|&s| self.x_bit(2 * s + 1, q)) {
            let pivot = 2 * p + 1;
            for r in 0..total {
                if r != pivot && r != 2 * p && self.x_bit(r, q) {
                    self.row_mul(r, pivot);
                }
            }
            self.copy_row(2 * p, pivot);
            let outcome = rng.gen::<bool>() as u8;
            self.set_single(pivot, q, false, true);
            self.phases[pivot] = 2 * outcome;
            return Ok(Measurement {
                outcome,
                kind: MeasurementKind::Random,
            });
        }

        // (c) Z_q commutes with the group but anticommutes with a logical
        // operator: it purifies one bit.
        if let Some(lr) = (2 * self.k..total).find(|&r| self.x_bit(r, q)) {
            let partner = lr ^ 1;
            for r in 0..total {
                if r != lr && r != partner && self.x_bit(r, q) {
                    self.row_mul(r, lr);
                }
            }
            let slot = lr / 2;
            let k = self.k;
            self.swap_slots(slot, k);
            let moved = 2 * k + (lr & 1);
            if moved != 2 * k {
                self.copy_row(2 * k, moved);
            }
            let outcome = rng.gen::<bool>() as u8;
            self.set_single(2 * k + 1, q, false, true);
            self.phases[2 * k + 1] = 2 * outcome;
            self.k += 1;
            return Ok(Measurement {
                outcome,
                kind: MeasurementKind::Purifying,
            });
        }

        // (b) ±Z_q is a product of the stabilizers whose destabilizers
        // anticommute with it.
        let w = self.w;
        let mut acc = vec![0u64; 2 * w];
        let mut phase = 0u8;
        for s in 0..self.k {
            if self.x_bit(2 * s, q) {
                let src = self.row(2 * s + 1);
                let dp = 2 * and_parity(&acc[w..], &src[..w]) as u8;
                for (a, b) in acc.iter_mut().zip(src) {
                    *a ^= b;
                }
                phase = (phase + self.phases[2 * s + 1] + dp) & 3;
            }
        }
        debug_assert!(
            acc[..w].iter().all(|&v| v == 0)
                && acc[w..]
                    .iter()
                    .enumerate()
                    .all(|(i, &v)| v == if i == q >> 6 { 1 << (q & 63) } else { 0 }),
            "deterministic measurement did not reconstruct Z_{q}"
        );
        debug_assert!(phase % 2 == 0);
        Ok(Measurement {
            outcome: phase / 2,
            kind: MeasurementKind::Deterministic,
        })
    }

    /// Entanglement entropy of `region` in bits: `|A| − g_A`, where `g_A` is
    /// the number of independent stabilizers supported inside `A`.
    pub fn subsystem_entropy(&self, region: &Region) -> usize {
        assert_eq!(region.n, self.n, "region built for a different register");
        let size = region.len();
        if size == 0 {
            return 0;
        }
        let keep = region.complement();
        let w = self.w;
        let mut rows = Vec::with_capacity(self.k * 2 * w);
        for s in 0..self.k {
            let row = self.row(2 * s + 1);
            rows.extend(row[..w].iter().zip(&keep.mask).map(|(a, m)| a & m));
            rows.extend(row[w..].iter().zip(&keep.mask).map(|(a, m)| a & m));
        }
        let outside_rank = gf2::rank_in_place(&mut rows, 2 * w);
        let inside = self.k - outside_rank;
        size - inside
    }

    /// Applies a random global Clifford to every row.
    pub fn scramble_global<R: Rng + ?Sized>(&mut self, rng: &mut R, method: ScrambleMethod) {
        match method {
            ScrambleMethod::Uniform => {
                let c = Clifford::random(self.n, rng);
                self.apply_clifford(&c);
            }
            ScrambleMethod::Brickwork => {
                let mut sites: Vec<usize> = (0..self.n).collect();
                for _ in 0..2 * self.n {
                    sites.shuffle(rng);
                    for pair in sites.chunks_exact(2) {
                        let g = CliffordGate2Q::sample(rng);
                        self.apply_gate(&g, pair[0], pair[1])
                            .expect("distinct sites from a permutation");
                    }
                }
            }
        }
    }

    /// Verifies the symplectic-basis invariants. Intended for tests and debug
    /// builds; cost is `O(L² · L/64)`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let total = 2 * self.n;
        let w = self.w;
        for a in 0..total {
            let ra = self.row(a);
            for b in (a + 1)..total {
                let rb = self.row(b);
                let anti = (and_parity(&ra[..w], &rb[w..]) ^ and_parity(&ra[w..], &rb[..w])) == 1;
                let expected = a / 2 == b / 2;
                if anti != expected {
                    return Err(format!(
                        "rows {a} and {b} {} but should {}",
                        if anti { "anticommute" } else { "commute" },
                        if expected { "anticommute" } else { "commute" }
                    ));
                }
            }
        }
        for s in 0..self.k {
            if !self.row_operator(2 * s + 1).is_hermitian() {
                return Err(format!("stabilizer {s} is not Hermitian"));
            }
        }
        let mut all = self.data.clone();
        let rank = gf2::rank_in_place(&mut all, 2 * w);
        if rank != total {
            return Err(format!("basis rank {rank} < {total}"));
        }
        let mut stabs: Vec<u64> = (0..self.k).flat_map(|s| self.row(2 * s + 1).to_vec()).collect();
        let sr = gf2::rank_in_place(&mut stabs, 2 * w);
        if sr != self.k {
            return Err(format!("stabilizer rank {sr} != k = {}", self.k));
        }
        Ok(())
    }
}
