//! Bit-packed Pauli operators over GF(2).
//!
//! An operator is stored as `i^phase · X^x · Z^z` with `x`, `z` packed into
//! 64-bit words. The phase is kept modulo 4. A Hermitian operator (in the
//! usual sense, where `Y = iXZ`) has `phase ≡ |x ∧ z| (mod 2)`.

use std::fmt;

use crate::error::{Error, Result};

/// Number of 64-bit words needed for `n` bits.
#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i >> 6] >> (i & 63)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize, v: bool) {
    let m = 1u64 << (i & 63);
    if v {
        words[i >> 6] |= m;
    } else {
        words[i >> 6] &= !m;
    }
}

/// Parity of the bitwise AND of two equally long word slices.
#[inline]
pub(crate) fn and_parity(a: &[u64], b: &[u64]) -> u32 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u & v).count_ones())
        .sum::<u32>()
        & 1
}

/// Phase increment (mod 4) from `(X^x1 Z^z1)(X^x2 Z^z2)`.
#[inline]
pub(crate) fn product_phase(z1: &[u64], x2: &[u64]) -> u8 {
    (2 * and_parity(z1, x2)) as u8
}

/// A Pauli operator on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    pub(crate) phase: u8,
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Hermitian single-site operator with sign `+1`.
    pub fn single(n: usize, site: usize, letter: Pauli) -> Self {
        let mut p = Self::identity(n);
        p.set(site, letter);
        p
    }

    pub(crate) fn from_raw(n: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        debug_assert_eq!(z.len(), words_for(n));
        Self {
            n,
            x,
            z,
            phase: phase & 3,
        }
    }

    /// Hermitian operator from symplectic bits and a sign (`false` = `+1`).
    pub fn from_bits(n: usize, x: &[bool], z: &[bool], negative: bool) -> Self {
        assert_eq!(x.len(), n);
        assert_eq!(z.len(), n);
        let mut p = Self::identity(n);
        for q in 0..n {
            set_bit(&mut p.x, q, x[q]);
            set_bit(&mut p.z, q, z[q]);
        }
        p.phase = p.hermitian_phase_offset() + if negative { 2 } else { 0 };
        p.phase &= 3;
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, q: usize) -> bool {
        get_bit(&self.x, q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        get_bit(&self.z, q)
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Raw phase exponent `r` in `i^r X^x Z^z`.
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    /// Letter at site `q`, ignoring the global phase.
    pub fn letter(&self, q: usize) -> Pauli {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Overwrite site `q`, keeping the operator Hermitian with the same sign.
    pub fn set(&mut self, q: usize, letter: Pauli) {
        let negative = self.is_hermitian() && self.is_negative();
        let (xb, zb) = match letter {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        };
        set_bit(&mut self.x, q, xb);
        set_bit(&mut self.z, q, zb);
        self.phase = (self.hermitian_phase_offset() + if negative { 2 } else { 0 }) & 3;
    }

    /// `|x ∧ z| mod 4`, the phase of the positive Hermitian operator.
    fn hermitian_phase_offset(&self) -> u8 {
        let y: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        (y & 3) as u8
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase.wrapping_sub(self.hermitian_phase_offset())) & 1 == 0
    }

    /// Sign of a Hermitian operator relative to the tensor product of `I, X, Y, Z`.
    pub fn is_negative(&self) -> bool {
        (self.phase.wrapping_sub(self.hermitian_phase_offset()) & 3) == 2
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Symplectic inner product; `true` when the operators anticommute.
    pub fn anticommutes_with(&self, other: &Self) -> bool {
        (and_parity(&self.x, &other.z) ^ and_parity(&self.z, &other.x)) == 1
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        !self.anticommutes_with(other)
    }

    /// `self ← self · rhs`.
    pub fn mul_assign_right(&mut self, rhs: &Self) {
        debug_assert_eq!(self.n, rhs.n);
        let dp = product_phase(&self.z, &rhs.x);
        self.phase = (self.phase + rhs.phase + dp) & 3;
        for (a, b) in self.x.iter_mut().zip(&rhs.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&rhs.z) {
            *a ^= b;
        }
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }
}

impl std::str::FromStr for PauliOperator {
    type Err = Error;

    /// Parses strings such as `"+XIZY"`, `"-ZZ"` or `"XX"` (site 0 first).
    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        let mut x = vec![false; n];
        let mut z = vec![false; n];
        for (q, c) in body.chars().enumerate() {
            match c {
                'I' | '_' => {}
                'X' => x[q] = true,
                'Y' => {
                    x[q] = true;
                    z[q] = true;
                }
                'Z' => z[q] = true,
                other => {
                    return Err(Error::Parse(format!("invalid Pauli letter {other:?} in {s:?}")))
                }
            }
        }
        Ok(Self::from_bits(n, &x, &z, negative))
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.wrapping_sub(self.hermitian_phase_offset()) & 3 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            let c = match self.letter(q) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn display_round_trip() {
        for s in ["+XIZY", "-ZZ", "+IIII", "-YYX"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn single_qubit_products() {
        // XZ = -iY, ZX = iY, XY = iZ
        let mut a = p("X");
        a.mul_assign_right(&p("Z"));
        assert_eq!(a.to_string(), "-iY");
        let mut b = p("Z");
        b.mul_assign_right(&p("X"));
        assert_eq!(b.to_string(), "+iY");
        let mut c = p("X");
        c.mul_assign_right(&p("Y"));
        assert_eq!(c.to_string(), "+iZ");
        let mut d = p("Y");
        d.mul_assign_right(&p("Y"));
        assert_eq!(d.to_string(), "+I");
    }

    #[test]
    fn commuting_products_stay_hermitian() {
        let mut a = p("XX");
        a.mul_assign_right(&p("ZZ"));
        assert!(a.is_hermitian());
        assert_eq!(a.to_string(), "-YY");
    }

    #[test]
    fn commutation_rule() {
        assert!(p("XI").anticommutes_with(&p("ZI")));
        assert!(p("XX").commutes_with(&p("ZZ")));
        assert!(p("XYZ").anticommutes_with(&p("ZZX")));
    }

    #[test]
    fn set_keeps_sign() {
        let mut a = p("-XZ");
        a.set(0, Pauli::Y);
        assert_eq!(a.to_string(), "-YZ");
        assert_eq!(a.weight(), 2);
    }

    #[test]
    fn wide_operators_span_words() {
        let n = 130;
        let a = PauliOperator::single(n, 129, Pauli::X);
        let b = PauliOperator::single(n, 129, Pauli::Z);
        let c = PauliOperator::single(n, 1, Pauli::Z);
        assert!(a.anticommutes_with(&b));
        assert!(a.commutes_with(&c));
    }

    #[test]
    fn bad_letter_is_rejected() {
        assert!("XQ".parse::<PauliOperator>().is_err());
    }
}
