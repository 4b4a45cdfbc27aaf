use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count representable with single-word masks.
pub const MAX_QUBITS: usize = 64;

/// One of the four phases a product of Pauli strings can pick up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn from_exponent(k: u32) -> Self {
        match k & 3 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// Multiply `c` by the phase. Exact: only swaps and sign flips are involved.
    #[inline]
    pub fn apply(self, c: Complex64) -> Complex64 {
        match self {
            Phase::PlusOne => c,
            Phase::PlusI => Complex64::new(-c.im, c.re),
            Phase::MinusOne => -c,
            Phase::MinusI => Complex64::new(c.im, -c.re),
        }
    }
}

/// An `n`-qubit Pauli word in symplectic encoding.
///
/// Bit `j` of `x` (resp. `z`) marks an X (resp. Z) factor on qubit `j`. The
/// encoded matrix is `i^{|x & z|} * prod_j X_j^{x_j} Z_j^{z_j}`, so a qubit with
/// both bits set carries a `Y` and every string is Hermitian with eigenvalues
/// `+-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: u64,
    z: u64,
    n: u32,
}

#[inline]
fn low_mask(n: u32) -> u64 {
    if n as usize == MAX_QUBITS {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn new(n: usize, x: u64, z: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "qubit count {n} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        let mask = low_mask(n as u32);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::invalid(format!(
                "mask bits set above qubit count {n}"
            )));
        }
        Ok(Self { x, z, n: n as u32 })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0)
    }

    /// Single-qubit factor `letter` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: char) -> Result<Self> {
        Self::from_factors(n, &[(qubit, letter)])
    }

    /// Build from `(qubit, letter)` pairs; letters are `I`, `X`, `Y`, `Z`.
    pub fn from_factors(n: usize, factors: &[(usize, char)]) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        for &(q, letter) in factors {
            if q >= n {
                return Err(Error::invalid(format!(
                    "qubit {q} out of range for n = {n}"
                )));
            }
            let bit = 1u64 << q;
            match letter {
                'I' => {}
                'X' => x ^= bit,
                'Z' => z ^= bit,
                'Y' => {
                    x ^= bit;
                    z ^= bit;
                }
                other => return Err(Error::invalid(format!("unknown Pauli letter {other:?}"))),
            }
        }
        Self::new(n, x, z)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of `Y` factors.
    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Letter acting on `qubit`.
    pub fn letter(&self, qubit: usize) -> char {
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    fn check_same_width(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::invalid(format!(
                "qubit count mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// Whether the two strings commute.
    ///
    /// Returns `false` for strings of different widths; use [`strings_commute`]
    /// for a checked variant.
    #[inline]
    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    /// Product `self * other = phase * result`, unchecked widths.
    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> (Self, Phase) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i^{a} X^{x1} Z^{z1} * i^{b} X^{x2} Z^{z2}
        //   = i^{a+b} (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}
        //   = i^{a+b-c+2|z1 & x2|} * word(x, z)
        let a = self.y_count();
        let b = other.y_count();
        let c = (x & z).count_ones();
        let swaps = (self.z & other.x).count_ones();
        let exponent = a + b + 2 * swaps + 4 * MAX_QUBITS as u32 - c;
        (Self { x, z, n: self.n }, Phase::from_exponent(exponent))
    }

    /// Key in `(z, x)` order; also the dense accumulator index for small `n`.
    #[inline]
    pub(crate) fn packed_index(&self) -> u128 {
        ((self.z as u128) << 64) | self.x as u128
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.z, self.x).cmp(&(other.n, other.z, other.x))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

/// Product of two Pauli strings: `matrix(p) * matrix(q) = phase * matrix(r)`.
pub fn string_product(p: &PauliString, q: &PauliString) -> Result<(PauliString, Phase)> {
    p.check_same_width(q)?;
    Ok(p.mul_unchecked(q))
}

/// Symplectic commutation test.
pub fn strings_commute(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.check_same_width(q)?;
    Ok(p.commutes_with(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(word: &str) -> PauliString {
        let factors: Vec<_> = word.chars().enumerate().collect();
        PauliString::from_factors(word.len(), &factors).unwrap()
    }

    #[test]
    fn x_times_x_is_identity() {
        let (r, ph) = string_product(&s("X"), &s("X")).unwrap();
        assert!(r.is_identity());
        assert_eq!(ph, Phase::PlusOne);
    }

    #[test]
    fn x_times_y_is_i_z() {
        let (r, ph) = string_product(&s("X"), &s("Y")).unwrap();
        assert_eq!(r, s("Z"));
        assert_eq!(ph, Phase::PlusI);
    }

    #[test]
    fn single_qubit_table() {
        // YZ = iX, ZX = iY, ZY = -iX, YX = -iZ
        assert_eq!(
            string_product(&s("Y"), &s("Z")).unwrap(),
            (s("X"), Phase::PlusI)
        );
        assert_eq!(
            string_product(&s("Z"), &s("X")).unwrap(),
            (s("Y"), Phase::PlusI)
        );
        assert_eq!(
            string_product(&s("Z"), &s("Y")).unwrap(),
            (s("X"), Phase::MinusI)
        );
        assert_eq!(
            string_product(&s("Y"), &s("X")).unwrap(),
            (s("Z"), Phase::MinusI)
        );
        assert_eq!(
            string_product(&s("Y"), &s("Y")).unwrap(),
            (s("I"), Phase::PlusOne)
        );
    }

    #[test]
    fn commutation() {
        assert!(strings_commute(&s("X"), &s("X")).unwrap());
        assert!(!strings_commute(&s("X"), &s("Z")).unwrap());
        assert!(strings_commute(&s("XY"), &s("YX")).unwrap());
    }

    #[test]
    fn width_mismatch_is_rejected() {
        assert!(string_product(&s("X"), &s("XX")).is_err());
        assert!(strings_commute(&s("X"), &s("XX")).is_err());
    }

    #[test]
    fn masks_are_bounded() {
        assert!(PauliString::new(2, 0b100, 0).is_err());
        assert!(PauliString::new(0, 0, 0).is_err());
        assert!(PauliString::new(65, 0, 0).is_err());
        assert!(PauliString::new(64, u64::MAX, u64::MAX).is_ok());
    }

    #[test]
    fn display_puts_qubit_zero_first() {
        assert_eq!(s("XIYZ").to_string(), "XIYZ");
        assert_eq!(s("XI").x_mask(), 0b01);
    }
}
