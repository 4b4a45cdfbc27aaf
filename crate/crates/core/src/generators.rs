//! Generator sets of the variational ansatz families used for validation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::dense::{from_pauli, restrict, zero_magnetization_projector};
use crate::error::{Error, Result};
use crate::ops::{Backend, OperatorHandle};
use crate::pauli::{PauliString, PauliSum, MAX_QUBITS};

/// ZZ weight of the XXZ chain.
pub const XXZ_ANISOTROPY: f64 = 1.5;

/// `(n, d)`: subspace dimensions the XXZ reference runs are quoted against.
/// They are smaller than `C(n, n/2)`, so they are listed rather than derived.
pub const XXZ_SUBSPACE_DIMENSIONS: [(usize, u128); 4] = [(4, 4), (6, 10), (8, 38), (10, 126)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hea,
    SpinGlassHva,
    XxzHva,
    TfimHvaOpen,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Hea,
        Family::SpinGlassHva,
        Family::XxzHva,
        Family::TfimHvaOpen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hea => "hea",
            Family::SpinGlassHva => "spin_glass_hva",
            Family::XxzHva => "xxz_hva",
            Family::TfimHvaOpen => "tfim_hva_open",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown ansatz family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzOptions {
    /// Restrict `xxz_hva` to the zero-magnetization subspace (dense only).
    #[serde(default)]
    pub zero_magnetization: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub family: Family,
    pub n: usize,
    /// Coefficient seed; only `spin_glass_hva` draws random numbers.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: AnsatzOptions,
}

impl AnsatzSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self {
            family,
            n,
            seed: 0,
            options: AnsatzOptions::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restricted(mut self) -> Self {
        self.options.zero_magnetization = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "{} needs 2 to {MAX_QUBITS} qubits, got {}",
                self.family, self.n
            )));
        }
        if self.family == Family::XxzHva && self.n % 2 != 0 {
            return Err(Error::invalid(format!(
                "xxz_hva needs an even qubit count, got {}",
                self.n
            )));
        }
        if self.options.zero_magnetization && self.family != Family::XxzHva {
            return Err(Error::invalid(format!(
                "{} has no subspace restriction",
                self.family
            )));
        }
        Ok(())
    }

    /// Closure dimension the family is expected to reach, when it fits in a `u128`.
    pub fn expected_dimension(&self) -> Option<u128> {
        let n = self.n as u32;
        match self.family {
            Family::Hea | Family::SpinGlassHva => 4u128.checked_pow(n).map(|v| v - 1),
            Family::XxzHva if self.options.zero_magnetization => {
                let d = XXZ_SUBSPACE_DIMENSIONS
                    .iter()
                    .find(|&&(q, _)| q == self.n)?
                    .1;
                Some(d * d - 1)
            }
            Family::XxzHva => None,
            Family::TfimHvaOpen => Some(self.n as u128 * self.n as u128 - 1),
        }
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn term(n: usize, factors: &[(usize, char)], c: f64) -> Result<(PauliString, Complex64)> {
    Ok((
        PauliString::from_factors(n, factors)?,
        Complex64::new(c, 0.0),
    ))
}

fn single_sum(n: usize, factors: &[(usize, char)]) -> Result<PauliSum> {
    Ok(PauliSum::from_string(
        PauliString::from_factors(n, factors)?,
        one(),
    ))
}

fn field(n: usize, letter: char) -> Result<PauliSum> {
    PauliSum::from_terms(
        n,
        (0..n)
            .map(|i| term(n, &[(i, letter)], 1.0))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Uniform draw on `[-1, 1)` from the top 53 bits of a SplitMix64 output.
fn uniform_symmetric(rng: &mut SplitMix64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    2.0 * u - 1.0
}

/// Coefficients `a_0..a_{n-1}` followed by `J_ij` for `i < j` in row order,
/// drawn from SplitMix64 whose state starts at `seed`.
pub fn spin_glass_coefficients(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let fields = (0..n).map(|_| uniform_symmetric(&mut rng)).collect();
    let couplings = (0..n * (n - 1) / 2)
        .map(|_| uniform_symmetric(&mut rng))
        .collect();
    (fields, couplings)
}

fn xxz_layer(n: usize, parity: usize) -> Result<PauliSum> {
    let mut terms = Vec::new();
    for i in (parity..n).step_by(2) {
        let j = (i + 1) % n;
        terms.push(term(n, &[(i, 'X'), (j, 'X')], 1.0)?);
        terms.push(term(n, &[(i, 'Y'), (j, 'Y')], 1.0)?);
        terms.push(term(n, &[(i, 'Z'), (j, 'Z')], XXZ_ANISOTROPY)?);
    }
    PauliSum::from_terms(n, terms)
}

/// Generator tuple of a family as Pauli sums. The subspace option is ignored
/// here; see [`build_operators`].
pub fn build_generators(spec: &AnsatzSpec) -> Result<Vec<PauliSum>> {
    spec.validate()?;
    let n = spec.n;
    match spec.family {
        Family::Hea => {
            let mut out = Vec::with_capacity(3 * n - 1);
            for i in 0..n {
                out.push(single_sum(n, &[(i, 'X')])?);
                out.push(single_sum(n, &[(i, 'Z')])?);
            }
            for i in 0..n - 1 {
                out.push(single_sum(n, &[(i, 'Z'), (i + 1, 'Z')])?);
            }
            Ok(out)
        }
        Family::SpinGlassHva => {
            let (a, j) = spin_glass_coefficients(n, spec.seed);
            let mut terms = Vec::with_capacity(a.len() + j.len());
            for (i, &c) in a.iter().enumerate() {
                terms.push(term(n, &[(i, 'Z')], c)?);
            }
            let mut k = 0;
            for p in 0..n {
                for q in p + 1..n {
                    terms.push(term(n, &[(p, 'Z'), (q, 'Z')], j[k])?);
                    k += 1;
                }
            }
            Ok(vec![PauliSum::from_terms(n, terms)?, field(n, 'X')?])
        }
        Family::XxzHva => Ok(vec![xxz_layer(n, 0)?, xxz_layer(n, 1)?]),
        Family::TfimHvaOpen => {
            let zz = (0..n - 1)
                .map(|i| term(n, &[(i, 'Z'), (i + 1, 'Z')], 1.0))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![PauliSum::from_terms(n, zz)?, field(n, 'X')?])
        }
    }
}

/// Generators on the requested backend, restricted to the zero-magnetization
/// subspace when requested.
pub fn build_operators(spec: &AnsatzSpec, backend: Backend) -> Result<Vec<OperatorHandle>> {
    let gens = build_generators(spec)?;
    if spec.options.zero_magnetization {
        if backend != Backend::Dense {
            return Err(Error::invalid(
                "subspace restriction needs the dense backend",
            ));
        }
        let proj = zero_magnetization_projector(spec.n)?;
        return gens
            .iter()
            .map(|g| Ok(OperatorHandle::Dense(restrict(&from_pauli(g)?, &proj)?)))
            .collect();
    }
    match backend {
        Backend::Pauli => Ok(gens.into_iter().map(OperatorHandle::Pauli).collect()),
        Backend::Dense => gens
            .iter()
            .map(|g| Ok(OperatorHandle::Dense(from_pauli(g)?)))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub qubits: &'static str,
    pub options: &'static str,
    pub expected_dimension: &'static str,
    pub generators: &'static str,
}

impl fmt::Display for FamilyInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected dim {} (qubits {}; {}; generators {})",
            self.name, self.expected_dimension, self.qubits, self.options, self.generators
        )
    }
}

pub fn list_families() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "hea",
            qubits: "n >= 2",
            options: "none",
            expected_dimension: "4^n−1",
            generators: "X_i, Z_i and Z_iZ_{i+1} on an open chain",
        },
        FamilyInfo {
            name: "spin_glass_hva",
            qubits: "n >= 2",
            options: "seed",
            expected_dimension: "4^n−1",
            generators: "Σ a_i Z_i + Σ_{i<j} J_ij Z_iZ_j with uniform(−1,1) coefficients from SplitMix64, and Σ X_i",
        },
        FamilyInfo {
            name: "xxz_hva",
            qubits: "even n >= 2",
            options: "zero_magnetization (dense backend)",
            expected_dimension: "d²−1 with d = 4, 10, 38, 126 at n = 4, 6, 8, 10 (restricted)",
            generators: "even and odd bonds of XX + YY + 1.5 ZZ on a periodic chain",
        },
        FamilyInfo {
            name: "tfim_hva_open",
            qubits: "n >= 2",
            options: "none",
            expected_dimension: "n²−1",
            generators: "Σ Z_iZ_{i+1} on an open chain, and Σ X_i",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::Operator;
    use crate::pauli::parse_pauli_sum;

    #[test]
    fn tfim_generators() {
        let g = build_generators(&AnsatzSpec::new(Family::TfimHvaOpen, 4)).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(
            g[0],
            parse_pauli_sum("1 ZZII + 1 IZZI + 1 IIZZ", 4).unwrap()
        );
        assert_eq!(
            g[1],
            parse_pauli_sum("1 XIII + 1 IXII + 1 IIXI + 1 IIIX", 4).unwrap()
        );
    }

    #[test]
    fn hea_generators() {
        let g = build_generators(&AnsatzSpec::new(Family::Hea, 3)).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g[7], parse_pauli_sum("1 IZZ", 3).unwrap());
    }

    #[test]
    fn xxz_layers() {
        let g = build_generators(&AnsatzSpec::new(Family::XxzHva, 4)).unwrap();
        assert_eq!(
            g[0],
            parse_pauli_sum("1 XXII + 1 YYII + 1.5 ZZII + 1 IIXX + 1 IIYY + 1.5 IIZZ", 4).unwrap()
        );
        assert_eq!(
            g[1],
            parse_pauli_sum("1 IXXI + 1 IYYI + 1.5 IZZI + 1 XIIX + 1 YIIY + 1.5 ZIIZ", 4).unwrap()
        );
    }

    // Reference SplitMix64 written out from its published recurrence.
    fn splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    #[test]
    fn spin_glass_stream_is_documented_splitmix() {
        let (a, j) = spin_glass_coefficients(3, 42);
        let mut s = 42u64;
        let expected: Vec<f64> = (0..6)
            .map(|_| 2.0 * ((splitmix(&mut s) >> 11) as f64 / 9007199254740992.0) - 1.0)
            .collect();
        assert_eq!(a, expected[..3]);
        assert_eq!(j, expected[3..]);
        assert!(a.iter().chain(&j).all(|v| (-1.0..1.0).contains(v)));
    }

    #[test]
    fn deterministic_and_hermitian() {
        for fam in Family::ALL {
            let spec = AnsatzSpec::new(fam, 4).with_seed(7);
            let a = build_generators(&spec).unwrap();
            assert_eq!(a, build_generators(&spec).unwrap());
            assert!(a.iter().all(|g| g.is_hermitian() && g.norm() > 0.0));
        }
        let s1 = build_generators(&AnsatzSpec::new(Family::SpinGlassHva, 3).with_seed(1)).unwrap();
        let s2 = build_generators(&AnsatzSpec::new(Family::SpinGlassHva, 3).with_seed(2)).unwrap();
        assert_ne!(s1[0], s2[0]);
    }

    #[test]
    fn invalid_specs() {
        assert!(build_generators(&AnsatzSpec::new(Family::Hea, 1)).is_err());
        assert!(build_generators(&AnsatzSpec::new(Family::XxzHva, 5)).is_err());
        assert!(build_generators(&AnsatzSpec::new(Family::Hea, 65)).is_err());
        assert!(AnsatzSpec::new(Family::Hea, 3)
            .restricted()
            .validate()
            .is_err());
        assert!(build_operators(
            &AnsatzSpec::new(Family::XxzHva, 4).restricted(),
            Backend::Pauli
        )
        .is_err());
        assert!("ising".parse::<Family>().is_err());
    }

    #[test]
    fn restricted_operators() {
        let ops = build_operators(
            &AnsatzSpec::new(Family::XxzHva, 4).restricted(),
            Backend::Dense,
        )
        .unwrap();
        assert_eq!(ops.len(), 2);
        assert!(ops.iter().all(|o| o.dim() == 6));
    }

    #[test]
    fn family_listing() {
        let list = list_families();
        assert_eq!(list.len(), 4);
        let text: Vec<String> = list.iter().map(|f| f.to_string()).collect();
        assert!(text
            .iter()
            .any(|t| t.starts_with("tfim_hva_open: expected dim n²−1")));
        assert!(text
            .iter()
            .any(|t| t.starts_with("hea: expected dim 4^n−1")));
        for (info, fam) in list.iter().zip(Family::ALL) {
            assert_eq!(info.name, fam.name());
        }
    }

    #[test]
    fn expected_dimensions() {
        assert_eq!(
            AnsatzSpec::new(Family::Hea, 4).expected_dimension(),
            Some(255)
        );
        assert_eq!(
            AnsatzSpec::new(Family::TfimHvaOpen, 6).expected_dimension(),
            Some(35)
        );
        assert_eq!(
            AnsatzSpec::new(Family::XxzHva, 4)
                .restricted()
                .expected_dimension(),
            Some(15)
        );
        assert_eq!(
            AnsatzSpec::new(Family::XxzHva, 8)
                .restricted()
                .expected_dimension(),
            Some(1443)
        );
        assert_eq!(
            AnsatzSpec::new(Family::XxzHva, 4).expected_dimension(),
            None
        );
        assert_eq!(AnsatzSpec::new(Family::Hea, 64).expected_dimension(), None);
    }
}
