//! Sparse operator backend: Pauli strings in symplectic encoding and
//! complex-weighted sums of them.

mod parse;
mod string;
mod sum;

pub use parse::{format_pauli_sum, parse_generator_file, parse_pauli_sum};
pub use string::{string_product, strings_commute, PauliString, Phase, MAX_QUBITS};
pub use sum::{PauliSum, DROP_TOLERANCE};

use crate::error::Result;

/// `[a, b]` on the sparse backend.
pub fn sum_commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.commutator(b)
}

/// `tr(a^dag b) / d` on the sparse backend.
pub fn sum_inner_product(a: &PauliSum, b: &PauliSum) -> Result<num_complex::Complex64> {
    a.inner_product(b)
}
