//! Lie closures of operator sets.
//!
//! Operators come in two representations sharing the [`ops::Operator`]
//! interface: sparse sums of Pauli strings ([`pauli`]) and dense matrices
//! ([`dense`]). [`closure`] builds the closure with one of four independence
//! tests, [`generators`] provides the variational ansatz families used for
//! validation, and [`cli`] holds the command implementations behind the
//! `lie-closure` binary.

pub mod cli;
pub mod closure;
pub mod dense;
pub mod error;
pub mod generators;
pub mod ops;
pub mod pauli;

pub use closure::{run_closure, ClosureConfig, ClosureResult, Method};
pub use dense::DenseOperator;
pub use error::{Error, Result};
pub use ops::{Backend, Operator, OperatorHandle};
pub use pauli::{PauliString, PauliSum};
