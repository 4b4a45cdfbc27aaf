//! The operator contract shared by both backends.
//!
//! Closure construction only needs scalar multiplication, addition, the trace
//! inner product `<a, b> = tr(a^dag b) / d`, a null test and the commutator.
//! [`Operator`] captures exactly that; [`OperatorHandle`] tags a value with its
//! backend so mixed inputs are rejected instead of silently converted.

use std::fmt;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::dense::{self, DenseOperator};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Complex number with double-double parts, about 32 significant digits.
pub type ComplexDd = Complex<TwoFloat>;

pub fn to_dd(c: Complex64) -> ComplexDd {
    Complex::new(TwoFloat::from(c.re), TwoFloat::from(c.im))
}

/// Nearest double to a double-double value.
pub fn to_f64(c: ComplexDd) -> Complex64 {
    Complex64::new(c.re.hi() + c.re.lo(), c.im.hi() + c.im.lo())
}

/// `conj(a) * b` without rounding: each real product is split exactly.
#[inline]
pub fn conj_mul_dd(a: Complex64, b: Complex64) -> ComplexDd {
    Complex::new(
        TwoFloat::new_mul(a.re, b.re) + TwoFloat::new_mul(a.im, b.im),
        TwoFloat::new_mul(a.re, b.im) - TwoFloat::new_mul(a.im, b.re),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Pauli,
    Dense,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Pauli => "pauli",
            Backend::Dense => "dense",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli" => Ok(Backend::Pauli),
            "dense" => Ok(Backend::Dense),
            other => Err(Error::invalid(format!("unknown backend {other:?}"))),
        }
    }
}

/// Linear-algebra surface an operator representation must provide.
///
/// Values are immutable once built; every method is a pure function of its
/// inputs, which is what lets commutators be evaluated on worker threads.
pub trait Operator: Clone + Send + Sync + fmt::Debug {
    fn backend(&self) -> Backend;

    /// Matrix dimension `d`.
    fn dim(&self) -> usize;

    /// The null operator of the same shape.
    fn zero_like(&self) -> Self;

    fn inner_product(&self, other: &Self) -> Result<Complex64>;

    /// [`Operator::inner_product`] of the stored values accumulated in
    /// double-double arithmetic.
    fn inner_product_dd(&self, other: &Self) -> Result<ComplexDd>;

    fn norm(&self) -> f64;

    fn commutator(&self, other: &Self) -> Result<Self>;

    fn scaled(&self, c: Complex64) -> Self;

    /// `sum_k c_k * ops_k`. All operands must share this operator's shape.
    fn combine(&self, parts: &[(Complex64, &Self)]) -> Result<Self>;

    fn to_dense(&self) -> Result<DenseOperator>;

    /// Canonical text used for basis listings.
    fn describe(&self) -> String;
}

impl Operator for PauliSum {
    fn backend(&self) -> Backend {
        Backend::Pauli
    }

    fn dim(&self) -> usize {
        1usize
            .checked_shl(self.num_qubits() as u32)
            .unwrap_or(usize::MAX)
    }

    fn zero_like(&self) -> Self {
        PauliSum::zero(self.num_qubits()).expect("valid width")
    }

    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        PauliSum::inner_product(self, other)
    }

    fn inner_product_dd(&self, other: &Self) -> Result<ComplexDd> {
        PauliSum::inner_product_dd(self, other)
    }

    fn norm(&self) -> f64 {
        PauliSum::norm(self)
    }

    fn commutator(&self, other: &Self) -> Result<Self> {
        PauliSum::commutator(self, other)
    }

    fn scaled(&self, c: Complex64) -> Self {
        PauliSum::scaled(self, c)
    }

    fn combine(&self, parts: &[(Complex64, &Self)]) -> Result<Self> {
        PauliSum::linear_combination(self.num_qubits(), parts)
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        dense::from_pauli(self)
    }

    fn describe(&self) -> String {
        crate::pauli::format_pauli_sum(self)
    }
}

impl Operator for DenseOperator {
    fn backend(&self) -> Backend {
        Backend::Dense
    }

    fn dim(&self) -> usize {
        DenseOperator::dim(self)
    }

    fn zero_like(&self) -> Self {
        DenseOperator::zeros(self.dim())
    }

    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        DenseOperator::inner_product(self, other)
    }

    fn inner_product_dd(&self, other: &Self) -> Result<ComplexDd> {
        DenseOperator::inner_product_dd(self, other)
    }

    fn norm(&self) -> f64 {
        DenseOperator::norm(self)
    }

    fn commutator(&self, other: &Self) -> Result<Self> {
        DenseOperator::commutator(self, other)
    }

    fn scaled(&self, c: Complex64) -> Self {
        DenseOperator::scaled(self, c)
    }

    fn combine(&self, parts: &[(Complex64, &Self)]) -> Result<Self> {
        let mut out = self.zero_like();
        for &(c, op) in parts {
            if c != Complex64::new(0.0, 0.0) {
                out.add_scaled(c, op)?;
            }
        }
        Ok(out)
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        Ok(self.clone())
    }

    fn describe(&self) -> String {
        let d = self.dim();
        let mut out = String::new();
        for i in 0..d {
            if i > 0 {
                out.push_str("; ");
            }
            for j in 0..d {
                if j > 0 {
                    out.push(' ');
                }
                let v = self.get(i, j);
                out.push_str(&format!("({:?},{:?})", v.re, v.im));
            }
        }
        out
    }
}

/// An operator tagged with its backend.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorHandle {
    Pauli(PauliSum),
    Dense(DenseOperator),
}

impl From<PauliSum> for OperatorHandle {
    fn from(p: PauliSum) -> Self {
        OperatorHandle::Pauli(p)
    }
}

impl From<DenseOperator> for OperatorHandle {
    fn from(d: DenseOperator) -> Self {
        OperatorHandle::Dense(d)
    }
}

impl OperatorHandle {
    /// Qubit count for the Pauli backend.
    pub fn num_qubits(&self) -> Option<usize> {
        match self {
            OperatorHandle::Pauli(p) => Some(p.num_qubits()),
            OperatorHandle::Dense(_) => None,
        }
    }

    /// Convert to `backend`; Pauli to dense expands, dense to Pauli is refused.
    pub fn into_backend(self, backend: Backend) -> Result<Self> {
        match (self, backend) {
            (OperatorHandle::Pauli(p), Backend::Dense) => {
                Ok(OperatorHandle::Dense(dense::from_pauli(&p)?))
            }
            (h @ OperatorHandle::Pauli(_), Backend::Pauli)
            | (h @ OperatorHandle::Dense(_), Backend::Dense) => Ok(h),
            (OperatorHandle::Dense(_), Backend::Pauli) => Err(Error::invalid(
                "dense operators cannot be converted to the Pauli backend",
            )),
        }
    }

    fn mismatch(&self, other: &Self) -> Error {
        Error::invalid(format!(
            "backend mismatch: {} vs {}",
            self.backend(),
            other.backend()
        ))
    }
}

impl Operator for OperatorHandle {
    fn backend(&self) -> Backend {
        match self {
            OperatorHandle::Pauli(_) => Backend::Pauli,
            OperatorHandle::Dense(_) => Backend::Dense,
        }
    }

    fn dim(&self) -> usize {
        match self {
            OperatorHandle::Pauli(p) => Operator::dim(p),
            OperatorHandle::Dense(d) => d.dim(),
        }
    }

    fn zero_like(&self) -> Self {
        match self {
            OperatorHandle::Pauli(p) => OperatorHandle::Pauli(p.zero_like()),
            OperatorHandle::Dense(d) => OperatorHandle::Dense(Operator::zero_like(d)),
        }
    }

    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        match (self, other) {
            (OperatorHandle::Pauli(a), OperatorHandle::Pauli(b)) => a.inner_product(b),
            (OperatorHandle::Dense(a), OperatorHandle::Dense(b)) => a.inner_product(b),
            _ => Err(self.mismatch(other)),
        }
    }
    fn inner_product_dd(&self, other: &Self) -> Result<ComplexDd> {
        match (self, other) {
            (OperatorHandle::Pauli(a), OperatorHandle::Pauli(b)) => a.inner_product_dd(b),
            (OperatorHandle::Dense(a), OperatorHandle::Dense(b)) => a.inner_product_dd(b),
            _ => Err(self.mismatch(other)),
        }
    }

    fn norm(&self) -> f64 {
        match self {
            OperatorHandle::Pauli(p) => p.norm(),
            OperatorHandle::Dense(d) => d.norm(),
        }
    }

    fn commutator(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (OperatorHandle::Pauli(a), OperatorHandle::Pauli(b)) => {
                Ok(OperatorHandle::Pauli(a.commutator(b)?))
            }
            (OperatorHandle::Dense(a), OperatorHandle::Dense(b)) => {
                Ok(OperatorHandle::Dense(a.commutator(b)?))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    fn scaled(&self, c: Complex64) -> Self {
        match self {
            OperatorHandle::Pauli(p) => OperatorHandle::Pauli(p.scaled(c)),
            OperatorHandle::Dense(d) => OperatorHandle::Dense(d.scaled(c)),
        }
    }

    fn combine(&self, parts: &[(Complex64, &Self)]) -> Result<Self> {
        match self {
            OperatorHandle::Pauli(p) => {
                let inner = parts
                    .iter()
                    .map(|&(c, op)| match op {
                        OperatorHandle::Pauli(q) => Ok((c, q)),
                        other => Err(self.mismatch(other)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(OperatorHandle::Pauli(p.combine(&inner)?))
            }
            OperatorHandle::Dense(d) => {
                let inner = parts
                    .iter()
                    .map(|&(c, op)| match op {
                        OperatorHandle::Dense(q) => Ok((c, q)),
                        other => Err(self.mismatch(other)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(OperatorHandle::Dense(d.combine(&inner)?))
            }
        }
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        match self {
            OperatorHandle::Pauli(p) => p.to_dense(),
            OperatorHandle::Dense(d) => Ok(d.clone()),
        }
    }

    fn describe(&self) -> String {
        match self {
            OperatorHandle::Pauli(p) => p.describe(),
            OperatorHandle::Dense(d) => d.describe(),
        }
    }
}

pub fn inner_product<T: Operator>(a: &T, b: &T) -> Result<Complex64> {
    a.inner_product(b)
}

pub fn norm<T: Operator>(a: &T) -> f64 {
    a.norm()
}

pub fn commutator<T: Operator>(a: &T, b: &T) -> Result<T> {
    a.commutator(b)
}

/// `sum_l coeffs[l] * tuple[l]`. An empty tuple needs a `template` to fix the
/// shape of the null operator it returns.
pub fn axpy_dot<T: Operator>(template: &T, tuple: &[T], coeffs: &[Complex64]) -> Result<T> {
    if tuple.len() != coeffs.len() {
        return Err(Error::invalid(format!(
            "tuple has {} operators but {} coefficients were given",
            tuple.len(),
            coeffs.len()
        )));
    }
    let parts: Vec<(Complex64, &T)> = coeffs.iter().copied().zip(tuple.iter()).collect();
    template.combine(&parts)
}

/// `norm(a) <= tol`.
pub fn is_zero<T: Operator>(a: &T, tol: f64) -> bool {
    a.norm() <= tol
}
