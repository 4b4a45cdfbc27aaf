//! Dense matrix backend, invariant-subspace restriction and the SVD rank test.

mod rank;
mod subspace;

pub use rank::{
    default_rank_tolerance, numerical_rank, rank_independence_check, StackedBasisMatrix,
};
pub use subspace::{restrict, zero_magnetization_projector, SubspaceProjector};

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::ops::{conj_mul_dd, ComplexDd};
use crate::pauli::PauliSum;

/// Largest register [`from_pauli`] expands by default (a 4096 x 4096 matrix).
pub const DEFAULT_EXPANSION_LIMIT: usize = 12;

/// A `d x d` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    mat: Mat<Complex64>,
}

impl DenseOperator {
    pub fn new(mat: Mat<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::invalid(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(Error::invalid("operator dimension must be positive"));
        }
        for j in 0..mat.ncols() {
            for i in 0..mat.nrows() {
                let v = mat[(i, j)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::invalid(format!("non-finite entry at ({i}, {j})")));
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            mat: Mat::zeros(d, d),
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: Mat::identity(d, d),
        }
    }

    pub fn from_fn(d: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(Mat::from_fn(d, d, f))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, Complex64> {
        self.mat.as_ref()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Entries in column-major order; the vectorization used by the rank test.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for j in 0..d {
            out.extend(self.mat.col(j).iter().copied());
        }
        out
    }

    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_dim(other)?;
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..d {
            for (a, b) in self.mat.col(j).iter().zip(other.mat.col(j).iter()) {
                acc += a.conj() * b;
            }
        }
        Ok(acc / d as f64)
    }

    /// [`DenseOperator::inner_product`] in double-double arithmetic.
    pub fn inner_product_dd(&self, other: &Self) -> Result<ComplexDd> {
        self.check_dim(other)?;
        let d = self.dim();
        let mut acc = ComplexDd::default();
        for j in 0..d {
            for (a, b) in self.mat.col(j).iter().zip(other.mat.col(j).iter()) {
                acc += conj_mul_dd(*a, *b);
            }
        }
        let d = TwoFloat::from(d as f64);
        Ok(ComplexDd::new(acc.re / d, acc.im / d))
    }

    pub fn norm(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for j in 0..d {
            acc += self.mat.col(j).iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        (acc / d as f64).sqrt()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim();
        let mut out = Mat::<Complex64>::zeros(d, d);
        matmul(
            out.as_mut(),
            Accum::Replace,
            self.mat.as_ref(),
            other.mat.as_ref(),
            Complex64::new(1.0, 0.0),
            Par::Seq,
        );
        Ok(Self { mat: out })
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim();
        let mut out = Mat::<Complex64>::zeros(d, d);
        matmul(
            out.as_mut(),
            Accum::Replace,
            self.mat.as_ref(),
            other.mat.as_ref(),
            Complex64::new(1.0, 0.0),
            Par::Seq,
        );
        matmul(
            out.as_mut(),
            Accum::Add,
            other.mat.as_ref(),
            self.mat.as_ref(),
            Complex64::new(-1.0, 0.0),
            Par::Seq,
        );
        Ok(Self { mat: out })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint().to_owned(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let d = self.dim();
        Self {
            mat: Mat::from_fn(d, d, |i, j| self.mat[(i, j)] * c),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        let d = self.dim();
        for j in 0..d {
            for i in 0..d {
                let v = other.mat[(i, j)];
                self.mat[(i, j)] += c * v;
            }
        }
        Ok(())
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(m)
    }
}

/// Map qubit `j` (leftmost letter) to bit `n - 1 - j` of the basis index, so
/// that the expansion matches `kron(P_0, P_1, ..., P_{n-1})`.
#[inline]
fn to_index_mask(mask: u64, n: usize) -> usize {
    (mask.reverse_bits() >> (64 - n)) as usize
}

/// Dense expansion of a Pauli sum via its Kronecker structure.
pub fn from_pauli(sum: &PauliSum) -> Result<DenseOperator> {
    from_pauli_with_limit(sum, DEFAULT_EXPANSION_LIMIT)
}

pub fn from_pauli_with_limit(sum: &PauliSum, max_qubits: usize) -> Result<DenseOperator> {
    let n = sum.num_qubits();
    if n > max_qubits {
        return Err(Error::Capacity(format!(
            "dense expansion of {n} qubits exceeds limit of {max_qubits}"
        )));
    }
    let d = 1usize << n;
    let mut mat = Mat::<Complex64>::zeros(d, d);
    for (p, c) in sum.terms() {
        let xm = to_index_mask(p.x_mask(), n);
        let zm = to_index_mask(p.z_mask(), n);
        // i^{#Y} premultiplier of the Hermitian convention.
        let base = match p.y_count() % 4 {
            0 => *c,
            1 => Complex64::new(-c.im, c.re),
            2 => -*c,
            _ => Complex64::new(c.im, -c.re),
        };
        for col in 0..d {
            // X^x Z^z |b> = (-1)^{|z & b|} |b ^ x>
            let v = if (zm & col).count_ones() % 2 == 0 {
                base
            } else {
                -base
            };
            mat[(col ^ xm, col)] += v;
        }
    }
    Ok(DenseOperator { mat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::parse_pauli_sum;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
        let (da, db) = (a.dim(), b.dim());
        DenseOperator::from_fn(da * db, |i, j| {
            a.get(i / db, j / db) * b.get(i % db, j % db)
        })
        .unwrap()
    }

    fn pauli_matrix(letter: char) -> DenseOperator {
        let m = match letter {
            'I' => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
            'X' => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
            'Y' => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
            'Z' => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
            _ => unreachable!(),
        };
        DenseOperator::from_fn(2, |i, j| m[i][j]).unwrap()
    }

    #[test]
    fn identity_and_y() {
        let i = from_pauli(&parse_pauli_sum("1 I", 1).unwrap()).unwrap();
        assert_eq!(i, DenseOperator::identity(2));
        let y = from_pauli(&parse_pauli_sum("1 Y", 1).unwrap()).unwrap();
        assert_eq!(y, pauli_matrix('Y'));
    }

    #[test]
    fn kronecker_expansion_matches() {
        let op = from_pauli(&parse_pauli_sum("0.5 XX + 1 ZI", 2).unwrap()).unwrap();
        let mut expected = kron(&pauli_matrix('X'), &pauli_matrix('X')).scaled(c(0.5, 0.0));
        expected
            .add_scaled(c(1.0, 0.0), &kron(&pauli_matrix('Z'), &pauli_matrix('I')))
            .unwrap();
        assert!(op.max_abs_diff(&expected).unwrap() < 1e-15);
        let op = from_pauli(&parse_pauli_sum("1 XYZ", 3).unwrap()).unwrap();
        let expected = kron(
            &kron(&pauli_matrix('X'), &pauli_matrix('Y')),
            &pauli_matrix('Z'),
        );
        assert!(op.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn expansion_limit() {
        let s = parse_pauli_sum("1 XXXX", 4).unwrap();
        assert!(matches!(
            from_pauli_with_limit(&s, 3),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn operator_validation() {
        assert!(DenseOperator::new(Mat::zeros(2, 3)).is_err());
        assert!(DenseOperator::new(Mat::from_fn(2, 2, |_, _| c(f64::NAN, 0.0))).is_err());
    }

    #[test]
    fn dense_pauli_identities() {
        let x = pauli_matrix('X');
        let y = pauli_matrix('Y');
        let z = pauli_matrix('Z');
        assert_eq!(x.inner_product(&x).unwrap(), c(1.0, 0.0));
        assert_eq!(x.inner_product(&z).unwrap(), c(0.0, 0.0));
        let comm = x.commutator(&y).unwrap();
        assert!(comm.max_abs_diff(&z.scaled(c(0.0, 2.0))).unwrap() < 1e-15);
        let mut a = x.scaled(c(3.0, 0.0));
        a.add_scaled(c(0.0, 4.0), &z).unwrap();
        assert!((a.norm() - 5.0).abs() < 1e-15);
    }
}
