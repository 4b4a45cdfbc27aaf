use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;

use super::{DenseOperator, DEFAULT_EXPANSION_LIMIT};
use crate::error::{Error, Result};

const ORTHONORMALITY_TOL: f64 = 1e-12;

/// `d x k` matrix with orthonormal columns spanning an invariant subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceProjector {
    mat: Mat<Complex64>,
}

impl SubspaceProjector {
    pub fn new(mat: Mat<Complex64>) -> Result<Self> {
        let (d, k) = (mat.nrows(), mat.ncols());
        if k == 0 || k > d {
            return Err(Error::invalid(format!(
                "projector shape {d}x{k} needs 1 <= k <= d"
            )));
        }
        let mut gram = Mat::<Complex64>::zeros(k, k);
        matmul(
            gram.as_mut(),
            Accum::Replace,
            mat.adjoint(),
            mat.as_ref(),
            Complex64::new(1.0, 0.0),
            Par::Seq,
        );
        for j in 0..k {
            for i in 0..k {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - Complex64::new(want, 0.0)).norm() > ORTHONORMALITY_TOL {
                    return Err(Error::invalid("projector columns are not orthonormal"));
                }
            }
        }
        Ok(Self { mat })
    }

    /// Projector onto computational basis states listed by index.
    pub fn from_basis_states(d: usize, states: &[usize]) -> Result<Self> {
        if let Some(&bad) = states.iter().find(|&&s| s >= d) {
            return Err(Error::invalid(format!(
                "basis state {bad} out of range for dimension {d}"
            )));
        }
        let mut mat = Mat::<Complex64>::zeros(d, states.len());
        for (k, &s) in states.iter().enumerate() {
            mat[(s, k)] = Complex64::new(1.0, 0.0);
        }
        Self::new(mat)
    }

    /// Ambient dimension `d`.
    pub fn ambient_dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Subspace dimension `k`.
    pub fn dim(&self) -> usize {
        self.mat.ncols()
    }

    pub fn as_mat(&self) -> MatRef<'_, Complex64> {
        self.mat.as_ref()
    }
}

/// Computational basis states with exactly `n/2` ones, in lexicographic order
/// of their bit strings (qubit 0 leftmost). Spans `C(n, n/2)` states.
pub fn zero_magnetization_projector(n: usize) -> Result<SubspaceProjector> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "zero magnetization needs an even qubit count, got {n}"
        )));
    }
    if n > DEFAULT_EXPANSION_LIMIT {
        return Err(Error::Capacity(format!(
            "projector on {n} qubits exceeds dense limit of {DEFAULT_EXPANSION_LIMIT}"
        )));
    }
    let d = 1usize << n;
    let states: Vec<usize> = (0..d)
        .filter(|b| b.count_ones() as usize == n / 2)
        .collect();
    SubspaceProjector::from_basis_states(d, &states)
}

/// `proj^dag * op * proj`.
pub fn restrict(op: &DenseOperator, proj: &SubspaceProjector) -> Result<DenseOperator> {
    if op.dim() != proj.ambient_dim() {
        return Err(Error::invalid(format!(
            "operator dimension {} does not match projector rows {}",
            op.dim(),
            proj.ambient_dim()
        )));
    }
    let (d, k) = (proj.ambient_dim(), proj.dim());
    let one = Complex64::new(1.0, 0.0);
    let mut tmp = Mat::<Complex64>::zeros(d, k);
    matmul(
        tmp.as_mut(),
        Accum::Replace,
        op.as_mat(),
        proj.as_mat(),
        one,
        Par::Seq,
    );
    let mut out = Mat::<Complex64>::zeros(k, k);
    matmul(
        out.as_mut(),
        Accum::Replace,
        proj.as_mat().adjoint(),
        tmp.as_ref(),
        one,
        Par::Seq,
    );
    DenseOperator::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::from_pauli;
    use crate::pauli::parse_pauli_sum;

    #[test]
    fn projector_sizes() {
        let p = zero_magnetization_projector(2).unwrap();
        assert_eq!(p.dim(), 2);
        // |01> is index 1, |10> is index 2
        assert_eq!(p.as_mat()[(1, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(p.as_mat()[(2, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(zero_magnetization_projector(4).unwrap().dim(), 6);
        assert_eq!(zero_magnetization_projector(6).unwrap().dim(), 20);
        assert!(zero_magnetization_projector(3).is_err());
    }

    #[test]
    fn identity_projector_is_noop() {
        let op = from_pauli(&parse_pauli_sum("0.5 XY + (0,1) ZZ", 2).unwrap()).unwrap();
        let id = SubspaceProjector::from_basis_states(4, &[0, 1, 2, 3]).unwrap();
        assert_eq!(restrict(&op, &id).unwrap(), op);
    }

    #[test]
    fn total_magnetization_vanishes() {
        let op = from_pauli(&parse_pauli_sum("1 ZI + 1 IZ", 2).unwrap()).unwrap();
        let r = restrict(&op, &zero_magnetization_projector(2).unwrap()).unwrap();
        assert_eq!(r, DenseOperator::zeros(2));
    }

    #[test]
    fn shape_errors() {
        let op = from_pauli(&parse_pauli_sum("1 X", 1).unwrap()).unwrap();
        assert!(restrict(&op, &zero_magnetization_projector(2).unwrap()).is_err());
        assert!(
            SubspaceProjector::new(Mat::from_fn(2, 2, |_, _| Complex64::new(1.0, 0.0))).is_err()
        );
        assert!(SubspaceProjector::from_basis_states(2, &[2]).is_err());
    }
}
