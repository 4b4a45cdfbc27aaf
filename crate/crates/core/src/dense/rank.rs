use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::svd::{self, ComputeSvdVectors};
use faer::{Mat, MatRef, Par};
use num_complex::Complex64;

use super::DenseOperator;
use crate::error::{Error, Result};

/// `d^2 x N'` matrix whose column `l` is the column-major flattening of the
/// `l`-th basis operator.
#[derive(Clone, Debug, Default)]
pub struct StackedBasisMatrix {
    rows: usize,
    data: Vec<Complex64>,
    cols: usize,
}

impl StackedBasisMatrix {
    /// Empty stack for operators of dimension `d`.
    pub fn new(d: usize) -> Self {
        Self {
            rows: d * d,
            data: Vec::new(),
            cols: 0,
        }
    }

    pub fn from_operators<'a>(
        d: usize,
        ops: impl IntoIterator<Item = &'a DenseOperator>,
    ) -> Result<Self> {
        let mut out = Self::new(d);
        for op in ops {
            out.push(op)?;
        }
        Ok(out)
    }

    pub fn push(&mut self, op: &DenseOperator) -> Result<()> {
        if op.dim() * op.dim() != self.rows {
            return Err(Error::invalid(format!(
                "operator vectorizes to {} entries, basis rows are {}",
                op.dim() * op.dim(),
                self.rows
            )));
        }
        self.data.extend(op.vectorize());
        self.cols += 1;
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, l: usize) -> &[Complex64] {
        &self.data[l * self.rows..(l + 1) * self.rows]
    }
}

/// Conventional numerical-rank threshold `eps * max(rows, cols)`, relative to
/// the largest singular value.
pub fn default_rank_tolerance(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

fn singular_values(a: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut s = Diag::<Complex64>::zeros(m.min(n));
    let scratch = svd::svd_scratch::<Complex64>(
        m,
        n,
        ComputeSvdVectors::No,
        ComputeSvdVectors::No,
        Par::Seq,
        Default::default(),
    );
    svd::svd(
        a,
        s.as_mut(),
        None,
        None,
        Par::Seq,
        MemStack::new(&mut MemBuffer::new(scratch)),
        Default::default(),
    )
    .map_err(|e| Error::LinearAlgebra(format!("svd did not converge: {e:?}")))?;
    Ok(s.column_vector().iter().map(|v| v.re).collect())
}

/// Count singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(a: MatRef<'_, Complex64>, rel_tol: f64) -> Result<usize> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0);
    }
    let sv = singular_values(a)?;
    let largest = sv.iter().copied().fold(0.0f64, f64::max);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * largest).count())
}

/// Whether `rank([basis | vec(h)]) = N' + 1`.
///
/// Columns are scaled to unit length before the SVD. This leaves the exact rank
/// unchanged and keeps raw nested commutators, whose norms spread over many
/// orders of magnitude, from hiding behind the relative threshold.
pub fn rank_independence_check(
    basis: &StackedBasisMatrix,
    h: &DenseOperator,
    rel_tol: f64,
) -> Result<bool> {
    if h.dim() * h.dim() != basis.nrows() {
        return Err(Error::invalid(format!(
            "candidate vectorizes to {} entries, basis rows are {}",
            h.dim() * h.dim(),
            basis.nrows()
        )));
    }
    let rows = basis.nrows();
    let cols = basis.ncols() + 1;
    if cols > rows {
        return Ok(false);
    }
    let hv = h.vectorize();
    let column = |l: usize| -> &[Complex64] {
        if l < basis.ncols() {
            basis.column(l)
        } else {
            &hv
        }
    };
    let scales: Vec<f64> = (0..cols)
        .map(|l| {
            let nrm = column(l).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 0.0 {
                1.0 / nrm
            } else {
                0.0
            }
        })
        .collect();
    let m = Mat::from_fn(rows, cols, |i, l| column(l)[i] * scales[l]);
    Ok(numerical_rank(m.as_ref(), rel_tol)? == cols)
}
