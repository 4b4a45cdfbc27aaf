//! Inner-product (Gram) matrix of a unit-normalized basis and its inverse.
//!
//! `A` and `A_inv` are held in double-double arithmetic. Gram matrices of raw
//! nested commutators can reach condition numbers near `1e16`, where an inverse
//! stored in doubles no longer separates dependent candidates from independent
//! ones. Queries run in doubles first and fall back to the double-double state
//! only when the double result lies too close to the tolerance to be trusted.

use faer::{Mat, Side};
use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::ops::{to_dd, to_f64, ComplexDd, Operator};

/// Default lower bound on the Schur complement of a bordered update.
pub const DEFAULT_CONDITIONING_FLOOR: f64 = 1e-12;

/// Bound on `max |A * A_inv - I|` beyond which the inverse is reported as drifted.
pub const INVERSE_RESIDUAL_LIMIT: f64 = 1e-6;

/// Safety factor on the rounding error of a double-precision residual.
const FAST_PATH_SAFETY: f64 = 1e3;

/// Double-double unit roundoff with the same safety factor.
const DD_SAFETY: f64 = 1e3 * 1.2e-32;

fn zero() -> ComplexDd {
    ComplexDd::default()
}

fn dd_to_f64(x: TwoFloat) -> f64 {
    x.hi() + x.lo()
}

/// Row-major `n x n` times vector.
fn mul(m: &[ComplexDd], x: &[ComplexDd]) -> Vec<ComplexDd> {
    let n = x.len();
    (0..n)
        .map(|i| {
            m[i * n..(i + 1) * n]
                .iter()
                .zip(x)
                .fold(zero(), |acc, (a, b)| acc + *a * *b)
        })
        .collect()
}

/// Gram matrix `A[l][m] = <B[l], B[m]>` with a maintained inverse.
///
/// Both matrices are stored row-major. Diagonal entries are the
/// double-double norms of the stored unit elements, one to double precision.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GramState {
    size: usize,
    a: Vec<ComplexDd>,
    a_inv: Vec<ComplexDd>,
    /// `a_inv` rounded to doubles, used by the fast path.
    a_inv_f64: Vec<Complex64>,
    /// Largest `|A_inv|` entry; scales the error of the fast path.
    inv_scale: f64,
}

/// Outcome of a matrix-inversion independence query.
#[derive(Clone, Debug)]
pub struct InversionCheck {
    pub independent: bool,
    /// `beta[l] = <B[l], h>`.
    pub beta: Vec<Complex64>,
    /// `|| h - B . (A_inv beta) ||`.
    pub residual: f64,
    /// Set when the verdict came from the double-double state.
    pub precise: Option<PreciseProjection>,
}

/// Double-double inputs of a query, reusable when the candidate is appended.
#[derive(Clone, Debug)]
pub struct PreciseProjection {
    pub beta: Vec<ComplexDd>,
    /// `<h, h>`.
    pub norm_sq: TwoFloat,
}

impl PreciseProjection {
    pub fn compute<T: Operator>(basis: &[T], h: &T) -> Result<Self> {
        Ok(Self {
            beta: basis
                .iter()
                .map(|b| b.inner_product_dd(h))
                .collect::<Result<_>>()?,
            norm_sq: h.inner_product_dd(h)?.re,
        })
    }
}

impl GramState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        to_f64(self.a[i * self.size + j])
    }

    #[inline]
    pub fn inverse_entry(&self, i: usize, j: usize) -> Complex64 {
        self.a_inv_f64[i * self.size + j]
    }

    pub fn matrix(&self) -> Mat<Complex64> {
        Mat::from_fn(self.size, self.size, |i, j| self.entry(i, j))
    }

    pub fn inverse(&self) -> Mat<Complex64> {
        Mat::from_fn(self.size, self.size, |i, j| self.inverse_entry(i, j))
    }

    /// Largest entry magnitude of the inverse.
    pub fn inverse_scale(&self) -> f64 {
        self.inv_scale
    }

    /// `A_inv * beta` in doubles.
    pub fn solve(&self, beta: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(beta.len(), self.size);
        (0..self.size)
            .map(|i| {
                let row = &self.a_inv_f64[i * self.size..(i + 1) * self.size];
                row.iter().zip(beta).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `A^-1 beta` in double-double, with one step of iterative refinement.
    pub fn solve_dd(&self, beta: &[ComplexDd]) -> Vec<ComplexDd> {
        let mut u = mul(&self.a_inv, beta);
        let au = mul(&self.a, &u);
        let e: Vec<ComplexDd> = beta.iter().zip(&au).map(|(b, a)| *b - *a).collect();
        for (ui, di) in u.iter_mut().zip(mul(&self.a_inv, &e)) {
            *ui += di;
        }
        u
    }

    /// `<h,h> - 2 Re(beta^dag u) + u^dag A u`: the squared norm of `h - B.u`,
    /// which is `<h,h> - beta^dag A^-1 beta` at `u = A^-1 beta`. Errors in `u`
    /// enter only at second order.
    fn residual_sq(&self, beta: &[ComplexDd], u: &[ComplexDd], norm_sq: TwoFloat) -> TwoFloat {
        let au = mul(&self.a, u);
        let mut acc = norm_sq;
        for i in 0..self.size {
            let cross = (beta[i].conj() * u[i]).re;
            acc = acc - cross - cross + (u[i].conj() * au[i]).re;
        }
        acc
    }

    /// Least-squares residual squared from a double-precision guess `x`:
    /// `r(x)^2 - g^dag A^-1 g` with gradient `g = beta - A x`.
    fn residual_sq_from(&self, beta: &[ComplexDd], norm_sq: TwoFloat, x: &[Complex64]) -> TwoFloat {
        let n = self.size;
        let xd: Vec<ComplexDd> = x.iter().map(|&c| to_dd(c)).collect();
        let ax = mul(&self.a, &xd);
        let g: Vec<ComplexDd> = beta.iter().zip(&ax).map(|(b, a)| *b - *a).collect();
        let ag = mul(&self.a_inv, &g);
        let mut acc = norm_sq;
        for i in 0..n {
            let cross = (beta[i].conj() * xd[i]).re;
            acc = acc - cross - cross + (xd[i].conj() * ax[i]).re - (g[i].conj() * ag[i]).re;
        }
        acc
    }

    fn sync(&mut self) {
        self.a_inv_f64 = self.a_inv.iter().map(|&v| to_f64(v)).collect();
        self.inv_scale = self.a_inv_f64.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }

    /// Append a unit-norm element whose inner products with the current basis
    /// are `beta`, updating the inverse through the bordered-matrix identity.
    ///
    /// Returns the Schur complement `s = 1 - beta^dag A_inv beta`, which equals
    /// the squared residual norm of the new element in exact arithmetic.
    pub fn expand(&mut self, beta: &[Complex64], floor: f64) -> Result<f64> {
        let beta: Vec<ComplexDd> = beta.iter().map(|&b| to_dd(b)).collect();
        self.expand_dd(&beta, TwoFloat::from(1.0), floor)
    }

    /// [`GramState::expand`] from double-double inner products; `norm_sq` is
    /// `<h, h>` of the stored element.
    pub fn expand_dd(&mut self, beta: &[ComplexDd], norm_sq: TwoFloat, floor: f64) -> Result<f64> {
        let n = self.size;
        if beta.len() != n {
            return Err(Error::invalid(format!(
                "beta has length {}, basis has {n} elements",
                beta.len()
            )));
        }
        let u = self.solve_dd(beta);
        let s = self.residual_sq(beta, &u, norm_sq);
        let schur = dd_to_f64(s);
        if !(schur > floor) {
            return Err(Error::NumericalDegeneracy {
                element: n,
                schur,
                floor,
            });
        }
        let m = n + 1;
        let mut a = vec![zero(); m * m];
        let mut a_inv = vec![zero(); m * m];
        let inv_s = TwoFloat::from(1.0) / s;
        for i in 0..n {
            a[i * m..i * m + n].copy_from_slice(&self.a[i * n..(i + 1) * n]);
            a[i * m + n] = beta[i];
            a[n * m + i] = beta[i].conj();
            let ui = u[i] * inv_s;
            for j in 0..n {
                a_inv[i * m + j] = self.a_inv[i * n + j] + ui * u[j].conj();
            }
            a_inv[i * m + n] = -ui;
            a_inv[n * m + i] = -ui.conj();
        }
        a[n * m + n] = Complex::new(norm_sq, TwoFloat::from(0.0));
        a_inv[n * m + n] = Complex::new(inv_s, TwoFloat::from(0.0));
        self.size = m;
        self.a = a;
        self.a_inv = a_inv;
        self.sync();
        Ok(schur)
    }

    /// Recompute the inverse from `A` by a double-double Cholesky factorization.
    pub fn refresh_inverse(&mut self) -> Result<()> {
        let n = self.size;
        let mut l = vec![zero(); n * n];
        for j in 0..n {
            let mut d = self.a[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > TwoFloat::from(0.0)) {
                return Err(Error::LinearAlgebra(format!(
                    "gram matrix is not positive definite at pivot {j}"
                )));
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex::new(djj, TwoFloat::from(0.0));
            for i in j + 1..n {
                let mut v = self.a[i * n + j];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = v / djj;
            }
        }
        // L^-1, lower triangular, by forward substitution.
        let mut li = vec![zero(); n * n];
        for j in 0..n {
            li[j * n + j] =
                Complex::new(TwoFloat::from(1.0) / l[j * n + j].re, TwoFloat::from(0.0));
            for i in j + 1..n {
                let mut v = zero();
                for k in j..i {
                    v -= l[i * n + k] * li[k * n + j];
                }
                li[i * n + j] = v / l[i * n + i].re;
            }
        }
        // A^-1 = L^-dag L^-1.
        for i in 0..n {
            for j in 0..n {
                let mut v = zero();
                for k in i.max(j)..n {
                    v += li[k * n + i].conj() * li[k * n + j];
                }
                self.a_inv[i * n + j] = v;
            }
        }
        self.sync();
        Ok(())
    }

    /// `max |A * A_inv - I|`, evaluated in double-double.
    pub fn inverse_residual(&self) -> f64 {
        let n = self.size;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero();
                for k in 0..n {
                    acc += self.a[i * n + k] * self.a_inv[k * n + j];
                }
                if i == j {
                    acc.re -= TwoFloat::from(1.0);
                }
                worst = worst.max(to_f64(acc).norm());
            }
        }
        worst
    }

    /// Largest `|A[i][j] - conj(A[j][i])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.size;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(to_f64(self.a[i * n + j] - self.a[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of `A` rounded to doubles.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        if self.size == 0 {
            return Err(Error::invalid("empty gram matrix has no eigenvalues"));
        }
        let eig = self
            .matrix()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("eigenvalue solver failed: {e:?}")))?;
        Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Functional form of [`GramState::expand`].
pub fn expand_gram(state: &GramState, beta: &[Complex64], floor: f64) -> Result<GramState> {
    let mut next = state.clone();
    next.expand(beta, floor)?;
    Ok(next)
}

/// Residual test `|| h - B . (A_inv beta) || > tol` for a unit-norm `h`.
///
/// The residual `r` of `x = A_inv beta` is first formed in doubles. Since `x`
/// is some coefficient vector, `r` bounds the least-squares residual from
/// above and an `r` well below `tol` settles dependence. Any other candidate
/// is decided on the residual recomputed from the double-double state as
/// `sqrt(<h,h> - beta^dag A^-1 beta)`.
pub fn check_matrix_inversion<T: Operator>(
    state: &GramState,
    basis: &[T],
    h: &T,
    tol: f64,
) -> Result<InversionCheck> {
    if basis.len() != state.len() {
        return Err(Error::invalid(format!(
            "gram state has {} elements, basis has {}",
            state.len(),
            basis.len()
        )));
    }
    let beta = basis
        .iter()
        .map(|b| b.inner_product(h))
        .collect::<Result<Vec<_>>>()?;
    let x = state.solve(&beta);
    let mut parts: Vec<(Complex64, &T)> = Vec::with_capacity(basis.len() + 1);
    parts.push((Complex64::new(1.0, 0.0), h));
    parts.extend(x.iter().zip(basis).map(|(&c, b)| (-c, b)));
    let fast = h.combine(&parts)?.norm();
    let rounding =
        FAST_PATH_SAFETY * f64::EPSILON * (1.0 + x.iter().map(|c| c.norm()).sum::<f64>());
    if basis.is_empty() || fast + rounding <= 0.1 * tol {
        return Ok(InversionCheck {
            independent: fast > tol,
            beta,
            residual: fast,
            precise: None,
        });
    }
    let precise = PreciseProjection::compute(basis, h)?;
    // The shortcut cancels `r(x)^2` down to the least-squares residual; its
    // error grows with `fast^2` and with the conditioning of `A`.
    let mut r2 = dd_to_f64(state.residual_sq_from(&precise.beta, precise.norm_sq, &x));
    let err = DD_SAFETY * (1.0 + fast * fast) * basis.len() as f64 * state.inverse_scale().max(1.0);
    if (r2 - tol * tol).abs() <= err {
        let u = state.solve_dd(&precise.beta);
        r2 = dd_to_f64(state.residual_sq(&precise.beta, &u, precise.norm_sq));
    }
    let residual = r2.max(0.0).sqrt();
    Ok(InversionCheck {
        independent: residual > tol,
        beta,
        residual,
        precise: Some(precise),
    })
}
