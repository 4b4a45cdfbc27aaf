use num_complex::Complex64;

use crate::error::Result;
use crate::ops::Operator;

/// Orthonormal basis `V`, optionally alongside the raw elements `B` it was
/// built from.
#[derive(Clone, Debug)]
pub struct OrthoState<T> {
    pub v: Vec<T>,
    pub b: Option<Vec<T>>,
}

impl<T: Operator> OrthoState<T> {
    pub fn new(keep_original: bool) -> Self {
        Self {
            v: Vec::new(),
            b: keep_original.then(Vec::new),
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Largest deviation of the pairwise inner products of `V` from the identity.
    pub fn orthonormality_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, a) in self.v.iter().enumerate() {
            for (j, b) in self.v.iter().enumerate().skip(i) {
                let mut ip = a.inner_product(b)?;
                if i == j {
                    ip -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(ip.norm());
            }
        }
        Ok(worst)
    }
}

fn subtract_projection<T: Operator>(v: &[T], h: &T) -> Result<(T, Vec<Complex64>)> {
    let coeffs = v
        .iter()
        .map(|e| e.inner_product(h))
        .collect::<Result<Vec<_>>>()?;
    let mut parts: Vec<(Complex64, &T)> = Vec::with_capacity(v.len() + 1);
    parts.push((Complex64::new(1.0, 0.0), h));
    parts.extend(coeffs.iter().zip(v).map(|(&c, e)| (-c, e)));
    Ok((h.combine(&parts)?, coeffs))
}

/// `h - sum_l <V[l], h> V[l]`, applied twice.
///
/// A single classical Gram-Schmidt pass leaves components of size
/// `eps * cond` along `V`; the second pass removes them. The returned
/// coefficients are those of the first pass.
pub fn project_residual<T: Operator>(v: &[T], h: &T) -> Result<(T, Vec<Complex64>)> {
    if v.is_empty() {
        return Ok((h.clone(), Vec::new()));
    }
    let (once, coeffs) = subtract_projection(v, h)?;
    let (twice, _) = subtract_projection(v, &once)?;
    Ok((twice, coeffs))
}
