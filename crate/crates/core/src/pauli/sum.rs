use std::cell::RefCell;
use std::cmp::Ordering;

use num_complex::Complex64;

use super::string::PauliString;
use crate::error::{Error, Result};
use crate::ops::{conj_mul_dd, ComplexDd};

/// Relative magnitude below which coefficients produced by arithmetic are dropped.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// Widths up to this use a dense scratch table of `4^n` slots for accumulation.
const DENSE_ACCUMULATOR_MAX_QUBITS: usize = 8;

/// Sparse complex-weighted sum of Pauli strings.
///
/// Terms are kept sorted by `(z_mask, x_mask)` with unique keys, so iteration
/// order does not depend on how the sum was built.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(PauliString, Complex64)>,
}

impl PauliSum {
    /// The null operator on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        PauliString::identity(n)?;
        Ok(Self {
            n,
            terms: Vec::new(),
        })
    }

    pub fn from_string(p: PauliString, coeff: Complex64) -> Self {
        let terms = if coeff == Complex64::new(0.0, 0.0) {
            Vec::new()
        } else {
            vec![(p, coeff)]
        };
        Self {
            n: p.num_qubits(),
            terms,
        }
    }

    /// Build from arbitrary terms: duplicates are merged in input order and
    /// negligible coefficients dropped.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        PauliString::identity(n)?;
        let mut acc = Accumulator::new(n);
        for (p, c) in terms {
            if p.num_qubits() != n {
                return Err(Error::invalid(format!(
                    "term {p} has {} qubits, expected {n}",
                    p.num_qubits()
                )));
            }
            acc.add(p, c);
        }
        Ok(acc.finish())
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(PauliString, Complex64)] {
        &self.terms
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        match self.terms.binary_search_by(|(q, _)| q.cmp(p)) {
            Ok(i) => self.terms[i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::invalid(format!(
                "qubit count mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// `sqrt(sum |c|^2)`, the trace norm `sqrt(tr(a^dag a) / d)`.
    pub fn norm(&self) -> f64 {
        self.terms
            .iter()
            .fold(0.0, |acc, (_, c)| acc + c.norm_sqr())
            .sqrt()
    }

    /// `tr(a^dag b) / d`, which reduces to a merge over shared strings.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_width(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    acc += a[i].1.conj() * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(acc)
    }

    /// [`PauliSum::inner_product`] in double-double arithmetic.
    pub fn inner_product_dd(&self, other: &Self) -> Result<ComplexDd> {
        self.check_width(other)?;
        let mut acc = ComplexDd::default();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    acc += conj_mul_dd(a[i].1, b[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(acc)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self {
                n: self.n,
                terms: Vec::new(),
            };
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|&(p, v)| (p, v * c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &Self) -> Result<()> {
        self.check_width(other)?;
        let combined =
            Self::linear_combination(self.n, &[(Complex64::new(1.0, 0.0), &*self), (c, other)])?;
        *self = combined;
        Ok(())
    }

    /// `sum_k c_k * ops_k`, accumulated in the order given.
    pub fn linear_combination(n: usize, parts: &[(Complex64, &PauliSum)]) -> Result<Self> {
        let mut acc = Accumulator::new(n);
        for &(c, op) in parts {
            if op.n != n {
                return Err(Error::invalid(format!(
                    "qubit count mismatch: {} vs {n}",
                    op.n
                )));
            }
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(p, v) in &op.terms {
                acc.add(p, c * v);
            }
        }
        Ok(acc.finish())
    }

    /// `[self, other] = self*other - other*self`.
    ///
    /// Only anticommuting string pairs contribute, each as `2 * P * Q`. The
    /// operands are visited in a canonical order so that `[a, b]` and `[b, a]`
    /// are exact negatives of each other.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        match canonical_cmp(self, other) {
            Ordering::Equal => Ok(Self {
                n: self.n,
                terms: Vec::new(),
            }),
            Ordering::Less => Ok(self.commutator_ordered(other)),
            Ordering::Greater => Ok(other
                .commutator_ordered(self)
                .scaled(Complex64::new(-1.0, 0.0))),
        }
    }

    fn commutator_ordered(&self, other: &Self) -> Self {
        let mut acc = Accumulator::new(self.n);
        for &(p, a) in &self.terms {
            for &(q, b) in &other.terms {
                if p.commutes_with(&q) {
                    continue;
                }
                let (r, phase) = p.mul_unchecked(&q);
                let c = a * b;
                acc.add(r, phase.apply(Complex64::new(2.0 * c.re, 2.0 * c.im)));
            }
        }
        acc.finish()
    }

    /// Whether every coefficient is real, i.e. the operator is Hermitian.
    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.im == 0.0)
    }
}

fn canonical_cmp(a: &PauliSum, b: &PauliSum) -> Ordering {
    a.terms.len().cmp(&b.terms.len()).then_with(|| {
        for ((p, c), (q, d)) in a.terms.iter().zip(&b.terms) {
            let o = p
                .cmp(q)
                .then_with(|| c.re.total_cmp(&d.re))
                .then_with(|| c.im.total_cmp(&d.im));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

thread_local! {
    static SCRATCH: RefCell<DenseScratch> = RefCell::new(DenseScratch::default());
}

#[derive(Default)]
struct DenseScratch {
    values: Vec<Complex64>,
    touched_flag: Vec<bool>,
}

/// Collects `(string, coefficient)` contributions and sums duplicates in
/// insertion order. Small widths index a dense table, wide ones sort.
enum Accumulator {
    Dense {
        n: usize,
        touched: Vec<usize>,
        pending: Vec<(usize, Complex64)>,
    },
    Sorted {
        n: usize,
        entries: Vec<(u128, PauliString, Complex64)>,
    },
}

impl Accumulator {
    fn new(n: usize) -> Self {
        if n <= DENSE_ACCUMULATOR_MAX_QUBITS {
            Accumulator::Dense {
                n,
                touched: Vec::new(),
                pending: Vec::new(),
            }
        } else {
            Accumulator::Sorted {
                n,
                entries: Vec::new(),
            }
        }
    }

    #[inline]
    fn add(&mut self, p: PauliString, c: Complex64) {
        match self {
            Accumulator::Dense { n, pending, .. } => {
                let idx = ((p.z_mask() as usize) << *n) | p.x_mask() as usize;
                pending.push((idx, c));
            }
            Accumulator::Sorted { entries, .. } => entries.push((p.packed_index(), p, c)),
        }
    }

    fn finish(self) -> PauliSum {
        let (n, raw) = match self {
            Accumulator::Dense {
                n,
                mut touched,
                pending,
            } => {
                let raw = SCRATCH.with(|cell| {
                    let mut scratch = cell.borrow_mut();
                    let size = 1usize << (2 * n);
                    if scratch.values.len() < size {
                        scratch.values.resize(size, Complex64::new(0.0, 0.0));
                        scratch.touched_flag.resize(size, false);
                    }
                    for &(idx, c) in &pending {
                        if !scratch.touched_flag[idx] {
                            scratch.touched_flag[idx] = true;
                            scratch.values[idx] = Complex64::new(0.0, 0.0);
                            touched.push(idx);
                        }
                        scratch.values[idx] += c;
                    }
                    touched.sort_unstable();
                    let mask = (1usize << n) - 1;
                    let mut out = Vec::with_capacity(touched.len());
                    for &idx in &touched {
                        scratch.touched_flag[idx] = false;
                        let x = (idx & mask) as u64;
                        let z = (idx >> n) as u64;
                        let p = PauliString::new(n, x, z).expect("masks bounded by n");
                        out.push((p, scratch.values[idx]));
                    }
                    out
                });
                (n, raw)
            }
            Accumulator::Sorted { n, mut entries } => {
                entries.sort_by_key(|e| e.0);
                let mut out: Vec<(PauliString, Complex64)> = Vec::with_capacity(entries.len());
                for (_, p, c) in entries {
                    match out.last_mut() {
                        Some((q, v)) if *q == p => *v += c,
                        _ => out.push((p, Complex64::new(0.0, 0.0) + c)),
                    }
                }
                (n, out)
            }
        };
        let largest = raw.iter().map(|(_, c)| c.norm()).fold(0.0f64, f64::max);
        let cutoff = DROP_TOLERANCE * largest;
        let terms = raw
            .into_iter()
            .filter(|(_, c)| {
                let m = c.norm();
                m > 0.0 && m > cutoff
            })
            .collect();
        PauliSum { n, terms }
    }
}
