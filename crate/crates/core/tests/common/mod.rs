//! Test-side oracles built from scratch: Pauli strings expanded by explicit
//! Kronecker products into row-major complex matrices.
#![allow(dead_code)]

use lie_closure::{PauliString, PauliSum};
use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Row-major `d x d` matrix.
#[derive(Clone, Debug)]
pub struct M {
    pub d: usize,
    pub a: Vec<C>,
}

impl M {
    pub fn zeros(d: usize) -> Self {
        M {
            d,
            a: vec![C::new(0.0, 0.0); d * d],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> C {
        self.a[i * self.d + j]
    }

    pub fn mul(&self, o: &M) -> M {
        let d = self.d;
        let mut out = M::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let x = self.a[i * d + k];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.a[i * d + j] += x * o.a[k * d + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &M) -> M {
        M {
            d: self.d,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn commutator(&self, o: &M) -> M {
        self.mul(o).sub(&o.mul(self))
    }

    /// `tr(self^dag o) / d`.
    pub fn inner(&self, o: &M) -> C {
        self.a
            .iter()
            .zip(&o.a)
            .map(|(x, y)| x.conj() * y)
            .sum::<C>()
            / self.d as f64
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn single(letter: char) -> [[C; 2]; 2] {
    let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match letter {
        'I' => [[o, z], [z, o]],
        'X' => [[z, o], [o, z]],
        'Y' => [[z, -i], [i, z]],
        'Z' => [[o, z], [z, -o]],
        _ => unreachable!(),
    }
}

/// Qubit 0 is the leftmost Kronecker factor.
pub fn expand_string(p: &PauliString) -> M {
    let mut out = M {
        d: 1,
        a: vec![C::new(1.0, 0.0)],
    };
    for q in 0..p.num_qubits() {
        let s = single(p.letter(q));
        let d = out.d * 2;
        let mut next = M::zeros(d);
        for i in 0..out.d {
            for j in 0..out.d {
                for a in 0..2 {
                    for b in 0..2 {
                        next.a[(2 * i + a) * d + 2 * j + b] = out.at(i, j) * s[a][b];
                    }
                }
            }
        }
        out = next;
    }
    out
}

pub fn expand(sum: &PauliSum) -> M {
    let mut out = M::zeros(1 << sum.num_qubits());
    for (p, c) in sum.terms() {
        let e = expand_string(p);
        for (o, v) in out.a.iter_mut().zip(&e.a) {
            *o += c * v;
        }
    }
    out
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_string(rng: &mut StdRng, n: usize) -> PauliString {
    let mask = (1u64 << n) - 1;
    loop {
        let (x, z) = (rng.random::<u64>() & mask, rng.random::<u64>() & mask);
        if x | z != 0 {
            return PauliString::new(n, x, z).unwrap();
        }
    }
}

/// `1..=max_terms` non-identity strings with complex coefficients, or real
/// ones when `hermitian`.
pub fn random_sum(rng: &mut StdRng, n: usize, max_terms: usize, hermitian: bool) -> PauliSum {
    let k = rng.random_range(1..=max_terms);
    let terms: Vec<(PauliString, C)> = (0..k)
        .map(|_| {
            let re = rng.random_range(-1.0..1.0);
            let im = if hermitian {
                0.0
            } else {
                rng.random_range(-1.0..1.0)
            };
            (random_string(rng, n), C::new(re, im))
        })
        .collect();
    PauliSum::from_terms(n, terms).unwrap()
}

/// `max |a - b| / max(max |b|, floor)`.
pub fn rel_diff(a: &M, b: &M) -> f64 {
    a.sub(b).max_abs() / b.max_abs().max(1e-300)
}
