mod common;

use common::{expand, expand_string, rel_diff};
use lie_closure::dense::{from_pauli, restrict, zero_magnetization_projector};
use lie_closure::pauli::{parse_pauli_sum, string_product, sum_commutator, sum_inner_product};
use lie_closure::{PauliString, PauliSum};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn sum_strategy(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    let masks = 1u64 << n;
    prop::collection::vec(
        (0..masks, 0..masks, -2.0..2.0f64, -2.0..2.0f64),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        PauliSum::from_terms(
            n,
            terms
                .into_iter()
                .map(|(x, z, re, im)| (PauliString::new(n, x, z).unwrap(), C::new(re, im))),
        )
        .unwrap()
    })
}

fn sized_sums(count: usize) -> impl Strategy<Value = Vec<PauliSum>> {
    (1usize..=4).prop_flat_map(move |n| prop::collection::vec(sum_strategy(n, 5), count))
}

#[test]
fn string_products_match_matrices_exhaustively() {
    for n in 1..=2 {
        let all: Vec<PauliString> = (0..1u64 << n)
            .flat_map(|x| (0..1u64 << n).map(move |z| PauliString::new(n, x, z).unwrap()))
            .collect();
        for p in &all {
            for q in &all {
                let (r, phase) = string_product(p, q).unwrap();
                let mut lhs = expand_string(&r);
                let c = phase.to_complex();
                lhs.a.iter_mut().for_each(|v| *v *= c);
                let rhs = expand_string(p).mul(&expand_string(q));
                assert!(lhs.sub(&rhs).max_abs() < 1e-15, "{p} * {q}");
                let commute = rhs.sub(&expand_string(q).mul(&expand_string(p))).max_abs() < 1e-15;
                assert_eq!(p.commutes_with(q), commute, "{p}, {q}");
            }
        }
    }
}

#[test]
fn library_expansion_matches_oracle() {
    let s = parse_pauli_sum("0.5 XYZ - 1 IZI + 2 YYX", 3).unwrap();
    let lib = from_pauli(&s).unwrap();
    let oracle = expand(&s);
    for i in 0..8 {
        for j in 0..8 {
            assert!((lib.get(i, j) - oracle.at(i, j)).norm() < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn commutator_is_a_homomorphism_to_matrices(v in sized_sums(2)) {
        let (a, b) = (&v[0], &v[1]);
        let lhs = expand(&sum_commutator(a, b).unwrap());
        let rhs = expand(a).commutator(&expand(b));
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn inner_product_and_norm_match_trace(v in sized_sums(2)) {
        let (a, b) = (&v[0], &v[1]);
        let (ea, eb) = (expand(a), expand(b));
        let ip = sum_inner_product(a, b).unwrap();
        prop_assert!((ip - ea.inner(&eb)).norm() <= 1e-12 * (1.0 + a.norm() * b.norm()));
        prop_assert!((a.norm() - ea.norm()).abs() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn inner_product_axioms(v in sized_sums(3), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let ab = a.inner_product(b).unwrap();
        let ba = b.inner_product(a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-12 * (1.0 + ab.norm()));
        prop_assert!(ab.norm() <= a.norm() * b.norm() * (1.0 + 1e-12) + 1e-15);
        let (cs, ct) = (C::new(s, 0.3), C::new(t, -1.0));
        let lin = PauliSum::linear_combination(a.num_qubits(), &[(cs, b), (ct, c)]).unwrap();
        let lhs = a.inner_product(&lin).unwrap();
        let rhs = cs * ab + ct * a.inner_product(c).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + rhs.norm()));
    }

    #[test]
    fn jacobi_identity(v in sized_sums(3)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let t1 = a.commutator(&b.commutator(c).unwrap()).unwrap();
        let t2 = b.commutator(&c.commutator(a).unwrap()).unwrap();
        let t3 = c.commutator(&a.commutator(b).unwrap()).unwrap();
        let one = C::new(1.0, 0.0);
        let total = PauliSum::linear_combination(a.num_qubits(), &[(one, &t1), (one, &t2), (one, &t3)]).unwrap();
        let scale = 1.0 + t1.norm() + t2.norm() + t3.norm();
        prop_assert!(total.norm() <= 1e-12 * scale);
    }

    #[test]
    fn dense_backend_commutator_matches_oracle(v in sized_sums(2)) {
        let (a, b) = (&v[0], &v[1]);
        let dense = from_pauli(a).unwrap().commutator(&from_pauli(b).unwrap()).unwrap();
        let oracle = expand(a).commutator(&expand(b));
        let d = oracle.d;
        let lib = common::M { d, a: (0..d * d).map(|k| dense.get(k / d, k % d)).collect() };
        prop_assert!(rel_diff(&lib, &oracle) <= 1e-12 || oracle.max_abs() == 0.0);
    }

    #[test]
    fn restriction_preserves_commutators(c1 in -1.0..1.0f64, c2 in -1.0..1.0f64, c3 in 0.1..2.0f64) {
        // Both operators conserve the number of ones, so the block is invariant.
        let n = 4;
        let a = parse_pauli_sum(&format!("{c1} XXII + {c1} YYII + {c3} ZZII + {c2} IIZI"), n).unwrap();
        let b = parse_pauli_sum(&format!("1 IXXI + 1 IYYI + {c2} ZIIZ + {c3} IXXI"), n).unwrap();
        let p = zero_magnetization_projector(n).unwrap();
        let (da, db) = (from_pauli(&a).unwrap(), from_pauli(&b).unwrap());
        let lhs = restrict(&da.commutator(&db).unwrap(), &p).unwrap();
        let rhs = restrict(&da, &p).unwrap().commutator(&restrict(&db, &p).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-11);
    }
}
