//! Pauli strings and sums: products, commutators, the normalized trace inner
//! product, and the text format.

use lie_closure::pauli::{format_pauli_sum, parse_pauli_sum, string_product, PauliString};
use lie_closure::Result;

fn main() -> Result<()> {
    let x = PauliString::from_factors(2, &[(0, 'X')])?;
    let y = PauliString::from_factors(2, &[(0, 'Y'), (1, 'Z')])?;
    let (p, phase) = string_product(&x, &y)?;
    println!("X0 * Y0 Z1 = {:?} {:?}", phase, p);
    println!("commute: {}", x.commutes_with(&y));

    let a = parse_pauli_sum("1 XX + 0.5 ZI", 2)?;
    let b = parse_pauli_sum("1 ZZ - 2 YI", 2)?;
    let c = a.commutator(&b)?;
    println!("[a, b] = {}", format_pauli_sum(&c));
    println!("<a, b> = {}", a.inner_product(&b)?);
    println!("|a| = {:.6}  hermitian: {}", a.norm(), a.is_hermitian());

    // Commutators of Hermitian operators are anti-Hermitian.
    println!("[a, b] hermitian: {}", c.is_hermitian());
    let back = parse_pauli_sum(&format_pauli_sum(&c), 2)?;
    assert_eq!(back, c);
    Ok(())
}
