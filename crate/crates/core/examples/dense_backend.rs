//! The dense backend agrees with the Pauli one, and can restrict operators to
//! a subspace before closing them.

use lie_closure::dense::{from_pauli, restrict, zero_magnetization_projector};
use lie_closure::pauli::parse_pauli_sum;
use lie_closure::Result;

fn main() -> Result<()> {
    let a = parse_pauli_sum("1 XXI + 1 YYI + 1.5 ZZI", 3)?;
    let b = parse_pauli_sum("1 IXX + 1 IYY + 1.5 IZZ", 3)?;

    let via_pauli = from_pauli(&a.commutator(&b)?)?;
    let via_dense = from_pauli(&a)?.commutator(&from_pauli(&b)?)?;
    println!(
        "max |[a,b]_pauli - [a,b]_dense| = {:.3e}",
        via_pauli.max_abs_diff(&via_dense)?
    );
    println!(
        "<a,b> pauli {}  dense {}",
        a.inner_product(&b)?,
        from_pauli(&a)?.inner_product(&from_pauli(&b)?)?
    );

    // Both terms conserve magnetization, so they restrict cleanly to the
    // zero-magnetization block of four qubits.
    let n = 4;
    let proj = zero_magnetization_projector(n)?;
    let h = parse_pauli_sum("1 XXII + 1 YYII + 1.5 ZZII", n)?;
    let r = restrict(&from_pauli(&h)?, &proj)?;
    println!(
        "restricted {} -> {} dims, norm {:.6}",
        proj.ambient_dim(),
        r.dim(),
        r.norm()
    );
    Ok(())
}
