//! One candidate against a fixed basis, decided by every method.

use lie_closure::closure::independence_check;
use lie_closure::pauli::parse_pauli_sum;
use lie_closure::{ClosureConfig, Method, PauliSum, Result};

fn main() -> Result<()> {
    let basis: Vec<PauliSum> = ["1 XI", "1 ZI + 1 IZ", "1 ZZ"]
        .iter()
        .map(|s| parse_pauli_sum(s, 2))
        .collect::<Result<_>>()?;
    let cfg = ClosureConfig::default();
    for text in ["1 YY", "2 XI - 3 ZZ", "1 ZI + 1 IZ + 1e-10 XX"] {
        let h = parse_pauli_sum(text, 2)?;
        for m in Method::ALL {
            let r = independence_check(&basis, &h, m, &cfg)?;
            let residual = r.residual.map_or("-".to_string(), |v| format!("{v:.3e}"));
            println!(
                "{text:<24} {m:<18} independent={:<5} residual={residual}",
                r.independent
            );
        }
    }
    Ok(())
}
