//! XXZ generators restricted to the zero-magnetization block, closed densely.

use lie_closure::generators::{build_operators, AnsatzSpec, Family};
use lie_closure::{run_closure, Backend, ClosureConfig, Method, Operator, Result};

fn main() -> Result<()> {
    for n in [4, 6] {
        let spec = AnsatzSpec::new(Family::XxzHva, n).restricted();
        let gens = build_operators(&spec, Backend::Dense)?;
        let res = run_closure(
            &gens,
            Method::OrthonormalizationDimOnly,
            &ClosureConfig::default(),
        )?;
        println!(
            "n={n}: block dim {}, closure dim {}, tabulated {:?}, warnings {}",
            gens[0].dim(),
            res.dimension,
            spec.expected_dimension(),
            res.warnings.len()
        );
    }
    Ok(())
}
