//! Every ansatz family: its generators and the closure dimension reached.

use lie_closure::generators::{build_operators, list_families, AnsatzSpec, Family};
use lie_closure::{run_closure, Backend, ClosureConfig, Method, Operator, Result};

fn main() -> Result<()> {
    for info in list_families() {
        println!("{info}");
    }
    println!();
    for (family, n) in [
        (Family::Hea, 3),
        (Family::SpinGlassHva, 3),
        (Family::XxzHva, 4),
        (Family::TfimHvaOpen, 4),
    ] {
        let spec = AnsatzSpec::new(family, n).with_seed(7);
        let gens = build_operators(&spec, Backend::Pauli)?;
        for g in &gens {
            println!("  {family} n={n}: {}", g.describe());
        }
        let res = run_closure(
            &gens,
            Method::OrthonormalizationDimOnly,
            &ClosureConfig::default(),
        )?;
        let expected = spec
            .expected_dimension()
            .map_or("-".to_string(), |d| d.to_string());
        println!(
            "{family} n={n}: dimension {} (expected {expected})\n",
            res.dimension
        );
    }
    Ok(())
}
