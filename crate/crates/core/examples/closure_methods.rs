//! Close the same generator set with each of the four methods and compare.

use lie_closure::generators::{build_generators, AnsatzSpec, Family};
use lie_closure::{run_closure, ClosureConfig, Method, Result};

fn main() -> Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(3, |a| a.parse().expect("qubit count"));
    let gens = build_generators(&AnsatzSpec::new(Family::Hea, n))?;
    let cfg = ClosureConfig::default();
    println!("hea n={n}, {} generators", gens.len());
    for m in Method::ALL {
        let res = run_closure(&gens, m, &cfg)?;
        println!(
            "{:<18} dim {:>4}  commutators {:>6}  checks {:>6}  {:.3} s",
            m.name(),
            res.dimension,
            res.stats.commutators_evaluated,
            res.stats.independence_checks,
            res.stats.wall_time_s
        );
        if let Some(gram) = &res.gram {
            println!(
                "{:<18} gram min eigenvalue {:.3e}",
                "",
                gram.min_eigenvalue()?
            );
        }
    }
    Ok(())
}
