//! Thread count changes the wall time, never the basis.

use lie_closure::cli::basis_listing;
use lie_closure::generators::{build_generators, AnsatzSpec, Family};
use lie_closure::{run_closure, ClosureConfig, Method, Result};

fn main() -> Result<()> {
    let gens = build_generators(&AnsatzSpec::new(Family::SpinGlassHva, 3).with_seed(11))?;
    let mut listings = Vec::new();
    for threads in [1, 2, 4, 8] {
        let res = run_closure(
            &gens,
            Method::Orthonormalization,
            &ClosureConfig::default().with_threads(threads),
        )?;
        println!(
            "threads {threads}: dim {}  {:.3} s",
            res.dimension, res.stats.wall_time_s
        );
        listings.push(basis_listing(&res.basis));
    }
    let same = listings.windows(2).all(|w| w[0] == w[1]);
    println!("identical bases: {same}");
    assert!(same);
    Ok(())
}
