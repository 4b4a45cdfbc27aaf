//! Read a generator file, close it, and write the basis back out in the same
//! text format.

use lie_closure::cli::basis_listing;
use lie_closure::pauli::parse_generator_file;
use lie_closure::{run_closure, ClosureConfig, Method, Result};

const GENERATORS: &str = "\
# two-qubit Heisenberg-like set
1 XX + 1 YY
1 ZI - 1 IZ
";

fn main() -> Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => GENERATORS.to_string(),
    };
    let gens = parse_generator_file(&text, None)?;
    let res = run_closure(
        &gens,
        Method::OrthonormalizationDimOnly,
        &ClosureConfig::default(),
    )?;
    println!("# dimension {}", res.dimension);
    print!("{}", basis_listing(&res.basis));
    Ok(())
}
