//! A small runtime sweep, printed as a grid and as JSON lines.

use std::time::Duration;

use lie_closure::cli::{read_json_lines, run_bench, runtime_table, write_json_lines, BenchSweep};
use lie_closure::generators::Family;
use lie_closure::{Backend, ClosureConfig, Method, Result};

fn main() -> Result<()> {
    let sweep = BenchSweep {
        families: vec![Family::Hea, Family::TfimHvaOpen],
        sizes: vec![2, 3, 4],
        methods: vec![Method::OrthonormalizationDimOnly, Method::MatrixInversion],
        backend: Backend::Pauli,
        seed: 0,
        restrict_xxz: false,
        closure: ClosureConfig::default().with_timeout(Duration::from_secs(120)),
    };
    let records = run_bench(&sweep);
    print!("{}", runtime_table(&records));

    let mut buf = Vec::new();
    write_json_lines(&records, &mut buf)?;
    assert_eq!(read_json_lines(buf.as_slice())?, records);
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}
