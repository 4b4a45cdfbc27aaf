use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use super::record::{write_records, OutputFormat, ResultRecord, RunStatus};
use super::{execute, exit, InputSource, RunConfig};
use crate::closure::{ClosureConfig, Method};
use crate::generators::{AnsatzSpec, Family};
use crate::ops::Backend;

/// Families x sizes x methods grid; every cell is one closure run.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchSweep {
    pub families: Vec<Family>,
    pub sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub backend: Backend,
    pub seed: u64,
    /// Applied to `xxz_hva` cells; forces the dense backend for them.
    pub restrict_xxz: bool,
    /// Closure settings; `timeout` bounds each cell separately.
    pub closure: ClosureConfig,
}

impl Default for BenchSweep {
    fn default() -> Self {
        Self {
            families: vec![Family::Hea],
            sizes: vec![2, 3],
            methods: vec![Method::OrthonormalizationDimOnly, Method::StandardRank],
            backend: Backend::Dense,
            seed: 0,
            restrict_xxz: false,
            closure: ClosureConfig::default().with_timeout(Duration::from_secs(600)),
        }
    }
}

pub fn run_bench(sweep: &BenchSweep) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    for &family in &sweep.families {
        for &n in &sweep.sizes {
            for &method in &sweep.methods {
                let mut spec = AnsatzSpec::new(family, n).with_seed(sweep.seed);
                let mut backend = sweep.backend;
                if family == Family::XxzHva && sweep.restrict_xxz {
                    spec = spec.restricted();
                    backend = Backend::Dense;
                }
                let mut cfg = RunConfig::new(InputSource::Ansatz(spec));
                cfg.method = method;
                cfg.backend = backend;
                cfg.closure = sweep.closure.clone();
                let (rec, _) = execute(&cfg);
                log::info!(
                    "{} [{}]: {:?} in {:.3} s",
                    rec.label,
                    method,
                    rec.dimension,
                    rec.wall_time_s
                );
                out.push(rec);
            }
        }
    }
    out
}

/// Per-family grid: a dimension row and one runtime row per method, with
/// qubit counts as columns. Cells that did not finish show `-`.
pub fn runtime_table(records: &[ResultRecord]) -> String {
    let mut out = String::new();
    let mut families: Vec<Family> = Vec::new();
    for r in records {
        if let Some(spec) = &r.ansatz {
            if !families.contains(&spec.family) {
                families.push(spec.family);
            }
        }
    }
    for family in families {
        let rows: Vec<&ResultRecord> = records
            .iter()
            .filter(|r| r.ansatz.is_some_and(|s| s.family == family))
            .collect();
        let sizes: BTreeSet<usize> = rows.iter().filter_map(|r| r.ansatz.map(|s| s.n)).collect();
        let mut methods: Vec<Method> = Vec::new();
        for r in &rows {
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
        }
        let cell = |n: usize, m: Method| {
            rows.iter()
                .find(|r| r.method == m && r.ansatz.is_some_and(|s| s.n == n))
        };
        let label_width = methods
            .iter()
            .map(|m| m.name().len() + 10)
            .max()
            .unwrap_or(0)
            .max(16);
        writeln!(out, "{family}").unwrap();
        let mut line = format!("{:<label_width$}", "Number of qubits");
        for n in &sizes {
            write!(line, " {n:>10}").unwrap();
        }
        writeln!(out, "{line}").unwrap();
        let mut line = format!("{:<label_width$}", "Dimension");
        for &n in &sizes {
            let dim = methods
                .iter()
                .find_map(|&m| cell(n, m).and_then(|r| r.dimension))
                .map_or("-".into(), |d| d.to_string());
            write!(line, " {dim:>10}").unwrap();
        }
        writeln!(out, "{line}").unwrap();
        for &m in &methods {
            let mut line = format!("{:<label_width$}", format!("Runtime ({m})"));
            for &n in &sizes {
                let v = match cell(n, m) {
                    Some(r) if r.status == RunStatus::Ok => format!("{:.3}", r.wall_time_s),
                    Some(r) if r.status == RunStatus::Timeout => "timeout".into(),
                    _ => "-".into(),
                };
                write!(line, " {v:>10}").unwrap();
            }
            writeln!(out, "{line}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `bench`: run the sweep, print the runtime grid and write every record.
pub fn cmd_bench(
    sweep: &BenchSweep,
    out: Option<&PathBuf>,
    format: OutputFormat,
    stdout: &mut dyn Write,
) -> i32 {
    if let Err(e) = sweep.closure.validate() {
        let _ = writeln!(stdout, "error: {e}");
        return exit::INVALID;
    }
    let records = run_bench(sweep);
    let result = (|| -> crate::error::Result<()> {
        stdout.write_all(runtime_table(&records).as_bytes())?;
        match out {
            Some(path) => write_records(&records, format, std::fs::File::create(path)?),
            None => write_records(&records, format, &mut *stdout),
        }
    })();
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stdout, "error: {e}");
            exit::INVALID
        }
    }
}
