//! Command implementations behind the `lie-closure` binary.
//!
//! Each `cmd_*` function takes a parsed configuration and a writer for its
//! report and returns the process exit status:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | invalid configuration or unreadable input |
//! | 2    | capacity cap exceeded                     |
//! | 3    | numerical degeneracy                      |
//! | 4    | validation mismatch                       |
//! | 5    | timeout                                   |

mod bench;
mod record;
mod validate;

pub use bench::{cmd_bench, run_bench, runtime_table, BenchSweep};
pub use record::{
    format_table, read_json_lines, round_ms, write_json_lines, write_records, OutputFormat,
    ResultRecord, RunStatus, SCHEMA,
};
pub use validate::{
    cmd_validate, run_validation, validation_cases, CaseOutcome, ValidateCase, ValidateOptions,
};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::closure::{independence_check, run_closure, ClosureConfig, ClosureResult, Method};
use crate::error::{Error, Result};
use crate::generators::{build_operators, AnsatzSpec};
use crate::ops::{Backend, Operator, OperatorHandle};
use crate::pauli::{parse_generator_file, parse_pauli_sum};

pub mod exit {
    pub const OK: i32 = 0;
    pub const INVALID: i32 = 1;
    pub const CAPACITY: i32 = 2;
    pub const DEGENERACY: i32 = 3;
    pub const MISMATCH: i32 = 4;
    pub const TIMEOUT: i32 = 5;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) => exit::CAPACITY,
        Error::NumericalDegeneracy { .. } | Error::LinearAlgebra(_) => exit::DEGENERACY,
        Error::Timeout(_) => exit::TIMEOUT,
        Error::InvalidInput(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => {
            exit::INVALID
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    Ansatz(AnsatzSpec),
    /// Generator file in the Pauli-sum text format; the width is inferred
    /// from the first operator unless given.
    File {
        path: PathBuf,
        qubits: Option<usize>,
    },
}

impl InputSource {
    pub fn label(&self) -> String {
        match self {
            InputSource::Ansatz(s) if s.options.zero_magnetization => {
                format!("{} n={} (Sz=0)", s.family, s.n)
            }
            InputSource::Ansatz(s) => format!("{} n={}", s.family, s.n),
            InputSource::File { path, .. } => path.display().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: InputSource,
    pub method: Method,
    pub backend: Backend,
    pub closure: ClosureConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Write the basis, one operator per line, to this file.
    pub basis_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: InputSource) -> Self {
        Self {
            input,
            method: Method::OrthonormalizationDimOnly,
            backend: Backend::Pauli,
            closure: ClosureConfig::default(),
            out: None,
            format: OutputFormat::JsonLines,
            basis_out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.closure.validate()?;
        if let InputSource::Ansatz(spec) = &self.input {
            spec.validate()?;
            if spec.options.zero_magnetization && self.backend != Backend::Dense {
                return Err(Error::invalid("subspace restriction needs --backend dense"));
            }
        }
        Ok(())
    }
}

fn read_generator_file(path: &Path, qubits: Option<usize>) -> Result<Vec<OperatorHandle>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    let sums = parse_generator_file(&text, qubits)?;
    if sums.is_empty() {
        return Err(Error::invalid(format!(
            "{} contains no operators",
            path.display()
        )));
    }
    Ok(sums.into_iter().map(OperatorHandle::Pauli).collect())
}

/// Generators of `input` on `backend`.
pub fn load_operators(input: &InputSource, backend: Backend) -> Result<Vec<OperatorHandle>> {
    match input {
        InputSource::Ansatz(spec) => build_operators(spec, backend),
        InputSource::File { path, qubits } => read_generator_file(path, *qubits)?
            .into_iter()
            .map(|h| h.into_backend(backend))
            .collect(),
    }
}

/// Run one closure and summarize it. The closure result is returned alongside
/// the record when the run succeeded.
pub fn execute(cfg: &RunConfig) -> (ResultRecord, Result<ClosureResult<OperatorHandle>>) {
    let mut rec = ResultRecord::new(cfg.input.label(), cfg.method, cfg.backend);
    rec.tolerance = cfg.closure.tolerance;
    rec.threads = cfg.closure.threads;
    match &cfg.input {
        InputSource::Ansatz(spec) => {
            rec.ansatz = Some(*spec);
            rec.qubits = Some(spec.n);
            rec.expected_dimension = spec
                .expected_dimension()
                .and_then(|v| u64::try_from(v).ok());
        }
        InputSource::File { path, qubits } => {
            rec.generators_file = Some(path.display().to_string());
            rec.qubits = *qubits;
        }
    }
    let start = std::time::Instant::now();
    let outcome = cfg
        .validate()
        .and_then(|()| load_operators(&cfg.input, cfg.backend))
        .and_then(|ops| {
            rec.operator_dim = ops[0].dim();
            if rec.qubits.is_none() {
                rec.qubits = ops[0].num_qubits();
            }
            run_closure(&ops, cfg.method, &cfg.closure)
        });
    rec.wall_time_s = round_ms(start.elapsed().as_secs_f64());
    match &outcome {
        Ok(res) => {
            rec.dimension = Some(res.dimension);
            rec.stats = Some(res.stats.clone());
            rec.warnings = res.warnings.clone();
        }
        Err(e) => {
            rec.status = RunStatus::from_error(e);
            rec.error = Some(e.to_string());
        }
    }
    (rec, outcome)
}

/// The basis as text, one operator per line in its exact textual form.
pub fn basis_listing<T: Operator>(basis: &[T]) -> String {
    let mut out = String::new();
    for op in basis {
        out.push_str(&op.describe());
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, f: impl FnOnce(&mut fs::File) -> Result<()>) -> Result<()> {
    let mut file = fs::File::create(path)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
    f(&mut file)
}

/// `compute`: close one generator set, print a summary and write the record.
pub fn cmd_compute(cfg: &RunConfig, stdout: &mut dyn Write) -> i32 {
    let (rec, outcome) = execute(cfg);
    let mut code = match &outcome {
        Ok(_) => exit::OK,
        Err(e) => exit_code(e),
    };
    let report = (|| -> Result<()> {
        match &outcome {
            Ok(res) => {
                writeln!(stdout, "dimension: {}", res.dimension)?;
                writeln!(stdout, "runtime: {:.3} s", rec.wall_time_s)?;
                writeln!(
                    stdout,
                    "method: {}  backend: {}  commutators: {}  checks: {}",
                    res.method,
                    res.backend,
                    res.stats.commutators_evaluated,
                    res.stats.independence_checks
                )?;
                if let Some(expected) = rec.expected_dimension {
                    writeln!(stdout, "expected: {expected}")?;
                }
                for w in &res.warnings {
                    writeln!(stdout, "warning: {}", serde_json::to_string(w)?)?;
                }
                if let Some(path) = &cfg.basis_out {
                    write_file(path, |f| {
                        Ok(f.write_all(basis_listing(&res.basis).as_bytes())?)
                    })?;
                }
            }
            Err(e) => writeln!(stdout, "error: {e}")?,
        }
        if let Some(path) = &cfg.out {
            write_file(path, |f| {
                write_records(std::slice::from_ref(&rec), cfg.format, f)
            })?;
        }
        Ok(())
    })();
    if let Err(e) = report {
        let _ = writeln!(stdout, "error: {e}");
        if code == exit::OK {
            code = exit::INVALID;
        }
    }
    code
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    /// Generator file holding the basis.
    pub basis: PathBuf,
    pub qubits: Option<usize>,
    /// Candidate operator in the Pauli-sum text format.
    pub candidate: String,
    pub method: Method,
    pub backend: Backend,
    pub closure: ClosureConfig,
}

/// `check`: one independence query of a candidate against a basis file.
pub fn cmd_check(cfg: &CheckConfig, stdout: &mut dyn Write) -> i32 {
    let mut run = || -> Result<()> {
        let basis = read_generator_file(&cfg.basis, cfg.qubits)?;
        let n = basis[0]
            .num_qubits()
            .expect("file operators are Pauli sums");
        let basis = basis
            .into_iter()
            .map(|b| b.into_backend(cfg.backend))
            .collect::<Result<Vec<_>>>()?;
        let h =
            OperatorHandle::Pauli(parse_pauli_sum(&cfg.candidate, n)?).into_backend(cfg.backend)?;
        let report = independence_check(&basis, &h, cfg.method, &cfg.closure)?;
        writeln!(stdout, "independent: {}", report.independent)?;
        if let Some(r) = report.residual {
            writeln!(stdout, "residual: {r:e}")?;
        }
        writeln!(stdout, "basis rank: {}", report.basis_rank)?;
        Ok(())
    };
    match run() {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stdout, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Family;

    fn file_with(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn compute(cfg: &RunConfig) -> (i32, String) {
        let mut out = Vec::new();
        let code = cmd_compute(cfg, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn single_operator_file() {
        let f = file_with("1 X\n");
        let cfg = RunConfig::new(InputSource::File {
            path: f.path().into(),
            qubits: None,
        });
        let (code, out) = compute(&cfg);
        assert_eq!(code, exit::OK);
        assert!(out.starts_with("dimension: 1\n"), "{out}");
    }

    #[test]
    fn hea_three_qubits_matrix_inversion() {
        let mut cfg = RunConfig::new(InputSource::Ansatz(AnsatzSpec::new(Family::Hea, 3)));
        cfg.method = Method::MatrixInversion;
        let (code, out) = compute(&cfg);
        assert_eq!(code, exit::OK);
        assert!(out.starts_with("dimension: 63\n"), "{out}");
    }

    #[test]
    fn exit_codes() {
        let mut cfg = RunConfig::new(InputSource::Ansatz(AnsatzSpec::new(Family::Hea, 2)));
        cfg.closure.max_dim = Some(4);
        assert_eq!(compute(&cfg).0, exit::CAPACITY);
        cfg.closure.max_dim = None;
        cfg.closure.tolerance = 0.0;
        assert_eq!(compute(&cfg).0, exit::INVALID);
        let missing = RunConfig::new(InputSource::File {
            path: "/nonexistent/gens.txt".into(),
            qubits: None,
        });
        assert_eq!(compute(&missing).0, exit::INVALID);
        let bad = file_with("1 X + \n");
        let cfg = RunConfig::new(InputSource::File {
            path: bad.path().into(),
            qubits: None,
        });
        let (code, out) = compute(&cfg);
        assert_eq!(code, exit::INVALID);
        assert!(out.contains("line 1"), "{out}");
        let mut cfg = RunConfig::new(InputSource::Ansatz(
            AnsatzSpec::new(Family::XxzHva, 4).restricted(),
        ));
        assert_eq!(compute(&cfg).0, exit::INVALID);
        cfg.backend = Backend::Dense;
        assert_eq!(compute(&cfg).0, exit::OK);
    }

    #[test]
    fn degeneracy_exit_code() {
        // A floor above one rejects even the first element.
        let f = file_with("1 X\n1 Z\n");
        let mut cfg = RunConfig::new(InputSource::File {
            path: f.path().into(),
            qubits: None,
        });
        cfg.method = Method::MatrixInversion;
        cfg.closure.conditioning_floor = 2.0;
        assert_eq!(compute(&cfg).0, exit::DEGENERACY);
    }

    #[test]
    fn record_and_basis_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::new(InputSource::Ansatz(AnsatzSpec::new(Family::TfimHvaOpen, 3)));
        cfg.out = Some(dir.path().join("rec.jsonl"));
        cfg.basis_out = Some(dir.path().join("basis.txt"));
        let (code, out) = compute(&cfg);
        assert_eq!(code, exit::OK);
        let recs = read_json_lines(
            fs::read_to_string(dir.path().join("rec.jsonl"))
                .unwrap()
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(recs.len(), 1);
        let dim = recs[0].dimension.unwrap();
        assert!(out.starts_with(&format!("dimension: {dim}\n")));
        let basis = fs::read_to_string(dir.path().join("basis.txt")).unwrap();
        assert_eq!(basis.lines().count(), dim);
        let reparsed: Vec<_> = basis
            .lines()
            .map(|l| parse_pauli_sum(l, 3).unwrap())
            .collect();
        assert_eq!(basis_listing(&reparsed), basis);
    }

    #[test]
    fn check_command() {
        let f = file_with("# basis\n1 XI\n1 ZI + 1 IZ\n");
        let mut cfg = CheckConfig {
            basis: f.path().into(),
            qubits: None,
            candidate: "1 YY".into(),
            method: Method::OrthonormalizationDimOnly,
            backend: Backend::Pauli,
            closure: ClosureConfig::default(),
        };
        let mut out = Vec::new();
        assert_eq!(cmd_check(&cfg, &mut out), exit::OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("independent: true\n"), "{text}");
        cfg.candidate = "0.5 XI - 2 ZI - 2 IZ".into();
        cfg.method = Method::StandardRank;
        cfg.backend = Backend::Dense;
        let mut out = Vec::new();
        assert_eq!(cmd_check(&cfg, &mut out), exit::OK);
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with("independent: false\n"));
        cfg.candidate = "1 XYZ".into();
        assert_eq!(cmd_check(&cfg, &mut Vec::new()), exit::INVALID);
    }
}
