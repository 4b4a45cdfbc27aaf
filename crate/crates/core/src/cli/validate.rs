use std::io::Write;
use std::path::PathBuf;

use super::record::{write_records, OutputFormat, ResultRecord, RunStatus};
use super::{execute, exit, InputSource, RunConfig};
use crate::closure::{ClosureConfig, Method};
use crate::error::Result;
use crate::generators::{AnsatzSpec, Family};
use crate::ops::Backend;

/// A reference closure dimension to reproduce.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidateCase {
    pub spec: AnsatzSpec,
    pub backend: Backend,
    pub expected: u64,
    /// A second accepted outcome, valid only when a conditioning warning
    /// accompanies it.
    pub alternate_with_warning: Option<u64>,
    /// Reported but never counted as a failure.
    pub informational: bool,
}

impl ValidateCase {
    fn new(family: Family, n: usize, expected: u64) -> Self {
        Self {
            spec: AnsatzSpec::new(family, n),
            backend: Backend::Pauli,
            expected,
            alternate_with_warning: None,
            informational: false,
        }
    }
}

/// The desk-scale reference cases.
pub fn validation_cases() -> Vec<ValidateCase> {
    let xxz = |n: usize, expected: u64, informational: bool| ValidateCase {
        spec: AnsatzSpec::new(Family::XxzHva, n).restricted(),
        backend: Backend::Dense,
        expected,
        alternate_with_warning: None,
        informational,
    };
    vec![
        ValidateCase::new(Family::Hea, 2, 15),
        ValidateCase::new(Family::Hea, 3, 63),
        ValidateCase::new(Family::Hea, 4, 255),
        ValidateCase::new(Family::SpinGlassHva, 3, 63),
        ValidateCase::new(Family::SpinGlassHva, 4, 255),
        xxz(4, 15, false),
        xxz(6, 99, true),
        ValidateCase::new(Family::TfimHvaOpen, 4, 15),
        ValidateCase::new(Family::TfimHvaOpen, 6, 35),
        ValidateCase {
            alternate_with_warning: Some(64),
            ..ValidateCase::new(Family::TfimHvaOpen, 8, 63)
        },
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidateOptions {
    pub only: Option<Family>,
    pub methods: Vec<Method>,
    pub closure: ClosureConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            only: None,
            methods: vec![Method::OrthonormalizationDimOnly],
            closure: ClosureConfig::default(),
            seed: 0,
            out: None,
            format: OutputFormat::Table,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseOutcome {
    pub case: ValidateCase,
    pub record: ResultRecord,
    pub passed: bool,
    /// Why the case failed; empty when it passed.
    pub reason: String,
}

fn judge(case: &ValidateCase, rec: &ResultRecord) -> (bool, String) {
    if rec.status != RunStatus::Ok {
        return (
            false,
            format!(
                "{}: {}",
                rec.status.name(),
                rec.error.as_deref().unwrap_or("")
            ),
        );
    }
    let (Some(dim), Some(stats)) = (rec.dimension, rec.stats.as_ref()) else {
        return (false, "no result".into());
    };
    let pairs = (dim as u64) * (dim as u64).saturating_sub(1) / 2;
    if stats.commutators_evaluated != pairs {
        return (
            false,
            format!(
                "{} commutators evaluated, expected {pairs}",
                stats.commutators_evaluated
            ),
        );
    }
    let warned = rec.warnings.iter().any(|w| w.is_conditioning());
    let dim = dim as u64;
    match case.alternate_with_warning {
        Some(alt) if dim == alt && warned => (true, String::new()),
        Some(alt) if dim == alt => (
            false,
            format!("dimension {dim} without a conditioning warning"),
        ),
        Some(_) if dim == case.expected && warned => (
            false,
            format!("dimension {dim} with a spurious conditioning warning"),
        ),
        _ if dim == case.expected => (true, String::new()),
        _ => (
            false,
            format!("dimension {dim}, expected {}", case.expected),
        ),
    }
}

/// Run every selected case with every selected method.
pub fn run_validation(opts: &ValidateOptions) -> Vec<CaseOutcome> {
    let mut out = Vec::new();
    for case in validation_cases() {
        if opts.only.is_some_and(|f| f != case.spec.family) {
            continue;
        }
        for &method in &opts.methods {
            let mut case = case;
            case.spec.seed = opts.seed;
            let mut cfg = RunConfig::new(InputSource::Ansatz(case.spec));
            cfg.method = method;
            cfg.backend = case.backend;
            cfg.closure = opts.closure.clone();
            let (mut record, _) = execute(&cfg);
            record.expected_dimension = Some(case.expected);
            let (passed, reason) = judge(&case, &record);
            out.push(CaseOutcome {
                case,
                record,
                passed,
                reason,
            });
        }
    }
    out
}

/// `validate`: reproduce the reference dimensions and report mismatches.
pub fn cmd_validate(opts: &ValidateOptions, stdout: &mut dyn Write) -> i32 {
    if let Err(e) = opts.closure.validate() {
        let _ = writeln!(stdout, "error: {e}");
        return exit::INVALID;
    }
    let outcomes = run_validation(opts);
    let mut report = || -> Result<bool> {
        writeln!(
            stdout,
            "{:<22} {:<18} {:<7} {:>8} {:>8} {:>11} {:>9}  result",
            "case", "method", "backend", "expected", "computed", "commutators", "time_s"
        )?;
        let mut failures = Vec::new();
        for o in &outcomes {
            let verdict = match (o.passed, o.case.informational) {
                (true, _) => "PASS",
                (false, true) => "INFO",
                (false, false) => "FAIL",
            };
            let expected = match o.case.alternate_with_warning {
                Some(alt) => format!("{}|{alt}", o.case.expected),
                None => o.case.expected.to_string(),
            };
            writeln!(
                stdout,
                "{:<22} {:<18} {:<7} {:>8} {:>8} {:>11} {:>9.3}  {verdict}",
                o.record.label,
                o.record.method.name(),
                o.record.backend.to_string(),
                expected,
                o.record.dimension.map_or("-".into(), |d| d.to_string()),
                o.record
                    .stats
                    .as_ref()
                    .map_or("-".into(), |s| s.commutators_evaluated.to_string()),
                o.record.wall_time_s,
            )?;
            if !o.passed && !o.case.informational {
                failures.push(o);
            }
        }
        let gating = outcomes.iter().filter(|o| !o.case.informational).count();
        writeln!(
            stdout,
            "{} of {gating} cases passed",
            gating - failures.len()
        )?;
        for f in &failures {
            writeln!(
                stdout,
                "FAIL {} [{}]: {}",
                f.record.label,
                f.record.method.name(),
                f.reason
            )?;
        }
        if let Some(path) = &opts.out {
            let records: Vec<ResultRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
            let file = std::fs::File::create(path)?;
            write_records(&records, opts.format, file)?;
        }
        Ok(failures.is_empty())
    };
    match report() {
        Ok(true) => exit::OK,
        Ok(false) => exit::MISMATCH,
        Err(e) => {
            let _ = writeln!(stdout, "error: {e}");
            exit::INVALID
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{CandidateSource, ClosureStats, ClosureWarning};

    fn record(dim: usize, warn: bool) -> ResultRecord {
        let mut r = ResultRecord::new("t", Method::OrthonormalizationDimOnly, Backend::Pauli);
        r.dimension = Some(dim);
        r.stats = Some(ClosureStats {
            commutators_evaluated: (dim * (dim - 1) / 2) as u64,
            ..Default::default()
        });
        if warn {
            r.warnings.push(ClosureWarning::NearThreshold {
                source: CandidateSource::Pair(1, 0),
                residual: 1e-8,
                tolerance: 1e-8,
            });
        }
        r
    }

    #[test]
    fn alternate_outcome_needs_matching_warning() {
        let case = validation_cases()
            .into_iter()
            .find(|c| c.alternate_with_warning.is_some())
            .unwrap();
        assert!(judge(&case, &record(63, false)).0);
        assert!(!judge(&case, &record(63, true)).0);
        assert!(judge(&case, &record(64, true)).0);
        assert!(!judge(&case, &record(64, false)).0);
        assert!(!judge(&case, &record(62, true)).0);
    }

    #[test]
    fn commutator_count_is_checked() {
        let case = validation_cases()[0];
        let mut r = record(15, false);
        assert!(judge(&case, &r).0);
        r.stats.as_mut().unwrap().commutators_evaluated += 1;
        assert!(!judge(&case, &r).0);
    }

    #[test]
    fn hea_only_passes() {
        let opts = ValidateOptions {
            only: Some(Family::Hea),
            ..Default::default()
        };
        let mut out = Vec::new();
        assert_eq!(cmd_validate(&opts, &mut out), exit::OK);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.matches("PASS").count(), 3, "{text}");
        assert!(!text.contains("spin_glass"));
    }

    #[test]
    fn capped_run_fails() {
        let opts = ValidateOptions {
            only: Some(Family::SpinGlassHva),
            closure: ClosureConfig::default().with_max_dim(40),
            ..Default::default()
        };
        let mut out = Vec::new();
        assert_eq!(cmd_validate(&opts, &mut out), exit::MISMATCH);
        assert!(String::from_utf8(out)
            .unwrap()
            .contains("FAIL spin_glass_hva n=3"));
    }
}
