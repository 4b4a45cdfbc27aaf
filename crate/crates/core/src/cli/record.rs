use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closure::{ClosureStats, ClosureWarning, Method};
use crate::error::{Error, Result};
use crate::generators::AnsatzSpec;
use crate::ops::Backend;

/// Tag written into every record; bumped whenever a field changes meaning.
pub const SCHEMA: &str = "lie-closure.result.v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    Timeout,
    CapacityExceeded,
    NumericalDegeneracy,
    Failed,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Timeout => "timeout",
            RunStatus::CapacityExceeded => "capacity-exceeded",
            RunStatus::NumericalDegeneracy => "numerical-degeneracy",
            RunStatus::Failed => "failed",
        }
    }

    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::Timeout(_) => RunStatus::Timeout,
            Error::Capacity(_) => RunStatus::CapacityExceeded,
            Error::NumericalDegeneracy { .. } => RunStatus::NumericalDegeneracy,
            _ => RunStatus::Failed,
        }
    }
}

/// One closure run: what was computed, how, and what came out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: String,
    /// Short human label, e.g. `hea n=3` or the generator file name.
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<AnsatzSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators_file: Option<String>,
    pub method: Method,
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    /// Matrix dimension `d` of the operators the closure ran on.
    pub operator_dim: usize,
    pub tolerance: f64,
    pub threads: usize,
    pub status: RunStatus,
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub expected_dimension: Option<u64>,
    #[serde(default)]
    pub stats: Option<ClosureStats>,
    /// Wall-clock seconds, millisecond resolution.
    pub wall_time_s: f64,
    #[serde(default)]
    pub warnings: Vec<ClosureWarning>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn new(label: impl Into<String>, method: Method, backend: Backend) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            label: label.into(),
            ansatz: None,
            generators_file: None,
            method,
            backend,
            qubits: None,
            operator_dim: 0,
            tolerance: 0.0,
            threads: 1,
            status: RunStatus::Ok,
            dimension: None,
            expected_dimension: None,
            stats: None,
            wall_time_s: 0.0,
            warnings: Vec::new(),
            error: None,
        }
    }

    pub fn matches_expectation(&self) -> Option<bool> {
        Some(self.dimension? as u64 == self.expected_dimension?)
    }
}

/// Seconds rounded to whole milliseconds.
pub fn round_ms(seconds: f64) -> f64 {
    (seconds * 1000.0).round() / 1000.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    JsonLines,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json-lines" => Ok(OutputFormat::JsonLines),
            "table" => Ok(OutputFormat::Table),
            _ => Err(Error::invalid(format!("unknown output format {s:?}"))),
        }
    }
}

pub fn write_json_lines(records: &[ResultRecord], mut w: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Parse line-delimited records, skipping blank lines. Records carrying a
/// different schema tag are rejected.
pub fn read_json_lines(r: impl BufRead) -> Result<Vec<ResultRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResultRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        if rec.schema != SCHEMA {
            return Err(Error::Parse {
                line: i + 1,
                column: 1,
                message: format!("unsupported schema {:?}, expected {SCHEMA:?}", rec.schema),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Fixed-width human-readable table, one row per record.
pub fn format_table(records: &[ResultRecord]) -> String {
    let header = [
        "label",
        "method",
        "backend",
        "dim",
        "expected",
        "status",
        "commutators",
        "checks",
        "time_s",
        "warnings",
    ];
    let rows: Vec<[String; 10]> = records
        .iter()
        .map(|r| {
            [
                r.label.clone(),
                r.method.to_string(),
                r.backend.to_string(),
                opt(r.dimension),
                opt(r.expected_dimension),
                r.status.name().to_string(),
                opt(r.stats.as_ref().map(|s| s.commutators_evaluated)),
                opt(r.stats.as_ref().map(|s| s.independence_checks)),
                format!("{:.3}", r.wall_time_s),
                r.warnings.len().to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
    };
    line(&header.map(String::from));
    for row in &rows {
        line(row);
    }
    out
}

pub fn write_records(
    records: &[ResultRecord],
    format: OutputFormat,
    mut w: impl Write,
) -> Result<()> {
    match format {
        OutputFormat::JsonLines => write_json_lines(records, w),
        OutputFormat::Table => Ok(w.write_all(format_table(records).as_bytes())?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::CandidateSource;
    use crate::generators::{AnsatzSpec, Family};

    fn sample() -> ResultRecord {
        let mut r = ResultRecord::new("hea n=2", Method::OrthonormalizationDimOnly, Backend::Pauli);
        r.ansatz = Some(AnsatzSpec::new(Family::Hea, 2));
        r.qubits = Some(2);
        r.operator_dim = 4;
        r.tolerance = 1e-8;
        r.dimension = Some(15);
        r.expected_dimension = Some(15);
        r.stats = Some(ClosureStats {
            commutators_evaluated: 105,
            independence_checks: 60,
            accepted: 15,
            ..Default::default()
        });
        r.wall_time_s = round_ms(0.012345);
        r.warnings.push(ClosureWarning::NearThreshold {
            source: CandidateSource::Pair(3, 1),
            residual: 3.0000000000000004e-9,
            tolerance: 1e-8,
        });
        r
    }

    #[test]
    fn json_lines_round_trip() {
        let mut failed = ResultRecord::new("x.txt", Method::StandardRank, Backend::Dense);
        failed.status = RunStatus::Timeout;
        failed.error = Some("timed out".into());
        failed.generators_file = Some("x.txt".into());
        let records = vec![sample(), failed];
        let mut buf = Vec::new();
        write_json_lines(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("\"schema\":\"lie-closure.result.v1\""));
        assert_eq!(read_json_lines(text.as_bytes()).unwrap(), records);
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = serde_json::to_string(&sample())
            .unwrap()
            .replace(SCHEMA, "other.v9");
        assert!(matches!(
            read_json_lines(text.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(read_json_lines("\n{not json}\n".as_bytes()).is_err());
    }

    #[test]
    fn table_layout() {
        let t = format_table(&[sample()]);
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].starts_with("label"));
        assert!(lines[1].contains("orthonorm-dimonly"));
        assert!(lines[1].contains("0.012"));
        assert_eq!(sample().matches_expectation(), Some(true));
    }

    #[test]
    fn formats_parse() {
        assert_eq!(
            "table".parse::<OutputFormat>().unwrap(),
            OutputFormat::Table
        );
        assert!("csv".parse::<OutputFormat>().is_err());
    }
}
