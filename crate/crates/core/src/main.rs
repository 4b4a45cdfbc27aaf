use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use lie_closure::cli::{
    cmd_bench, cmd_check, cmd_compute, cmd_validate, exit, BenchSweep, CheckConfig, InputSource,
    OutputFormat, RunConfig, ValidateOptions,
};
use lie_closure::generators::{list_families, AnsatzSpec, Family};
use lie_closure::{Backend, ClosureConfig, Method};

#[derive(Parser)]
#[command(
    name = "lie-closure",
    version,
    about = "Lie closures of Pauli-sum and dense operator sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Close one generator set and report its dimension.
    Compute(ComputeArgs),
    /// Reproduce the reference dimensions of the ansatz families.
    Validate(ValidateArgs),
    /// Time a grid of families, sizes and methods.
    Bench(BenchArgs),
    /// Test one operator for independence from a basis file.
    Check(CheckArgs),
    /// List the ansatz families.
    Families,
}

#[derive(Args)]
struct Numerics {
    /// Zero tolerance for unit-normalized residuals.
    #[arg(long, default_value_t = lie_closure::closure::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Maximum basis size (default d^2).
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl Numerics {
    fn config(&self, timeout: Option<f64>) -> ClosureConfig {
        ClosureConfig {
            tolerance: self.tol,
            max_dim: self.max_dim,
            threads: self.threads,
            timeout: timeout.map(Duration::from_secs_f64),
            ..ClosureConfig::default()
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(
        long,
        conflicts_with = "generators",
        required_unless_present = "generators"
    )]
    ansatz: Option<Family>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict xxz_hva to the zero-magnetization subspace (needs --backend dense).
    #[arg(long)]
    restrict: bool,
    /// Generator file, one Pauli sum per line.
    #[arg(long)]
    generators: Option<PathBuf>,
    #[arg(long, default_value = "orthonorm-dimonly")]
    method: Method,
    #[arg(long, default_value = "pauli")]
    backend: Backend,
    #[command(flatten)]
    numerics: Numerics,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Result record file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json-lines")]
    format: OutputFormat,
    /// Write the basis, one operator per line.
    #[arg(long)]
    basis_out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    only: Option<Family>,
    /// Methods to run; repeat the flag for several.
    #[arg(long = "method", default_value = "orthonorm-dimonly")]
    methods: Vec<Method>,
    /// Run every method on every case.
    #[arg(long, conflicts_with = "methods")]
    all_methods: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    numerics: Numerics,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct BenchArgs {
    /// Families to sweep; repeat the flag for several.
    #[arg(long = "ansatz", default_value = "hea")]
    families: Vec<Family>,
    /// Qubit counts: a list `2,3,4` or an inclusive range `2..4`.
    #[arg(long, default_value = "2..3", value_parser = parse_sizes)]
    qubits: Sizes,
    #[arg(long = "method", default_values = ["orthonorm-dimonly", "standard-rank"])]
    methods: Vec<Method>,
    #[arg(long, default_value = "dense")]
    backend: Backend,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    restrict: bool,
    #[command(flatten)]
    numerics: Numerics,
    /// Per-cell wall-clock limit in seconds.
    #[arg(long, default_value_t = 600.0)]
    timeout: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json-lines")]
    format: OutputFormat,
}

#[derive(Args)]
struct CheckArgs {
    /// Basis file, one Pauli sum per line.
    #[arg(long)]
    generators: PathBuf,
    /// Candidate operator, e.g. "0.5 XY + 1 ZZ".
    #[arg(long)]
    candidate: String,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long, default_value = "orthonorm-dimonly")]
    method: Method,
    #[arg(long, default_value = "pauli")]
    backend: Backend,
    #[command(flatten)]
    numerics: Numerics,
}

#[derive(Clone)]
struct Sizes(Vec<usize>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let b: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok(Sizes((a..=b).collect()));
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Sizes)
}

fn run(cli: Cli, stdout: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Compute(a) => {
            let input = match (a.ansatz, a.generators) {
                (Some(family), _) => {
                    let Some(n) = a.qubits else {
                        let _ = writeln!(stdout, "error: --ansatz needs --qubits");
                        return exit::INVALID;
                    };
                    let mut spec = AnsatzSpec::new(family, n).with_seed(a.seed);
                    spec.options.zero_magnetization = a.restrict;
                    InputSource::Ansatz(spec)
                }
                (None, Some(path)) => InputSource::File {
                    path,
                    qubits: a.qubits,
                },
                (None, None) => unreachable!("clap requires one input"),
            };
            let cfg = RunConfig {
                input,
                method: a.method,
                backend: a.backend,
                closure: a.numerics.config(a.timeout),
                out: a.out,
                format: a.format,
                basis_out: a.basis_out,
            };
            cmd_compute(&cfg, stdout)
        }
        Command::Validate(a) => {
            let opts = ValidateOptions {
                only: a.only,
                methods: if a.all_methods {
                    Method::ALL.to_vec()
                } else {
                    a.methods
                },
                closure: a.numerics.config(None),
                seed: a.seed,
                out: a.out,
                format: a.format,
            };
            cmd_validate(&opts, stdout)
        }
        Command::Bench(a) => {
            let sweep = BenchSweep {
                families: a.families,
                sizes: a.qubits.0,
                methods: a.methods,
                backend: a.backend,
                seed: a.seed,
                restrict_xxz: a.restrict,
                closure: a.numerics.config(Some(a.timeout)),
            };
            cmd_bench(&sweep, a.out.as_ref(), a.format, stdout)
        }
        Command::Check(a) => {
            let cfg = CheckConfig {
                basis: a.generators,
                qubits: a.qubits,
                candidate: a.candidate,
                method: a.method,
                backend: a.backend,
                closure: a.numerics.config(None),
            };
            cmd_check(&cfg, stdout)
        }
        Command::Families => {
            for f in list_families() {
                let _ = writeln!(stdout, "{f}");
            }
            exit::OK
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::INVALID as u8
            } else {
                0
            });
        }
    };
    let mut stdout = std::io::stdout().lock();
    let code = run(cli, &mut stdout);
    let _ = stdout.flush();
    ExitCode::from(code as u8)
}
