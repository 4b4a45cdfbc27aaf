use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lie-closure"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compute_reports_dimension() {
    let o = run(&["compute", "--ansatz", "hea", "--qubits", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dimension: 15"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["compute", "--ansatz", "nope", "--qubits", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["compute", "--ansatz", "hea"]).status.code(), Some(1));
    assert_eq!(
        run(&[
            "compute",
            "--ansatz",
            "hea",
            "--qubits",
            "3",
            "--max-dim",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "compute",
            "--ansatz",
            "hea",
            "--qubits",
            "3",
            "--timeout",
            "0"
        ])
        .status
        .code(),
        Some(5)
    );
    assert_eq!(run(&["validate", "--only", "hea"]).status.code(), Some(0));
    assert_eq!(
        run(&["validate", "--only", "tfim_hva_open"]).status.code(),
        Some(4)
    );
}

#[test]
fn check_against_basis_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.txt");
    std::fs::write(&path, "1 X\n1 Z\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["check", "--generators", p, "--candidate", "1 Y"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("independent: true"));
    let o = run(&[
        "check",
        "--generators",
        p,
        "--candidate",
        "0.5 X + 2 Z",
        "--method",
        "matrix-inversion",
    ]);
    assert!(stdout(&o).contains("independent: false"));
}

#[test]
fn records_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = run(&[
        "compute",
        "--ansatz",
        "spin_glass_hva",
        "--qubits",
        "3",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(rec["dimension"], 63);
}
