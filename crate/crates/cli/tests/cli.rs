use std::path::Path;
use std::process::{Command, Output};

use semilevel_core::{case, run_case, CaseId, RunConfig, Scheme};

fn semilevel(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semilevel"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of an error table as `(I, N, error, eoc)`.
fn rows(csv: &str) -> Vec<(usize, usize, f64, Option<f64>)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("case,scheme,I,N,courant_max,error,eoc"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 7, "{l}");
            (
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
                f[5].parse().unwrap(),
                (!f[6].is_empty()).then(|| f[6].parse().unwrap()),
            )
        })
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn run_reproduces_the_coarse_smooth_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "run",
            "--case",
            "ex1d-smooth",
            "--scheme",
            "third",
            "--nx",
            "400",
            "--nt",
            "2",
            "--sweeps",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 1);
    assert_eq!((r[0].0, r[0].1), (400, 2));
    assert!((r[0].2 / 0.098583 - 1.0).abs() < 0.01, "{}", r[0].2);
    assert_eq!(r[0].3, None);
}

#[test]
fn run_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "run",
            "--case",
            "ex2d-quartic",
            "--scheme",
            "third",
            "--nx",
            "40",
            "--nt",
            "4",
            "--sweeps",
            "8",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let c = case(CaseId::Ex2dQuartic);
    let lib = run_case(&c, &RunConfig::new(&c, Scheme::Third, 40, 4)).unwrap();
    let r = rows(&stdout(&out));
    assert!((r[0].2 / lib.record.error - 1.0).abs() < 1e-7);
}

#[test]
fn zero_sweeps_is_a_diagnostic_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "run",
            "--case",
            "ex1d-smooth",
            "--scheme",
            "third",
            "--nx",
            "400",
            "--nt",
            "2",
            "--sweeps",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(rows(&stdout(&out))[0].2 > 1.0);
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &[
            "run", "--case", "nope", "--scheme", "third", "--nx", "8", "--nt", "1",
        ][..],
        &[
            "run",
            "--case",
            "ex1d-smooth",
            "--scheme",
            "fourth",
            "--nx",
            "8",
            "--nt",
            "1",
        ],
        &[
            "run",
            "--case",
            "ex1d-smooth",
            "--scheme",
            "third",
            "--nx",
            "8",
            "--nt",
            "1",
            "--w",
            "0.5",
        ],
        &[
            "run",
            "--case",
            "ex1d-smooth",
            "--scheme",
            "second",
            "--nx",
            "8",
            "--nt",
            "0",
        ],
        &[
            "eoc",
            "--case",
            "ex2d-quartic",
            "--scheme",
            "third",
            "--ladder",
            "c99",
        ],
        &[
            "stability",
            "--scheme",
            "second2d",
            "--dim",
            "1",
            "--cmax",
            "2",
        ],
        &["frobnicate"],
    ] {
        let out = semilevel(args, dir.path());
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn non_finite_run_exits_with_3_and_dumps_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "run",
            "--case",
            "ex1d-smooth",
            "--scheme",
            "second",
            "--w",
            "1e308",
            "--nx",
            "40",
            "--nt",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    let path = err.split("snapshot written to ").nth(1).unwrap().trim();
    let dump = std::fs::read_to_string(dir.path().join(path)).unwrap();
    assert!(dump.starts_with("# t="));
}

#[test]
fn eoc_of_circle_shrink() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "eoc",
            "--case",
            "ex2d-circle-shrink",
            "--scheme",
            "third",
            "--ladder",
            "c13.5",
            "--levels",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 3);
    for (row, want) in r.iter().zip([2.22, 2.21, 2.12]) {
        let got = row.3.unwrap();
        assert!((got - want).abs() <= 0.1, "EOC {got} vs {want}");
    }
}

#[test]
fn single_level_has_no_eoc() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "eoc",
            "--case",
            "ex2d-circle-shrink",
            "--scheme",
            "third",
            "--levels",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].3, None);
}

#[test]
fn eoc_of_nonsmooth_hr() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "eoc",
            "--case",
            "ex1d-nonsmooth",
            "--scheme",
            "hr",
            "--levels",
            "4",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 4);
    for (row, want) in r.iter().zip([1.76, 1.82, 1.71, 1.60]) {
        let got = row.3.unwrap();
        assert!((got - want).abs() <= 0.1, "EOC {got} vs {want}");
    }
}

#[test]
fn markdown_table_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "eoc",
            "--case",
            "ex2d-quartic",
            "--scheme",
            "third",
            "--levels",
            "1",
            "--format",
            "markdown",
            "--out",
            "t.md",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let md = std::fs::read_to_string(dir.path().join("t.md")).unwrap();
    assert_eq!(md.lines().count(), 3);
    assert!(md.contains("| ex2d-quartic | third | 80 | 8 |"));
}

/// Scalar after `# <key>,` in a stability report.
fn report_value(csv: &str, key: &str, column: usize) -> String {
    let prefix = format!("# {key},");
    let line = csv.lines().find(|l| l.starts_with(&prefix)).unwrap();
    line[prefix.len()..]
        .split(',')
        .nth(column)
        .unwrap()
        .to_string()
}

#[test]
fn stability_of_second_order_2d() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "stability",
            "--scheme",
            "second2d",
            "--w",
            "0.5",
            "--dim",
            "2",
            "--cmax",
            "16",
            "--grid",
            "128",
            "--courant-samples",
            "24",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    assert!(csv.starts_with("C,D,max_abs_g,theta1,theta2\n"));
    let onset: f64 = report_value(&csv, "onset", 0).parse().unwrap();
    let peak: f64 = report_value(&csv, "max", 2).parse().unwrap();
    assert!((onset - 7.396).abs() <= 0.01, "onset {onset}");
    assert!((peak - 1.0454).abs() <= 0.001, "peak {peak}");
}

#[test]
fn stability_of_third_order_1d() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "stability",
            "--scheme",
            "third",
            "--dim",
            "1",
            "--cmax",
            "100",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    let peak: f64 = report_value(&csv, "max", 2).parse().unwrap();
    assert!(peak <= 1.0 + 1e-9, "{peak}");
    assert_eq!(report_value(&csv, "onset", 0), "none");
}

#[test]
fn zero_courant_scan_is_one_unit_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "stability",
            "--scheme",
            "third",
            "--dim",
            "2",
            "--cmax",
            "0",
            "--grid",
            "16",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    let data: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(data.len(), 1);
    assert!(data[0].starts_with("0,0,1,"));
}

#[test]
fn degenerate_symbol_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = semilevel(
        &[
            "stability",
            "--scheme",
            "hr",
            "--l",
            "3",
            "--dim",
            "1",
            "--cmin",
            "1",
            "--cmax",
            "1",
            "--courant-samples",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 4);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("C=1"), "{err}");
}

#[test]
fn snapshots_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run",
        "--case",
        "ex2d-circle-expand",
        "--scheme",
        "hr",
        "--nx",
        "16",
        "--nt",
        "3",
        "--snapshots",
        "--snapshot-dir",
        "snaps",
    ];
    let a = semilevel(&args, dir.path());
    let b = semilevel(&args, dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let files = std::fs::read_dir(dir.path().join("snaps")).unwrap().count();
    assert_eq!(files, 3);
    let snap = std::fs::read_to_string(
        dir.path()
            .join("snaps/ex2d-circle-expand-hr-I16-N3-step3.csv"),
    )
    .unwrap();
    let mut lines = snap.lines();
    assert!(lines.next().unwrap().starts_with("# t="));
    assert_eq!(lines.count(), 17 * 17);
}
