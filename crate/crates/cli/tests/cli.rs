use std::process::{Command, Output};

use periodica::report::{
    matrices_from_csv, InvertReport, PeriodReport, PolygonReport, SelftestReport, VerifyReport,
};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periodica"))
        .args(args)
        .env_remove("PERIODICA_PRECISION")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json<T: serde::de::DeserializeOwned>(out: &Output) -> T {
    assert_eq!(
        code(out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid report JSON")
}

fn assert_close(got: &[Vec<f64>], want: &[[f64; 2]; 2], tol: f64) {
    for i in 0..2 {
        for j in 0..2 {
            assert!(
                (got[i][j] - want[i][j]).abs() <= tol,
                "entry ({i},{j}): {} vs {}",
                got[i][j],
                want[i][j]
            );
        }
    }
}

#[test]
fn period_genus_two_json() {
    let r: PeriodReport = json(&run(&[
        "period", "--genus", "2", "--a", "2", "--format", "json",
    ]));
    assert_close(
        &r.pi_im,
        &[[1.25352, -0.497668], [-0.497668, 0.995336]],
        5e-5,
    );
    assert_eq!(r.m, vec![vec![1, 0], vec![0, -1]]);
    assert!(r.nodes_total > 0);
}

#[test]
fn period_extended_clustered() {
    let r: PeriodReport = json(&run(&[
        "period",
        "--genus",
        "2",
        "--a",
        "1.0001",
        "--precision",
        "extended",
        "--format",
        "json",
    ]));
    assert_close(
        &r.pi_im,
        &[[3.87984, -0.131086], [-0.131086, 0.262171]],
        5e-5,
    );
    assert_eq!(r.pi_im_text.expect("text digits").len(), 2);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_periodica"))
        .args(["period", "--genus", "2", "--a", "2", "--format", "json"])
        .env("PERIODICA_PRECISION", "extended")
        .output()
        .unwrap();
    let r: PeriodReport = json(&out);
    assert_eq!(r.precision, periodica::Precision::Extended);
}

#[test]
fn genus_one_is_rejected() {
    assert_eq!(code(&run(&["period", "--genus", "1", "--a"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["bogus"])), 2);
    assert_eq!(code(&run(&["period", "--genus", "2", "--a2", "4"])), 2);
    assert_eq!(
        code(&run(&[
            "period",
            "--genus",
            "2",
            "--a",
            "2",
            "--precision",
            "quad"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "period",
            "--genus",
            "2",
            "--a",
            "2",
            "--max-level",
            "1"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "period",
            "--genus",
            "2",
            "--a",
            "2",
            "--rel-tol",
            "-1"
        ])),
        2
    );
}

#[test]
fn verify_genus_three_passes() {
    let r: VerifyReport = json(&run(&[
        "verify", "--genus", "3", "--a", "2,3", "--format", "json",
    ]));
    assert!(r.passed);
    assert!(r.gates.iter().any(|g| g.name == "symmetry"));
    assert!(r.genus2_identity.is_none());
}

#[test]
fn verify_genus_four_square_condition() {
    let r: VerifyReport = json(&run(&[
        "verify", "--genus", "4", "--a", "2,3,4", "--format", "json",
    ]));
    assert!(r.period.residuals.square_condition <= 1e-10);
}

#[test]
fn unsatisfiable_gate_exits_four() {
    let out = run(&[
        "verify",
        "--genus",
        "2",
        "--a",
        "2",
        "--tol-sym",
        "1e-30",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("symmetry"));
    let r: VerifyReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!r.passed);
}

#[test]
fn strict_period_honours_gates() {
    let args = [
        "period", "--genus", "2", "--a", "2", "--format", "json", "--strict",
    ];
    assert_eq!(code(&run(&args)), 0);
    let mut unsat = args.to_vec();
    unsat.extend(["--tol-sym", "1e-300"]);
    assert_eq!(code(&run(&unsat)), 4);
    let mut negative = args.to_vec();
    negative.extend(["--tol-det", "-1"]);
    assert_eq!(code(&run(&negative)), 2);
}

#[test]
fn polygon_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("out.svg");
    let out = run(&[
        "polygon",
        "--genus",
        "2",
        "--a",
        "2",
        "--svg",
        svg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let r: PolygonReport = json(&out);
    assert_eq!(r.layout.rects.len(), 3);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<rect ").count(), 3);
}

#[test]
fn polygon_genus_four() {
    let r: PolygonReport = json(&run(&[
        "polygon", "--genus", "4", "--a", "2,3,4", "--format", "json",
    ]));
    assert_eq!(r.layout.rects.len(), 7);
    assert!(r.layout.square);
}

#[test]
fn polygon_rejects_small_parameter() {
    assert_eq!(code(&run(&["polygon", "--genus", "2", "--a", "0.5"])), 2);
}

#[test]
fn invert_round_trip() {
    let p: PolygonReport = json(&run(&[
        "polygon", "--genus", "2", "--a", "2", "--format", "json",
    ]));
    let p1 = p.layout.rects.iter().find(|r| r.label == "P1").unwrap();
    let rho = format!("{}", p1.height / p1.width);
    let r: InvertReport = json(&run(&[
        "invert", "--rho", &rho, "--guess", "3", "--format", "json",
    ]));
    assert!((r.a[0] - 2.0).abs() <= 2e-6, "recovered {}", r.a[0]);
}

#[test]
fn invert_rejects_negative_ratio() {
    assert_eq!(code(&run(&["invert", "--rho", "-1"])), 2);
}

#[test]
fn invert_reports_trace_on_failure() {
    let out = run(&["invert", "--rho", "0.5", "--max-iter", "1"]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("iteration trace"));
    assert!(
        err.lines()
            .filter(|l| l.trim_start().starts_with(char::is_numeric))
            .count()
            >= 2
    );
}

#[test]
fn selftest_passes() {
    let r: SelftestReport = json(&run(&["selftest", "--format", "json"]));
    assert!(r.passed);
}

#[test]
fn csv_reingests_bit_exactly() {
    let j: PeriodReport = json(&run(&[
        "period", "--genus", "3", "--a", "2,3", "--format", "json",
    ]));
    let out = run(&["period", "--genus", "3", "--a", "2,3", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let mats = matrices_from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let names: Vec<&str> = mats.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["Pi0", "M", "N", "Pi_im"]);
    assert_eq!(mats[0].1.to_rows(), j.pi0);
    assert_eq!(mats[3].1.to_rows(), j.pi_im);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["period", "--genus", "2", "--a", "4", "--format", "json"];
    let stdout = run(&args).stdout;
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let out = run(&with_file);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn json_is_the_default_off_terminal() {
    let r: PeriodReport = json(&run(&["period", "--genus", "2", "--a", "2"]));
    assert_eq!(r.genus, 2);
}
