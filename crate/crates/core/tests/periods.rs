use periodica::pipeline::{run_period, run_verify};
use periodica::report::PeriodReport;
use periodica::{
    period_matrix, CurveParams64, CurveParamsDd, Precision, QuadratureConfig, ResidualGates,
};

const CLUSTERED: [(usize, &[&str]); 5] = [
    (2, &["1.0001"]),
    (3, &["1.00001", "1.0001"]),
    (4, &["1.00001", "1.0001", "1.001"]),
    (4, &["1.001", "1.01", "100"]),
    (4, &["1.001", "1000", "10000000"]),
];

#[test]
fn extended_gates_hold_on_clustered_curves() {
    let cfg = QuadratureConfig::for_precision(Precision::Extended);
    let gates = ResidualGates::for_precision(Precision::Extended);
    for (g, a) in CLUSTERED {
        let r = run_verify(g, a, &cfg, &gates).unwrap();
        let failed: Vec<_> = r.gates.iter().filter(|o| !o.passed).collect();
        assert!(failed.is_empty(), "a = {a:?}: {failed:?}");
    }
}

#[test]
fn standard_precision_flags_clustering() {
    let cfg = QuadratureConfig::default();
    let close = run_period(2, &["1.0001"], &cfg).unwrap();
    assert!(close.advisory.is_some());
    let apart = run_period(2, &["2"], &cfg).unwrap();
    assert!(apart.advisory.is_none());
}

#[test]
fn precisions_agree_on_separated_curve() {
    let f = period_matrix(
        &CurveParams64::new(3, vec![2.0, 3.0]).unwrap(),
        &QuadratureConfig::default(),
    )
    .unwrap();
    let dd = period_matrix(
        &CurveParamsDd::parse(3, &["2", "3"]).unwrap(),
        &QuadratureConfig::for_precision(Precision::Extended),
    )
    .unwrap();
    let diff = f.y.max_abs_diff(&dd.y.to_f64());
    assert!(diff < 1e-12, "standard vs extended differ by {diff:e}");
}

#[test]
fn extended_text_digits_refine_the_doubles() {
    let cfg = QuadratureConfig::for_precision(Precision::Extended);
    let r = run_period(2, &["2"], &cfg).unwrap();
    let text = r.pi_im_text.as_ref().unwrap();
    for (row, row_text) in r.pi_im.iter().zip(text) {
        for (&x, s) in row.iter().zip(row_text) {
            let parsed: f64 = s.parse().unwrap();
            assert!(
                (parsed - x).abs() <= 2.0 * f64::EPSILON * x.abs(),
                "{s} vs {x}"
            );
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let compute = |threads: usize| -> PeriodReport {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_period(4, &["2", "3", "4"], &QuadratureConfig::default()).unwrap())
    };
    let one = compute(1);
    for threads in [2, 4, 7] {
        assert_eq!(compute(threads), one, "{threads} threads");
    }
}

#[test]
fn oracle_mode_reproduces_fixture() {
    let cfg = QuadratureConfig {
        oracle_mode: true,
        ..QuadratureConfig::default()
    };
    let r = run_period(2, &["2"], &cfg).unwrap();
    let want = [[1.25352, -0.497668], [-0.497668, 0.995336]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((r.pi_im[i][j] - want[i][j]).abs() < 5e-5);
        }
    }
}

#[test]
fn oracle_mode_rejects_extended_precision() {
    let cfg = QuadratureConfig {
        oracle_mode: true,
        ..QuadratureConfig::for_precision(Precision::Extended)
    };
    assert!(run_period(2, &["2"], &cfg).unwrap_err().is_validation());
}

#[test]
fn large_genus_stays_symmetric() {
    let a: Vec<String> = (1..8)
        .map(|k| format!("{}", 1.0 + 0.6 * k as f64))
        .collect();
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    let r = run_verify(
        8,
        &a,
        &QuadratureConfig::default(),
        &ResidualGates::for_precision(Precision::Standard),
    )
    .unwrap();
    assert!(r.passed, "{:?}", r.gates);
}
