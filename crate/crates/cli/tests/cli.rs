//! Exit-code and report-surface tests for the command-line interface, run
//! against the shipped example configs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nivp-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn nivp(args: &[&str], dir: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nivp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn check_passes_on_shipped_configs() {
    let dir = scratch("check");
    for config in ["ex1.toml", "ex2.toml", "ex2_const_functionals.toml"] {
        let path = configs_dir().join(config);
        let (code, stdout, stderr) = nivp(&["check", path.to_str().unwrap()], &dir);
        assert_eq!(code, 0, "{config}: {stderr}");
        assert!(stdout.contains("hypotheses = satisfied"), "{config}");
    }
}

#[test]
fn check_reports_spectral_radius() {
    let dir = scratch("check-rho");
    let path = configs_dir().join("ex1.toml");
    let (code, stdout, _) = nivp(&["check", path.to_str().unwrap()], &dir);
    assert_eq!(code, 0);
    assert!(stdout.contains("spectral_radius = 0.85"));
    assert!(stdout.contains("verdict = Convergent"));
}

#[test]
fn config_errors_exit_one() {
    let dir = scratch("config-err");
    // Negative Lipschitz constant.
    let bad = dir.join("negative.toml");
    let text = std::fs::read_to_string(configs_dir().join("ex1.toml"))
        .unwrap()
        .replace("a1 = 0.25", "a1 = -0.25");
    std::fs::write(&bad, text).unwrap();
    let (code, _, stderr) = nivp(&["check", bad.to_str().unwrap()], &dir);
    assert_eq!(code, 1, "stderr: {stderr}");
    assert!(stderr.contains("nonnegative"));

    // Unknown key.
    let unknown = dir.join("unknown.toml");
    let text = std::fs::read_to_string(configs_dir().join("ex1.toml")).unwrap()
        + "\nunknown_key = 1\n";
    std::fs::write(&unknown, text).unwrap();
    let (code, _, _) = nivp(&["check", unknown.to_str().unwrap()], &dir);
    assert_eq!(code, 1);

    // Missing file.
    let (code, _, _) = nivp(&["check", "no-such-file.toml"], &dir);
    assert_eq!(code, 1);

    // Malformed --param.
    let path = configs_dir().join("ex1.toml");
    let (code, _, _) = nivp(&["check", path.to_str().unwrap(), "--param", "a"], &dir);
    assert_eq!(code, 1);

    // Grid not a multiple of 4.
    let (code, _, stderr) = nivp(&["check", path.to_str().unwrap(), "--grid", "10"], &dir);
    assert_eq!(code, 1, "stderr: {stderr}");
}

#[test]
fn off_node_abscissa_warns_but_runs() {
    let dir = scratch("abscissa");
    let cfg = dir.join("offnode.toml");
    let text = std::fs::read_to_string(configs_dir().join("ex1.toml"))
        .unwrap()
        .replace("x(0.25) + y(0.25)", "x(0.3) + y(0.3)");
    std::fs::write(&cfg, text).unwrap();
    let (code, _, stderr) = nivp(&["check", cfg.to_str().unwrap(), "--grid", "256"], &dir);
    assert_eq!(code, 0);
    assert!(stderr.contains("does not land on a node"), "stderr: {stderr}");
}

#[test]
fn solve_exhausted_budget_exits_three() {
    let dir = scratch("budget");
    let path = configs_dir().join("ex1.toml");
    let (code, stdout, _) = nivp(
        &[
            "solve",
            path.to_str().unwrap(),
            "--tol",
            "1e-30",
            "--max-iter",
            "5",
            "--out",
            "out",
        ],
        &dir,
    );
    assert_eq!(code, 3);
    assert!(stdout.contains("converged = false"));
}

#[test]
fn solve_writes_certificate_and_picard_notes_absence() {
    let dir = scratch("solve-files");
    let ex1 = configs_dir().join("ex1.toml");
    let (code, _, _) = nivp(
        &["solve", ex1.to_str().unwrap(), "--grid", "256", "--out", "o1"],
        &dir,
    );
    assert_eq!(code, 0);
    let report = std::fs::read_to_string(dir.join("o1/report.txt")).unwrap();
    assert!(report.contains("aposteriori_bound_1"));
    assert!(report.contains("certificate_iterations"));

    let ex2 = configs_dir().join("ex2.toml");
    let (code, _, _) = nivp(
        &["solve", ex2.to_str().unwrap(), "--grid", "256", "--out", "o2"],
        &dir,
    );
    assert_eq!(code, 0);
    let report = std::fs::read_to_string(dir.join("o2/report.txt")).unwrap();
    assert!(report.contains("uniqueness_certificate = none"));
    assert!(report.contains("iterates_stayed_in_ball = true"));
}

#[test]
fn oracle_writes_mismatch_report() {
    let dir = scratch("oracle");
    let path = configs_dir().join("ex1.toml");
    let (code, _, _) = nivp(
        &["oracle", path.to_str().unwrap(), "--grid", "256", "--out", "o"],
        &dir,
    );
    assert_eq!(code, 0);
    let report = std::fs::read_to_string(dir.join("o/oracle_report.txt")).unwrap();
    assert!(report.contains("newton_steps"));
    assert!(report.contains("mismatch_1"));
    let csv = std::fs::read_to_string(dir.join("o/oracle_solution.csv")).unwrap();
    assert!(csv.starts_with("t,x,y\n"));
    assert_eq!(csv.lines().count(), 258);
}

#[test]
fn matrix_command_analysis() {
    let dir = scratch("matrix");
    let write = |name: &str, content: &str| {
        let p = dir.join(name);
        std::fs::write(&p, content).unwrap();
        p
    };
    let coupled = write("coupled.json", "[[0.5,0.35],[0.35,0.5]]");
    let (code, stdout, _) = nivp(&["matrix", coupled.to_str().unwrap()], &dir);
    assert_eq!(code, 0);
    assert!(stdout.contains("spectral_radius = 0.85"));
    assert!(stdout.contains("verdict = Convergent"));
    assert!(stdout.contains("row_sum_sufficient = true"));
    assert!(stdout.contains("neumann_inverse_row0"));

    // rho exactly 1 sits on the boundary band.
    let unit = write("unit.json", "[[1.0]]");
    let (_, stdout, _) = nivp(&["matrix", unit.to_str().unwrap()], &dir);
    assert!(stdout.contains("verdict = Boundary"));

    // Triangular: convergent but the row-sum sufficient test fails.
    let triangular = write("tri.json", "[[0.9,0.2],[0.0,0.5]]");
    let (_, stdout, _) = nivp(&["matrix", triangular.to_str().unwrap()], &dir);
    assert!(stdout.contains("verdict = Convergent"));
    assert!(stdout.contains("row_sum_sufficient = false"));

    // Malformed input and negative entries are config errors.
    let garbage = write("garbage.json", "not json");
    let (code, _, _) = nivp(&["matrix", garbage.to_str().unwrap()], &dir);
    assert_eq!(code, 1);
    let negative = write("negative.json", "[[0.5,-0.1],[0.0,0.5]]");
    let (code, _, _) = nivp(&["matrix", negative.to_str().unwrap()], &dir);
    assert_eq!(code, 1);
}

#[test]
fn caratheodory_only_problem_passes_check() {
    let dir = scratch("caratheodory");
    let cfg = dir.join("majorants.toml");
    std::fs::write(
        &cfg,
        r#"
solver = "picard"
grid = 256

[expressions]
f1 = "0.25*sin(x) + 0.5"
f2 = "0.25*cos(y)"
alpha = "0.1*supnorm(x)"
beta = "0.2"

[caratheodory]
omega1 = "0.75"
omega2 = "0.25"
omega3 = "0.1*x"
omega4 = "0.2"
"#,
    )
    .unwrap();
    let (code, stdout, stderr) = nivp(&["check", cfg.to_str().unwrap()], &dir);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("caratheodory_monotonicity = not falsified"));
    assert!(stdout.contains("apriori_bound_1"));
    assert!(stdout.contains("apriori_certified_region_only = true"));
    assert!(stdout.contains("hypotheses = satisfied"));

    let (code, _, _) = nivp(
        &["solve", cfg.to_str().unwrap(), "--out", "o"],
        &dir,
    );
    assert_eq!(code, 0);
}

#[test]
fn unknown_example_exits_one() {
    let dir = scratch("unknown-example");
    let (code, _, stderr) = nivp(&["example", "ex9"], &dir);
    assert_eq!(code, 1);
    assert!(stderr.contains("unknown example"));
}

#[test]
fn example_forcing_overrides_are_accepted() {
    let dir = scratch("forcing");
    let (code, stdout, stderr) = nivp(
        &[
            "example",
            "ex2",
            "--g",
            "sin(3*t)",
            "--h",
            "0.5",
            "--grid",
            "256",
            "--out",
            "o",
        ],
        &dir,
    );
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("hypotheses = satisfied"));
    assert!(stdout.contains("growth_falsification = none"));
}
