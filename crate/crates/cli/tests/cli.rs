//! End-to-end tests of the command-line front end: exit codes, output
//! schema, and byte-identical reruns.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hilltongue")
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hilltongue-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn series_tables_for_cosine_potential() {
    let dir = tmp_dir("series");
    let out = Command::new(bin())
        .args(["series", "--config"])
        .arg(config_path("mathieu.toml"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let leading = std::fs::read_to_string(dir.join("series_leading.csv")).unwrap();
    let mut lines = leading.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# hilltongue v"));
    assert!(comment.contains("config_sha256="));
    assert_eq!(
        lines.next().unwrap(),
        "n_tongue,c_fast,c_fast_decimal,c_split,two_route_equal"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(rows[0].starts_with("1,-1,"));
    assert!(rows[1].starts_with("2,1/8,"));
    assert!(rows[2].starts_with("3,-1/256,"));
    assert!(rows[3].starts_with("4,1/18432,"));
    for row in &rows {
        assert!(row.ends_with(",true"), "two-route mismatch in {row}");
    }

    let shape = std::fs::read_to_string(dir.join("shape.csv")).unwrap();
    let verdicts: Vec<&str> = shape.lines().skip(2).collect();
    assert!(verdicts[0].starts_with("1,trumpet"));
    assert!(verdicts[1].starts_with("2,trumpet"));
    assert!(verdicts[2].starts_with("3,horn"));
    assert!(verdicts[3].starts_with("4,horn"));

    // Frequency table: the linear oscillator keeps Omega identically 1.
    let freq = std::fs::read_to_string(dir.join("series_frequency.csv")).unwrap();
    assert!(freq.lines().nth(2).unwrap().starts_with("0,1,"));
    assert!(freq.lines().nth(3).unwrap().starts_with("1,0,"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn tongue_table_is_deterministic_and_close_to_series() {
    let dir = tmp_dir("tongues");
    let cfg = write_config(
        &dir,
        "small.toml",
        r#"
f_coeffs = [[2, "1"]]
g_coeffs = [[1, "2"]]
order = 4
n_max = 2
q_grid = [0.05, 0.1]
analyses = ["tongues", "order"]
"#,
    );
    let run = |out_dir: &Path| {
        let out = Command::new(bin())
            .args(["tongues", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out_dir)
            .args(["--threads", "2"])
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    };
    let d1 = dir.join("run1");
    let d2 = dir.join("run2");
    run(&d1);
    run(&d2);
    let t1 = std::fs::read(d1.join("tongues.csv")).unwrap();
    let t2 = std::fs::read(d2.join("tongues.csv")).unwrap();
    assert_eq!(t1, t2, "repeat runs must be byte-identical");

    let text = String::from_utf8(t1).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 4, "2 tongues x 2 amplitudes");
    // Deterministic ordering: N-major, q-minor.
    assert!(rows[0].starts_with("1,5.0"));
    assert!(rows[1].starts_with("1,1.0"));
    assert!(rows[2].starts_with("2,5.0"));
    // The truncated series tracks the oracle at these amplitudes.
    for row in &rows {
        let gap: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(gap < 1e-3, "series/oracle gap too large in {row}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn validation_errors_exit_with_code_one() {
    let dir = tmp_dir("badcfg");
    // order below n_max.
    let bad = write_config(
        &dir,
        "bad.toml",
        r#"
f_coeffs = []
g_coeffs = [[1, "1"]]
order = 2
n_max = 4
q_grid = [0.05]
"#,
    );
    let out = Command::new(bin())
        .args(["series", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("order"), "diagnostic should name the field: {msg}");

    // Malformed rational.
    let bad2 = write_config(
        &dir,
        "bad2.toml",
        r#"
f_coeffs = [[2, "1/0"]]
g_coeffs = [[1, "1"]]
order = 3
n_max = 2
q_grid = [0.05]
"#,
    );
    let out2 = Command::new(bin())
        .args(["series", "--config"])
        .arg(&bad2)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out2.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out2.stderr).contains("f_coeffs"));

    // Missing --config.
    let out3 = Command::new(bin()).arg("series").output().unwrap();
    assert_eq!(out3.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn numerical_failures_exit_with_code_two() {
    let dir = tmp_dir("numfail");
    // Strong softening puts an equilibrium inside (0, q]: the oracle refuses.
    let cfg = write_config(
        &dir,
        "soft.toml",
        r#"
f_coeffs = [[2, "-30"]]
g_coeffs = [[1, "1"]]
order = 3
n_max = 1
q_grid = [0.5]
analyses = ["tongues"]
"#,
    );
    let out = Command::new(bin())
        .args(["tongues", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn quadratic_linear_leading_column_matches_closed_products() {
    let dir = tmp_dir("qlcol");
    let out = Command::new(bin())
        .args(["series", "--config"])
        .arg(config_path("quadratic_linear.toml"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let leading = std::fs::read_to_string(dir.join("series_leading.csv")).unwrap();
    let rows: Vec<&str> = leading.lines().skip(2).collect();
    // C_1..C_4 from the closed product at alpha = 1, gamma_tilde = 1.
    assert!(rows[0].starts_with("1,-2,"));
    assert!(rows[1].starts_with("2,5/12,"));
    assert!(rows[2].starts_with("3,-5/384,"));
    assert!(rows[3].starts_with("4,0,"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn zero_coupling_zeroes_the_leading_column() {
    let dir = tmp_dir("zerog");
    let cfg = write_config(
        &dir,
        "zero.toml",
        r#"
f_coeffs = [[2, "1"]]
g_coeffs = []
order = 4
n_max = 3
q_grid = [0.1]
analyses = ["series", "shape"]
"#,
    );
    let out = Command::new(bin())
        .args(["series", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let leading = std::fs::read_to_string(dir.join("series_leading.csv")).unwrap();
    for row in leading.lines().skip(2) {
        assert!(row.split(',').nth(1) == Some("0"), "nonzero C in {row}");
    }
    let shape = std::fs::read_to_string(dir.join("shape.csv")).unwrap();
    for row in shape.lines().skip(2) {
        assert!(row.contains(",collapsed,"), "expected collapsed verdicts: {row}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_subcommand_passes_and_reports() {
    let dir = tmp_dir("verify");
    let out = Command::new(bin())
        .arg("verify")
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "stdout: {stdout}");
    assert!(stdout.matches("[PASS]").count() >= 12, "stdout: {stdout}");
    assert!(!stdout.contains("[FAIL]"));
    let report = std::fs::read_to_string(dir.join("verify.csv")).unwrap();
    assert!(report.lines().nth(1) == Some("name,passed,detail"));
    assert!(report.lines().skip(2).all(|l| l.split(',').nth(1) == Some("true")));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn coexistence_table_flags_the_threshold_family() {
    let dir = tmp_dir("coexist");
    let out = Command::new(bin())
        .args(["series", "--config"])
        .arg(config_path("cubic_quadratic.toml"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("coexistence.csv")).unwrap();
    assert!(text.contains("detected,true"));
    assert!(text.contains("n_ince,1"));
    assert!(text.contains("a,16"));
    let _ = std::fs::remove_dir_all(&dir);
}
