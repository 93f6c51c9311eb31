use std::path::Path;
use std::process::{Command, Output};

fn snum(args: &[&str], out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_snum"));
    c.args(args);
    if let Some(o) = out {
        c.arg("--out").arg(o);
    }
    c.env("SNUM_THREADS", "2").output().expect("run snum")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn volterra_isomorphism_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = snum(&["volterra", "--n", "1..5", "--grid", "240", "--kinds", "i,b"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("kind,n,lower,upper,status,witness_path"));
    let iso: Vec<&str> = lines.filter(|l| l.starts_with("i,")).collect();
    assert_eq!(iso.len(), 5);
    for (n, l) in (1..=5).zip(iso) {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[2], format!("1/{}", 2 * n));
        assert_eq!(f[4], "certified");
        assert!(dir.path().join(f[5]).exists());
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(json["axioms"]["passed"], true);
    assert!(json["rows"].as_array().unwrap().iter().any(|r| r["kind"] == "b" && r["upper_exact"] == "21/200"));
    assert!(dir.path().join("plot.dat").exists());
}

#[test]
fn all_kinds_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let o = snum(&["volterra", "--n", "1..4", "--grid", "48"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("‖V‖ = 1/2"));
    assert!(s.lines().filter(|l| l.starts_with("c ")).all(|l| l.contains("1/2")));
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["volterra", "--n", "2,4", "--grid", "64", "--seed", "7"];
    assert!(snum(&args, Some(a.path())).status.success());
    assert!(snum(&args, Some(b.path())).status.success());
    for f in ["results.json", "summary.csv", "plot.dat"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn float_mode_drops_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = snum(&["volterra", "--n", "3", "--grid", "6", "--kinds", "i", "--mode", "float"], Some(dir.path()));
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    let row = &json["rows"][0];
    assert_eq!(row["mode"], "float");
    assert!(row["lower_exact"].is_null());
    assert!((row["lower"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = snum(&["volterra", "--n", "2", "--grid", "3", "--kinds", "i"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2n = 4"));
    assert_eq!(snum(&["volterra", "--n", "2", "--kinds", "x"], Some(dir.path())).status.code(), Some(2));
    assert_eq!(snum(&["volterra", "--n", "0"], None).status.code(), Some(2));
    assert_eq!(snum(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(snum(&["cube", "--dim", "1"], Some(dir.path())).status.code(), Some(2));
    assert_eq!(snum(&["selftest", "--criteria", "11"], None).status.code(), Some(2));
}

#[test]
fn hilbert_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = snum(&["hilbert", "--dim", "2", "--order", "4", "--check"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("check_prefix_nesting: ok"));
    let csv = std::fs::read_to_string(dir.path().join("hilbert.csv")).unwrap();
    assert_eq!(csv.lines().count(), 257);
}

#[test]
fn cube_scaling_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = snum(&["cube", "--dim", "2", "--m", "1,2", "--curve-order", "2"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("1/4") && s.contains("1/8"));
    assert!(s.contains("subspace"));
    let plot = std::fs::read_to_string(dir.path().join("plot.dat")).unwrap();
    assert!(plot.starts_with("# kind n log_n"));
}

#[test]
fn john_uniform_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = snum(&["john", "--order", "2", "--samples", "500"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("john.json")).unwrap()).unwrap();
    assert_eq!(json["uniform"], true);
    assert_eq!(json["domains"].as_array().unwrap().len(), 136);
}

#[test]
fn selftest_fault_injection_names_the_check() {
    let o = snum(&["selftest", "--criteria", "6", "--inject-fault", "hilbert"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("check_prefix_nesting"));
}

#[test]
fn selftest_float_mode() {
    let o = snum(&["selftest", "--criteria", "1,5,6", "--mode", "float", "--tolerance", "1e-9"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("mode float"));
    assert_eq!(s.matches("[PASS]").count(), 3);
}
