use std::path::Path;
use std::process::{Command, Output};

fn extrema(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extrema"))
        .args(args)
        .current_dir(dir)
        .env_remove("EXTREMA_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn two_point_curve_has_anticorrelation_peak() {
    let dir = tempfile::tempdir().unwrap();
    let o = extrema(dir.path(), &["two-point", "--r-max", "8", "--points", "801", "-o", "tp.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.path().join("tp.csv");
    let r: Vec<f64> = column(&path, "r").iter().map(|s| s.parse().unwrap()).collect();
    let c: Vec<f64> = column(&path, "c").iter().map(|s| s.parse().unwrap()).collect();
    let i = (0..c.len()).filter(|i| r[*i] > 1.0).min_by(|a, b| c[*a].total_cmp(&c[*b])).unwrap();
    assert!((r[i] - 3.37).abs() < 0.05, "minimum at {}", r[i]);
    let methods = column(&path, "method");
    assert!(methods.iter().all(|m| !m.is_empty()));
}

#[test]
fn verify_sum_rule_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = extrema(dir.path(), &["verify", "--suite", "sum-rule", "--kernel", "gaussian"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn embed_reports_meridians() {
    let dir = tempfile::tempdir().unwrap();
    let o = extrema(dir.path(), &["embed", "--y-max", "7", "--meridian-step", "0.25", "--rings", "141", "--n-angular", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("meridians: 29"), "{}", stdout(&o));
    let obj = std::fs::read_to_string(dir.path().join("embed.obj")).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("f ")));
    assert_eq!(column(&dir.path().join("embed_contour.csv"), "y").len(), 141);
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(extrema(dir.path(), &["two-point", "--bogus"]).status.code(), Some(1));
    assert_eq!(extrema(dir.path(), &["two-point", "--r-min", "5", "--r-max", "1"]).status.code(), Some(1));
    assert_eq!(extrema(dir.path(), &["two-point", "--kernel", "membrane"]).status.code(), Some(1));
    assert_eq!(extrema(dir.path(), &["mc", "--grid-spacing", "2.0", "--realizations", "2"]).status.code(), Some(1));
    assert_eq!(extrema(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_fills_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# defaults\npoints = 7\nr_max = 4\noutput = from_cfg.csv\n").unwrap();
    let o = extrema(dir.path(), &["two-point", "--config", "run.cfg", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = column(&dir.path().join("from_cfg.csv"), "r");
    assert_eq!(r.len(), 5);
    assert_eq!(r.last().unwrap().parse::<f64>().unwrap(), 4.0);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    std::fs::create_dir(&out).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_extrema"))
        .args(["wall-profile", "--points", "10"])
        .current_dir(dir.path())
        .env("EXTREMA_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(column(&out.join("wall_profile.csv"), "f").len(), 10);
}

#[test]
fn small_monte_carlo_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["mc", "--estimator", "pair", "--realizations", "3", "--domain", "14", "--max", "3", "--bin-width", "0.5"];
    let mut a = base.to_vec();
    a.extend(["--workers", "1", "-o", "a.csv"]);
    let mut b = base.to_vec();
    b.extend(["--workers", "2", "-o", "b.csv"]);
    assert_eq!(extrema(dir.path(), &a).status.code(), Some(0));
    assert_eq!(extrema(dir.path(), &b).status.code(), Some(0));
    let ta = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(ta, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert!(ta.starts_with("bin_center,mean,stderr,n"));
}
