use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sepprob(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepprob"))
        .args(args)
        .env("SEPPROB_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn curves_export_csv_to_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = sepprob(dir.path(), &["curves", "--name", "dominant", "--grid", "-4:4:0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("name,xi,value,std_error,n,seed,provenance"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 81);
    // ξ = 0 is the 41st row; dominant(0) = 1
    assert!(rows[40].starts_with("dominant,0.0000000000000000e0,1.0000000000000000e0,"), "{}", rows[40]);
    assert!(rows.iter().all(|r| r.ends_with(",closed-form")));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    let args = ["estimate", "--test", "full-ph", "--n", "2000", "--grid", "-2:2:0.5", "--format", "json", "--out"];
    let run = || {
        let mut a = args.to_vec();
        a.push(out.to_str().unwrap());
        let o = sepprob(dir.path(), &a);
        assert!(o.status.code().is_some());
        fs::read(&out).unwrap()
    };
    let first = run();
    assert_eq!(first, run());
    let json = String::from_utf8(first).unwrap();
    assert!(json.contains("\"config_hash\""));
    assert!(json.contains("\"generator\""));
    assert!(json.contains("\"provenance\": \"qmc-estimate\""));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["curves"],
        vec!["curves", "--name", "no_such_curve"],
        vec!["estimate", "--beta", "3"],
        vec!["estimate", "--test", "minors2x2-single:9"],
        vec!["curves", "--name", "dominant", "--grid", "1:0:0.1"],
        vec!["summary"],
    ] {
        let o = sepprob(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0, "usage errors write nothing");
}

#[test]
fn cube_and_jacobian_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = sepprob(dir.path(), &["cube", "--scheme", "triple", "--scheme", "pair:1,2", "--grid", "0:0.5:0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("cube triple at 0 = 159104/231525"));
    let o = sepprob(dir.path(), &["jacobian", "--grid", "-2:2:1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(dir.path().join("jacobian.csv").exists());
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // a deliberately impossible tolerance on the cube comparison
    let o = sepprob(dir.path(), &["cube", "--scheme", "single:4", "--grid", "0.5:0.5:1", "--tolerance", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn summary_ranks_and_rejects_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let est = dir.path().join("est.csv");
    let o = sepprob(dir.path(), &["estimate", "--test", "full-ph", "--test", "absolute", "--n", "2e4", "--out", est.to_str().unwrap()]);
    assert!(o.status.code().is_some());
    let bounds = dir.path().join("bounds.csv");
    let o = sepprob(dir.path(), &["bounds", "--out", bounds.to_str().unwrap()]);
    // the paired-dominant row is a known mismatch, so this run reports a failure
    assert_eq!(o.status.code(), Some(1));
    let sum = dir.path().join("sum.csv");
    let o = sepprob(dir.path(), &["summary", bounds.to_str().unwrap(), est.to_str().unwrap(), "--out", sum.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let pos = |s: &str| text.find(s).unwrap_or_else(|| panic!("{s} missing:\n{text}"));
    assert!(pos("lower-bound:absolute") < pos("estimate:full-ph"));
    assert!(pos("estimate:full-ph") < pos("upper-bound:paired_intermediate"));
    assert!(pos("upper-bound:paired_intermediate") < pos("upper-bound:intermediate"));
    assert!(pos("upper-bound:intermediate") < pos("upper-bound:dominant"));
    assert!(fs::read_to_string(&sum).unwrap().contains("upper-bound:intermediate:boundary,,3.1428571428571"));

    let missing = dir.path().join("nope.csv");
    let out = dir.path().join("never.csv");
    let o = sepprob(dir.path(), &["summary", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}
