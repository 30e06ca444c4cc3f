use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn weil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weil")).args(args).output().expect("binary runs")
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn unit_form_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.json", r#"{"kind":"verify-global","q":[["1"]]}"#);
    let out = weil(&["verify", "global", &f, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["product"], 0);
    assert_eq!(v["pass"], true);
}

#[test]
fn malformed_json_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", r#"{"kind":"verify-global","q":[["1"]"#);
    assert_eq!(weil(&["run", &f]).status.code(), Some(2));
    let f = write(dir.path(), "extra.json", r#"{"kind":"verify-global","q":[["1"]],"zzz":0}"#);
    assert_eq!(weil(&["run", &f]).status.code(), Some(2));
    assert_eq!(weil(&["run", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn wrong_kind_for_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.json", r#"{"kind":"verify-global","q":[["1"]]}"#);
    let out = weil(&["verify", "curve", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expects verify-curve"));
}

#[test]
fn unsupported_point_names_itself() {
    let f = scenarios_dir().join("verify-curve-unsupported.json");
    let out = weil(&["verify", "curve", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unsupported") && err.contains("t^2 - 125"), "{err}");
}

#[test]
fn resource_limits_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.json", r#"{"kind":"gauss-sum","character":{"orders":[9,9],"gram":[["1/9","0"],["0","1/9"]]}}"#);
    let out = weil(&["gauss-sum", &f, "--cap", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gauss"));
}

#[test]
fn failed_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // (1, −1) lies in the kernel of the bicharacter
    let f = write(dir.path(), "d.json", r#"{"kind":"check-finite","character":{"orders":[3,3],"gram":[["1/3","1/3"],["1/3","1/3"]]}}"#);
    let out = weil(&["check", "finite", &f]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_is_deterministic_and_runs() {
    for kind in ["verify-curve", "check-finite", "verify-surface", "weil-local", "verify-global"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for d in [&a, &b] {
            let out = weil(&["generate", kind, "--seed", "7", "--count", "3", "--out", d.path().to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0));
        }
        let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert_eq!(names.len(), 3);
        for n in &names {
            let x = std::fs::read(a.path().join(n)).unwrap();
            assert_eq!(x, std::fs::read(b.path().join(n)).unwrap());
            let path = a.path().join(n);
            let first = weil(&["run", path.to_str().unwrap(), "--json", "--no-timing"]);
            assert_eq!(first.status.code(), Some(0), "{kind} {n:?}: {}", String::from_utf8_lossy(&first.stderr));
            let second = weil(&["run", path.to_str().unwrap(), "--json", "--no-timing"]);
            assert_eq!(first.stdout, second.stdout);
        }
    }
}

#[test]
fn extra_places_are_probed() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.json", r#"{"kind":"verify-global","q":[["3","1"],["1","-5"]]}"#);
    let out = weil(&["verify", "global", &f, "--json", "--places", "101,103"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let places: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["place"].as_str().unwrap()).collect();
    assert!(places.contains(&"101") && places.contains(&"103"), "{places:?}");
    assert_eq!(weil(&["verify", "global", &f, "--places", "4"]).status.code(), Some(2));
}

#[test]
fn golden_reports() {
    let dir = scenarios_dir();
    let golden = dir.join("golden");
    let mut seen = 0;
    for entry in std::fs::read_dir(&golden).unwrap() {
        let name = entry.unwrap().file_name();
        let scenario = dir.join(&name);
        let out = weil(&["run", scenario.to_str().unwrap(), "--json", "--no-timing"]);
        assert_eq!(out.status.code(), Some(0), "{name:?}");
        let expected = std::fs::read(golden.join(&name)).unwrap();
        assert_eq!(String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&expected), "{name:?}");
        seen += 1;
    }
    assert!(seen >= 10);
}
