use std::process::Command;

fn kpz_lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kpz-lab"))
}

#[test]
fn list_prints_catalog() {
    let out = kpz_lab().arg("list").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 15);
    assert!(text.contains("slow-decorr"));
}

#[test]
fn run_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let mut summaries = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = kpz_lab()
            .args(["lln", "--n", "30", "--replicas=4", "--tolerance", "1", "--out"])
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8(out.stdout).unwrap().contains("lln: pass"));
        for f in ["summary.json", "samples.csv", "tables.csv"] {
            assert!(out_dir.join(f).exists(), "{f}");
        }
        summaries.push(std::fs::read(out_dir.join("summary.json")).unwrap());
    }
    assert_eq!(summaries[0], summaries[1]);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("run.ini");
    std::fs::write(&ini, "experiment = lln\nn = 30\nreplicas = 4\ntolerance = 1\n").unwrap();
    let out = kpz_lab().arg("--config").arg(&ini).args(["--n", "25", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["parameters"]["n"], 25);
    assert_eq!(json["parameters"]["replicas"], 4);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpz_lab().args(["lln", "--n", "30", "--replicas", "4", "--tolerance", "0"]).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["nonsense"],
        vec!["lln", "--replicas", "lots"],
        vec!["lln", "--bogus-key", "1"],
        vec!["lln", "--n"],
        vec!["lln", "stray"],
    ] {
        let out = kpz_lab().args(&args).arg("--out").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(kpz_lab().output().unwrap().status.code(), Some(2));
}
