use std::process::{Command, Output};

fn mdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_json_reports_negative() {
    let o = mdl(&["classify", "D_refsucc", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "NEGATIVE");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn classify_positive_and_minimized() {
    let o = mdl(&["classify", "D_sym"]);
    assert!(stdout(&o).starts_with("class: POSITIVE"));
    let o = mdl(&["minimize", "D_chain"]);
    assert!(stdout(&o).contains("delete (1, 2, a)"));
}

#[test]
fn c2_on_triangle() {
    let o = mdl(&["verify", "c2", "D_tri", "--graph", "complete:2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("γ^D_7 refuted at w0"));
}

#[test]
fn latex_axioms() {
    let o = mdl(&["axioms", "D_tri", "--m", "2", "--format", "latex"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("\\Diamond_{a}"));
    assert!(s.contains("\\Box_{a}"));
    assert!(s.contains("\\to"));
}

#[test]
fn rank1_and_pseudoproduct() {
    let o = mdl(&["rank1", "D_tri"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("PASS").count(), 6);
    let o = mdl(&["pseudoproduct", "D_tri", "--graph", "complete:1"]);
    assert!(stdout(&o).contains("isomorphic to F-"));
    let o = mdl(&["pseudoproduct", "D_tri", "--graph", "mycielski:complete:2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["vertices"], 5);
}

#[test]
fn file_inputs_are_accepted() {
    let dir = std::env::temp_dir().join(format!("mdl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("loop.dg");
    std::fs::write(&path, "points 2\nedge x0 -a-> x1\nedge x1 -a-> x1\n").unwrap();
    let o = mdl(&["classify", path.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("class: NEGATIVE"));
    let graph = dir.join("path.g");
    std::fs::write(&graph, "graph 3\nedge v0 -- v1\nedge v1 -- v2\n").unwrap();
    let selector = format!("file:{}", graph.display());
    let o = mdl(&["pseudoproduct", "D_tri", "--graph", &selector]);
    assert!(stdout(&o).starts_with("points: 10"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn errors_exit_with_two() {
    for args in [
        &["classify", "nosuch"][..],
        &["verify", "c2", "D_tri", "--graph", "bogus"],
        &["verify", "nosuch", "D_tri"],
        &["rank1", "D_refl_root"],
        &["classify"],
    ] {
        let o = mdl(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn output_is_deterministic() {
    for args in [&["rank1", "D_fig3", "--format", "dot"][..], &["verify", "c1", "D_refsucc", "--samples", "50", "--format", "json"]] {
        assert_eq!(stdout(&mdl(args)), stdout(&mdl(args)));
    }
}
