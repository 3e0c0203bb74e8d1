mod common;

use common::*;
use planwise::bellwether::{discover, QualityMeasure};
use planwise::data::load_project_dir;
use planwise::dtree::TreeParams;
use planwise::eval::evaluate_windows;
use planwise::planners::{train, PlannerKind, PlannerParams};
use planwise::synth::{planted_community, planted_project};
use serde_json::Value;

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plan_emits_one_entry_per_test_class_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_project(dir.path(), &planted_project("ant", 1, 2, 80));
    let run = |out: &str| {
        let o = planwise(&[
            "plan",
            "--planner",
            "xtree",
            "--train",
            s(&files[0]),
            "--test",
            s(&files[1]),
            "--out",
            out,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run(s(&dir.path().join("a.json")));
    let b = run(s(&dir.path().join("b.json")));
    assert_eq!(a, b);
    let doc: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["planner"], "xtree");
    let plans = doc["plans"].as_array().unwrap();
    assert_eq!(plans.len(), 80);
    assert!(plans
        .iter()
        .all(|p| p["row"].as_str().unwrap().chars().count() == 20));
    assert!(plans.iter().all(|p| p["refactorings"].is_array()));
}

#[test]
fn plan_csv_has_metric_columns() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_project(dir.path(), &planted_project("ant", 2, 2, 40));
    let o = planwise(&[
        "plan",
        "--planner",
        "oliveira",
        "--train",
        s(&files[0]),
        "--test",
        s(&files[1]),
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 24);
    assert_eq!(header[2], "wmc");
    assert_eq!(lines.count(), 40);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_project(dir.path(), &planted_project("ant", 1, 3, 20));
    let o = planwise(&[
        "plan",
        "--planner",
        "magic",
        "--train",
        s(&files[0]),
        "--test",
        s(&files[1]),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = planwise(&[
        "evaluate",
        "--project",
        s(dir.path()),
        "--planner",
        "belltree",
        "--out",
        s(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = planwise_env(
        &["plan", "--train", s(&files[0]), "--test", s(&files[1])],
        &[("PLANWISE_PLANNER", "magic")],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(planwise(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = planwise(&["tree", "--train", s(&dir.path().join("missing.csv"))]);
    assert_eq!(o.status.code(), Some(1));

    let files = write_project(&dir.path().join("two"), &planted_project("two", 1, 2, 20));
    let o = planwise(&[
        "evaluate",
        "--project",
        s(&dir.path().join("two")),
        "--out",
        s(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("three releases"));
    drop(files);
}

#[test]
fn env_overrides_flags_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_project(dir.path(), &planted_project("ant", 4, 2, 80));
    let args = ["plan", "--train", s(&files[0]), "--test", s(&files[1])];
    let base = planwise(&args);
    let seeded = planwise_env(&args, &[("PLANWISE_SEED", "7")]);
    let flagged = planwise(&[&args[..], &["--seed", "7"]].concat());
    assert!(base.status.success() && seeded.status.success());
    assert_eq!(seeded.stdout, flagged.stdout);
    assert_ne!(seeded.stdout, base.stdout);
}

#[test]
fn help_shows_defaults() {
    let o = planwise(&["plan", "--help"]);
    let help = String::from_utf8(o.stdout).unwrap();
    for needle in [
        "[default: 0.5]",
        "[default: 70]",
        "[default: 0.05]",
        "[default: 90]",
        "[default: 10]",
        "PLANWISE_GAMMA",
    ] {
        assert!(help.contains(needle), "missing {needle}");
    }
}

#[test]
fn bellwether_names_the_argmax_project() {
    let dir = tempfile::tempdir().unwrap();
    let community = planted_community(4, 120);
    for p in community.projects.iter().filter(|p| p.name != "beta") {
        write_project(&dir.path().join(&p.name), p);
    }
    let o = planwise(&["bellwether", "--community", s(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let loaded = planwise::data::load_community_dir(dir.path()).unwrap();
    let expect = discover(&loaded, QualityMeasure::GScore, TreeParams::default()).unwrap();
    assert_eq!(doc["bellwether"], expect.bellwether.as_str());
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["community"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_csv_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let community = planted_community(4, 40);
    for p in &community.projects {
        write_project(&dir.path().join(&p.name), p);
    }
    let bad = dir.path().join("beta").join("beta-2.0.csv");
    let text = std::fs::read_to_string(&bad)
        .unwrap()
        .replacen(",0\n", ",oops\n", 1);
    std::fs::write(&bad, text).unwrap();
    let o = planwise(&["bellwether", "--community", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta-2.0.csv"));
}

#[test]
fn evaluate_covers_every_window_and_planner() {
    let dir = tempfile::tempdir().unwrap();
    let proj = dir.path().join("ant");
    write_project(&proj, &planted_project("ant", 9, 5, 60));
    let bw = dir.path().join("bw");
    write_project(&bw, &planted_project("bw", 10, 2, 60));
    let out = dir.path().join("out");
    let o = planwise(&[
        "evaluate",
        "--project",
        s(&proj),
        "--planner",
        "all",
        "--bellwether",
        s(&bw),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 5 * 3);
    for k in PlannerKind::ALL {
        assert!(out.join(k.name()).join("1.0_2.0_3.0.json").exists());
        assert!(out.join(k.name()).join("3.0_4.0_5.0.curve.csv").exists());
    }
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("AUPEC↓") && table.contains("AUPEC↑"));

    let o = planwise(&[
        "evaluate",
        "--project",
        s(&proj),
        "--planner",
        "all",
        "--out",
        s(&dir.path().join("o2")),
    ]);
    let summary = std::fs::read_to_string(dir.path().join("o2").join("summary.csv")).unwrap();
    assert!(o.status.success());
    assert_eq!(summary.lines().count(), 1 + 4 * 3);
}

#[test]
fn evaluate_json_matches_library_k_test() {
    let dir = tempfile::tempdir().unwrap();
    let proj = dir.path().join("ant");
    write_project(&proj, &planted_project("ant", 12, 3, 60));
    let out = dir.path().join("out");
    let o = planwise(&[
        "evaluate",
        "--project",
        s(&proj),
        "--planner",
        "alves",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let doc: Value =
        serde_json::from_slice(&std::fs::read(out.join("alves").join("1.0_2.0_3.0.json")).unwrap())
            .unwrap();
    let project = load_project_dir(&proj).unwrap();
    let params = PlannerParams::default();
    let expect = evaluate_windows(
        &project,
        &|v| train(PlannerKind::Alves, &params, &v.records),
        0.0,
    )
    .unwrap();
    let mut want = serde_json::to_value(&expect[0]).unwrap();
    want["schema_version"] = 1.into();
    assert_eq!(doc, want);
}

#[test]
fn thresholds_and_tree_dump() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_project(dir.path(), &planted_project("ant", 3, 1, 120));
    let o = planwise(&[
        "thresholds",
        "--planner",
        "oliveira",
        "--train",
        s(&files[0]),
    ]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rules"].as_array().unwrap().len(), 20);
    let o = planwise(&[
        "thresholds",
        "--planner",
        "alves",
        "--train",
        s(&files[0]),
        "--format",
        "csv",
    ]);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .starts_with("metric,upper,p_fraction\n"));
    let o = planwise(&["thresholds", "--planner", "xtree", "--train", s(&files[0])]);
    assert_eq!(o.status.code(), Some(2));
    let o = planwise(&["tree", "--train", s(&files[0]), "--max-depth", "2"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let tree: planwise::dtree::DecisionTree = serde_json::from_value(doc["tree"].clone()).unwrap();
    assert!(tree.depth() <= 2);
}
