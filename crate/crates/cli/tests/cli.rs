use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lineconf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = run(&all);
    let v = serde_json::from_str(&stdout(&o))
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&o)));
    (o.status.code().unwrap(), v)
}

#[test]
fn enumerate_profiles() {
    for (args, points, lines, v1) in [
        (&["enumerate", "q-minus", "3", "--profile"][..], 27, 45, 10),
        (&["enumerate", "fano", "--profile"][..], 7, 7, 6),
        (&["enumerate", "schlaefli", "--profile"][..], 27, 45, 10),
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0));
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(doc["points"].as_array().unwrap().len(), points, "{args:?}");
        assert_eq!(doc["lines"].as_array().unwrap().len(), lines, "{args:?}");
        assert_eq!(doc["profile"]["v"][1], v1, "{args:?}");
    }
}

#[test]
fn enumerate_dot() {
    let o = run(&["enumerate", "fano", "--dot"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("graph"), "{text}");
    assert_eq!(text.matches(" -- ").count(), 21);
}

#[test]
fn verifications_pass_on_the_quadric_pair() {
    for args in [
        &["verify", "vconfig", "q-minus4", "q-minus3"][..],
        &["verify", "numerics", "q-minus4", "--against", "q-minus3"][..],
        &["verify", "iso", "schlaefli", "q-minus", "3"][..],
        &["verify", "axioms", "q-minus", "4"][..],
        &["verify", "aut", "fano", "--expect", "168"][..],
    ] {
        let (code, m) = json(args);
        assert_eq!(code, 0, "{args:?}: {m}");
        assert!(
            m["checks"]
                .as_array()
                .unwrap()
                .iter()
                .all(|c| c["status"] != "fail"),
            "{m}"
        );
    }
}

#[test]
fn failing_checks_exit_one() {
    let (code, m) = json(&["verify", "vconfig", "q-minus3", "points", "4"]);
    assert_eq!(code, 1);
    assert!(
        m["checks"][0]["detail"]
            .as_str()
            .unwrap()
            .contains("point 0"),
        "{m}"
    );
    let (code, _) = json(&["verify", "aut", "fano", "--expect", "100"]);
    assert_eq!(code, 1);
    let (code, _) = json(&["verify", "iso", "fano", "p1^2"]);
    assert_eq!(code, 1);
}

#[test]
fn numerics_mark_inapplicable_items() {
    let (code, m) = json(&["verify", "numerics", "fano", "--against", "p1"]);
    assert_eq!(code, 0);
    let status = |item: &str| {
        m["payload"]["report"]["checks"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["item"] == item)
            .map(|c| c["status"].as_str().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(status("4"), vec!["inapplicable"]);
    assert_eq!(status("7"), vec!["inapplicable"]);
}

#[test]
fn classify_small_cases() {
    let (code, m) = json(&[
        "classify", "q-minus", "2", "--budget", "1e8", "--expect", "q-minus", "3",
    ]);
    assert_eq!(code, 0, "{m}");
    assert_eq!(m["payload"]["verdict"], "complete");
    assert_eq!(m["payload"]["classes"].as_array().unwrap().len(), 1);
    assert_eq!(m["payload"]["table"]["total_points"], 27);

    let (code, m) = json(&["classify", "p1", "--budget", "1e6", "--expect", "fano"]);
    assert_eq!(code, 0, "{m}");
    assert_eq!(
        m["payload"]["classes"][0]["lines"]
            .as_array()
            .unwrap()
            .len(),
        7
    );
}

#[test]
fn exhausted_budget_exits_three() {
    let (code, m) = json(&["classify", "q-minus", "3", "--budget", "1e3"]);
    assert_eq!(code, 3, "{m}");
    assert_eq!(m["payload"]["verdict"], "budget_exhausted");
    let (code, m) = json(&["classify", "q-minus", "3", "--budget", "0.5s"]);
    assert_eq!(code, 3, "{m}");
    assert_eq!(m["parameters"]["time_limit_s"], 0.5);
}

#[test]
fn ledger_totals() {
    let (code, m) = json(&["ledger"]);
    assert_eq!(code, 0);
    assert_eq!(m["payload"]["total"], 119);
    let (code, m) = json(&["ledger", "--rules", "0,4=0"]);
    assert_eq!(code, 1);
    assert_eq!(m["payload"]["total"], 247);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["ledger", "--rules", "4,0=x"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "dodecahedron"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "p1"]).status.code(), Some(2));
    assert_eq!(
        run(&["classify", "p1", "--budget", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "vconfig", "fano"]).status.code(), Some(2));
}

#[test]
fn schema_files_are_objects() {
    let dir = std::env::temp_dir().join(format!("lineconf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("q6.json");
    std::fs::write(&good, stdout(&run(&["enumerate", "q-minus", "3"]))).unwrap();
    let good = good.to_str().unwrap();
    let (code, _) = json(&["verify", "iso", good, "schlaefli"]);
    assert_eq!(code, 0);

    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"points": ["a", "b", "c", "d"], "lines": [[0, 1, 2], [0, 1, 3]]}"#,
    )
    .unwrap();
    let bad = bad.to_str().unwrap();
    let (code, m) = json(&["verify", "axioms", bad]);
    assert_eq!(code, 1, "{m}");
    assert_eq!(run(&["enumerate", bad]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seedless_runs_agree() {
    for args in [
        &["--seedless", "verify", "aut", "p3"][..],
        &["--seedless", "classify", "p1", "--budget", "1e5"][..],
    ] {
        let (code, m) = json(args);
        assert_eq!(code, 0, "{m}");
        let last = m["checks"].as_array().unwrap().last().unwrap().clone();
        assert_eq!(last["status"], "pass", "{m}");
    }
    let o = run(&["--seedless", "enumerate", "fano"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn manifests_record_parameters_and_version() {
    let (_, m) = json(&["discrepancies", "--n", "3"]);
    assert_eq!(m["parameters"]["n"], serde_json::json!([3]));
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["payload"].as_array().unwrap().len(), 3);
}
