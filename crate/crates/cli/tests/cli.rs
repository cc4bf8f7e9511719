//! End-to-end CLI checks: report shapes, exit codes, determinism.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_limitflow"))
}

fn problems(name: &str) -> String {
    format!("{}/../../problems/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn write_tmp(name: &str, content: &str) -> String {
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn limit_set_worked_example_lists_two_semitori() {
    let out = bin()
        .args(["limit-set", &problems("semitori.json")])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "components");
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    for c in comps {
        assert_eq!(c["subgroup"]["real_dim"], 3);
        assert_eq!(c["subgroup"]["compact_dim"], 2);
        assert_eq!(c["subgroup"]["compact_set"], false);
    }
    let radii: Vec<Vec<u64>> = comps
        .iter()
        .map(|c| {
            c["radii"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_u64().unwrap())
                .collect()
        })
        .collect();
    assert!(radii.contains(&vec![0, 2]));
    assert!(radii.contains(&vec![1, 3]));
}

#[test]
fn analyze_pole_free_curve_reports_single_point() {
    let path = write_tmp(
        "limitflow_polefree.json",
        r#"{
            "schema_version": 1,
            "lattice": {"n": 1, "generators": [["1"], ["i"]]},
            "curve": {"n": 1, "terms": [{"e": 0, "v": ["1/3+1/2i"]}], "truncation": 1}
        }"#,
    );
    let out = bin().args(["analyze-curve", &path]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "single limit point");
    assert_eq!(v["single_limit_point"]["compact"][0], "1/3");
    assert_eq!(v["single_limit_point"]["compact"][1], "1/2");
}

#[test]
fn malformed_json_exits_2() {
    let path = write_tmp("limitflow_broken.json", "{ not json ]");
    let out = bin().args(["limit-set", &path]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_schema_version_exits_2() {
    let path = write_tmp(
        "limitflow_badver.json",
        r#"{"schema_version": 9, "lattice": {"n": 1, "generators": [["1"]]}}"#,
    );
    let out = bin().args(["analyze-curve", &path]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_insufficient_exits_3() {
    let path = write_tmp(
        "limitflow_trunc.json",
        r#"{
            "schema_version": 1,
            "lattice": {"n": 1, "generators": [["1"], ["i"]]},
            "curve": {"n": 1, "terms": [{"e": -1, "v": ["1"]}], "truncation": 0}
        }"#,
    );
    let out = bin().args(["limit-set", &path]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical() {
    let run = || {
        bin()
            .args(["limit-set", &problems("semitori.json")])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
    let run_mass = || {
        bin()
            .args([
                "mass-check",
                &problems("compact1d.json"),
                "--samples",
                "20000",
                "--a-grid",
                "0.25,0.125",
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run_mass(), run_mass());
}

#[test]
fn sequences_and_good_disc_on_two_pole_map() {
    let out = bin()
        .args(["sequences", &problems("twopole.json")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["depth_exceeded"], false);
    assert_eq!(v["sequences"].as_array().unwrap().len(), 1);
    assert_eq!(v["sequences"][0]["f_b"]["dim"], 2);
    let out = bin()
        .args(["good-disc", &problems("twopole.json")])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["composed_pole_subspace_matches"], true);
}

#[test]
fn leading_powers_report() {
    let path = write_tmp(
        "limitflow_lp.json",
        r#"{
            "schema_version": 1,
            "lattice": {"n": 1, "generators": [["1"]]},
            "multi_map": {
                "dim": 1, "l": 2, "q": 2,
                "terms": [
                    {"beta": [-1, 0], "theta": [], "v": ["1"]},
                    {"beta": [-1, 1], "theta": [], "v": ["1"]},
                    {"beta": [0, -2], "theta": [], "v": ["1"]},
                    {"beta": [1, -1], "theta": [], "v": ["1"]}
                ],
                "trunc": {"beta": 100, "theta": 100}
            }
        }"#,
    );
    let out = bin().args(["leading-powers", &path]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["powers"], serde_json::json!([[-1, 0], [0, -2]]));
}

#[test]
fn mass_check_csv_format() {
    let out = bin()
        .args([
            "mass-check",
            &problems("compact1d.json"),
            "--samples",
            "5000",
            "--a-grid",
            "0.25",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("a,mass,ratio\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn alw_hull_from_curve() {
    let out = bin()
        .args(["alw-hull", &problems("semitori.json")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // F_k = C^2 has full hull.
    assert_eq!(v["hull"]["real_dim"], 4);
}

#[test]
fn dump_samples_csv() {
    let dump = std::env::temp_dir().join("limitflow_dump.csv");
    let out = bin()
        .args([
            "mass-check",
            &problems("compact1d.json"),
            "--samples",
            "100",
            "--a-grid",
            "0.25",
            "--dump-samples",
            dump.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.starts_with("x_re,x_im,weight"));
    assert_eq!(text.lines().count(), 101);
}
