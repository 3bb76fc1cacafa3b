use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hk(dir: &Path, args: &[&str], config: &str) -> Output {
    let path = dir.join("config.json");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hk")).args(args).arg("--config").arg(&path).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const M2: &str = r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":[[2,0],[1,1],[0,2]]}"#;
const A1: &str = r#"{"ring":{"kind":"toric2","rays":[[1,0],[0,1]],"lattice":[[2,0],[1,1]],"p":2},"ideal":"m","budgets":{"max_e":3,"k_max":8}}"#;

#[test]
fn ideal_info_examples() {
    let dir = TempDir::new().unwrap();
    let out = hk(dir.path(), &["ideal-info"], M2);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().nth(1).unwrap(), "\"<(0,2), (1,1), (2,0)>\",3,2,true,3,");

    let xy = hk(dir.path(), &["ideal-info"], r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":[[1,1]]}"#);
    assert_eq!(xy.status.code(), Some(0));
    assert!(stdout(&xy).lines().nth(1).unwrap().ends_with(",false,,"));
    assert!(String::from_utf8_lossy(&xy.stderr).contains("not m-primary"));

    let a1 = hk(dir.path(), &["ideal-info", "--format", "json"], A1);
    let v: serde_json::Value = serde_json::from_slice(&a1.stdout).unwrap();
    assert_eq!(v["colength"], "1");
    assert_eq!(v["elias_quantity"], "2");
}

#[test]
fn hs_fit_rows() {
    let dir = TempDir::new().unwrap();
    let out = hk(
        dir.path(),
        &["hs-fit"],
        r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":[[2,0],[0,5]],"budgets":{"k_max":7}}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("quantity,index,value\n"));
    for line in ["e,0,10", "e,1,0", "e,2,0", "postulation,,1", "verified_through,,7"] {
        assert!(text.lines().any(|l| l == line), "{line} missing from\n{text}");
    }
}

#[test]
fn hs_fit_without_stabilization_prints_partial_table() {
    let dir = TempDir::new().unwrap();
    let out =
        hk(dir.path(), &["hs-fit"], r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":"m","budgets":{"k_max":3}}"#);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("length,")).count(), 3);
    assert!(!text.contains("\ne,"));
}

#[test]
fn beta_tables() {
    let dir = TempDir::new().unwrap();
    let out = hk(dir.path(), &["beta"], M2);
    assert_eq!(stdout(&out), "e,q,e1_bracket,e1_over_qd,extrapolated\n1,3,9,1,\n2,9,81,1,\n3,27,729,1,1\n");
    let ci = hk(dir.path(), &["beta"], r#"{"ring":{"kind":"regular","d":2,"p":2},"ideal":[[3,0],[0,2]]}"#);
    assert!(stdout(&ci).lines().skip(1).all(|l| l.split(',').nth(3) == Some("0")));
    let toric = hk(dir.path(), &["beta"], A1);
    assert_eq!(toric.status.code(), Some(0));
    assert!(stdout(&toric).lines().last().unwrap().ends_with(",1/2"));
}

#[test]
fn check_examples_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let wy = hk(dir.path(), &["check", "wy"], r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":[[2,0],[0,3]],"n":3}"#);
    assert_eq!(wy.status.code(), Some(0));
    assert_eq!(stdout(&wy).lines().nth(1).unwrap(), "wy,36,36,0,equality,false");

    let north = hk(dir.path(), &["check", "northcott"], M2);
    assert_eq!(north.status.code(), Some(0));
    assert_eq!(stdout(&north).lines().nth(1).unwrap(), "northcott,1,1,0,equality,false");

    let corrupted = r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":"m","test_hooks":{"corrupt_bound_length":true}}"#;
    let bound = hk(dir.path(), &["check", "bound"], corrupted);
    assert_eq!(bound.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bound.stderr).contains("bound"));

    let toric_north = hk(dir.path(), &["check", "northcott", "--tolerance", "1/1000"], A1);
    assert_eq!(toric_north.status.code(), Some(0));
    assert!(stdout(&toric_north).contains(",true\n"));
}

#[test]
fn budget_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let tight = r#"{"ring":{"kind":"toric2","rays":[[1,0],[0,1]],"lattice":[[2,0],[1,1]],"p":2},"ideal":"m",
                    "budgets":{"max_e":5,"enumeration_cap":500}}"#;
    let out = hk(dir.path(), &["ehk"], tight);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("largest completed"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = hk(
        dir.path(),
        &["ideal-info"],
        "{\n  \"ring\": {\"kind\":\"regular\",\"d\":2,\"p\":3},\n  \"ideal\": \"m\",\n  \"bogus\": 1\n}",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config.json:4:"));

    let not_prime = hk(dir.path(), &["ideal-info"], r#"{"ring":{"kind":"regular","d":2,"p":4},"ideal":"m"}"#);
    assert_eq!(not_prime.status.code(), Some(2));
    let not_primary =
        hk(dir.path(), &["check", "northcott"], r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":[[1,1]]}"#);
    assert_eq!(not_primary.status.code(), Some(2));
    let bad_tol = hk(dir.path(), &["check", "wy", "--tolerance", "-1"], M2);
    assert_eq!(bad_tol.status.code(), Some(2));
    let zero_budget =
        hk(dir.path(), &["ehk"], r#"{"ring":{"kind":"regular","d":2,"p":3},"ideal":"m","budgets":{"max_e":0}}"#);
    assert_eq!(zero_budget.status.code(), Some(2));
    let no_config = Command::new(env!("CARGO_BIN_EXE_hk")).arg("ehk").output().unwrap();
    assert_eq!(no_config.status.code(), Some(2));
    let bad_cmd = Command::new(env!("CARGO_BIN_EXE_hk")).args(["check", "elias"]).output().unwrap();
    assert_eq!(bad_cmd.status.code(), Some(2));
}

#[test]
fn paranoid_mode_agrees() {
    let dir = TempDir::new().unwrap();
    let plain = hk(dir.path(), &["check", "decompose"], M2);
    let paranoid = hk(dir.path(), &["check", "decompose", "--paranoid"], M2);
    assert_eq!(paranoid.status.code(), Some(0));
    assert_eq!(plain.stdout, paranoid.stdout);
}

fn sweep(dir: &Path, config: &str, jobs: &str) -> Output {
    hk(dir, &["sweep", "--jobs", jobs], config)
}

#[test]
fn sweep_northcott_over_complete_intersections() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"families":[{"kind":"complete_intersection","name":"ci","p":3,"a_max":3,"b_max":3}],
                  "commands":["northcott"],"output_dir":"out"}"#;
    let out = sweep(dir.path(), cfg, "2");
    assert_eq!(out.status.code(), Some(0));
    let table = std::fs::read_to_string(dir.path().join("out/ci__northcott.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.contains(",equality,")));
    assert!(rows[0].starts_with("ci,a=1;b=1,"));
    assert!(rows[8].starts_with("ci,a=3;b=3,"));
}

#[test]
fn sweep_empty_family_and_error_rows() {
    let dir = TempDir::new().unwrap();
    let empty = r#"{"families":[{"kind":"explicit","name":"none","ring":{"kind":"regular","d":2,"p":2},"ideals":[]}],
                    "commands":["wy"],"output_dir":"out"}"#;
    let out = sweep(dir.path(), empty, "1");
    assert_eq!(out.status.code(), Some(0));
    let table = std::fs::read_to_string(dir.path().join("out/none__wy.csv")).unwrap();
    assert_eq!(table, "family,params,ideal,check,lhs,rhs,slack,verdict,numerical,status,error\n");

    let mixed = r#"{"families":[{"kind":"explicit","name":"mixed","ring":{"kind":"regular","d":2,"p":2},
                    "ideals":[[[2,0],[0,2]],[[1,1]]]}],"commands":["northcott"],"output_dir":"out"}"#;
    let out = sweep(dir.path(), mixed, "1");
    assert_eq!(out.status.code(), Some(1));
    let table = std::fs::read_to_string(dir.path().join("out/mixed__northcott.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",equality,false,ok,"));
    assert!(rows[1].contains(",error,") && rows[1].contains("not m-primary"));
}

#[test]
fn sweep_json_output() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"families":[{"kind":"toric_a1","p":2}],"commands":["ehk"],"output_dir":"out","format":"json",
                  "budgets":{"max_e":2}}"#;
    let out = sweep(dir.path(), cfg, "1");
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("out/toric_a1__ehk.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["report"]["extrapolated"], "3/2");
    assert_eq!(v[0]["status"], "ok");
}
