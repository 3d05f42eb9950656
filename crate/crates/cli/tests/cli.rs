use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn acs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = acs(&a);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    assert_eq!(v["schema_version"], 1);
    v
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("acs-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn classify_neqs3() {
    let o = acs(&["classify", "models:neqs3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("NDG(3)-candidate, rImage=3"));
}

#[test]
fn liealg_su21_json() {
    let v = json(&["liealg", "--case", "su21", "--k", "2"]);
    let r = &v["report"];
    assert_eq!(r["pass"], false);
    let bad = &r["key_triples"][1];
    assert_eq!(bad["label"], "(zbar1, z1, z3)");
    assert_eq!(bad["m_residual"][2], "-4");
    assert_eq!(r["key_triples"][0]["vanishes"], true);
}

#[test]
fn liealg_su3_killing() {
    let v = json(&["liealg", "--case", "su3", "--killing"]);
    assert_eq!(v["report"]["pass"], true);
    assert_eq!(v["report"]["killing"]["signature"], serde_json::json!([0, 14, 0]));
}

#[test]
fn symbol_dims() {
    let v = json(&["symbol", "models:neqs3", "--max-order", "2"]);
    assert_eq!(v["report"]["dims"], serde_json::json!([8, 0]));
    let o = acs(&["symbol", "models:dg2_2", "--max-order", "3"]);
    assert!(stdout(&o).starts_with("gamma dims [12,"));
}

#[test]
fn chart_commands() {
    let v = json(&["nijenhuis", "models:submax", "--point", "z=0.1, w=0.2+0.3i"]);
    assert_eq!(v["report"]["image_complex_dim"], 1);
    assert_eq!(v["report"]["model"]["name"], "submax");
    let o = acs(&["classify", "models:nofor", "--point", "zeta=0.5"]);
    assert!(stdout(&o).starts_with("DG2(2)"));
    let v = json(&["charvar", "models:dg2_2"]);
    assert_eq!(v["report"]["report"]["p_complex"], 2);
    assert_eq!(v["report"]["report"]["kernel_rank_complex"], 2);
}

#[test]
fn realize_worked_example() {
    let v = json(&["realize", "--a", "2*w_ + w_^2", "--b", "w"]);
    let a = &v["report"]["alpha"];
    assert!(a[0].as_f64().unwrap().abs() < 1e-15);
    assert!((a[1].as_f64().unwrap() + 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn hermitian_neqs3() {
    let o = acs(&["hermitian", "models:neqs3"]);
    let s = stdout(&o);
    assert!(s.contains("signature (6, 0, 0)"), "{s}");
    assert!(s.contains("difference 0"), "{s}");
}

#[test]
fn obstruct_subcommands() {
    assert_eq!(json(&["obstruct", "dim4", "--chi", "24", "--tau", "-16"])["report"]["verdict"], "EXCLUDED");
    assert_eq!(json(&["obstruct", "cp2sum", "--r", "1", "--s", "21"])["report"]["verdict"], "ADMITS");
    assert_eq!(json(&["obstruct", "cp3", "--r", "-2"])["report"]["verdict"], "EXCLUDED");
    assert_eq!(json(&["obstruct", "typeii", "--m", "3", "--n", "5"])["report"]["verdict"], "ADMITS");
    assert_eq!(json(&["obstruct", "dim8", "--mode", "strong", "--torsion-free", "--c2-2", "720"])["report"]["verdict"], "EXCLUDED");
}

#[test]
fn models_self_test() {
    let o = acs(&["models"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("MISMATCH"));
    let v = json(&["models"]);
    assert!(v["report"]["models"].as_array().unwrap().len() >= 19);
}

#[test]
fn nofor_residuals() {
    assert!(stdout(&acs(&["nofor-residual"])).contains("symmetry: yes"));
    assert!(stdout(&acs(&["nofor-residual", "--W", "w + z^2*zeta"])).contains("symmetry: yes"));
    let v = json(&["nofor-residual", "--Z", "z^2"]);
    assert_eq!(v["report"]["is_symmetry"], false);
    assert_eq!(v["report"]["residuals"][0]["symbolic_zero"], false);
}

#[test]
fn files_and_exit_codes() {
    let chart = temp_file(
        "chart.json",
        r#"{"name": "submax", "complex_dim": 2, "coords": ["z", "w"], "J": {"z": {"dz": "i", "dw_": "w"}, "w": {"dw": "i"}}}"#,
    );
    let o = acs(&["classify", chart.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("DIM4_NONZERO"));

    let lc = temp_file("lc.json", r#"{"complex_dim": 3, "N": [{"i":1,"j":2,"k":2,"c":"1"}, {"i":1,"j":3,"k":3,"c":"0.000000001"}]}"#);
    assert_eq!(acs(&["classify", lc.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(acs(&["classify", lc.to_str().unwrap(), "--strict"]).status.code(), Some(3));

    assert_eq!(acs(&["classify", "models:nope"]).status.code(), Some(1));
    assert_eq!(acs(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(acs(&["estructure", "models:flat2"]).status.code(), Some(2));
    assert_eq!(acs(&["hermitian", "models:ndg1"]).status.code(), Some(2));
    let _ = std::fs::remove_file(chart);
    let _ = std::fs::remove_file(lc);
}
