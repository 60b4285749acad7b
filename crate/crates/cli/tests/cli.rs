use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use dyadic_sharp::experiments::extremal_sd;
use dyadic_sharp::StepFunction;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dyadic-sharp"));
    c.env_remove("DYADIC_SHARP_THREADS");
    c
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn run(cmd: &str, config: &Path, extra: &[&str]) -> Output {
    bin().arg(cmd).arg("--config").arg(config).args(extra).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn step(vals: &[f64]) -> Value {
    let level = vals.len().trailing_zeros();
    let leaves: Vec<Value> =
        vals.iter().enumerate().map(|(k, v)| json!({"level": level, "coords": [k], "value": v})).collect();
    json!({"dim": 1, "leaves": leaves})
}

fn transform(dir: &Path, input: &[f64], op: Value) -> Output {
    write(dir, "f.json", &step(input));
    let cfg = write(dir, "t.json", &json!({"input": "f.json", "operator": op}));
    run("transform", &cfg, &[])
}

fn stdout_function(o: &Output) -> StepFunction {
    StepFunction::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap()
}

#[test]
fn square_of_two_level_haar_is_one() {
    let dir = TempDir::new().unwrap();
    let o = transform(dir.path(), &[1.0, 1.0, -1.0, -1.0], json!({"op": "square"}));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout_function(&o).leaf_values().iter().all(|&v| v == 1.0));
}

#[test]
fn zero_multiplier_gives_zero() {
    let dir = TempDir::new().unwrap();
    let o = transform(
        dir.path(),
        &[0.3, -2.0, 5.0, 1.0],
        json!({"op": "multiplier", "alpha": {"kind": "constant", "value": 0.0}}),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout_function(&o).leaf_values().iter().all(|&v| v == 0.0));
}

#[test]
fn every_operator_runs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "b.json", &step(&[0.25, -0.25, 0.0, 0.0]));
    write(d, "g.json", &step(&[1.0, 0.0, 0.0, 2.0]));
    let shift = json!({"tau": 1, "entries": [
        {"Q": {"level": 0, "coords": [0]}, "Qp": {"level": 0, "coords": [0]}, "Qpp": {"level": 1, "coords": [1]}, "a": 0.5}
    ]});
    write(d, "shift.json", &shift);
    let ops = [
        json!({"op": "hilbert_d"}),
        json!({"op": "shift", "spec": "shift.json"}),
        json!({"op": "gshift", "kind": {"kind": "hilbert"}}),
        json!({"op": "gshift", "kind": {"kind": "haar"}, "eps": 0.25}),
        json!({"op": "maximal_shift", "kind": {"kind": "paraproduct", "symbol": "b.json"}}),
        json!({"op": "paraproduct", "symbol": "b.json"}),
        json!({"op": "multiplier", "alpha": {"kind": "by_level", "values": [1, -1]}}),
        json!({"op": "multiplier", "alpha": {"kind": "table", "entries": [{"cube": {"level": 0, "coords": [0]}, "value": 2}]}}),
        json!({"op": "square"}),
        json!({"op": "maximal"}),
        json!({"op": "wmaximal", "weight": {"gamma": 0.5, "depth": 4}}),
        json!({"op": "vmaximal", "q": 2, "components": ["g.json"]}),
        json!({"op": "orlicz_maximal", "young": {"family": "logbump", "r": 1, "a": 1}}),
        json!({"op": "rdf", "s": 2, "terms": 4}),
    ];
    for op in ops {
        let o = transform(d, &[1.0, 2.0, 0.0, 3.0], op.clone());
        assert_eq!(code(&o), 0, "{op}: {}", String::from_utf8_lossy(&o.stderr));
        stdout_function(&o);
    }
}

#[test]
fn schema_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&transform(d, &[1.0, 2.0], json!({"op": "fourier"}))), 2);
    assert_eq!(code(&transform(d, &[1.0, 2.0], json!({"op": "square", "extra": 1}))), 2);
    assert_eq!(code(&transform(d, &[1.0, 2.0], json!({"op": "gshift", "kind": {"kind": "haar", "x": 0}}))), 2);
    let cfg = write(d, "s.json", &json!({"operator": {"op": "maximal", "q": 2}, "p": 2, "epsilons": [0.5, 0.25]}));
    assert_eq!(code(&run("sweep", &cfg, &["--out", d.join("s.csv").to_str().unwrap()])), 2);
    let cfg = write(d, "w.json", &json!({"p": 2, "weight": {"gamma": 0, "depth": 3, "shape": 1}}));
    assert_eq!(code(&run("audit", &cfg, &[])), 2);
    let cfg = write(d, "x.json", &json!({"input": "f.json", "operator": {"op": "square"}, "typo": true}));
    assert_eq!(code(&run("transform", &cfg, &[])), 2);
    assert_eq!(code(&run("transform", &d.join("missing.json"), &[])), 2);
    let cfg = write(d, "m.json", &json!({"input": "nowhere.json", "operator": {"op": "square"}}));
    assert_eq!(code(&run("transform", &cfg, &[])), 2);
}

#[test]
fn domain_errors_exit_3_without_output() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "f.json", &step(&[1.0, -1.0]));
    let cfg = write(d, "t.json", &json!({"input": "f.json", "operator": {"op": "rdf", "s": 2, "terms": 3}}));
    let out = d.join("out.json");
    let o = run("transform", &cfg, &["--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!out.exists());
}

#[test]
fn unit_weight_audit() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "w.json", &step(&[1.0, 1.0, 1.0, 1.0]));
    let cfg = write(d, "a.json", &json!({"p": 2, "weight": "w.json"}));
    let o = run("audit", &cfg, &[]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, json!({"ap": 1.0}));
}

#[test]
fn two_weight_audit_reports_bump_and_verdicts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "a.json",
        &json!({"p": 3, "two_weight": {
            "u": {"gamma": 1.0, "depth": 8}, "v": {"gamma": 0.5, "depth": 8},
            "a": {"family": "logbump", "r": 3, "a": 2.5}, "b": {"family": "logbump", "r": 1.5, "a": 1}
        }, "classify": [{"family": "power", "r": 2}]}),
    );
    let o = run("audit", &cfg, &[]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["two_weight"]["bump_constant"].as_f64().unwrap().is_finite());
    assert_eq!(v["two_weight"]["a_associate"], "satisfied");
    assert_eq!(v["two_weight"]["b_associate"], "satisfied");
    assert_eq!(v["classify"][0]["verdict"], "satisfied");
}

#[test]
fn audit_domain_errors() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "w.json", &step(&[1.0, 0.0]));
    let cfg = write(d, "a.json", &json!({"p": 1, "weight": {"gamma": 0, "depth": 2}}));
    assert_eq!(code(&run("audit", &cfg, &[])), 3);
    let cfg = write(d, "b.json", &json!({"p": 2, "weight": "w.json"}));
    assert_eq!(code(&run("audit", &cfg, &[])), 3);
}

#[test]
fn sweep_with_one_point_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let cfg = write(d, "s.json", &json!({"operator": {"op": "maximal"}, "p": 2, "epsilons": [0.25]}));
    let out = d.join("s.csv");
    let o = run("sweep", &cfg, &["--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert_eq!(fs::read_dir(d).unwrap().count(), 1);
}

#[test]
fn sweep_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let cfg = write(
        d,
        "s.json",
        &json!({"operator": {"op": "square"}, "p": 3, "epsilons": [0.25, 0.125, 0.0625, 0.03125],
                "family": {"name": "buckley", "depth": 24}}),
    );
    let (a, b) = (d.join("a.csv"), d.join("b.csv"));
    assert_eq!(code(&run("sweep", &cfg, &["--out", a.to_str().unwrap(), "--seed", "5", "--threads", "1"])), 0);
    let o = bin()
        .args(["sweep", "--seed", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&b)
        .env("DYADIC_SHARP_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let sa = fs::read_to_string(d.join("a.csv.summary.json")).unwrap();
    assert_eq!(sa, fs::read_to_string(d.join("b.csv.summary.json")).unwrap());
    let summary: Value = serde_json::from_str(&sa).unwrap();
    assert_eq!(summary["points"], 4);
    assert_eq!(summary["seed"], 5);
    assert!(summary["fit"]["slope"].is_f64());
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "epsilon,ap_constant,ratio,log_ap,log_ratio");
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn extremal_matches_library() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "e.json", &json!({"j": 20, "ps": [4, 8, 16, 32, 64]}));
    let o = run("extremal", &cfg, &[]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let lib = extremal_sd(20, &[4.0, 8.0, 16.0, 32.0, 64.0]).unwrap();
    assert_eq!(v["fit"]["slope"].as_f64().unwrap(), lib.fit.slope);
    let cfg = write(dir.path(), "e1.json", &json!({"j": 1, "ps": [4, 8]}));
    assert_eq!(code(&run("extremal", &cfg, &[])), 3);
}

#[test]
fn lerner_verify_on_constant() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "c.json", &step(&[2.5, 2.5, 2.5, 2.5]));
    let cfg = write(d, "l.json", &json!({"input": "c.json"}));
    let out = d.join("l.out.json");
    let o = run("lerner-verify", &cfg, &["--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "max residual 0e0 pass\n");
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["report"]["pass"], true);
    assert_eq!(v["report"]["max_residual"], 0.0);
}

#[test]
fn bad_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "e.json", &json!({"j": 4, "ps": [2, 4]}));
    assert_eq!(code(&run("extremal", &cfg, &["--threads", "0"])), 2);
    let o = bin().arg("extremal").arg("--config").arg(&cfg).env("DYADIC_SHARP_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}
