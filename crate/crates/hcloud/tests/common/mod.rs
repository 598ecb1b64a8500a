#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn hcloud(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcloud"))
        .args(args)
        .output()
        .expect("spawn hcloud")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn read_value(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

pub fn write_value(path: &Path, v: &Value) {
    fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

/// The bundled bursty spec cut down to `horizon` seconds.
pub fn short_spec(dir: &Path, horizon: f64) -> PathBuf {
    let mut spec = read_value(&data("bursty_spec.json"));
    spec["horizon"] = json!(horizon);
    spec["burst_windows"] = json!([{ "start": horizon / 3.0, "end": horizon / 2.0 }]);
    let p = dir.join("spec.json");
    write_value(&p, &spec);
    p
}

/// The bundled experiment over a short generated workload with the given
/// roster; returns the config path.
pub fn short_experiment(dir: &Path, horizon: f64, episodes: usize, policies: Value) -> PathBuf {
    let spec = short_spec(dir, horizon);
    let mut cfg = read_value(&data("experiment.json"));
    let obj = cfg.as_object_mut().unwrap();
    obj.insert("workload".into(), json!({ "spec": spec }));
    obj.remove("base_workload");
    obj.insert("policies".into(), policies);
    cfg["training"]["episodes"] = json!(episodes);
    cfg["output_dir"] = json!(dir.join("out"));
    let p = dir.join("experiment.json");
    write_value(&p, &cfg);
    p
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
