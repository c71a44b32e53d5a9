use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moebius-energy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SQUARE: &str = r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#;

#[test]
fn square_kim_kusner_is_one() {
    let dir = TempDir::new().unwrap();
    let sq = write(dir.path(), "square.json", SQUARE);
    let v = stdout_json(&run(&["energy", "--polygon", s(&sq), "--energy", "kk"]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = stdout_json(&run(&["energy", "--polygon", s(&sq), "--energy", "simon"]));
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn csv_polygons_are_accepted() {
    let dir = TempDir::new().unwrap();
    let sq = write(dir.path(), "square.csv", "x0,x1\n0,0\n1,0\n1,1\n0,1\n");
    let out = run(&["energy", "--polygon", s(&sq), "--energy", "kk", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "kk");
    assert!((row[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn circle_continuous_energy_is_four() {
    let v = stdout_json(&run(&["energy", "--curve", "circle:R=2", "--energy", "continuous-E", "--panels", "256"]));
    assert!((v["value"].as_f64().unwrap() - 4.0).abs() < 1e-4);
    assert!(v["E_cos"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn inscribed_regular_polygon_has_zero_ecos() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("p16.json");
    let out = run(&["inscribe", "--curve", "circle", "--m", "16", "--out", s(&p)]);
    assert!(out.status.success());
    let v = stdout_json(&run(&["energy", "--polygon", s(&p), "--energy", "ecos", "--terms"]));
    assert!(v["value"].as_f64().unwrap().abs() <= 1e-10);
    assert_eq!(v["terms"].as_array().unwrap().len(), 16 * 13);
}

#[test]
fn invariance_passes_and_fails_on_tolerance() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("e.json");
    assert!(run(&["inscribe", "--curve", "ellipse:a=2,b=1", "--m", "12", "--out", s(&p)]).status.success());
    let v = stdout_json(&run(&["invariance", "--polygon", s(&p), "--n", "20", "--seed", "3"]));
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-8);
    let out = run(&["invariance", "--polygon", s(&p), "--n", "20", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gamma_errors_decrease() {
    let out = run(&[
        "gamma", "--curve", "ellipse:a=2,b=1", "--ms", "16,32,64,128", "--panels", "256", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "rel_error").unwrap();
    let errors: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 4);
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn gamma_writes_svg() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("plot.svg");
    let out = run(&["gamma", "--curve", "circle", "--ms", "16,32", "--energy", "kk", "--svg", s(&svg)]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn minimize_trace_is_non_increasing() {
    let dir = TempDir::new().unwrap();
    let start = write(
        dir.path(),
        "hex.json",
        r#"{"dim":2,"vertices":[[1,0],[0.55,0.9],[-0.5,0.8],[-1.1,0],[-0.5,-0.85],[0.45,-0.9]]}"#,
    );
    let fin = dir.path().join("final.json");
    let out = run(&[
        "minimize", "--polygon", s(&start), "--energy", "ecos", "--max-iter", "40", "--format", "csv",
        "--final-polygon", s(&fin),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let energies: Vec<f64> =
        text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(energies.len() > 1);
    assert!(energies.windows(2).all(|w| w[1] <= w[0]), "{energies:?}");
    let v = stdout_json(&run(&["energy", "--polygon", s(&fin), "--energy", "ecos"]));
    assert!(v["value"].as_f64().unwrap() < energies[0]);
}

#[test]
fn minimize_json_embeds_final_polygon() {
    let dir = TempDir::new().unwrap();
    let sq = write(dir.path(), "square.json", SQUARE);
    let v = stdout_json(&run(&["minimize", "--polygon", s(&sq), "--energy", "ecos", "--max-iter", "2"]));
    assert_eq!(v["final_polygon"]["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(v["energy"], "ecos");
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["energy", "--polygon", s(&missing), "--energy", "kk"]).status.code(), Some(2));
    assert_eq!(run(&["energy", "--curve", "spiral", "--energy", "continuous-E"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let bowtie = write(dir.path(), "bowtie.json", r#"{"dim":2,"vertices":[[0,0],[1,1],[1,0],[0,1]]}"#);
    let out = run(&["energy", "--polygon", s(&bowtie), "--energy", "simon"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());

    let sq = write(dir.path(), "square.json", SQUARE);
    let t = write(dir.path(), "t.json", r#"[{"type":"inversion","center":[0,0],"radius":1}]"#);
    assert_eq!(run(&["invariance", "--polygon", s(&sq), "--transform", s(&t)]).status.code(), Some(4));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("t.json");
    assert!(run(&["inscribe", "--curve", "torus:p=2,q=3", "--m", "40", "--out", s(&p)]).status.success());
    let a = run(&["invariance", "--polygon", s(&p), "--n", "30", "--seed", "11", "--threads", "1"]);
    let b = run(&["invariance", "--polygon", s(&p), "--n", "30", "--seed", "11", "--threads", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["energy", "--polygon", s(&p), "--energy", "ecos", "--threads", "1"]);
    let b = run(&["energy", "--polygon", s(&p), "--energy", "ecos", "--threads", "3"]);
    assert_eq!(a.stdout, b.stdout);
}
