use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn approxcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approxcat")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
    p4: String,
    p4_reversed: String,
    triangle_plus_point: String,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    Fixture {
        p4: write(&root, "p4.txt", "4 3\n0 1\n1 2\n2 3\n"),
        p4_reversed: write(&root, "p4b.json", r#"{"n": 4, "edges": [[0, 2], [1, 2], [1, 3]]}"#),
        triangle_plus_point: write(&root, "k3k1.txt", "4 3\n0 1\n1 2\n0 2\n"),
        root,
        _dir: dir,
    }
}

#[test]
fn usage_errors_exit_one_and_input_errors_exit_two() {
    let fx = fixture();
    assert_eq!(approxcat(&["ac"]).status.code(), Some(1));
    assert_eq!(approxcat(&["ac", &fx.p4, &fx.p4, "-d", "1"]).status.code(), Some(1));
    assert_eq!(approxcat(&["--help"]).status.code(), Some(0));
    let missing = fx.root.join("missing.txt");
    assert_eq!(approxcat(&["ac", missing.to_str().unwrap(), &fx.p4]).status.code(), Some(2));
    let bad = write(&fx.root, "bad.txt", "3 1\n0 7\n");
    assert_eq!(approxcat(&["oracle", &bad, &fx.p4]).status.code(), Some(2));
    assert_eq!(approxcat(&["ac", &fx.p4, &fx.p4, "--primes", "9"]).status.code(), Some(2));
    let five = write(&fx.root, "five.txt", "5 0\n");
    assert_eq!(approxcat(&["ac", &fx.p4, &five]).status.code(), Some(2));
}

#[test]
fn identical_inputs_come_with_the_identity_witness() {
    let fx = fixture();
    let json = fx.root.join("same.json");
    let out = approxcat(&["ac", &fx.p4, &fx.p4, "--emit-json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["overall"], "isomorphic-with-witness");
    assert_eq!(report["certificate"]["permutation"], serde_json::json!([0, 1, 2, 3]));
}

#[test]
fn relabeled_path_gets_a_verified_witness() {
    let fx = fixture();
    let json = fx.root.join("relabeled.json");
    let out = approxcat(&["ac", &fx.p4, &fx.p4_reversed, "--emit-json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["overall"], "isomorphic-with-witness");
    for r in report["results"].as_array().unwrap() {
        assert_eq!(r["verdict"], "isomorphic");
        assert_eq!(r["certificate_verified"], true);
    }
}

#[test]
fn path_and_triangle_are_separated() {
    let fx = fixture();
    let out = approxcat(&["ac", &fx.p4, &fx.triangle_plus_point, "--emit-json", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("overall: nonisomorphic"));
    let json = &text[text.find('{').unwrap()..];
    let report: Value = serde_json::from_str(json).unwrap();
    assert_eq!(report["overall"], "nonisomorphic");
    assert_eq!(report["parameters"]["primes"], serde_json::json!([2, 5, 7]));
    assert!(report["certificate"]["kind"].is_string());
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let fx = fixture();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = fx.root.join(name);
        let out = approxcat(&[
            "ac",
            &fx.p4,
            &fx.triangle_plus_point,
            "--primes",
            "5,7",
            "--seed",
            "3",
            "--emit-json",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        strip_timing(&mut v);
        reports.push(v);
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0]["parameters"]["primes"], serde_json::json!([5, 7]));
}

#[test]
fn cfi_generation_writes_both_twists_of_k33() {
    let fx = fixture();
    let dir = fx.root.join("cfi");
    let out = approxcat(&["cfi-gen", "k33", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut twisted_flags = Vec::new();
    for name in ["k33-plain.json", "k33-twisted.json"] {
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap();
        assert_eq!(doc["n"], 60);
        twisted_flags.push(doc["cfi"]["twisted"].as_bool().unwrap());
    }
    assert_eq!(twisted_flags, vec![false, true]);

    let plain = dir.join("k33-plain.json");
    let twisted = dir.join("k33-twisted.json");
    let (plain, twisted) = (plain.to_str().unwrap(), twisted.to_str().unwrap());
    let wl = approxcat(&["wl", plain, twisted, "-k", "1"]);
    assert_eq!(wl.status.code(), Some(0));
    assert!(stdout(&wl).contains("inconclusive"));

    let ac = approxcat(&["ac", plain, twisted, "--primes", "2"]);
    assert_eq!(ac.status.code(), Some(0));
    let text = stdout(&ac);
    assert!(text.contains("rank functor"), "{text}");
    assert!(text.contains("overall: nonisomorphic"), "{text}");
}

#[test]
fn generated_documents_round_trip_through_the_oracle() {
    let fx = fixture();
    let out = approxcat(&["cfi-gen", "c5", "--twist", "plain"]);
    assert_eq!(out.status.code(), Some(0));
    let path = write(&fx.root, "c5.json", &stdout(&out));
    let oracle = approxcat(&["oracle", &path, &path, "--emit-json", "-"]);
    assert_eq!(oracle.status.code(), Some(0));
    assert!(stdout(&oracle).contains("\"isomorphic\": true"));
}

#[test]
fn multiplicative_group_demo_reports_both_examples() {
    let out = approxcat(&["demo-gm"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("Hom_5 has dimension 0"));
    assert!(text.contains("Hom_5 has dimension 2"));
    assert_eq!(text.matches(": ok").count(), 2);
    let larger = stdout(&approxcat(&["demo-gm", "-p", "31", "-d", "5"]));
    assert!(larger.contains("evaluation at t = 4 is a morphism"));
}

#[test]
fn functor_and_formula_commands_distinguish_the_pair() {
    let fx = fixture();
    let out = approxcat(&["functor", &fx.p4, &fx.triangle_plus_point, "--expr", "contract(tensor(q, full:U))", "-p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("-> distinguished"));
    let bad = approxcat(&["functor", &fx.p4, &fx.p4, "--expr", "tensor(q"]);
    assert_eq!(bad.status.code(), Some(2));

    let triangle = "(exists x1 (exists x2 (and (E x0 x1) (E x1 x2) (E x0 x2))))";
    let out = approxcat(&["formula", &fx.p4, &fx.triangle_plus_point, "--formula", triangle]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.matches("matches").count(), 2);
    assert!(text.contains("distinguishes"));
}
