use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};
use shtuka_core::fq::Fq;
use shtuka_core::hodge_pink::{compute_q_x_with, fil1, l_zero_laurent, QxOptions};
use shtuka_core::json;
use shtuka_core::shtuka::{make_universal_point, FixedDatum, RZCoords};
use shtuka_core::trunc::{TruncElem, TruncRing};

fn shtuka(args: &[&str], stdin: Option<&str>) -> Output {
    shtuka_env(args, stdin, &[])
}

fn shtuka_env(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shtuka"));
    cmd.args(args).env_remove("SHTUKA_CONFIG").stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn text(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

#[test]
fn universal_point_passes() {
    let out = shtuka(&["universal", "--q", "2", "--n", "1", "--i", "0", "--j", "0", "--h", "h"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["passed"], json!(true));
    assert_eq!(v["coords"], json!({"i": 0, "j": 0, "n": 1, "h": {"N": 2, "q": 2, "terms": [[0, 1, 1]]}}));

    let out = shtuka(&["universal", "--q", "3", "--n", "0", "--i", "-1", "--j", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["triple"]["ring"]["N"], json!(1));
}

#[test]
fn unit_h_is_a_usage_error() {
    let out = shtuka(&["universal", "--q", "2", "--n", "1", "--h", "1"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_eq!(shtuka(&["universal", "--q", "2", "--n", "1", "--h", "x"], None).status.code(), Some(2));
    assert_eq!(shtuka(&["universal", "--q", "6", "--n", "1"], None).status.code(), Some(2));
    assert_eq!(shtuka(&["classify"], Some("not json")).status.code(), Some(2));
    assert_eq!(shtuka(&["classify"], Some("{\"n\": 1}")).status.code(), Some(2));
}

#[test]
fn classify_round_trips_universal_output() {
    for (q, n, h) in [("2", "2", "h"), ("3", "1", "h+zeta*h"), ("4", "1", "2h")] {
        let uni = shtuka(&["universal", "--q", q, "--n", n, "--i", "1", "--j", "-2", "--h", h], None);
        let coords = stdout_json(&uni)["coords"].clone();
        let out = shtuka(&["classify"], Some(text(&uni)));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout_json(&out), coords);
    }
}

#[test]
fn twisted_and_shifted_input_classifies_to_shifted_coords() {
    let uni = shtuka(&["universal", "--q", "3", "--n", "2", "--i", "1", "--j", "-1", "--h", "h+zeta*h^2"], None);
    let shifted = shtuka(&["jact", "--a", "2", "--b", "-3"], Some(text(&uni)));
    let twisted = shtuka(&["twist", "--seed", "11"], Some(text(&shifted)));
    assert_eq!(twisted.status.code(), Some(0));
    assert_eq!(shtuka(&["verify"], Some(text(&twisted))).status.code(), Some(1), "a twist changes τ mod I");
    let out = stdout_json(&shtuka(&["classify"], Some(text(&twisted))));
    assert_eq!((out["i"].clone(), out["j"].clone()), (json!(3), json!(-4)));
    assert_eq!(out["h"], stdout_json(&uni)["coords"]["h"]);
}

#[test]
fn corrupted_tau_fails_membership() {
    let uni = stdout_json(&shtuka(&["universal", "--q", "3", "--n", "1", "--h", "h"], None));
    let mut triple = uni["triple"].clone();
    let entry = &mut triple["tau"]["entries"][0][1]["coeffs"];
    entry.as_array_mut().unwrap().push(json!([0, {"N": 3, "q": 3, "terms": [[1, 0, 1]]}]));
    let input = triple.to_string();
    let out = shtuka(&["classify"], Some(&input));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not in the functor"));
    let out = shtuka(&["verify"], Some(&input));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["in_functor"], json!(false));
}

#[test]
fn carlitz_tables() {
    let v = stdout_json(&shtuka(&["carlitz", "log", "--q", "2", "--terms", "2"], None));
    // 1, 1/(ζ − ζ²), 1/((ζ − ζ²)(ζ − ζ⁴)) with denominators low to high
    let want = json!({"kind": "log", "q": 2, "coeffs": [
        {"num": [1], "den": [1]},
        {"num": [1], "den": [0, 1, 1]},
        {"num": [1], "den": [0, 0, 1, 1, 0, 1, 1]},
    ]});
    assert_eq!(v, want);
    let v = stdout_json(&shtuka(&["carlitz", "exp", "--q", "3", "--terms", "0"], None));
    assert_eq!(v["coeffs"], json!([{"num": [1], "den": [1]}]));
    // e_2 = 1/((ζ⁴ − ζ)(ζ⁴ − ζ²)) and ζ⁸ − ζ⁶ − ζ⁵ + ζ³ ≡ ζ³ + ζ⁵ + ζ⁶ + ζ⁸ mod 2
    let v = stdout_json(&shtuka(&["carlitz", "exp", "--q", "2", "--terms", "2"], None));
    assert_eq!(v["coeffs"][2], json!({"num": [1], "den": [0, 0, 0, 1, 0, 1, 1, 0, 1]}));
}

#[test]
fn period_leading_term_and_shift() {
    let f = Fq::of_size(2).unwrap();
    let v = stdout_json(&shtuka(&["period", "--q", "2", "--k", "0", "--l", "0", "--prec", "12", "--deg", "2"], None));
    let l0: Vec<Value> = l_zero_laurent(&f, 12).terms().map(|(e, c)| json!([e, c])).collect();
    assert_eq!(v["value"], json!([[1, l0]]));
    let shifted = stdout_json(&shtuka(&["period", "--q", "2", "--k", "1", "--l", "0", "--prec", "12", "--deg", "2"], None));
    let l0: Vec<Value> = l_zero_laurent(&f, 13).terms().map(|(e, c)| json!([e - 1, c])).collect();
    assert_eq!(shifted["value"], json!([[1, l0]]));
    assert_eq!(shtuka(&["period", "--q", "2", "--k", "0", "--l", "0", "--deg", "0"], None).status.code(), Some(2));
}

#[test]
fn fil1_matches_the_library() {
    let uni = shtuka(&["universal", "--q", "2", "--n", "2", "--i", "1", "--j", "0", "--h", "h"], None);
    let out = shtuka(&["fil1", "--prec", "12"], Some(text(&uni)));
    assert_eq!(out.status.code(), Some(0));
    let r = TruncRing::new(&Fq::of_size(2).unwrap(), 4).unwrap();
    let t = make_universal_point(&RZCoords::new(1, 0, TruncElem::h(&r), 2).unwrap()).unwrap();
    let lattice = compute_q_x_with(&t, &FixedDatum::standard(r.field()), QxOptions { zeta_prec: 12, ..QxOptions::default() }).unwrap();
    assert_eq!(stdout_json(&out), json::grass_line(&fil1(&lattice).unwrap()));
}

#[test]
fn output_is_deterministic() {
    let uni = shtuka(&["universal", "--q", "3", "--n", "1", "--h", "h"], None);
    let a = shtuka(&["twist", "--seed", "5"], Some(text(&uni)));
    let b = shtuka(&["twist", "--seed", "5"], Some(text(&uni)));
    assert_eq!(a.stdout, b.stdout);
    let c = shtuka(&["twist", "--seed", "6"], Some(text(&uni)));
    assert_ne!(a.stdout, c.stdout);
    let args = ["selfcheck", "--seed", "3", "--trials", "2", "--q", "2", "--n", "1"];
    let s1 = shtuka(&args, None);
    assert_eq!(s1.status.code(), Some(0));
    assert_eq!(s1.stdout, shtuka(&args, None).stdout);
}

#[test]
fn sabotaged_selfcheck_fails() {
    let out = shtuka(&["selfcheck", "--trials", "2", "--sabotage"], None);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["passed"], json!(false));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"q": 4, "e": 2, "modulus": [1, 1, 1], "zeta_prec": 6, "seed": 1}"#).unwrap();
    let p = path.to_str().unwrap();
    let v = stdout_json(&shtuka_env(&["period", "--k", "0", "--l", "0", "--deg", "2"], None, &[("SHTUKA_CONFIG", p)]));
    assert_eq!((v["q"].clone(), v["zeta_prec"].clone()), (json!(4), json!(6)));
    let v = stdout_json(&shtuka(&["--config", p, "universal", "--n", "1"], None));
    assert_eq!(v["triple"]["ring"]["modulus"], json!([1, 1, 1]));

    std::fs::write(&path, r#"{"q": 3, "zeta_prec": 0}"#).unwrap();
    assert_eq!(shtuka(&["--config", p, "period", "--k", "0", "--l", "0", "--deg", "2"], None).status.code(), Some(2));
    std::fs::write(&path, r#"{"q": 3, "colour": 1}"#).unwrap();
    assert_eq!(shtuka(&["--config", p, "carlitz", "log", "--terms", "1"], None).status.code(), Some(2));
}
