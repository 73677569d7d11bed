use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use trace_product::decompose::DecompositionResult;
use trace_product::extend::InfeasibilityCertificate;
use trace_product::{CMatrix, LinMap, SpaceTag};

struct Run {
    code: i32,
    out: Value,
    raw: String,
}

fn tpp(args: &[&str], stdin: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tpp"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    let raw = String::from_utf8(o.stdout).unwrap();
    let out = serde_json::from_str(&raw).unwrap_or(Value::Null);
    Run { code: o.status.code().unwrap(), out, raw }
}

fn identity_maps(m: usize, n: usize) -> String {
    serde_json::to_string(&vec![LinMap::identity(SpaceTag::full(n)); m]).unwrap()
}

#[test]
fn identity_triple_passes() {
    let r = tpp(&["check", "--tol", "1e-9", "--mode", "exhaustive"], &identity_maps(3, 2));
    assert_eq!(r.code, 0);
    assert_eq!(r.out["pass"], true);
    assert_eq!(r.out["tuples_evaluated"], 64);
}

#[test]
fn failing_check_exits_one() {
    let scaled = LinMap::new(SpaceTag::full(2), SpaceTag::full(2), CMatrix::identity(4).scale(2.0.into())).unwrap();
    let doc = serde_json::to_string(&[scaled, LinMap::identity(SpaceTag::full(2))]).unwrap();
    let r = tpp(&["check"], &doc);
    assert_eq!(r.code, 1);
    assert_eq!(r.out["pass"], false);
}

#[test]
fn generate_then_decompose() {
    let g = tpp(&["generate", "--family", "MnChain", "--n", "3", "--m", "4", "--seed", "7"], "");
    assert_eq!(g.code, 0);
    let d = tpp(&["decompose"], &g.raw);
    assert_eq!(d.code, 0, "{}", d.raw);
    let res: DecompositionResult = serde_json::from_str(&d.raw).unwrap();
    assert!(res.reconstruction_residual <= 1e-7);
    assert_eq!(res.form.tag(), "MnChain");
}

#[test]
fn every_family_pipes_through() {
    let cases: &[&[&str]] = &[
        &["--family", "MnChain", "--m", "3"],
        &["--family", "HermOdd", "--m", "3"],
        &["--family", "HermOdd", "--m", "3", "--positive"],
        &["--family", "HermEven", "--m", "4"],
        &["--family", "PnPair", "--transpose"],
        &["--family", "PnPair", "--field", "real"],
        &["--family", "SymOdd", "--m", "3"],
        &["--family", "SymOdd", "--m", "5", "--field", "real"],
        &["--family", "SymEven", "--m", "4"],
        &["--family", "SymEven", "--m", "2", "--field", "real", "--positive"],
        &["--family", "DiagPair"],
        &["--family", "DiagChain", "--m", "4"],
    ];
    for n in 1..=4 {
        for case in cases {
            let mut args = vec!["generate", "--seed", "3"];
            let ns = n.to_string();
            args.extend_from_slice(&["--n", &ns]);
            args.extend_from_slice(case);
            let start = Instant::now();
            let g = tpp(&args, "");
            assert_eq!(g.code, 0, "{args:?}: {}", g.raw);
            let c = tpp(&["check", "--tol", "1e-8"], &g.raw);
            assert_eq!(c.code, 0, "{args:?}: {}", c.raw);
            let d = tpp(&["decompose", "--tol", "1e-7"], &g.raw);
            assert_eq!(d.code, 0, "{args:?}: {}", d.raw);
            assert!(start.elapsed() < Duration::from_secs(10));
        }
    }
}

#[test]
fn certify_corner_compression() {
    let corner = LinMap::from_fn(SpaceTag::full(3), SpaceTag::full(2), |a| {
        CMatrix::from_fn(2, 2, |i, j| a.get(i, j))
    })
    .unwrap();
    let doc = serde_json::to_string(&[corner.clone(), corner]).unwrap();
    let r = tpp(&["certify", "--n", "3", "--k", "2"], &doc);
    assert_eq!(r.code, 0);
    let cert: InfeasibilityCertificate = serde_json::from_str(&r.raw).unwrap();
    assert!(cert.gram_lhs_rank < 9 && cert.valid);

    let r = tpp(&["certify", "--n", "4"], &doc);
    assert_eq!(r.code, 2);
    assert_eq!(r.out["code"], "usage");
}

#[test]
fn extend_output_checks_on_the_larger_space() {
    let corner = LinMap::from_fn(SpaceTag::full(1), SpaceTag::full(2), |a| a.corner_embed(2)).unwrap();
    let doc = serde_json::to_string(&[corner.clone(), corner]).unwrap();
    let e = tpp(&["extend"], &doc);
    assert_eq!(e.code, 0, "{}", e.raw);
    let c = tpp(&["check", "--tol", "1e-8"], &e.raw);
    assert_eq!(c.code, 0);
    assert_eq!(c.out["spaces"][0]["n"], 2);

    // No extension from M_2 into M_1: the error carries a certificate.
    let down = LinMap::from_fn(SpaceTag::full(2), SpaceTag::full(1), |a| CMatrix::from_fn(1, 1, |_, _| a.get(0, 0))).unwrap();
    let r = tpp(&["extend"], &serde_json::to_string(&[down.clone(), down]).unwrap());
    assert_eq!(r.code, 1);
    assert_eq!(r.out["code"], "infeasible");
    assert_eq!(r.out["context"]["certificate"]["gram_lhs_rank"], 1);
}

#[test]
fn dual_is_lossless_json() {
    let g = tpp(&["generate", "--family", "DiagPair", "--n", "3", "--seed", "11"], "");
    let first = json!([g.out["maps"][0]]).to_string();
    let d = tpp(&["dualize"], &first);
    assert_eq!(d.code, 0, "{}", d.raw);
    let psi: LinMap = serde_json::from_str(&d.raw).unwrap();
    let want: LinMap = serde_json::from_value(g.out["maps"][1].clone()).unwrap();
    assert!(psi.rel_distance(&want) < 1e-12);
    assert_eq!(serde_json::from_str::<LinMap>(&serde_json::to_string(&psi).unwrap()).unwrap(), psi);
}

#[test]
fn space_flag_restricts() {
    // Identity on M_2 read as maps on H_2.
    let r = tpp(&["decompose", "--space", "Hermitian", "--m", "3"], &identity_maps(3, 2));
    assert_eq!(r.code, 0, "{}", r.raw);
    assert_eq!(r.out["form"]["tag"], "HermOdd");
    let r = tpp(&["decompose", "--m", "4"], &identity_maps(3, 2));
    assert_eq!(r.code, 2);
}

#[test]
fn weighted_report_and_control() {
    let pd = json!({"kind": "PosDef", "field": "complex", "n": 2});
    let id = serde_json::to_value(LinMap::identity(serde_json::from_value(pd).unwrap())).unwrap();
    let sqrt = json!({"inner": 0.5, "map": id, "outer": 1.0});
    let ok = tpp(&["weighted", "--alpha", "2,2", "--beta", "1,1", "--trials", "200"], &json!([sqrt, sqrt]).to_string());
    assert_eq!(ok.code, 0, "{}", ok.raw);
    let bad = tpp(&["weighted", "--alpha", "1,1", "--beta", "2,2", "--trials", "200"], &json!([id, id]).to_string());
    assert_eq!(bad.code, 1);
    assert!(bad.out["max_residual"].as_f64().unwrap() >= 1e-2);
    let red = tpp(&["weighted", "--alpha", "2,2", "--beta", "1,1", "--reduce"], &json!([sqrt, sqrt]).to_string());
    assert_eq!(red.out["maps"][0]["inner"], 0.5);
    assert_eq!(red.out["maps"][0]["outer"], 2.0);
}

#[test]
fn errors_are_json_objects() {
    for (args, input) in [(&["check"][..], "{"), (&["check"][..], "[]"), (&["check", "--tol", "0"][..], ""), (&["frobnicate"][..], "")] {
        let r = tpp(args, input);
        assert_eq!(r.code, 2, "{args:?}");
        let o = r.out.as_object().unwrap();
        assert!(o["code"].is_string() && o["message"].is_string() && o["context"].is_object());
    }
    let r = tpp(&["check"], "{");
    assert_eq!(r.out["code"], "parse");
}
