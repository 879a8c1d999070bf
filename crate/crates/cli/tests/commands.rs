//! Subcommands, output formats and exit codes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use fourfold_cli::{run, Outcome};
use fourfold_core::obstruction::hitchin_thorpe;
use fourfold_core::InvariantRecord;

fn fourfold(args: &[&str]) -> Outcome {
    run(std::iter::once("fourfold").chain(args.iter().copied()))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn eval_json_reports_record_and_flags() {
    let out = fourfold(&["eval", "Xk(2)", "--json"]);
    assert_eq!(out.code, 0);
    let v = json(&out);
    assert_eq!(v["chi"], 152);
    assert_eq!(v["tau"], -96);
    assert_eq!(v["b2plus"], 27);
    let k3 = json(&fourfold(&["eval", "K3", "--json"]));
    assert_eq!(k3["flags"]["spin"], "yes");
    assert_eq!(k3["flags"]["parity"], "even");
}

#[test]
fn eval_text_lists_derived_invariants() {
    let out = fourfold(&["eval", "cover(CP2, d=2, branch=8)"]);
    assert_eq!(out.code, 0);
    for line in ["chi = 46", "tau = -30", "c1^2 = 2", "b2+ = 7", "b2- = 37"] {
        assert!(out.stdout.lines().any(|l| l == line), "{line}");
    }
}

#[test]
fn hitchin_thorpe_line_and_exit_codes() {
    let ok = fourfold(&["check", "ht", "K3"]);
    assert_eq!(ok.code, 0);
    assert_eq!(ok.stdout.lines().next(), Some("2χ+3τ=0, 2χ−3τ=96, ok"));
    // chi(5 S1xS3) = -8.
    let bad = fourfold(&["check", "ht", "5*S1xS3"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.lines().next().unwrap().ends_with("violated"));
}

#[test]
fn homeomorphism_exit_codes() {
    assert_eq!(fourfold(&["check", "homeo", "cover(CP2, d=2, branch=8)", "7 CP2 # 37 CP2b"]).code, 0);
    assert_eq!(fourfold(&["check", "homeo", "K3", "CP2"]).code, 1);
    let v = json(&fourfold(&["check", "homeo", "X442", "4 K3 # 7 S2xS2", "--json"]));
    assert_eq!(v["verdict"], "homeomorphic");
}

#[test]
fn einstein_check_finds_lebrun_split() {
    let out = fourfold(&["check", "einstein", "cover(CP2, d=2, branch=8) # Sd(2) # 3 CP2b"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("einstein_obstructed"));
    let spin = fourfold(&["check", "einstein", "X442 # Y(1) # E(2) # Sd(3)", "--json"]);
    assert_eq!(json(&spin)["verdict"], "einstein_obstructed");
    let none = fourfold(&["check", "einstein", "CP2"]);
    assert_eq!(none.code, 0);
    assert!(none.stdout.starts_with("no_verdict"));
}

#[test]
fn normalize_text_and_json() {
    let out = fourfold(&["normalize", "2*cover(CP2, d=2, branch=8) # 2*CP2b # S2xS2"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().last(), Some("15 CP2 # 77 CP2b"));
    let v = json(&fourfold(&["normalize", "X442 # S2xS2", "--json"]));
    assert_eq!(v["normal_form"], "4 K3 # 8 S2xS2");
    assert_eq!(v["canonical"], true);
    assert_eq!(v["mode"], "spin");
}

#[test]
fn wall_constant_changes_spin_rewriting() {
    let one = json(&fourfold(&["normalize", "X442 # S2xS2", "--json"]));
    let two = json(&fourfold(&["--wall-n0", "2", "normalize", "X442 # S2xS2", "--json"]));
    assert_eq!(one["canonical"], true);
    assert_eq!(two["canonical"], false);
}

#[test]
fn enumerate_csv_schema() {
    let out = fourfold(&["enumerate", "free-actions", "--d", "2", "--eps", "1/10", "--c", "1", "--bounds", "6,4"]);
    assert_eq!(out.code, 0);
    let mut lines = out.stdout.lines();
    assert_eq!(lines.next(), Some("n,m,k,verdict"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r.split(',').count(), 4);
        assert!(r.ends_with("einstein_obstructed"));
    }
    let bk = fourfold(&["enumerate", "bk", "--eps", "3/20", "--c", "1", "--bounds", "2,30"]);
    assert_eq!(bk.stdout.lines().next(), Some("x,y,note"));
}

#[test]
fn enumerate_json_and_query_agree() {
    let a = json(&fourfold(&[
        "enumerate", "free-actions", "--d", "3", "--eps", "1/10", "--c", "1", "--bounds", "12,6", "--format", "json",
    ]));
    let b = json(&fourfold(&["enumerate", "query", "region(d=3, eps=1/10, c=1, bounds=(12,6))", "--format", "json"]));
    assert_eq!(a, b);
    assert!(a.as_array().unwrap().iter().all(|p| p["blueprint"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true)));
}

#[test]
fn config_file_sets_constants() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fourfold.conf");
    std::fs::write(&path, "# large c empties small regions\nc_eps = 1000\n").unwrap();
    let p = path.to_str().unwrap();
    let out = fourfold(&["--config", p, "enumerate", "free-actions", "--d", "2", "--bounds", "10,10"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "n,m,k,verdict\n");
    std::fs::write(&path, "c_eps 1000\n").unwrap();
    let bad = fourfold(&["--config", p, "eval", "K3"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("line 1"));
}

#[test]
fn certificate_files_are_rechecked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let cert = hitchin_thorpe(&InvariantRecord::simply(24, -16)).to_json();
    std::fs::write(&path, cert.to_string()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(fourfold(&["check", "cert", p]).code, 0);
    let forged = cert.to_string().replace("= 96", "= 97");
    std::fs::write(&path, forged).unwrap();
    assert_eq!(fourfold(&["check", "cert", p]).code, 3);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(fourfold(&[]).code, 2);
    assert_eq!(fourfold(&["frobnicate"]).code, 2);
    let syntax = fourfold(&["eval", "CP2 # # K3"]);
    assert_eq!(syntax.code, 2);
    assert!(syntax.stderr.contains("column 7"));
    assert_eq!(fourfold(&["eval", "Foo"]).code, 2);
    assert_eq!(fourfold(&["reproduce", "thm9.9"]).code, 2);
    assert_eq!(fourfold(&["enumerate", "bk", "--bounds", "3"]).code, 2);
    assert_eq!(fourfold(&["--help"]).code, 0);
}

#[test]
fn random_input_never_panics() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alphabet: Vec<char> = "CP2bK3SxE()#*,;=dgw 0123456789".chars().collect();
    for _ in 0..300 {
        let len = rng.gen_range(0..24);
        let text: String = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        let out = fourfold(&["eval", &text]);
        assert!(matches!(out.code, 0 | 2), "{text:?} gave {}: {}", out.code, out.stderr);
    }
}
