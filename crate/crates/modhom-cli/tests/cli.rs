//! End-to-end checks of the binary: output shapes, exit codes, round
//! tripping, and byte-level determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modhom"))
}

/// Writes a fixture under a per-test directory and returns its path.
fn fixture(test: &str, name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("modhom-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parsed(out: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(out).trim()).unwrap()
}

#[test]
fn counting_into_the_triangle_mod_3_gives_zero() {
    let g = fixture("tri", "g.json", r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
    let k3 = fixture("tri", "k3.json", r#"{"n":3,"edges":[[0,1],[1,2],[0,2]]}"#);
    let out = bin().args(["count-mod", "--g"]).arg(&g).arg("--h").arg(&k3).args(["--p", "3"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"residue":0}"#);
}

#[test]
fn counts_are_decimal_strings() {
    let p4 = fixture("dec", "p4.json", r#"{"n":4,"edges":[[0,1],[1,2],[2,3]]}"#);
    let k23 = fixture(
        "dec",
        "k23.json",
        r#"{"n":5,"edges":[[0,2],[0,3],[0,4],[1,2],[1,3],[1,4]]}"#,
    );
    let out = bin().arg("count").arg("--g").arg(&p4).arg("--h").arg(&k23).output().unwrap();
    assert!(out.status.success());
    assert_eq!(parsed(&out)["count"], "72");
}

#[test]
fn reducing_the_4_cycle_mod_2_empties_it() {
    let c4 = fixture("red", "c4.json", r#"{"n":4,"edges":[[0,1],[1,2],[2,3],[3,0]]}"#);
    let out = bin().arg("preduce").arg("--h").arg(&c4).args(["--p", "2"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"n":0,"edges":[]}"#);
}

#[test]
fn verify_bis_reports_equal_sides() {
    let g = fixture("vb", "g.json", r#"{"n":2,"edges":[[0,1]],"sorts":{"L":[0],"R":[1]}}"#);
    let h = fixture(
        "vb",
        "p4.json",
        r#"{"n":4,"edges":[[0,1],[1,2],[2,3]],"sorts":{"L":[0,2],"R":[1,3]}}"#,
    );
    let out =
        bin().arg("verify-bis").arg("--g").arg(&g).arg("--h").arg(&h).args(["--p", "3"]).output().unwrap();
    assert!(out.status.success());
    let v = parsed(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["p"], 3);
    assert_eq!(v["lhs"], v["rhs"]);
    assert!(v["g"].is_object() && v["G_prime"].is_object());
}

#[test]
fn emitted_graphs_round_trip() {
    let c4 = fixture("rt", "c4.json", r#"{"n":4,"edges":[[0,1],[1,2],[2,3],[3,0]]}"#);
    let k2 = fixture("rt", "k2.json", r#"{"n":2,"edges":[[0,1]]}"#);
    for out in [
        bin().arg("skeleton").arg("--g").arg(&c4).output().unwrap(),
        bin().arg("square").arg("--g").arg(&c4).output().unwrap(),
        bin()
            .args(["products", "--kind", "cartesian", "--g"])
            .arg(&k2)
            .arg("--h")
            .arg(&c4)
            .output()
            .unwrap(),
    ] {
        assert!(out.status.success());
        let text = stdout(&out);
        let g = modhom::json::graph_from_str(text.trim()).unwrap();
        assert_eq!(modhom::json::graph_to_string(&g), text.trim());
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let h = fixture("det", "h.json", r#"{"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[4,0]]}"#);
    let run = || bin().arg("classify").arg("--h").arg(&h).args(["--p", "2"]).output().unwrap();
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_input_exits_2() {
    let bad = fixture("bad", "bad.json", r#"{"n":2,"edges":[[0,5]]}"#);
    let k2 = fixture("bad", "k2.json", r#"{"n":2,"edges":[[0,1]]}"#);
    let out = bin().arg("count").arg("--g").arg(&bad).arg("--h").arg(&k2).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let out = bin().arg("count-mod").arg("--g").arg(&k2).arg("--h").arg(&k2).args(["--p", "6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // A thick Z needs sorts; an unsorted target is an input error.
    let out = bin().arg("zgraph").arg("--h").arg(&k2).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_gadget_search_exits_3() {
    let h = fixture(
        "ex3",
        "p4.json",
        r#"{"n":4,"edges":[[0,1],[1,2],[2,3]],"sorts":{"L":[0,2],"R":[1,3]}}"#,
    );
    let out = bin()
        .arg("gadgets")
        .arg("--h")
        .arg(&h)
        .args(["--p", "3", "--max-n", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn complete_bipartite_targets_have_no_thick_z() {
    let h = fixture(
        "nz",
        "k22.json",
        r#"{"n":4,"edges":[[0,2],[0,3],[1,2],[1,3]],"sorts":{"L":[0,1],"R":[2,3]}}"#,
    );
    let out = bin().arg("zgraph").arg("--h").arg(&h).output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"found":false}"#);

    // The reduction commands treat the same answer as unusable input.
    let g = fixture("nz", "k2s.json", r#"{"n":2,"edges":[[0,1]],"sorts":{"L":[0],"R":[1]}}"#);
    let out =
        bin().arg("verify-bis").arg("--g").arg(&g).arg("--h").arg(&h).args(["--p", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constants_reduce_writes_an_oracle_transcript() {
    let inst = fixture(
        "tr",
        "inst.json",
        r#"{"domain":2,"vars":1,"constraints":[{"scope":[0],"tuples":[[0]]}]}"#,
    );
    let k2 = fixture("tr", "k2.json", r#"{"n":2,"edges":[[0,1]]}"#);
    let transcript = std::env::temp_dir()
        .join(format!("modhom-cli-{}-tr", std::process::id()))
        .join("calls.jsonl");
    let out = bin()
        .arg("constants-reduce")
        .arg("--instance")
        .arg(&inst)
        .arg("--h")
        .arg(&k2)
        .args(["--p", "3", "--transcript"])
        .arg(&transcript)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"residue":1}"#);
    let body = fs::read_to_string(&transcript).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert!(!lines.is_empty());
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["instance"].is_object());
        assert!(v["residue"].is_u64());
    }
}

#[test]
fn verbose_goes_to_stderr_only() {
    let k2 = fixture("verb", "k2.json", r#"{"n":2,"edges":[[0,1]]}"#);
    let quiet = bin().arg("aut").arg("--h").arg(&k2).output().unwrap();
    let loud = bin().arg("aut").arg("--h").arg(&k2).arg("--verbose").output().unwrap();
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(quiet.stderr.is_empty());
    assert!(!loud.stderr.is_empty());
}
