//! Runs `hwalk` and compares its output with the files in `tests/golden`.
//! Set `HWALK_BLESS=1` to rewrite the golden files from the current output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn hwalk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hwalk")).args(args).output().expect("hwalk runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn golden(name: &str, args: &[&str], code: i32) {
    let (got_code, stdout, stderr) = hwalk(args);
    assert_eq!(got_code, code, "exit code of {args:?}; stderr: {stderr}");
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.out"));
    if std::env::var_os("HWALK_BLESS").is_some() {
        fs::write(&path, &stdout).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stdout, want, "output of {args:?} differs from {}", path.display());
}

#[test]
fn documented_examples() {
    let (code, out, _) = hwalk(&["walk", "--from", "w*2", "--to", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("rho2 = 3"), "{out}");
    let (code, out, _) = hwalk(&["f", "verify", "--n", "1", "--tuple", "0,1,w", "--samples", "50"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PASS"), "{out}");
    let (code, out, _) = hwalk(&["ord", "cmp", "w^2", "w*9"]);
    assert_eq!((code, out.as_str()), (0, "GT\n"));
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(hwalk(&["ord", "parse", "w+"]).0, 2);
    assert_eq!(hwalk(&["walk", "--from", "3", "--to", "w"]).0, 2);
    assert_eq!(hwalk(&["nonsense"]).0, 2);
    assert_eq!(hwalk(&["--ladder", "seeded:x", "ord", "parse", "1"]).0, 2);
    assert_eq!(hwalk(&["--format", "dot", "ord", "parse", "1"]).0, 2);
    assert_eq!(hwalk(&["f", "verify", "--n", "1", "--tuple", "0,1"]).0, 2);
}

#[test]
fn failed_checks_exit_with_1() {
    assert_eq!(hwalk(&["homology", "tail-acyclic", &fixture("hollow_triangle.txt")]).0, 1);
    assert_eq!(hwalk(&["homology", "good-graph", &fixture("g1.txt")]).0, 1);
    assert_eq!(hwalk(&["cohere", "check-I", "--family", "rho2", "--tuples", "w,w*2"]).0, 1);
}

#[test]
fn reruns_are_identical() {
    let args = ["--ladder", "seeded:4", "--seed", "9", "f", "verify", "--n", "1", "--tuple", "0,w+2,w^2", "--format", "json"];
    assert_eq!(hwalk(&args), hwalk(&args));
}

#[test]
fn ord_goldens() {
    golden("ord_parse", &["ord", "parse", "w^2*3+w+4"], 0);
    golden("ord_add", &["ord", "add", "w*2+5", "w^2"], 0);
    golden("ord_classify", &["--format", "json", "ord", "classify", "w^2+w"], 0);
}

#[test]
fn ladder_goldens() {
    golden("ladder_show", &["ladder", "show", "w^2", "--limit", "6"], 0);
    golden("ladder_show_seeded", &["--ladder", "seeded:3", "--format", "json", "ladder", "show", "w*3", "--limit", "6"], 0);
    golden("ladder_compound", &["ladder", "compound", "w+1,w^2", "--limit", "4"], 0);
}

#[test]
fn walk_goldens() {
    golden("walk", &["walk", "--from", "w^2+w", "--to", "w+3"], 0);
    golden("walk_internal", &["--format", "json", "walk", "--from", "w+4", "--to", "w+1", "--internal", "w^2"], 0);
    golden("tr2_text", &["tr2", "--tuple", "3,w+2,w*3", "--signed"], 0);
    golden("tr2_dot", &["--format", "dot", "tr2", "--tuple", "1,w,w^2"], 0);
}

#[test]
fn f_goldens() {
    golden("f_slice", &["f", "slice", "--tuple", "0,w^2", "--at", "w+3"], 0);
    golden("f_slice_tilde", &["--format", "json", "f", "slice", "--tuple", "0,w*2", "--x", "0", "--tilde"], 0);
    golden("f_coeff", &["f", "coeff", "--tuple", "0,w,w*2", "--target", "0,w,w+1,w*2"], 0);
    golden("f_verify_2", &["f", "verify", "--n", "2", "--tuple", "0,w,w*2,w^2"], 0);
    golden("f_m", &["f", "m", "--beta", "w*2", "--gamma", "w^2+w"], 0);
    golden("f_relativize", &["--seed", "3", "f", "relativize", "--beta", "0,w+1", "--gamma", "w*2", "--samples", "30"], 0);
}

#[test]
fn basis_goldens() {
    golden("basis_list", &["basis", "list", "--eps", "w*2", "--n", "1", "--window", "0,1,2,w,w+1,w+2"], 0);
    golden("basis_member", &["basis", "member", "--eps", "top", "--tuple", "0,w,w+1"], 0);
    golden("basis_decompose", &["--format", "json", "basis", "decompose", "--eps", "w*2", "--chain", &format!("@{}", fixture("boundary.json"))], 0);
    golden("basis_verify", &["basis", "verify", "--eps", "w+3", "--n", "2", "--window", "0,2,w,w+1,w+2"], 0);
}

#[test]
fn homology_goldens() {
    golden("homology_rp2", &["homology", "compute", &fixture("rp2.txt")], 0);
    golden("homology_tail", &["--format", "json", "homology", "tail-acyclic", &fixture("hollow_triangle.txt")], 1);
    golden("homology_good", &["homology", "good-graph", &fixture("g0.txt")], 0);
    golden("homology_walk_graph", &["homology", "walk-graph", "--gamma", "9"], 0);
    golden("homology_elementary", &["--format", "dot", "homology", "walk-graph", "--gamma", "w*2", "--window", "0,3,w+1", "--elementary"], 0);
}

#[test]
fn cohere_goldens() {
    golden("cohere_check_i", &["cohere", "check-I", "--family", "phi-x", "--tuples", "w,w*2;w+3,w^2"], 0);
    golden("cohere_check_i_theta", &["--format", "json", "cohere", "check-I", "--family", "phi-theta", "--tuples", "w,w*2"], 0);
    golden("cohere_check_ii", &["cohere", "check-II", "--family", "phi-star", "--pairs", "w,w*2"], 0);
    golden("cohere_phi_theta", &["cohere", "phi-theta", "--beta", "w*2", "--alpha", "w+12"], 0);
    golden("cohere_s1", &["cohere", "s1", "--gamma", "w^2", "--alpha", "0", "--beta", "w"], 0);
    golden("cohere_s2", &["cohere", "s2", "--delta", "w^2", "--beta", "w+1", "--gamma", "w*2"], 0);
}

#[test]
fn export_goldens() {
    golden("export_f1", &["--format", "csv", "export-fig", "--tuple", "0,w^2", "--at", "1,w,w+2,w*2"], 0);
    golden("export_f2", &["--format", "csv", "export-fig", "--tuple", "0,w,w*2"], 0);
}
