use std::path::{Path, PathBuf};
use std::process::Command;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn oalg(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_oalg")).args(args).current_dir(data("")).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn validates_sample_files() {
    for f in ["sig1.sig", "ch3.oalg", "ch3_c.oalg", "ch3_trivial.oalg", "ch3_special.amalgam", "ch3_explicit.amalgam", "incl.hom"] {
        let (code, out) = oalg(&["validate", f]);
        assert_eq!(code, 0, "{f}: {out}");
        assert!(out.contains("valid"));
    }
    let (code, _) = oalg(&["validate", "e2_fwd.scheme", "--amalgam", "ch3_special.amalgam"]);
    assert_eq!(code, 0);
}

#[test]
fn scheme_without_amalgam_is_a_usage_error() {
    assert_eq!(oalg(&["validate", "e2_fwd.scheme"]).0, 2);
}

#[test]
fn missing_file_and_bad_names() {
    let (code, out) = oalg(&["validate", "missing.oalg"]);
    assert_eq!(code, 2);
    assert!(out.starts_with("error:"));
    assert_eq!(oalg(&["closure", "ch3.oalg", "e7:e0"]).0, 2);
    assert_eq!(oalg(&["pushout-eq", "ch3_special.amalgam", "e9@1", "e0@2"]).0, 2);
}

#[test]
fn broken_algebra_is_a_violation() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("broken");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::copy(data("sig1.sig"), dir.join("sig1.sig")).unwrap();
    let text = std::fs::read_to_string(data("ch3.oalg")).unwrap().replace("op f: (e2,e2) -> e2", "op f: (e2,e2) -> e0");
    let path = dir.join("bad.oalg");
    std::fs::write(&path, text).unwrap();
    let (code, out) = oalg(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("violation"));
}

#[test]
fn dominion_of_the_chain_ends() {
    let (code, out) = oalg(&["--format", "structured", "dominion", "--special", "ch3.oalg", "--seed-elems", "e0", "e2"]);
    assert_eq!(code, 0);
    assert!(out.contains("element\telement=e0\tstatus=InC"));
    assert!(out.contains("element\telement=e1\tstatus=NoWitnessFound"));
    assert!(out.contains("separator\telement=e1"));
    assert!(out.contains("dominion\telements=e0,e2"));
}

#[test]
fn inclusion_is_not_epi() {
    let (code, out) = oalg(&["epi", "--hom", "incl.hom", "--max-codomain", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("NotEpi"));
    let (code, out) = oalg(&["epi", "--hom", "incl.hom", "--max-codomain", "1"]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn pushout_equality() {
    let (code, out) = oalg(&["pushout-eq", "ch3_special.amalgam", "e2@1", "e2@2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("proven"));
    let (code, out) = oalg(&["pushout-eq", "ch3_special.amalgam", "e1@1", "e1@2", "--max-scheme-len", "2", "--max-term-ops", "1"]);
    assert_eq!(code, 3);
    assert!(out.starts_with("unknown"));
}

#[test]
fn normalize_extracts_the_center() {
    let (code, out) = oalg(&["--format", "structured", "normalize", "ch3_special.amalgam", "e2_fwd.scheme", "--reverse", "e2_rev.scheme"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("normalized\tdirection=forward"));
    assert!(out.ends_with("center\telement=e2\n"));
}

#[test]
fn closure_and_quotient() {
    let (code, out) = oalg(&["closure", "ch3.oalg", "e2:e0", "--congruence"]);
    assert_eq!(code, 0);
    assert!(out.contains("class {e0, e1, e2}"));
    assert!(out.contains("closed chain condition: true"));
    let (code, out) = oalg(&["quotient", "ch3.oalg", "e2:e0"]);
    assert_eq!(code, 0);
    assert!(out.contains("elements e0\n"));
    let (code, out) = oalg(&["closure", "ch3.oalg"]);
    assert_eq!(code, 0);
    assert!(out.contains("0 pairs"));
}

#[test]
fn quick_selftest() {
    let (code, out) = oalg(&["selftest", "--criteria", "1", "9", "--sequential"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}
