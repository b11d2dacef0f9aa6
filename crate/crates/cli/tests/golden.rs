//! Golden-file tests: CLI output must byte-match the stored files.
//!
//! Regenerate with REGEN_GOLDEN=1 after an intentional output change.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

const SEEDED1_POINT: &str =
    "0.07460589883741575,-0.304397651632183,-0.18160571308580634,-0.055641853084068604";

fn manifest(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_threeweb"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 output");
    (stdout, out.status.code().unwrap_or(-1))
}

fn golden_check(name: &str, args: &[&str], want_code: i32) {
    let (stdout, code) = run(args);
    assert_eq!(code, want_code, "exit code for {name}; output:\n{stdout}");
    let path = manifest(&format!("tests/golden/{name}"));
    if std::env::var_os("REGEN_GOLDEN").is_some() {
        fs::write(&path, &stdout).unwrap();
        return;
    }
    let want = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {path:?}; run with REGEN_GOLDEN=1"));
    assert_eq!(
        stdout, want,
        "{name}: output drifted from the stored golden file"
    );
}

fn web(name: &str) -> String {
    manifest(&format!("tests/webs/{name}")).to_string_lossy().into_owned()
}

#[test]
fn analyze_parallelizable_json() {
    golden_check(
        "analyze_parallelizable.json",
        &[
            "analyze",
            "--web",
            &web("parallelizable.web"),
            "--point",
            "0.5,-1,0.25,2",
            "--json",
        ],
        0,
    );
}

#[test]
fn analyze_affine_group_json() {
    golden_check(
        "analyze_affine_group.json",
        &[
            "analyze",
            "--web",
            &web("affine_group.web"),
            "--point",
            "1,0,1,0",
            "--json",
        ],
        0,
    );
}

#[test]
fn analyze_seeded_json() {
    golden_check(
        "analyze_seeded1.json",
        &[
            "analyze",
            "--web",
            &web("seeded1.web"),
            "--point",
            SEEDED1_POINT,
            "--json",
        ],
        0,
    );
}

#[test]
fn analyze_affine_group_text() {
    golden_check(
        "analyze_affine_group.txt",
        &[
            "analyze",
            "--web",
            &web("affine_group.web"),
            "--point",
            "1,0,1,0",
        ],
        0,
    );
}

#[test]
fn analyze_seeded_dump_tensors_json() {
    golden_check(
        "analyze_seeded1_tensors.json",
        &[
            "analyze",
            "--web",
            &web("seeded1.web"),
            "--point",
            SEEDED1_POINT,
            "--json",
            "--dump-tensors",
        ],
        0,
    );
}

#[test]
fn verify_parallelizable_text() {
    golden_check(
        "verify_parallelizable.txt",
        &[
            "verify",
            "--web",
            &web("parallelizable.web"),
            "--point",
            "0.5,-1,0.25,2",
        ],
        0,
    );
}

#[test]
fn verify_affine_group_text() {
    golden_check(
        "verify_affine_group.txt",
        &[
            "verify",
            "--web",
            &web("affine_group.web"),
            "--point",
            "1,0,1,0",
        ],
        0,
    );
}

#[test]
fn verify_seeded_text() {
    golden_check(
        "verify_seeded1.txt",
        &[
            "verify",
            "--web",
            &web("seeded1.web"),
            "--point",
            SEEDED1_POINT,
        ],
        0,
    );
}

#[test]
fn characters_all_text() {
    golden_check("characters_all.txt", &["characters"], 0);
}

#[test]
fn characters_thm3_text() {
    golden_check("characters_thm3.txt", &["characters", "--scenario", "thm3"], 0);
}

#[test]
fn verify_injection_flags_antisym_and_fails() {
    let (stdout, code) = run(&[
        "verify",
        "--web",
        &web("seeded1.web"),
        "--point",
        SEEDED1_POINT,
        "--inject",
        "b1112=+1",
    ]);
    assert_eq!(code, 1, "injection must fail verification:\n{stdout}");
    let line = stdout
        .lines()
        .find(|l| l.starts_with("antisym.p"))
        .expect("antisym.p line present");
    assert!(line.contains("FAIL"), "{line}");
}

#[test]
fn unknown_variable_is_a_parse_error() {
    let dir = tempdir();
    let path = dir.join("bad.web");
    fs::write(&path, "f1 = x3 + y1\nf2 = x2").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_threeweb"))
        .args(["analyze", "--web", path.to_str().unwrap(), "--point", "0,0,0,0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("x3"), "{err}");
}

#[test]
fn degenerate_point_exits_2() {
    let (_, code) = {
        let out = Command::new(env!("CARGO_BIN_EXE_threeweb"))
            .args([
                "analyze",
                "--web",
                &web("affine_group.web"),
                "--point",
                "1,0,0,0", // det Lambda = y1 = 0
            ])
            .output()
            .unwrap();
        (String::from_utf8_lossy(&out.stderr).into_owned(), out.status.code().unwrap())
    };
    assert_eq!(code, 2);
}

#[test]
fn unknown_scenario_is_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_threeweb"))
        .args(["characters", "--scenario", "bogus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn batch_points_keep_input_order() {
    let dir = tempdir();
    let pts = dir.join("points.txt");
    fs::write(&pts, "1,0,1,0\n2,0.5,1,0.25\n").unwrap();
    let (stdout, code) = run(&[
        "analyze",
        "--web",
        &web("affine_group.web"),
        "--points",
        pts.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let arr = v.as_array().expect("array output in batch mode");
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["base_point"]["x1"], 1.0);
    assert_eq!(arr[1]["base_point"]["x1"], 2.0);
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("threeweb-golden-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}
