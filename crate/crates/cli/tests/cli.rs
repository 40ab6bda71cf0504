use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fundist_core::rig::registry;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn bless() -> bool {
    std::env::var_os("BLESS").is_some()
}

fn fundist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fundist"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json", "--no-timing"];
    full.extend_from_slice(args);
    let out = fundist(&full);
    let code = out.status.code().expect("exit code");
    let value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{args:?}: bad JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    });
    (code, value)
}

/// Compares the raw `--json` output against a checked-in golden file.
fn golden(name: &str, args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json", "--no-timing"];
    full.extend_from_slice(args);
    let out = fundist(&full);
    let path = root()
        .join("crates/cli/tests/golden")
        .join(format!("{name}.json"));
    if bless() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &out.stdout).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        expected,
        "golden {name} differs"
    );
    (
        out.status.code().unwrap(),
        serde_json::from_slice(&out.stdout).unwrap(),
    )
}

#[test]
fn shipped_rig_files_match_registry() {
    for entry in registry() {
        let path = root()
            .join("rigs")
            .join(format!("{}.json", entry.rig.name()));
        if bless() {
            fs::write(&path, entry.rig.to_json()).unwrap();
        }
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            entry.rig.to_json(),
            "{}",
            path.display()
        );
    }
}

#[test]
fn rig_validate_accepts_shipped_rigs() {
    for entry in registry() {
        let path = format!("rigs/{}.json", entry.rig.name());
        let (code, v) = json_run(&["rig", "validate", &path]);
        assert_eq!(code, 0, "{path}");
        assert_eq!(v["results"]["rig"]["is_ring"], entry.expect_ring);
        assert_eq!(
            v["results"]["rig"]["is_commutative"],
            entry.expect_commutative
        );
    }
    golden(
        "rig_validate_bool2",
        &["rig", "validate", "rigs/bool2.json"],
    );
}

#[test]
fn tampered_rig_exits_two_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(root().join("rigs/z3.json")).unwrap();
    let mut rig: Value = serde_json::from_str(&text).unwrap();
    rig["add"][1][2] = 1.into();
    let path = dir.path().join("bad.json");
    fs::write(&path, serde_json::to_string(&rig).unwrap()).unwrap();
    let (code, v) = json_run(&["rig", "validate", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["reason"], "rig-axioms");
    let violations = v["results"]["rig"]["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    assert!(violations[0]["witness"].is_array());
}

#[test]
fn truncated_rig_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(root().join("rigs/bool2.json")).unwrap();
    let path = dir.path().join("cut.json");
    fs::write(&path, &text[..text.len() / 2]).unwrap();
    let (code, v) = json_run(&["rig", "validate", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["reason"], "input");
    let (code, _) = json_run(&["rig", "validate", "rigs/missing.json"]);
    assert_eq!(code, 1);
}

#[test]
fn theory_slice_counts() {
    let (code, v) = golden(
        "slice_mat_bool2_2",
        &[
            "theory",
            "slice",
            "--theory",
            "mat",
            "--rig",
            "rigs/bool2.json",
            "--arity",
            "2",
            "--dump",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 4);
    let (_, v) = golden(
        "slice_mat_aff_bool2_3",
        &[
            "theory",
            "slice",
            "--theory",
            "mat-aff",
            "--rig",
            "rigs/bool2.json",
            "--arity",
            "3",
        ],
    );
    assert_eq!(v["results"]["count"], 7);
    let (_, v) = json_run(&[
        "theory",
        "slice",
        "--theory",
        "initial",
        "--carrier",
        "2",
        "--arity",
        "5",
    ]);
    assert_eq!(v["results"]["count"], 5);
    let (_, v) = json_run(&[
        "theory",
        "slice",
        "--theory",
        "mat-op",
        "--rig",
        "rigs/z3.json",
        "--arity",
        "2",
    ]);
    assert_eq!(v["results"]["count"], 9);
    let (_, v) = json_run(&[
        "theory",
        "slice",
        "--theory",
        "pointed-mat-op",
        "--rig",
        "rigs/z2.json",
        "--arity",
        "1",
    ]);
    assert_eq!(v["results"]["count"], 4);
}

#[test]
fn theory_slice_closure_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gens.json");
    // Binary meet on two points generates the clone of meets of projections.
    fs::write(
        &path,
        r#"{"carrier": 2, "generators": [{"arity": 2, "table": [0, 0, 0, 1]}]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (code, v) = json_run(&[
        "theory",
        "slice",
        "--theory",
        "closure",
        "--generators",
        p,
        "--arity",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 7);
}

#[test]
fn theory_slice_usage_errors() {
    let (code, v) = json_run(&["theory", "slice", "--theory", "mat", "--arity", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["reason"], "input");
    let (code, v) = json_run(&[
        "theory",
        "slice",
        "--theory",
        "full",
        "--carrier",
        "3",
        "--arity",
        "3",
    ]);
    assert_eq!(code, 3, "{v}");
    assert_eq!(v["reason"], "resource");
}

#[test]
fn checks() {
    let (code, v) = golden(
        "check_mutual_z3",
        &[
            "--max-arity",
            "2",
            "check",
            "--check",
            "mutual-commutant",
            "--rig",
            "rigs/z3.json",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(v["results"]["verdict"]["holds"], true);
    let (code, _) = json_run(&[
        "--max-arity",
        "2",
        "check",
        "--check",
        "affine-commutant",
        "--rig",
        "rigs/z2.json",
    ]);
    assert_eq!(code, 0);
    let (code, v) = golden(
        "check_balanced_lz4",
        &[
            "check",
            "--check",
            "balanced",
            "--theory",
            "mat",
            "--rig",
            "rigs/lz4.json",
        ],
    );
    assert_eq!(code, 4);
    assert_eq!(v["reason"], "theorem-violation");
    assert!(!v["results"]["verdict"]["witnesses"]
        .as_array()
        .unwrap()
        .is_empty());
    let (code, _) = json_run(&[
        "check",
        "--check",
        "balanced",
        "--theory",
        "mat",
        "--rig",
        "rigs/z3.json",
    ]);
    assert_eq!(code, 0);
    let (code, _) = json_run(&[
        "check",
        "--check",
        "saturated",
        "--theory",
        "mat",
        "--rig",
        "rigs/bool2.json",
    ]);
    assert_eq!(code, 0);
    let (code, _) = json_run(&[
        "check",
        "--check",
        "commutes",
        "--theory",
        "mat",
        "--other",
        "mat-op",
        "--rig",
        "rigs/z4.json",
    ]);
    assert_eq!(code, 0);
    let (code, _) = json_run(&[
        "check",
        "--check",
        "commutative",
        "--theory",
        "full",
        "--carrier",
        "2",
    ]);
    assert_eq!(code, 4);
}

#[test]
fn dist_examples() {
    let (code, v) = golden(
        "dist_linear_bool2_3",
        &[
            "dist",
            "--context",
            "scalar-linear",
            "--rig",
            "rigs/bool2.json",
            "--set-size",
            "3",
            "--classify",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 8);
    assert_eq!(v["results"]["classification_expected"], true);
    assert_eq!(v["exactness"], "exact-via-known-generators");

    let (code, v) = json_run(&[
        "dist",
        "--context",
        "initial",
        "--set-size",
        "4",
        "--classify",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 4);
    for c in v["results"]["classification"].as_array().unwrap() {
        assert_eq!(c["kind"], "ultrafilter");
        assert!(c["principal_generator"].is_array());
    }

    let (code, v) = golden(
        "dist_affine_bool2_2_laws",
        &[
            "dist",
            "--context",
            "scalar-affine",
            "--rig",
            "rigs/bool2.json",
            "--set-size",
            "2",
            "--monad-laws",
            "--theorems",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count"], 3);
    assert_eq!(v["results"]["monad_laws"]["associativity"]["holds"], true);
}

#[test]
fn dist_refusals() {
    let (code, v) = json_run(&[
        "dist",
        "--context",
        "scalar-linear",
        "--rig",
        "rigs/lz4.json",
        "--set-size",
        "2",
    ]);
    assert_eq!(code, 4);
    assert_eq!(v["reason"], "context-rejected");
    let (code, v) = json_run(&[
        "dist",
        "--context",
        "scalar-linear",
        "--rig",
        "rigs/z3.json",
        "--set-size",
        "2",
        "--classify",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["reason"], "unsupported");
    let (code, _) = json_run(&["dist", "--context", "scalar-linear", "--set-size", "2"]);
    assert_eq!(code, 1);
}

fn copy_registry(dir: &Path) {
    for entry in registry() {
        fs::write(
            dir.join(format!("{}.json", entry.rig.name())),
            entry.rig.to_json(),
        )
        .unwrap();
    }
}

#[test]
fn report_all_over_registry() {
    let out = tempfile::tempdir().unwrap();
    let first = out.path().join("a.json");
    let second = out.path().join("b.json");
    let run = |path: &Path| {
        fundist(&[
            "--no-timing",
            "report-all",
            "--rig-dir",
            "rigs",
            "--out",
            path.to_str().unwrap(),
        ])
    };
    let status = run(&first).status;
    assert_eq!(status.code(), Some(0));
    assert_eq!(run(&second).status.code(), Some(0));
    let a = fs::read(&first).unwrap();
    assert_eq!(
        a,
        fs::read(&second).unwrap(),
        "report-all is not deterministic"
    );
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["results"]["failed"], 0);
    assert_eq!(
        v["results"]["rigs"].as_array().unwrap().len(),
        registry().len()
    );
}

#[test]
fn report_all_with_broken_rig_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    copy_registry(dir.path());
    let mut rig: Value = serde_json::from_str(&registry()[2].rig.to_json()).unwrap();
    rig["name"] = "broken".into();
    rig["mul"][2][2] = 2.into();
    fs::write(
        dir.path().join("broken.json"),
        serde_json::to_string(&rig).unwrap(),
    )
    .unwrap();
    let out = dir.path().join("report.out");
    let status = fundist(&[
        "--no-timing",
        "report-all",
        "--rig-dir",
        dir.path().to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .status;
    assert_eq!(status.code(), Some(2));
    let v: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["reason"], "rig-axioms");
    assert_eq!(v["results"]["failed"], 1);
}

#[test]
fn report_all_on_empty_directory_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.out");
    let output = fundist(&[
        "report-all",
        "--rig-dir",
        dir.path().to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["reason"], "input");
}

#[test]
fn human_output_is_default() {
    let out = fundist(&[
        "theory",
        "slice",
        "--theory",
        "mat",
        "--rig",
        "rigs/bool2.json",
        "--arity",
        "2",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("mat(bool2): 4 operations of arity 2"),
        "{text}"
    );
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let args = [
        "--json",
        "--no-timing",
        "dist",
        "--context",
        "scalar-linear",
        "--rig",
        "rigs/z2.json",
        "--set-size",
        "2",
        "--monad-laws",
        "--dump",
    ];
    let a = fundist(&args);
    let b = fundist(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
