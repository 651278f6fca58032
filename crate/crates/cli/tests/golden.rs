//! Byte-for-byte comparison of `--deterministic` output against checked-in
//! files. Run with `REVTRI_BLESS=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    input: &'static str,
    exit: i32,
}

const CASES: &[Case] = &[
    Case {
        name: "mult_scalar_verify",
        args: &["verify"],
        input: "mult_scalar.json",
        exit: 0,
    },
    Case {
        name: "mult_scalar_verify_scalar_backend",
        args: &["verify", "--backend", "scalar"],
        input: "mult_scalar.json",
        exit: 0,
    },
    Case {
        name: "additive_extract",
        args: &["extract", "--theorem", "additive"],
        input: "additive.json",
        exit: 0,
    },
    Case {
        name: "additive_verify",
        args: &["verify"],
        input: "additive.json",
        exit: 0,
    },
    Case {
        name: "integral_exp_circle",
        args: &["integral"],
        input: "integral_exp_circle.json",
        exit: 0,
    },
    Case {
        name: "family_modulus_construct",
        args: &["construct-equality"],
        input: "family_commutative.json",
        exit: 0,
    },
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(case: &Case) -> (i32, String) {
    let input = golden_dir().join(case.input);
    let out = Command::new(env!("CARGO_BIN_EXE_revtri"))
        .args(case.args)
        .arg("--in")
        .arg(&input)
        .arg("--deterministic")
        .output()
        .expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("UTF-8 output"))
}

#[test]
fn golden_outputs_are_byte_stable() {
    let bless = std::env::var_os("REVTRI_BLESS").is_some();
    for case in CASES {
        let (code, stdout) = run(case);
        assert_eq!(code, case.exit, "{}: exit code", case.name);
        let expected_path = golden_dir().join("expected").join(format!("{}.json", case.name));
        if bless {
            std::fs::write(&expected_path, &stdout).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&expected_path)
            .unwrap_or_else(|e| panic!("{}: {e}; run with REVTRI_BLESS=1", expected_path.display()));
        assert!(stdout == expected, "{}: output differs from {}", case.name, expected_path.display());

        let (_, again) = run(case);
        assert_eq!(again, stdout, "{}: output is not reproducible", case.name);
    }
}

#[test]
fn golden_certificates_parse_back() {
    for case in CASES {
        let (_, stdout) = run(case);
        let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        assert!(doc.get("timestamp").is_none());
        if let Some(cert) = doc.get("certificate") {
            let cert: revtri_core::Certificate = serde_json::from_value(cert.clone()).unwrap();
            assert!(cert.holds && cert.preconditions_ok, "{}", case.name);
        }
        if let Some(inst) = doc.get("instance") {
            let text = serde_json::to_vec(inst).unwrap();
            revtri_cli::parse_instance(&text).unwrap().resolve().unwrap();
        }
    }
}

#[test]
fn golden_instances_parse_and_round_trip() {
    for case in CASES {
        let bytes = std::fs::read(golden_dir().join(case.input)).unwrap();
        let file = revtri_cli::parse_instance(&bytes).unwrap();
        file.resolve().unwrap();
        let again = revtri_cli::parse_instance(&serde_json::to_vec(&file).unwrap()).unwrap();
        assert_eq!(again, file);
    }
}

#[test]
fn spec_examples_in_golden_output() {
    let (_, out) = run(&CASES[0]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["certificate"]["equality"], true);
    let (_, out) = run(&CASES[2]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["bounds"]["m"][0][0], 2.0);
}

#[test]
fn timestamp_without_deterministic() {
    let out = Command::new(env!("CARGO_BIN_EXE_revtri"))
        .args(["verify", "--in"])
        .arg(golden_dir().join("mult_scalar.json"))
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["timestamp"].is_u64());
}
