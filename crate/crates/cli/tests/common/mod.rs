//! Fixture corpus: every case runs the binary on a file from
//! `tests/fixtures` and compares against `tests/expected/<case>.json`
//! (stdout for exit 0, stderr otherwise).
//!
//! `LAGTRANS_BLESS=1 cargo test -p lagtrans-cli` rewrites the expected files.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const CASES: &[Case] = &[
    Case {
        name: "validate_triple",
        args: &["validate", "--input", "triple.json"],
        exit: 0,
    },
    Case {
        name: "validate_half_turn",
        args: &["validate", "--input", "half_turn.json"],
        exit: 0,
    },
    Case {
        name: "transversal_triple",
        args: &["transversal", "--input", "triple.json"],
        exit: 0,
    },
    Case {
        name: "kashiwara_triple",
        args: &["kashiwara", "--input", "triple.json"],
        exit: 0,
    },
    Case {
        name: "kashiwara_degenerate",
        args: &["kashiwara", "--input", "degenerate.json"],
        exit: 0,
    },
    Case {
        name: "kashiwara_family",
        args: &["kashiwara", "--input", "family.json", "--jobs", "2"],
        exit: 0,
    },
    Case {
        name: "kashiwara_selected",
        args: &[
            "kashiwara",
            "--input",
            "family.json",
            "--triple",
            "D,C,B",
            "--triple",
            "A,B,C",
        ],
        exit: 0,
    },
    Case {
        name: "lk_triple",
        args: &["lk", "--input", "triple.json"],
        exit: 0,
    },
    Case {
        name: "lk_family",
        args: &["lk", "--input", "family.json"],
        exit: 0,
    },
    Case {
        name: "lk_degenerate",
        args: &["lk", "--input", "degenerate.json"],
        exit: 1,
    },
    Case {
        name: "loop_index_half_turn",
        args: &["loop-index", "--input", "half_turn.json"],
        exit: 0,
    },
    Case {
        name: "deform_triple",
        args: &["deform", "--input", "triple.json"],
        exit: 0,
    },
    Case {
        name: "deform_family",
        args: &["deform", "--input", "family.json", "--family", "A,B,C,D"],
        exit: 0,
    },
    Case {
        name: "deform_family_triple",
        args: &[
            "deform",
            "--input",
            "family.json",
            "--triple",
            "A,B,D",
            "--steps",
            "9",
        ],
        exit: 0,
    },
    Case {
        name: "deform_pair",
        args: &[
            "deform",
            "--input",
            "degenerate.json",
            "--pair",
            "A,B",
            "--steps",
            "5",
        ],
        exit: 0,
    },
    Case {
        name: "deform_symmetric",
        args: &["deform", "--input", "symmetric.json", "--steps", "5"],
        exit: 0,
    },
    Case {
        name: "deform_too_coarse",
        args: &[
            "deform",
            "--input",
            "family.json",
            "--family",
            "A,B,C,D",
            "--steps",
            "3",
        ],
        exit: 1,
    },
    Case {
        name: "validate_odd_dimension",
        args: &["validate", "--input", "odd_dimension.json"],
        exit: 1,
    },
    Case {
        name: "validate_not_lagrangian",
        args: &["validate", "--input", "not_lagrangian.json"],
        exit: 1,
    },
    Case {
        name: "validate_open_loop",
        args: &["validate", "--input", "open_loop.json"],
        exit: 1,
    },
    Case {
        name: "validate_missing_dimension",
        args: &["validate", "--input", "missing_dimension.json"],
        exit: 1,
    },
    Case {
        name: "validate_wrong_columns",
        args: &["validate", "--input", "wrong_columns.json"],
        exit: 1,
    },
    Case {
        name: "loop_index_unknown",
        args: &[
            "loop-index",
            "--input",
            "half_turn.json",
            "--loop",
            "missing",
        ],
        exit: 1,
    },
];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn expected_path(case: &Case) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/expected")
        .join(format!("{}.json", case.name))
}

pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_binary(args: &[&str]) -> RunOutput {
    let out = Command::new(env!("CARGO_BIN_EXE_lagtrans"))
        .args(args)
        .current_dir(fixtures_dir())
        .output()
        .expect("binary runs");
    RunOutput {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// What the case produced, in the form stored under `tests/expected`.
pub fn produced(out: &RunOutput) -> String {
    if out.code == 0 {
        out.stdout.clone()
    } else {
        out.stderr.clone()
    }
}

/// Runs a case and returns a mismatch description, if any.
pub fn check_case(case: &Case) -> Option<String> {
    let out = run_binary(case.args);
    let text = produced(&out);
    let path = expected_path(case);
    if std::env::var_os("LAGTRANS_BLESS").is_some() && out.code == case.exit {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
    }
    if out.code != case.exit {
        return Some(format!(
            "exit {} (expected {}): {}",
            out.code,
            case.exit,
            out.stderr.trim()
        ));
    }
    match std::fs::read_to_string(&path) {
        Err(e) => Some(format!("cannot read {}: {e}", path.display())),
        Ok(expected) if expected != text => Some(format!("report differs from {}", path.display())),
        Ok(_) => None,
    }
}
