mod common;

use common::{check_case, run_binary, CASES};

#[test]
fn acceptance_suite() {
    let mut failures = Vec::new();
    let mut saw_exit_2 = false;
    for case in CASES {
        if run_binary(case.args).code == 2 {
            saw_exit_2 = true;
        }
        if let Some(problem) = check_case(case) {
            failures.push(format!("{}: {problem}", case.name));
        }
    }
    let pass = failures.is_empty() && !saw_exit_2;
    println!(
        "criterion 10 cli determinism: {} ({} fixture cases, {} mismatches, exit code 2 {})",
        if pass { "PASS" } else { "FAIL" },
        CASES.len(),
        failures.len(),
        if saw_exit_2 { "seen" } else { "never seen" },
    );
    for f in &failures {
        println!("  {f}");
    }
    assert!(pass);
}
