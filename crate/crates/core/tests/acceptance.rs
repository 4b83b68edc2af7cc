//! Acceptance suite: runs every check at its pinned tolerance and prints one
//! pass/fail line per criterion.

use singular_waves_core::selftest::all_checks;

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    for (name, check) in all_checks() {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
