use tsd_core::verify::run_all;

#[test]
fn verification_suite_passes() {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    assert!(outcomes.iter().all(|o| o.passed));
}
