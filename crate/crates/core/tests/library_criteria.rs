use splitrec::acceptance::run_library_criteria;

#[test]
fn library_criteria_report() {
    let report = run_library_criteria();
    for c in &report {
        println!("{c}");
    }
    assert!(report.iter().all(|c| c.passed));
}
