use gdag::reproduce;

#[test]
fn all_criteria_pass() {
    let reports = reproduce::run_all();
    let rendered = reproduce::render(&reports);
    for r in &reports {
        println!("criterion {}: {}", r.number, if r.passed() { "PASS" } else { "FAIL" });
    }
    assert!(reports.iter().all(|r| r.passed()), "\n{rendered}");
}
