use lpeuler::harness::config::RunConfig;
use lpeuler::harness::suite::{run_suite, Suite};

#[test]
fn acceptance() {
    let cfg = RunConfig::from_json("{}").unwrap();
    let result = run_suite(&cfg, Suite::All, &[3, 4, 5]);
    let mut failing = Vec::new();
    for c in 1..=11 {
        match result.criterion(c) {
            Some(check) => {
                println!("{}", check.line());
                if !check.passed() {
                    failing.push(c);
                }
            }
            None => {
                println!("[FAIL] {c:>2} criterion not run");
                failing.push(c);
            }
        }
    }
    for check in result.checks.iter().filter(|c| c.criterion.is_none()) {
        println!("{}", check.line());
    }
    assert!(failing.is_empty(), "failing criteria: {failing:?}");
}
