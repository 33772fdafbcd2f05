use vostokov_core::suites::{run_suite, SuiteOptions};
#[test]
fn one_suite() {
    let name = std::env::var("SUITE").unwrap_or_else(|_| "pinned".into());
    let opts = SuiteOptions { trials: 4, seed: 7, check_stability: false };
    let r = run_suite(&name, &opts).unwrap();
    eprintln!("{}: trials={} checks={} failures={:?}", r.suite, r.trials, r.checks, r.failures);
}
