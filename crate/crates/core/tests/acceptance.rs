//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rendezvous_sim::harness::acceptance::{
    check_caterpillar_cost, check_determinism, check_protocol_properties, check_lower_bound,
    check_symmetry, check_upper_bound, CriterionReport,
};

fn main() -> ExitCode {
    let workdir = tempfile::tempdir().expect("temporary directory");
    let checks: Vec<Box<dyn Fn() -> CriterionReport>> = vec![
        Box::new(check_upper_bound),
        Box::new(check_lower_bound),
        Box::new(check_caterpillar_cost),
        Box::new(check_symmetry),
        Box::new(|| check_protocol_properties(1000)),
        Box::new(|| check_determinism(workdir.path())),
    ];
    let mut failed = 0;
    for check in checks {
        let start = Instant::now();
        let report = check();
        println!("{report} ({:.1}s)", start.elapsed().as_secs_f64());
        failed += usize::from(!report.passed);
    }
    println!("acceptance: {} of 6 criteria passed", 6 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
