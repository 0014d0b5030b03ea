//! One line per acceptance criterion. Exits nonzero when a criterion fails
//! for a reason not listed among the documented divergences.

use std::process::ExitCode;

use simonq::verify::{divergence_reason, run_criterion};

fn main() -> ExitCode {
    let mut unexpected = false;
    for id in 1..=9 {
        match run_criterion(id) {
            Ok(r) => {
                println!("{}", r.line());
                for f in &r.failures {
                    match divergence_reason(f) {
                        Some(why) => println!("    documented {f}: {why}"),
                        None => println!("    UNEXPECTED {f}"),
                    }
                }
                unexpected |= !r.unexpected.is_empty();
            }
            Err(e) => {
                println!("criterion {id}: FAIL error: {e}");
                unexpected = true;
            }
        }
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
