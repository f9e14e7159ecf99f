//! One pass/fail line per acceptance criterion. Exits nonzero when any fails.

use forested_repro as repro;
use forested_core::numerics::Numerics;
use forested_core::real::Precision;

fn main() {
    let nm = Numerics::new(Precision::default());
    let mut failed = Vec::new();
    for id in 1..=repro::COUNT {
        let o = repro::run(id, &nm);
        println!("criterion {:>2} {}: {}: {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.title, o.detail);
        if !o.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", repro::COUNT);
    } else {
        println!("acceptance: {} of {} criteria fail: {:?}", failed.len(), repro::COUNT, failed);
        std::process::exit(1);
    }
}
