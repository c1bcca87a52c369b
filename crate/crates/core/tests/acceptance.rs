//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! of them fails.

use std::process::ExitCode;
use std::time::Instant;

use ekrlab::suite::{run_all, Fixture, CANONICAL_RESIDUAL, PRIMES, SAMPLED_X, SEED, STABILITY_SETS};

fn main() -> ExitCode {
    let start = Instant::now();
    let fixture = Fixture::new().expect("AGL(2..4,2) and its characters");
    println!("built AGL(2..4,2) in {:.2?}", start.elapsed());
    println!(
        "pinned: primes {PRIMES}, seed {SEED:#x}, canonical residual < {CANONICAL_RESIDUAL:e}, \
         {STABILITY_SETS} stability sets, {SAMPLED_X} sampled x per orbit case"
    );
    let results = run_all(&fixture, |r| {
        println!(
            "criterion {:>2} {:<27} {} [{:.2}s] {}",
            r.index,
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.seconds,
            r.detail
        );
    });
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{passed} of {} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
