//! One line per numbered criterion, run at the listed tolerances.
//!
//! Criterion 9 asks for a quantum-positive region strictly larger than the
//! classical one on the slice. With a sound quantum bound the quantum region
//! sits inside the classical one, so that criterion is reported as FAIL and
//! tracked here as a known failure.

use qace::verify::{run_criterion, Reference, CRITERIA};

const KNOWN_FAILURES: [u8; 1] = [9];

fn main() {
    let reference = Reference::default();
    let mut unexpected = Vec::new();
    for c in CRITERIA {
        let r = run_criterion(c.id, &reference);
        println!("{}", r.line());
        if r.passed == KNOWN_FAILURES.contains(&c.id) {
            unexpected.push(c.id);
        }
    }

    let tampered = Reference { optimal_violation: 0.17, ..Reference::default() };
    let control = run_criterion(1, &tampered);
    println!("negative control (3 - 2√2 replaced by 0.17): {}", control.line());
    if control.passed {
        unexpected.push(1);
    }

    if unexpected.is_empty() {
        println!("acceptance: outcomes as expected (known failures: {KNOWN_FAILURES:?})");
    } else {
        eprintln!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
