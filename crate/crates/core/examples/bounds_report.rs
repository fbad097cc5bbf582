//! All lower bounds, with their linear-programming counterparts, on a few
//! behaviors.

use qace::bounds::bound_report;
use qace::polytopes::{cace_tight_interval, nace_tight};
use qace::region::slice_behavior;
use qace::scenario::InstrumentalBehavior;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("uniform", InstrumentalBehavior::uniform()),
        (
            "deterministic chain",
            InstrumentalBehavior::deterministic_chain(),
        ),
        ("slice (0.5, 0.1)", slice_behavior(0.5, 0.1)),
        ("slice (0.3, 0.45)", slice_behavior(0.3, 0.45)),
    ];
    for (name, beh) in cases {
        let r = bound_report(&beh);
        let classical = cace_tight_interval(&beh)?;
        let ns = nace_tight(&beh)?;
        println!("{name}");
        println!("  six classical bounds  {:.4?}", r.classical_six);
        println!(
            "  classical / quantum / NS  {:.4} / {:?} / {:.4}",
            r.classical_max,
            r.quantum.map(|q| (q * 1e4).round() / 1e4),
            r.nonsignaling
        );
        println!(
            "  LP minimum ACE: classical {:?}, NS {:?}",
            classical.interval().map(|i| i.min_ace),
            ns.interval().map(|i| i.min_ace)
        );
    }
    Ok(())
}
