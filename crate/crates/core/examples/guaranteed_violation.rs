//! Fixed measurement angles that violate the classical bound for any
//! entangled pure state.

use qace::constructions::{guaranteed_violation, SchmidtState};
use qace::rng::SeededRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut states = vec![
        SchmidtState::new(vec![0.8, 0.6])?,
        SchmidtState::maximally_entangled(4),
    ];
    let mut rng = SeededRng::new(3);
    states.extend([3, 5, 6].map(|d| SchmidtState::random(d, &mut rng)));
    println!(
        "{:>3} {:>8} {:>8} {:>12} {:>12}",
        "D", "Λ", "γ", "violation", "formula"
    );
    for s in &states {
        let g = guaranteed_violation(s)?;
        println!(
            "{:>3} {:>8.4} {:>8.4} {:>12.8} {:>12.8}",
            s.rank(),
            g.params.lambda,
            g.params.gamma,
            g.violation,
            g.formula
        );
    }
    Ok(())
}
