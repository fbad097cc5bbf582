//! Violation as a witness of incompatibility of Bob's two measurements.

use qace::constructions::{
    incompatibility_witness, max_witness_at_length, noisy_incompatibility_threshold, witness_unit,
};
use qace::quantum::BlochVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c in [-0.5f64, 0.0, 0.25, 0.75, 0.99] {
        let s = (1.0 - c * c).sqrt();
        let n0 = BlochVector::new([0.0, 0.0, 1.0])?;
        let n1 = BlochVector::new([s, 0.0, c])?;
        let w = incompatibility_witness(&n0, &n1)?;
        println!(
            "n0·n1 = {c:>5}: witness {:.8}, measured {:.8}, closed form {:.8}",
            w.witness,
            w.measured,
            witness_unit(c)
        );
    }
    for r in [1.0, 0.9, 0.82, 0.8] {
        println!(
            "Bloch length {r}: best witness {:.6}",
            max_witness_at_length(r)?
        );
    }
    println!(
        "noise threshold on the length: {:.8} (√(2/3) = {:.8})",
        noisy_incompatibility_threshold()?,
        (2.0f64 / 3.0).sqrt()
    );
    Ok(())
}
