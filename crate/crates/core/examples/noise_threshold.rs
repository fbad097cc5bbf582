//! Violation on the isotropic family (1-p)|Φ+⟩⟨Φ+| + p I/4.

use qace::constructions::{
    isotropic_threshold, isotropic_violation, isotropic_violation_closed_form,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [0.0, 0.05, 0.1, 0.15, 0.17, 0.18, 0.19, 0.25] {
        let (v, _) = isotropic_violation(p)?;
        println!(
            "p = {p:.2}: violation {v:+.6} (closed form {:+.6})",
            isotropic_violation_closed_form(p)
        );
    }
    let (lo, hi) = isotropic_threshold(0.0, 0.5, 1e-10)?;
    println!(
        "threshold in [{lo:.10}, {hi:.10}]; 1 - √(2/3) = {:.10}",
        1.0 - (2.0f64 / 3.0).sqrt()
    );
    Ok(())
}
