//! Violation curves over the state angle and over Bob's measurement angle.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use qace::constructions::{v_alpha, v_alpha_unrestricted, v_phi};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>12} {:>12}", "α/π", "restricted", "all angles");
    for k in 0..=8 {
        let alpha = FRAC_PI_4 * k as f64 / 8.0;
        let (full, _) = v_alpha_unrestricted(alpha)?;
        println!(
            "{:>8.4} {:>12.8} {:>12.8}",
            alpha / PI,
            v_alpha(alpha)?.violation,
            full
        );
    }
    println!("{:>8} {:>12} {:>8}", "φ/π", "violation", "α/π");
    for k in 0..=10 {
        let p = v_phi(FRAC_PI_2 * k as f64 / 10.0)?;
        println!(
            "{:>8.4} {:>12.8} {:>8.4}",
            p.phi / PI,
            p.violation,
            p.alpha / PI
        );
    }
    Ok(())
}
