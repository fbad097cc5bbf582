//! The two-qubit model with the largest violation of the classical bounds.

use qace::constructions::{optimal_angles, optimal_two_qubit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (alpha, phi0) = optimal_angles();
    let o = optimal_two_qubit()?;
    println!("state angle α   = {alpha:.7}");
    println!(
        "bob angle φ0    = {phi0:.7} rad = {:.6}π",
        phi0 / std::f64::consts::PI
    );
    println!("alice angle θ0  = {:.7}", o.theta0);
    println!("classical bound = {:.12}", o.classical_max);
    println!("quantum ACE     = {:.12}", o.qace);
    println!(
        "violation       = {:.12} (3 - 2√2 = {:.12})",
        o.violation,
        3.0 - 2.0 * 2f64.sqrt()
    );
    Ok(())
}
