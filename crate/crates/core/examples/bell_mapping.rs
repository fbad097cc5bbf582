//! Bell behaviors, their instrumental projections and the Bell-expression cap.

use qace::bounds::{bell_expression, BellCoefficients};
use qace::constructions::PlanarSetting;
use qace::optimize::nelder_mead_max;
use qace::quantum::bell_behavior;
use qace::scenario::{do_from_bell, instrumental_from_bell, BellBehavior};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pr = BellBehavior::pr_box(0, 0, 0);
    let p = instrumental_from_bell(&pr);
    let q = do_from_bell(&pr, 0)?;
    println!("PR box: p(a,b|x) = {:?}", p.table());
    println!("        q(b|a)   = {:?}, Δ = {}", q.table(), q.delta());

    for alpha in [-2.0, -0.3, 0.5, 2.0] {
        let c = BellCoefficients::family(alpha)?;
        let cap = c.cauchy_schwarz_cap()?;
        let f = |v: &[f64]| {
            bell_expression(
                &bell_behavior(&PlanarSetting::pure(v[0], [v[1], v[2]], [v[3], v[4]]).model())
                    .unwrap(),
                &c,
            )
        };
        let best = nelder_mead_max(f, &[0.6, 0.1, 1.2, 0.4, -0.9], 0.4, 1e-11, 10_000)?;
        println!(
            "α = {alpha:>4}: β = {:+.4}, ξ = {:+.4}, cap {cap:.6}, optimized two-qubit value {:.6}",
            c.beta,
            c.xi()?,
            best.value
        );
    }
    Ok(())
}
