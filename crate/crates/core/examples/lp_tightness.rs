//! Closed-form bounds against the tight values from linear programming.

use qace::bounds::{cace_lower_bound, nace_lower_bound};
use qace::polytopes::local::local_strategies;
use qace::polytopes::nonsignaling::mapped_ns_vertices;
use qace::polytopes::{cace_tight_interval, nace_tight};
use qace::rng::SeededRng;
use qace::scenario::{instrumental_inequality_slack, InstrumentalBehavior};

/// Mixture of two or three random vertices.
fn mixture(
    verts: &[(InstrumentalBehavior, qace::scenario::DoTable)],
    rng: &mut SeededRng,
) -> InstrumentalBehavior {
    let k = 2 + rng.below(2);
    let picks: Vec<usize> = (0..k).map(|_| rng.below(verts.len())).collect();
    let w = rng.simplex(k);
    InstrumentalBehavior::from_fn(|a, b, x| {
        picks
            .iter()
            .zip(&w)
            .map(|(&i, wi)| wi * verts[i].0.get(a, b, x))
            .sum()
    })
    .unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = SeededRng::new(11);
    println!("classical mixtures: closed form vs LP minimum ACE");
    let local = local_strategies();
    for _ in 0..8 {
        let p = mixture(&local, &mut rng);
        let lp = cace_tight_interval(&p)?;
        println!(
            "  {:+.6}  {:.6}",
            cace_lower_bound(&p),
            lp.interval().unwrap().min_ace
        );
    }
    println!("non-signaling mixtures: max(bound, 0) vs LP minimum ACE (slack of the instrumental inequality)");
    let ns = mapped_ns_vertices();
    for _ in 0..8 {
        let p = mixture(&ns, &mut rng);
        let lp = nace_tight(&p)?;
        let classical = cace_tight_interval(&p)?;
        println!(
            "  {:.6}  {:.6}  ({:+.4}, classical LP {})",
            nace_lower_bound(&p).max(0.0),
            lp.interval().unwrap().min_ace,
            instrumental_inequality_slack(&p),
            if classical.interval().is_some() {
                "feasible"
            } else {
                "infeasible"
            }
        );
    }
    Ok(())
}
