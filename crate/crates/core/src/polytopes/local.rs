//! Classical instrumental polytope.

use serde::Serialize;

use super::{tight_interval, PolytopeError, TightAce};
use crate::scenario::{DoTable, InstrumentalBehavior};

/// Response functions `a = f(x)` and `b = g(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DeterministicStrategy {
    pub f: [usize; 2],
    pub g: [usize; 2],
}

const FUNCTIONS: [[usize; 2]; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];

impl DeterministicStrategy {
    pub fn all() -> Vec<Self> {
        FUNCTIONS
            .iter()
            .flat_map(|&f| FUNCTIONS.iter().map(move |&g| Self { f, g }))
            .collect()
    }

    pub fn behavior(&self) -> InstrumentalBehavior {
        InstrumentalBehavior::from_fn(|a, b, x| {
            f64::from(u8::from(a == self.f[x] && b == self.g[a]))
        })
        .expect("deterministic behavior is valid")
    }

    pub fn do_table(&self) -> DoTable {
        let q =
            std::array::from_fn(|b| std::array::from_fn(|a| f64::from(u8::from(b == self.g[a]))));
        DoTable::new(q).expect("deterministic do-table is valid")
    }
}

/// The 16 `(behavior, do-table)` vertex pairs.
pub fn local_strategies() -> Vec<(InstrumentalBehavior, DoTable)> {
    DeterministicStrategy::all()
        .iter()
        .map(|s| (s.behavior(), s.do_table()))
        .collect()
}

/// Tight classical ACE interval for `beh`.
pub fn cace_tight_interval(beh: &InstrumentalBehavior) -> Result<TightAce, PolytopeError> {
    tight_interval(&local_strategies(), beh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::cace_lower_bound;
    use crate::rng::SeededRng;
    use crate::scenario::{ace, instrumental_inequality_slack};
    use approx::assert_abs_diff_eq;

    fn mixture(rng: &mut SeededRng) -> (InstrumentalBehavior, DoTable) {
        let w = rng.simplex(16);
        let verts = local_strategies();
        let p = InstrumentalBehavior::from_fn(|a, b, x| {
            verts
                .iter()
                .zip(&w)
                .map(|((v, _), wi)| wi * v.get(a, b, x))
                .sum()
        })
        .unwrap();
        let mut q = [[0.0; 2]; 2];
        for ((_, d), wi) in verts.iter().zip(&w) {
            for b in 0..2 {
                for a in 0..2 {
                    q[b][a] += wi * d.get(b, a);
                }
            }
        }
        (p, DoTable::new(q).unwrap())
    }

    #[test]
    fn strategy_examples() {
        let id = DeterministicStrategy {
            f: [0, 1],
            g: [0, 1],
        };
        assert_eq!(id.behavior(), InstrumentalBehavior::deterministic_chain());
        assert_eq!(ace(&id.do_table()), 1.0);
        let constant = DeterministicStrategy {
            f: [1, 0],
            g: [0, 0],
        };
        assert_eq!(constant.do_table().get(0, 0), 1.0);
        assert_eq!(constant.do_table().get(0, 1), 1.0);
        assert_eq!(ace(&constant.do_table()), 0.0);
    }

    #[test]
    fn multiplicities() {
        let verts = local_strategies();
        assert_eq!(verts.len(), 16);
        let key = |b: &InstrumentalBehavior| format!("{:?}", b.table());
        let mut behaviors: Vec<String> = verts.iter().map(|(b, _)| key(b)).collect();
        behaviors.sort();
        behaviors.dedup();
        // With constant f, g on the unused value of a is invisible.
        assert_eq!(behaviors.len(), 12);
        let mut pairs: Vec<String> = verts
            .iter()
            .map(|(b, q)| format!("{}{:?}", key(b), q.table()))
            .collect();
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.len(), 16);
    }

    #[test]
    fn tight_interval_examples() {
        let chain = cace_tight_interval(&InstrumentalBehavior::deterministic_chain()).unwrap();
        let iv = chain.interval().unwrap();
        assert_abs_diff_eq!(iv.min_ace, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(iv.max_ace, 1.0, epsilon = 1e-12);

        let uni = cace_tight_interval(&InstrumentalBehavior::uniform()).unwrap();
        assert_eq!(uni.interval().unwrap().min_ace, 0.0);

        let outside =
            InstrumentalBehavior::from_fn(|a, b, x| if a == 0 && b == x { 1.0 } else { 0.0 })
                .unwrap();
        assert_eq!(cace_tight_interval(&outside).unwrap(), TightAce::Infeasible);
    }

    #[test]
    fn mixtures_are_feasible_and_bounds_sound() {
        let mut rng = SeededRng::new(17);
        for _ in 0..300 {
            let (p, q) = mixture(&mut rng);
            let iv = *cace_tight_interval(&p).unwrap().interval().unwrap();
            let d = q.delta();
            assert!(iv.delta_min <= d + 1e-9 && d <= iv.delta_max + 1e-9);
            assert!(iv.min_ace <= ace(&q) + 1e-9);
            assert!(cace_lower_bound(&p) <= iv.min_ace + 1e-8);
        }
    }

    #[test]
    fn feasibility_matches_instrumental_inequality() {
        let mut rng = SeededRng::new(23);
        let mut seen = [0usize; 2];
        for _ in 0..400 {
            let cols = [rng.simplex(4), rng.simplex(4)];
            let p = InstrumentalBehavior::from_fn(|a, b, x| cols[x][2 * a + b]).unwrap();
            let slack = instrumental_inequality_slack(&p);
            if slack.abs() < 1e-6 {
                continue;
            }
            let feasible = cace_tight_interval(&p).unwrap().interval().is_some();
            assert_eq!(feasible, slack < 0.0, "slack {slack}");
            seen[usize::from(feasible)] += 1;
        }
        assert!(seen[0] > 20 && seen[1] > 20, "{seen:?}");
    }
}
