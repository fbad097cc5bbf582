use proptest::prelude::*;

use qace::bounds::{cace_lower_bound, nace_lower_bound, qace_lower_bound};
use qace::numfmt::sig12;
use qace::polytopes::cace_tight_interval;
use qace::polytopes::local::local_strategies;
use qace::quantum::{behavior, qace as quantum_ace, random_qubit_projective_model};
use qace::rng::SeededRng;
use qace::scenario::{instrumental_inequality_slack, BehaviorFile, InstrumentalBehavior};

fn behaviors() -> impl Strategy<Value = InstrumentalBehavior> {
    prop::array::uniform2(prop::array::uniform4(0.001f64..1.0)).prop_map(|w| {
        InstrumentalBehavior::from_fn(|a, b, x| {
            let col = w[x];
            col[2 * a + b] / col.iter().sum::<f64>()
        })
        .unwrap()
    })
}

fn classical_mixtures() -> impl Strategy<Value = (InstrumentalBehavior, f64)> {
    prop::array::uniform16(0.0f64..1.0)
        .prop_filter("non-zero weights", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| {
            let total: f64 = w.iter().sum();
            let verts = local_strategies();
            let beh = InstrumentalBehavior::from_fn(|a, b, x| {
                verts
                    .iter()
                    .zip(&w)
                    .map(|((v, _), wi)| wi / total * v.get(a, b, x))
                    .sum()
            })
            .unwrap();
            let delta: f64 = verts
                .iter()
                .zip(&w)
                .map(|((_, q), wi)| wi / total * q.delta())
                .sum();
            (beh, delta)
        })
}

proptest! {
    #[test]
    fn quantum_bound_is_weaker_than_classical(beh in behaviors()) {
        prop_assume!(instrumental_inequality_slack(&beh) <= 0.0);
        prop_assert!(qace_lower_bound(&beh).unwrap() <= cace_lower_bound(&beh) + 1e-12);
    }

    #[test]
    fn nonsignaling_bound_ignores_relabelling_b(beh in behaviors()) {
        prop_assert!((nace_lower_bound(&beh) - nace_lower_bound(&beh.relabel_b())).abs() < 1e-12);
    }

    #[test]
    fn classical_mixtures_are_bounded((beh, delta) in classical_mixtures()) {
        let iv = *cace_tight_interval(&beh).unwrap().interval().unwrap();
        prop_assert!(iv.delta_min <= delta + 1e-9 && delta <= iv.delta_max + 1e-9);
        prop_assert!(cace_lower_bound(&beh) <= iv.min_ace + 1e-9);
        for bound in [cace_lower_bound(&beh), qace_lower_bound(&beh).unwrap(), nace_lower_bound(&beh)] {
            prop_assert!(bound <= delta.abs() + 1e-9);
        }
    }

    #[test]
    fn quantum_models_respect_the_quantum_bound(seed in any::<u64>()) {
        let m = random_qubit_projective_model(&mut SeededRng::new(seed));
        let beh = behavior(&m).unwrap();
        prop_assert!(qace_lower_bound(&beh).unwrap() <= quantum_ace(&m).unwrap() + 1e-9);
    }

    #[test]
    fn behavior_files_round_trip(beh in behaviors()) {
        let file = BehaviorFile::new(&beh, None);
        let back = BehaviorFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(back.behavior().unwrap(), beh);
    }

    #[test]
    fn sig12_keeps_twelve_digits(x in -1e6f64..1e6) {
        let y: f64 = sig12(x).parse().unwrap();
        prop_assert!((x - y).abs() <= 1e-11 * x.abs().max(1e-300));
    }
}
