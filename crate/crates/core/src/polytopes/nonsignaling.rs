//! Non-signaling Bell polytope with two inputs and two outputs per party.

use serde::Serialize;

use super::{rank, tight_interval, PolytopeError, TightAce};
use crate::scenario::{
    do_from_bell, instrumental_from_bell, BellBehavior, DoTable, InstrumentalBehavior,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VertexKind {
    /// `a = f(x)`, `b = g(y)`.
    Local { f: [usize; 2], g: [usize; 2] },
    /// `a ⊕ b = xy ⊕ εx ⊕ ζy ⊕ η` with uniform marginals.
    PrBox { eps: usize, zeta: usize, eta: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NsVertex {
    pub bell: BellBehavior,
    pub kind: VertexKind,
}

fn flat(a: usize, b: usize, x: usize, y: usize) -> usize {
    ((a * 2 + b) * 2 + x) * 2 + y
}

/// Normalization and no-signaling equalities as rows over the 16 entries.
pub fn ns_equalities() -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            let mut r = vec![0.0; 16];
            for a in 0..2 {
                for b in 0..2 {
                    r[flat(a, b, x, y)] = 1.0;
                }
            }
            rows.push(r);
        }
    }
    for x in 0..2 {
        let mut r = vec![0.0; 16];
        for b in 0..2 {
            r[flat(0, b, x, 0)] = 1.0;
            r[flat(0, b, x, 1)] = -1.0;
        }
        rows.push(r);
    }
    for y in 0..2 {
        let mut r = vec![0.0; 16];
        for a in 0..2 {
            r[flat(a, 0, 0, y)] = 1.0;
            r[flat(a, 0, 1, y)] = -1.0;
        }
        rows.push(r);
    }
    rows
}

/// True when the positivity constraints active at `bell`, together with
/// the equalities, pin down a single point.
pub fn is_ns_extremal(bell: &BellBehavior) -> bool {
    let mut rows = ns_equalities();
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    if bell.get(a, b, x, y).abs() < 1e-12 {
                        let mut r = vec![0.0; 16];
                        r[flat(a, b, x, y)] = 1.0;
                        rows.push(r);
                    }
                }
            }
        }
    }
    rank(&rows, 1e-9) == 16
}

/// The 16 local deterministic vertices followed by the 8 PR boxes.
pub fn ns_vertices() -> Vec<NsVertex> {
    const FUNCTIONS: [[usize; 2]; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];
    let mut out = Vec::with_capacity(24);
    for f in FUNCTIONS {
        for g in FUNCTIONS {
            out.push(NsVertex {
                bell: BellBehavior::deterministic(f, g),
                kind: VertexKind::Local { f, g },
            });
        }
    }
    for eps in 0..2 {
        for zeta in 0..2 {
            for eta in 0..2 {
                out.push(NsVertex {
                    bell: BellBehavior::pr_box(eps, zeta, eta),
                    kind: VertexKind::PrBox { eps, zeta, eta },
                });
            }
        }
    }
    for v in &out {
        debug_assert!(
            v.bell.signaling_defect() == 0.0 && is_ns_extremal(&v.bell),
            "{:?}",
            v.kind
        );
    }
    out
}

/// Instrumental projections `(behavior, do-table)` of the vertices.
pub fn mapped_ns_vertices() -> Vec<(InstrumentalBehavior, DoTable)> {
    ns_vertices()
        .iter()
        .map(|v| {
            let q = do_from_bell(&v.bell, 0).expect("vertices are non-signaling");
            (instrumental_from_bell(&v.bell), q)
        })
        .collect()
}

/// Tight non-signaling ACE interval for `beh`.
pub fn nace_tight(beh: &InstrumentalBehavior) -> Result<TightAce, PolytopeError> {
    tight_interval(&mapped_ns_vertices(), beh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::nace_lower_bound;
    use crate::polytopes::local::DeterministicStrategy;
    use crate::rng::SeededRng;
    use approx::assert_abs_diff_eq;

    fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
            if a[p][c].abs() < 1e-9 {
                return None;
            }
            a.swap(c, p);
            b.swap(c, p);
            for r in 0..n {
                if r != c {
                    let f = a[r][c] / a[c][c];
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
        }
        Some((0..n).map(|i| b[i] / a[i][i]).collect())
    }

    #[test]
    fn vertex_enumeration_oracle() {
        // Every vertex saturates at least 8 positivity constraints. Solve the
        // equalities plus each 8-subset of saturated entries and keep the
        // non-negative unique solutions.
        let eq = ns_equalities();
        let rhs_eq = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let mut found: Vec<Vec<f64>> = Vec::new();
        for mask in 0u32..(1 << 16) {
            if mask.count_ones() != 8 {
                continue;
            }
            let mut a = eq.clone();
            let mut b = rhs_eq.to_vec();
            for k in 0..16 {
                if mask >> k & 1 == 1 {
                    let mut r = vec![0.0; 16];
                    r[k] = 1.0;
                    a.push(r);
                    b.push(0.0);
                }
            }
            if let Some(x) = solve(a, b) {
                if x.iter().all(|&v| v >= -1e-9)
                    && !found
                        .iter()
                        .any(|f| f.iter().zip(&x).all(|(u, v)| (u - v).abs() < 1e-9))
                {
                    found.push(x);
                }
            }
        }
        assert_eq!(found.len(), 24);
        let verts = ns_vertices();
        for v in &verts {
            let t = v.bell.table();
            let flat_v: Vec<f64> = (0..16)
                .map(|k| t[k >> 3][(k >> 2) & 1][(k >> 1) & 1][k & 1])
                .collect();
            assert!(found
                .iter()
                .any(|f| f.iter().zip(&flat_v).all(|(u, v)| (u - v).abs() < 1e-12)));
        }
    }

    #[test]
    fn vertex_properties() {
        let verts = ns_vertices();
        assert_eq!(verts.len(), 24);
        for v in &verts {
            assert!(is_ns_extremal(&v.bell));
            if let VertexKind::PrBox { .. } = v.kind {
                for x in 0..2 {
                    for y in 0..2 {
                        assert_eq!(v.bell.correlator(x, y).abs(), 1.0);
                        assert_eq!(v.bell.get(0, 0, x, y) + v.bell.get(0, 1, x, y), 0.5);
                    }
                }
            }
        }
        assert!(!is_ns_extremal(&BellBehavior::uniform()));
        // Non-signaling on the instrumental side: q[b][a] ≥ max_x p(a,b|x).
        for (p, q) in mapped_ns_vertices() {
            for a in 0..2 {
                for b in 0..2 {
                    assert!(q.get(b, a) >= p.get(a, b, 0).max(p.get(a, b, 1)));
                }
            }
        }
    }

    #[test]
    fn local_vertices_map_to_strategies() {
        for v in ns_vertices() {
            if let VertexKind::Local { f, g } = v.kind {
                let s = DeterministicStrategy { f, g };
                assert_eq!(instrumental_from_bell(&v.bell), s.behavior());
                assert_eq!(do_from_bell(&v.bell, 0).unwrap(), s.do_table());
            }
        }
    }

    #[test]
    fn tight_examples() {
        let pr = instrumental_from_bell(&BellBehavior::pr_box(0, 0, 0));
        assert_abs_diff_eq!(nace_tight(&pr).unwrap().interval().unwrap().min_ace, 0.0);
        let chain = InstrumentalBehavior::deterministic_chain();
        assert_abs_diff_eq!(
            nace_tight(&chain).unwrap().interval().unwrap().min_ace,
            1.0,
            epsilon = 1e-12
        );
        let slice = InstrumentalBehavior::from_fn(|a, b, x| match (a, b) {
            (1, 1) => 0.5,
            (0, 0) => [0.5, 0.3][x],
            (0, 1) => [0.0, 0.2][x],
            _ => 0.0,
        })
        .unwrap();
        assert_abs_diff_eq!(
            nace_tight(&slice).unwrap().interval().unwrap().min_ace,
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn closed_form_is_tight_on_mixtures() {
        let verts = mapped_ns_vertices();
        let mut rng = SeededRng::new(41);
        for _ in 0..200 {
            // Sparse mixtures reach the boundary where the bound is positive.
            let k = 1 + rng.below(4);
            let picks: Vec<usize> = (0..k).map(|_| rng.below(24)).collect();
            let w = rng.simplex(k);
            let p = InstrumentalBehavior::from_fn(|a, b, x| {
                picks
                    .iter()
                    .zip(&w)
                    .map(|(&i, wi)| wi * verts[i].0.get(a, b, x))
                    .sum()
            })
            .unwrap();
            let tight = nace_tight(&p).unwrap().interval().unwrap().min_ace;
            assert_abs_diff_eq!(tight, nace_lower_bound(&p).max(0.0), epsilon = 1e-8);
        }
    }
}
