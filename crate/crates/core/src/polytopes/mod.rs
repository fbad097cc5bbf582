//! Polytope oracles: the classical instrumental polytope spanned by the 16
//! deterministic strategies, the 24-vertex non-signaling Bell polytope, and
//! LP-tight ACE intervals over either vertex set.

pub mod local;
pub mod lp;
pub mod nonsignaling;

use serde::Serialize;
use thiserror::Error;

use crate::scenario::{DoTable, InstrumentalBehavior};

pub use local::{cace_tight_interval, local_strategies, DeterministicStrategy};
pub use lp::{lp_solve, LinearProgram, LpError, LpSolution, LpStatus};
pub use nonsignaling::{is_ns_extremal, nace_tight, ns_vertices, NsVertex, VertexKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("LP ended with status {0:?}")]
    Solver(LpStatus),
}

/// Range of the signed effect `Δ = q[0][0] - q[0][1]` over all decompositions
/// of a behavior, folded to ACE values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AceInterval {
    pub delta_min: f64,
    pub delta_max: f64,
    pub min_ace: f64,
    pub max_ace: f64,
}

impl AceInterval {
    fn from_deltas(delta_min: f64, delta_max: f64) -> Self {
        let min_ace = if delta_min <= 0.0 && 0.0 <= delta_max {
            0.0
        } else {
            delta_min.abs().min(delta_max.abs())
        };
        Self {
            delta_min,
            delta_max,
            min_ace,
            max_ace: delta_min.abs().max(delta_max.abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum TightAce {
    Feasible(AceInterval),
    /// The behavior is not a mixture of the vertices.
    Infeasible,
}

impl TightAce {
    pub fn interval(&self) -> Option<&AceInterval> {
        match self {
            TightAce::Feasible(iv) => Some(iv),
            TightAce::Infeasible => None,
        }
    }
}

/// Minimizes and maximizes `Δ` over weights on `vertices` that reproduce
/// `beh`.
pub fn tight_interval(
    vertices: &[(InstrumentalBehavior, DoTable)],
    beh: &InstrumentalBehavior,
) -> Result<TightAce, PolytopeError> {
    let mut a_eq = Vec::with_capacity(9);
    let mut b_eq = Vec::with_capacity(9);
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                a_eq.push(vertices.iter().map(|(v, _)| v.get(a, b, x)).collect());
                b_eq.push(beh.get(a, b, x));
            }
        }
    }
    a_eq.push(vec![1.0; vertices.len()]);
    b_eq.push(1.0);
    let delta: Vec<f64> = vertices.iter().map(|(_, q)| q.delta()).collect();

    let mut extremes = [0.0; 2];
    for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
        let lp = LinearProgram::new(
            delta.iter().map(|d| sign * d).collect(),
            a_eq.clone(),
            b_eq.clone(),
        )?;
        let sol = lp_solve(&lp);
        match sol.status {
            LpStatus::Optimal => extremes[k] = sign * sol.objective,
            LpStatus::Infeasible => return Ok(TightAce::Infeasible),
            status => return Err(PolytopeError::Solver(status)),
        }
    }
    Ok(TightAce::Feasible(AceInterval::from_deltas(
        extremes[0],
        extremes[1],
    )))
}

/// Rank of a real matrix by Gaussian elimination with partial pivoting.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let p = (r..m.len())
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        if m[p][c].abs() <= tol {
            continue;
        }
        m.swap(r, p);
        for i in r + 1..m.len() {
            let f = m[i][c] / m[r][c];
            for k in c..cols {
                m[i][k] -= f * m[r][k];
            }
        }
        r += 1;
    }
    r
}
