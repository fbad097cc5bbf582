//! Dense two-phase simplex for `min c·x` subject to `A x = b`, `x ≥ 0`.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! leaving basic variable on ratio ties), so the method terminates on
//! degenerate problems.

use serde::Serialize;
use thiserror::Error;

use crate::tolerances::TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("constraint row {row} has {found} columns, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{rows} constraint rows but {rhs} right-hand sides")]
    RhsMismatch { rows: usize, rhs: usize },
    #[error("non-finite coefficient in the linear program")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    a_eq: Vec<Vec<f64>>,
    b_eq: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, a_eq: Vec<Vec<f64>>, b_eq: Vec<f64>) -> Result<Self, LpError> {
        let n = objective.len();
        if a_eq.len() != b_eq.len() {
            return Err(LpError::RhsMismatch {
                rows: a_eq.len(),
                rhs: b_eq.len(),
            });
        }
        for (row, r) in a_eq.iter().enumerate() {
            if r.len() != n {
                return Err(LpError::DimensionMismatch {
                    row,
                    expected: n,
                    found: r.len(),
                });
            }
        }
        let finite = objective
            .iter()
            .chain(b_eq.iter())
            .chain(a_eq.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(LpError::NonFinite);
        }
        Ok(Self {
            objective,
            a_eq,
            b_eq,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.a_eq.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn a_eq(&self) -> &[Vec<f64>] {
        &self.a_eq
    }

    pub fn b_eq(&self) -> &[f64] {
        &self.b_eq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap reached; the result is not trustworthy.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; meaningful only when `status` is `Optimal`.
    pub objective: f64,
    pub x: Vec<f64>,
}

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-11;

struct Tableau {
    rows: Vec<Vec<f64>>, // last entry is the right-hand side
    basis: Vec<usize>,
    width: usize,
}

enum Phase {
    Optimal,
    Unbounded,
    Stalled,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn run(&mut self, cost: &[f64], allowed: usize) -> Phase {
        let max_iter = 1000 + 50 * (self.width + self.rows.len());
        for _ in 0..max_iter {
            let entering = (0..allowed).find(|&j| {
                let reduced = cost[j]
                    - (0..self.rows.len())
                        .map(|i| cost[self.basis[i]] * self.rows[i][j])
                        .sum::<f64>();
                reduced < -REDUCED_COST_TOL
            });
            let Some(j) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][j];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Phase::Unbounded;
            };
            self.pivot(r, j);
        }
        Phase::Stalled
    }
}

/// Solves the program with the two-phase simplex method.
pub fn lp_solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_vars();
    let m = lp.num_constraints();
    let width = n + m;
    let rows = (0..m)
        .map(|i| {
            let sign = if lp.b_eq[i] < 0.0 { -1.0 } else { 1.0 };
            let mut row = vec![0.0; width + 1];
            for j in 0..n {
                row[j] = sign * lp.a_eq[i][j];
            }
            row[n + i] = 1.0;
            row[width] = sign * lp.b_eq[i];
            row
        })
        .collect();
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        width,
    };

    let phase1_cost: Vec<f64> = (0..width).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    let failed = |status| LpSolution {
        status,
        objective: f64::NAN,
        x: vec![0.0; n],
    };
    match t.run(&phase1_cost, width) {
        Phase::Optimal => {}
        Phase::Stalled => return failed(LpStatus::Stalled),
        Phase::Unbounded => unreachable!("phase one is bounded below by zero"),
    }
    let infeasibility: f64 = (0..m).filter(|&i| t.basis[i] >= n).map(|i| t.rhs(i)).sum();
    if infeasibility > TOL.lp_feasibility {
        return failed(LpStatus::Infeasible);
    }

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are linearly dependent and are dropped.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].abs() > 1e-9) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut cost = lp.objective.clone();
    cost.resize(width, 0.0);
    match t.run(&cost, n) {
        Phase::Optimal => {
            let mut x = vec![0.0; n];
            for (i, &b) in t.basis.iter().enumerate() {
                x[b] = t.rhs(i).max(0.0);
            }
            let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            LpSolution {
                status: LpStatus::Optimal,
                objective,
                x,
            }
        }
        Phase::Unbounded => failed(LpStatus::Unbounded),
        Phase::Stalled => failed(LpStatus::Stalled),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use approx::assert_abs_diff_eq;

    fn lp(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> LinearProgram {
        LinearProgram::new(c, a, b).unwrap()
    }

    #[test]
    fn trivial_programs() {
        let s = lp_solve(&lp(vec![1.0], vec![vec![1.0]], vec![1.0]));
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.objective, 1.0);
        let s = lp_solve(&lp(vec![1.0], vec![vec![1.0]], vec![-1.0]));
        assert_eq!(s.status, LpStatus::Infeasible);
        // min -x0 with x0 - x1 = 0 is unbounded.
        let s = lp_solve(&lp(vec![-1.0, 0.0], vec![vec![1.0, -1.0]], vec![0.0]));
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn degenerate_hand_solved_instance() {
        // min x1 + 2x2 + 3x3, x1 + x2 + x3 = 1, x1 - x2 = 0, plus a redundant
        // copy of the first row. Optimum x = (1/2, 1/2, 0), value 3/2.
        let s = lp_solve(&lp(
            vec![1.0, 2.0, 3.0],
            vec![
                vec![1.0, 1.0, 1.0],
                vec![1.0, -1.0, 0.0],
                vec![2.0, 2.0, 2.0],
            ],
            vec![1.0, 0.0, 2.0],
        ));
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.objective, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn transportation_toy() {
        // Two sources (supply 1, 1), two sinks (demand 1.5, 0.5); costs
        // [[1, 3], [2, 1]]. Hand solution: ship 1 on (0,0), 0.5 on (1,0),
        // 0.5 on (1,1), cost 1 + 1 + 0.5 = 2.5.
        let s = lp_solve(&lp(
            vec![1.0, 3.0, 2.0, 1.0],
            vec![
                vec![1.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0, 0.0],
                vec![0.0, 1.0, 0.0, 1.0],
            ],
            vec![1.0, 1.0, 1.5, 0.5],
        ));
        assert_eq!(s.status, LpStatus::Optimal);
        assert_abs_diff_eq!(s.objective, 2.5, epsilon = 1e-12);
    }

    fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
            if a[p][c].abs() < 1e-10 {
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

    // Best basic feasible solution by exhaustive enumeration of column
    // subsets; valid for full-row-rank systems with bounded feasible sets.
    fn brute_force(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
        let (m, n) = (a.len(), c.len());
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            let sq = a
                .iter()
                .map(|r| cols.iter().map(|&j| r[j]).collect())
                .collect();
            if let Some(xb) = solve_square(sq, b.to_vec()) {
                if xb.iter().all(|&v| v >= -1e-9) {
                    let val: f64 = cols.iter().zip(&xb).map(|(&j, v)| c[j] * v).sum();
                    best = Some(best.map_or(val, |bv: f64| bv.min(val)));
                }
            }
        }
        best
    }

    #[test]
    fn matches_basic_solution_enumeration() {
        let mut rng = SeededRng::new(99);
        for _ in 0..200 {
            let n = 7;
            let m = 3;
            // First row sums all variables, which keeps the feasible set bounded.
            let mut a = vec![vec![1.0; n]];
            for _ in 1..m {
                a.push((0..n).map(|_| rng.range(-1.0, 1.0)).collect());
            }
            let feasible = rng.uniform() < 0.7;
            let b = if feasible {
                let x0: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
                a.iter()
                    .map(|r| r.iter().zip(&x0).map(|(u, v)| u * v).sum())
                    .collect()
            } else {
                (0..m)
                    .map(|i| if i == 0 { 1.0 } else { rng.range(-3.0, 3.0) })
                    .collect::<Vec<f64>>()
            };
            let c: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
            let s = lp_solve(&lp(c.clone(), a.clone(), b.clone()));
            match brute_force(&c, &a, &b) {
                Some(v) => {
                    assert_eq!(s.status, LpStatus::Optimal);
                    assert_abs_diff_eq!(s.objective, v, epsilon = 1e-9);
                    for (row, rhs) in a.iter().zip(&b) {
                        let lhs: f64 = row.iter().zip(&s.x).map(|(u, v)| u * v).sum();
                        assert_abs_diff_eq!(lhs, *rhs, epsilon = 1e-9);
                    }
                }
                None => assert_eq!(s.status, LpStatus::Infeasible),
            }
        }
    }

    #[test]
    fn rejects_malformed_programs() {
        assert!(LinearProgram::new(vec![1.0, 2.0], vec![vec![1.0]], vec![1.0]).is_err());
        assert!(LinearProgram::new(vec![1.0], vec![vec![1.0]], vec![]).is_err());
        assert!(LinearProgram::new(vec![f64::NAN], vec![vec![1.0]], vec![1.0]).is_err());
    }
}
