//! Two-parameter slice of behavior space:
//! `p(0,0|x) = u_x`, `p(0,1|x) = 1/2 - u_x`, `p(1,0|x) = 0`, `p(1,1|x) = 1/2`
//! with `u_x ∈ [0, 1/2]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{cace_lower_bound, nace_lower_bound, qace_lower_bound};
use crate::numfmt::sig12;
use crate::scenario::InstrumentalBehavior;
use crate::tolerances::TOL;

pub fn slice_behavior(u0: f64, u1: f64) -> InstrumentalBehavior {
    let u = [u0, u1];
    InstrumentalBehavior::from_fn(|a, b, x| match (a, b) {
        (0, 0) => u[x],
        (0, 1) => 0.5 - u[x],
        (1, 0) => 0.0,
        _ => 0.5,
    })
    .expect("slice points are valid behaviors")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub i: usize,
    pub j: usize,
    pub u0: f64,
    pub u1: f64,
    pub classical: f64,
    pub quantum: f64,
    pub nonsignaling: f64,
}

impl RegionCell {
    pub fn classical_positive(&self) -> bool {
        self.classical > TOL.positivity
    }

    pub fn quantum_positive(&self) -> bool {
        self.quantum > TOL.positivity
    }

    pub fn ns_nonnegative(&self) -> bool {
        self.nonsignaling >= -TOL.positivity
    }

    pub fn csv_header() -> &'static str {
        "p00_0,p00_1,classical,quantum,nonsignaling,classical_pos,quantum_pos,ns_nonneg"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            sig12(self.u0),
            sig12(self.u1),
            sig12(self.classical),
            sig12(self.quantum),
            sig12(self.nonsignaling),
            u8::from(self.classical_positive()),
            u8::from(self.quantum_positive()),
            u8::from(self.ns_nonnegative()),
        )
    }
}

/// Bounds on an `n x n` grid over `[0, 1/2]²`, row-major in `u0`.
pub fn region_grid(n: usize) -> Vec<RegionCell> {
    assert!(n >= 2, "the grid needs at least two points per axis");
    let coord = |k: usize| 0.5 * k as f64 / (n - 1) as f64;
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let (u0, u1) = (coord(i), coord(j));
            let beh = slice_behavior(u0, u1);
            RegionCell {
                i,
                j,
                u0,
                u1,
                classical: cace_lower_bound(&beh),
                quantum: qace_lower_bound(&beh).expect("slice obeys the instrumental inequality"),
                nonsignaling: nace_lower_bound(&beh),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionSummary {
    pub cells: usize,
    pub classical_positive: usize,
    pub quantum_positive: usize,
    pub quantum_only: usize,
    pub classical_only: usize,
    pub ns_nonnegative: usize,
    /// Cells on the lines `u0 = 1/2` or `u1 = 1/2`.
    pub boundary_lines: usize,
    /// Whether the non-negative NS cells are exactly the boundary lines.
    pub ns_matches_lines: bool,
}

pub fn summarize(cells: &[RegionCell], n: usize) -> RegionSummary {
    let on_line = |c: &RegionCell| c.i == n - 1 || c.j == n - 1;
    let count = |f: &dyn Fn(&RegionCell) -> bool| cells.iter().filter(|c| f(c)).count();
    RegionSummary {
        cells: cells.len(),
        classical_positive: count(&|c| c.classical_positive()),
        quantum_positive: count(&|c| c.quantum_positive()),
        quantum_only: count(&|c| c.quantum_positive() && !c.classical_positive()),
        classical_only: count(&|c| c.classical_positive() && !c.quantum_positive()),
        ns_nonnegative: count(&|c| c.ns_nonnegative()),
        boundary_lines: count(&on_line),
        ns_matches_lines: cells.iter().all(|c| c.ns_nonnegative() == on_line(c)),
    }
}
