//! Numerical tolerances shared across the crate.

/// Every threshold used by validation, solvers and region flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Normalization and range checks on probability tables.
    pub probability: f64,
    /// Entrywise Hermiticity check.
    pub hermitian: f64,
    /// Smallest admissible eigenvalue of a PSD matrix is `-psd`.
    pub psd: f64,
    /// Entrywise completeness of POVM effects.
    pub povm: f64,
    /// Largest imaginary residue accepted when a trace should be real.
    pub imaginary: f64,
    /// Slack under which a provably non-negative factor is clamped to zero.
    pub factor_clamp: f64,
    /// Phase-one residual under which an LP is declared feasible.
    pub lp_feasibility: f64,
    /// A bound counts as non-trivial only above this value.
    pub positivity: f64,
    /// Norm slack allowed on Bloch vectors.
    pub bloch: f64,
}

pub const TOL: Tolerances = Tolerances {
    probability: 1e-9,
    hermitian: 1e-10,
    psd: 1e-10,
    povm: 1e-10,
    imaginary: 1e-9,
    factor_clamp: 1e-9,
    lp_feasibility: 1e-9,
    positivity: 1e-9,
    bloch: 1e-12,
};
