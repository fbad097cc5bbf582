//! Closed-form lower bounds on the average causal effect.
//!
//! All bounds are functions of the observed table `p(a,b|x)` alone. The
//! classical expressions bound the signed effect `Δ = p(0|do(0)) - p(0|do(1))`,
//! and therefore the ACE, when the common cause is a classical variable. The
//! quantum bound holds for a shared quantum state with dichotomic
//! measurements, and the non-signaling bound for any non-signaling source.

use serde::Serialize;
use thiserror::Error;

use crate::scenario::{instrumental_inequality_slack, BellBehavior, InstrumentalBehavior};
use crate::tolerances::TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("factor {index} of the quantum bound is {value:.3e}; the behavior is not instrumental-feasible")]
    NegativeFactor { index: usize, value: f64 },
    #[error("Bell coefficients outside the admissible domain: {0}")]
    Domain(String),
}

/// The six classical lower bounds, in their conventional order.
pub fn cace_lower_bounds(beh: &InstrumentalBehavior) -> [f64; 6] {
    let p = |a, b, x| beh.get(a, b, x);
    [
        p(0, 0, 0) + p(1, 1, 1) - 1.0,
        p(1, 1, 0) + p(0, 0, 1) - 1.0,
        2.0 * p(0, 0, 0) + p(1, 1, 0) + p(0, 1, 1) + p(1, 1, 1) - 2.0,
        p(0, 0, 0) + 2.0 * p(1, 1, 0) + p(0, 0, 1) + p(1, 0, 1) - 2.0,
        p(0, 1, 0) + p(1, 1, 0) + 2.0 * p(0, 0, 1) + p(1, 1, 1) - 2.0,
        p(0, 0, 0) + p(1, 0, 0) + p(0, 0, 1) + 2.0 * p(1, 1, 1) - 2.0,
    ]
}

pub fn cace_lower_bound(beh: &InstrumentalBehavior) -> f64 {
    cace_lower_bounds(beh)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `S_a = Σ_x (-1)^x (p(a,0|x) - p(a,1|x))` for `a = 0, 1`.
pub fn swap_sums(beh: &InstrumentalBehavior) -> [f64; 2] {
    std::array::from_fn(|a| {
        (beh.get(a, 0, 0) - beh.get(a, 1, 0)) - (beh.get(a, 0, 1) - beh.get(a, 1, 1))
    })
}

fn diagonal_sum(beh: &InstrumentalBehavior) -> f64 {
    (0..2).map(|x| beh.get(0, 0, x) + beh.get(1, 1, x)).sum()
}

fn clamp_factor(index: usize, value: f64) -> Result<f64, BoundsError> {
    if value < -TOL.factor_clamp {
        return Err(BoundsError::NegativeFactor { index, value });
    }
    Ok(value.max(0.0))
}

/// Quantum lower bound for dichotomic measurements:
///
/// ```text
/// Σ_x (p(0,0|x) + p(1,1|x)) - 1 - min_± √((1 ± S_0)(1 ± S_1))
/// ```
///
/// The four factors `1 ± S_a` are non-negative on every behavior that obeys
/// the instrumental inequality.
pub fn qace_lower_bound(beh: &InstrumentalBehavior) -> Result<f64, BoundsError> {
    let [s0, s1] = swap_sums(beh);
    let plus = clamp_factor(0, 1.0 + s0)? * clamp_factor(1, 1.0 + s1)?;
    let minus = clamp_factor(2, 1.0 - s0)? * clamp_factor(3, 1.0 - s1)?;
    Ok(diagonal_sum(beh) - 1.0 - plus.sqrt().min(minus.sqrt()))
}

/// The quantum bound optimized over a single Bell expression
/// `-αE00 + βE01 + (1+α)E10 + (1-β)E11` with `β = (1+α)/(1+2α)`.
///
/// Returns `-∞` where the Cauchy–Schwarz cap is undefined
/// (`α ∈ {-1, -1/2, 0}`).
pub fn qace_lower_bound_parametric(beh: &InstrumentalBehavior, alpha: f64) -> f64 {
    let Ok(c) = BellCoefficients::family(alpha) else {
        return f64::NEG_INFINITY;
    };
    let Ok(cap) = c.cauchy_schwarz_cap() else {
        return f64::NEG_INFINITY;
    };
    let [s0, s1] = swap_sums(beh);
    2.0 * (beh.get(0, 0, 1) + beh.get(1, 1, 1)) - 1.0 - c.alpha * s0 - c.beta * s1 - cap / 2.0
}

/// Stationary points of [`qace_lower_bound_parametric`]:
/// `1 + 2α = √((1+S_1)/(1+S_0))` and `1 + 2α = -√((1-S_1)/(1-S_0))`.
///
/// Candidates that fall outside the admissible domain are dropped.
pub fn optimal_alphas(beh: &InstrumentalBehavior) -> Vec<f64> {
    let [s0, s1] = swap_sums(beh);
    [(1.0, 1.0 + s1, 1.0 + s0), (-1.0, 1.0 - s1, 1.0 - s0)]
        .into_iter()
        .filter_map(|(sign, num, den)| {
            let ratio = num / den;
            let t = sign * ratio.sqrt();
            let alpha = (t - 1.0) / 2.0;
            (ratio.is_finite() && ratio > 0.0 && BellCoefficients::family(alpha).is_ok())
                .then_some(alpha)
        })
        .collect()
}

/// `max_x p(0,0|x) + max_x p(1,1|x) - 1`, a lower bound on `Δ`.
pub fn nace_lower_bound_oriented(beh: &InstrumentalBehavior) -> f64 {
    let m = |a: usize, b: usize| beh.get(a, b, 0).max(beh.get(a, b, 1));
    m(0, 0) + m(1, 1) - 1.0
}

/// Non-signaling lower bound on the ACE: the oriented bound applied to the
/// table and to its relabeling `b → 1 - b`.
pub fn nace_lower_bound(beh: &InstrumentalBehavior) -> f64 {
    nace_lower_bound_oriented(beh).max(nace_lower_bound_oriented(&beh.relabel_b()))
}

/// Coefficients of `-αE00 + βE01 + γE10 + δE11`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl BellCoefficients {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self, BoundsError> {
        let c = Self {
            alpha,
            beta,
            gamma,
            delta,
        };
        if [alpha, beta, gamma, delta].iter().all(|v| v.is_finite()) {
            Ok(c)
        } else {
            Err(BoundsError::Domain(format!(
                "non-finite coefficients {c:?}"
            )))
        }
    }

    /// `γ = 1 + α`, `δ = 1 - β`: the expressions whose interventional terms
    /// reduce to `-2Δ`.
    pub fn tied(alpha: f64, beta: f64) -> Result<Self, BoundsError> {
        Self::new(alpha, beta, 1.0 + alpha, 1.0 - beta)
    }

    /// Tied coefficients with `β = (1+α)/(1+2α)`.
    pub fn family(alpha: f64) -> Result<Self, BoundsError> {
        if (1.0 + 2.0 * alpha).abs() < f64::EPSILON {
            return Err(BoundsError::Domain("1 + 2α = 0".into()));
        }
        Self::tied(alpha, (1.0 + alpha) / (1.0 + 2.0 * alpha))
    }

    fn tied_check(&self) -> Result<(f64, f64), BoundsError> {
        let scale = 1.0 + self.alpha.abs() + self.beta.abs();
        if (self.gamma - 1.0 - self.alpha).abs() > 1e-12 * scale
            || (self.delta - 1.0 + self.beta).abs() > 1e-12 * scale
        {
            return Err(BoundsError::Domain(
                "requires γ = 1 + α and δ = 1 - β".into(),
            ));
        }
        let a = self.alpha * self.beta;
        let c = (1.0 + self.alpha) * (1.0 - self.beta);
        if !(a * c > 0.0) {
            return Err(BoundsError::Domain(format!(
                "αβ(1+α)(1-β) = {} is not positive",
                a * c
            )));
        }
        Ok((a, c))
    }

    /// `ξ = α/β + β/α + (α+β)/(1+α) + (α+β)/(β-1)`.
    pub fn xi(&self) -> Result<f64, BoundsError> {
        self.tied_check()?;
        let (al, be) = (self.alpha, self.beta);
        Ok(al / be + be / al + (al + be) / (1.0 + al) + (al + be) / (be - 1.0))
    }

    /// `|α+β| (√(c/a) + √(a/c))` with `a = αβ`, `c = (1+α)(1-β)`.
    pub fn cauchy_schwarz_cap(&self) -> Result<f64, BoundsError> {
        let (a, c) = self.tied_check()?;
        let xi = self.xi()?;
        if !(-2.0 - 1e-9..=2.0 + 1e-9).contains(&xi) {
            return Err(BoundsError::Domain(format!(
                "ξ = {xi} lies outside [-2, 2]"
            )));
        }
        Ok((self.alpha + self.beta).abs() * ((c / a).sqrt() + (a / c).sqrt()))
    }
}

pub fn bell_expression(bell: &BellBehavior, c: &BellCoefficients) -> f64 {
    -c.alpha * bell.correlator(0, 0)
        + c.beta * bell.correlator(0, 1)
        + c.gamma * bell.correlator(1, 0)
        + c.delta * bell.correlator(1, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub classical_six: [f64; 6],
    pub classical_max: f64,
    /// `None` when the behavior lies outside the quantum bound's domain.
    pub quantum: Option<f64>,
    pub nonsignaling: f64,
    pub classical_max_clamped: f64,
    pub quantum_clamped: Option<f64>,
    pub nonsignaling_clamped: f64,
    pub instrumental_slack: f64,
}

pub fn bound_report(beh: &InstrumentalBehavior) -> BoundReport {
    let classical_six = cace_lower_bounds(beh);
    let classical_max = classical_six.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let quantum = qace_lower_bound(beh).ok();
    let nonsignaling = nace_lower_bound(beh);
    BoundReport {
        classical_six,
        classical_max,
        quantum,
        nonsignaling,
        classical_max_clamped: classical_max.max(0.0),
        quantum_clamped: quantum.map(|q| q.max(0.0)),
        nonsignaling_clamped: nonsignaling.max(0.0),
        instrumental_slack: instrumental_inequality_slack(beh),
    }
}
