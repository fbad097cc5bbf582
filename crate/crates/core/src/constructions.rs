//! Explicit quantum models that violate the classical bounds.
//!
//! Measurements live in the x–z plane: a qubit observable at angle `θ` is
//! `sin θ σ_X + cos θ σ_Z`. For Schmidt rank `D` the same 2x2 block is
//! repeated along the diagonal, padded with `+1` on the last level when `D`
//! is odd.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{cace_lower_bound, cace_lower_bounds};
use crate::matcore::{eig2_hermitian, ComplexMatrix};
use crate::optimize::{brent_max, nelder_mead_max, OptError};
use crate::quantum::{
    behavior, qace, BinaryPovm, BlochVector, QuantumError, QuantumInstrumentModel,
};
use crate::rng::SeededRng;
use crate::scenario::InstrumentalBehavior;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("Schmidt coefficients must be positive, got {0}")]
    NonPositive(f64),
    #[error("Schmidt coefficients must be in descending order")]
    NotDescending,
    #[error("Schmidt coefficients have square norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("a product state (Schmidt rank 1) admits no violation")]
    ProductState,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Optimizer(#[from] OptError),
}

/// Coefficients `λ_1 ≥ … ≥ λ_D > 0` of `Σ_i λ_i |i,i⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtState {
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementParams {
    /// `2 Σ_i λ_{2i-1} λ_{2i}` over consecutive pairs.
    pub lambda: f64,
    /// `λ_D²` for odd `D`, otherwise 0.
    pub gamma: f64,
}

impl SchmidtState {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, ConstructionError> {
        if let Some(&c) = coeffs.iter().find(|&&c| !(c > 0.0)) {
            return Err(ConstructionError::NonPositive(c));
        }
        if coeffs.windows(2).any(|w| w[1] > w[0]) {
            return Err(ConstructionError::NotDescending);
        }
        let norm: f64 = coeffs.iter().map(|c| c * c).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(ConstructionError::NotNormalized(norm));
        }
        Ok(Self { coeffs })
    }

    /// `(cos α, sin α)`, `0 < α ≤ π/4`.
    pub fn two_qubit(alpha: f64) -> Result<Self, ConstructionError> {
        Self::new(vec![alpha.cos(), alpha.sin()])
    }

    pub fn maximally_entangled(d: usize) -> Self {
        Self {
            coeffs: vec![1.0 / (d as f64).sqrt(); d],
        }
    }

    /// Uniform draws, sorted and normalized.
    pub fn random(d: usize, rng: &mut SeededRng) -> Self {
        let mut c: Vec<f64> = (0..d).map(|_| 0.05 + rng.uniform()).collect();
        c.sort_by(|a, b| b.total_cmp(a));
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self {
            coeffs: c.into_iter().map(|x| x / norm).collect(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn params(&self) -> EntanglementParams {
        let lambda = 2.0
            * self
                .coeffs
                .chunks_exact(2)
                .map(|p| p[0] * p[1])
                .sum::<f64>();
        let d = self.rank();
        let gamma = if d % 2 == 1 {
            self.coeffs[d - 1].powi(2)
        } else {
            0.0
        };
        EntanglementParams { lambda, gamma }
    }

    pub fn ket(&self) -> Vec<Complex64> {
        let d = self.rank();
        let mut k = vec![Complex64::default(); d * d];
        for (i, &c) in self.coeffs.iter().enumerate() {
            k[i * d + i] = Complex64::new(c, 0.0);
        }
        k
    }

    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.ket())
    }
}

/// Density matrix and entanglement parameters of a Schmidt state.
pub fn schmidt_state(
    coeffs: Vec<f64>,
) -> Result<(ComplexMatrix, EntanglementParams), ConstructionError> {
    let s = SchmidtState::new(coeffs)?;
    Ok((s.density(), s.params()))
}

/// Block-diagonal dichotomic measurement of angle `angle` on `C^d`.
pub fn family_observable(angle: f64, d: usize) -> BinaryPovm {
    assert!(d >= 2, "the measurement family needs d ≥ 2");
    let mut m = ComplexMatrix::zeros(d, d);
    let (s, c) = angle.sin_cos();
    let mut entries = vec![0.0; d * d];
    for i in 0..d / 2 {
        let (r0, r1) = (2 * i, 2 * i + 1);
        entries[r0 * d + r0] = c;
        entries[r0 * d + r1] = s;
        entries[r1 * d + r0] = s;
        entries[r1 * d + r1] = -c;
    }
    if d % 2 == 1 {
        entries[d * d - 1] = 1.0;
    }
    m = &m + &ComplexMatrix::from_real(d, d, &entries).expect("square layout");
    BinaryPovm::from_observable(&m).expect("block observable squares to the identity")
}

/// `⟨M(θ) ⊗ N(φ)⟩ = (1-γ) cos θ cos φ + Λ sin θ sin φ + γ`.
pub fn correlator(state: &SchmidtState, theta: f64, phi: f64) -> f64 {
    let EntanglementParams { lambda, gamma } = state.params();
    (1.0 - gamma) * theta.cos() * phi.cos() + lambda * theta.sin() * phi.sin() + gamma
}

/// Model built from a Schmidt state with Alice angles `thetas[x]` and Bob
/// angles `phis[a]`.
pub fn schmidt_model(
    state: &SchmidtState,
    thetas: [f64; 2],
    phis: [f64; 2],
) -> QuantumInstrumentModel {
    let d = state.rank();
    QuantumInstrumentModel::new(
        state.density(),
        thetas.map(|t| family_observable(t, d)),
        phis.map(|p| family_observable(p, d)),
    )
    .expect("family models are valid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuaranteedViolation {
    /// Main classical bound (third expression) minus the causal effect.
    pub violation: f64,
    /// `(√(1+Λ²) - 1)/4`.
    pub formula: f64,
    pub params: EntanglementParams,
    pub thetas: [f64; 2],
    pub phis: [f64; 2],
    #[serde(skip)]
    pub model: QuantumInstrumentModel,
}

/// Violation available from any entangled pure state with the fixed angles
/// `φ = (0, π/2)`, `θ = (0, π/2 + atan(1/Λ))`.
pub fn guaranteed_violation(
    state: &SchmidtState,
) -> Result<GuaranteedViolation, ConstructionError> {
    if state.rank() < 2 {
        return Err(ConstructionError::ProductState);
    }
    let params = state.params();
    let thetas = [0.0, FRAC_PI_2 + (1.0 / params.lambda).atan()];
    let phis = [0.0, FRAC_PI_2];
    let model = schmidt_model(state, thetas, phis);
    let beh = behavior(&model)?;
    let violation = cace_lower_bounds(&beh)[2] - qace(&model)?;
    Ok(GuaranteedViolation {
        violation,
        formula: ((1.0 + params.lambda.powi(2)).sqrt() - 1.0) / 4.0,
        params,
        thetas,
        phis,
        model,
    })
}

/// Qubit x–z plane settings on `(1-p) |ψ(α)⟩⟨ψ(α)| + p I/4`, with
/// `|ψ(α)⟩ = cos α |00⟩ + sin α |11⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarSetting {
    pub alpha: f64,
    pub noise: f64,
    pub thetas: [f64; 2],
    pub phis: [f64; 2],
}

impl PlanarSetting {
    pub fn pure(alpha: f64, thetas: [f64; 2], phis: [f64; 2]) -> Self {
        Self {
            alpha,
            noise: 0.0,
            thetas,
            phis,
        }
    }

    /// Observed table and interventional effect in closed form.
    pub fn tables(&self) -> (InstrumentalBehavior, f64) {
        let vis = 1.0 - self.noise;
        let (s2, c2) = (2.0 * self.alpha).sin_cos();
        let sign = |k: usize| if k == 0 { 1.0 } else { -1.0 };
        let beh = InstrumentalBehavior::from_fn(|a, b, x| {
            let (t, f) = (self.thetas[x], self.phis[a]);
            let ma = vis * c2 * t.cos();
            let mb = vis * c2 * f.cos();
            let e = vis * (t.cos() * f.cos() + s2 * t.sin() * f.sin());
            0.25 * (1.0 + sign(a) * ma + sign(b) * mb + sign(a) * sign(b) * e)
        })
        .expect("planar tables are normalized");
        let q = 0.5 * vis * c2.abs() * (self.phis[0].cos() - self.phis[1].cos()).abs();
        (beh, q)
    }

    /// Largest classical bound minus the causal effect.
    pub fn violation(&self) -> f64 {
        let (beh, q) = self.tables();
        cace_lower_bound(&beh) - q
    }

    pub fn model(&self) -> QuantumInstrumentModel {
        let ket = [
            Complex64::new(self.alpha.cos(), 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(self.alpha.sin(), 0.0),
        ];
        let pure = ComplexMatrix::projector(&ket).scale(1.0 - self.noise);
        let rho = &pure + &ComplexMatrix::identity(4).scale(self.noise / 4.0);
        let obs = |t: f64| BlochVector::in_xz_plane(t).povm();
        QuantumInstrumentModel::new(rho, self.thetas.map(obs), self.phis.map(obs))
            .expect("planar model is valid")
    }
}

/// `θ_0` maximizing the main classical bound for Bob angles `(φ, -φ)` and
/// `θ_1 = -π/2`.
pub fn theta0_closed_form(alpha: f64, phi0: f64) -> f64 {
    let (s2, c2) = (2.0 * alpha).sin_cos();
    (s2 * phi0.sin()).atan2(c2 + 3.0 * phi0.cos())
}

/// Main classical bound minus the causal effect in the restricted family
/// `φ_1 = -φ_0`, `θ_1 = -π/2`, `θ_0` from [`theta0_closed_form`]:
/// `¼(-3 - cos φ cos 2α + 2Λ sin φ + |(cos 2α + 3 cos φ, Λ sin φ)|)`.
pub fn restricted_violation(alpha: f64, phi0: f64) -> f64 {
    let (s2, c2) = (2.0 * alpha).sin_cos();
    let (sp, cp) = phi0.sin_cos();
    0.25 * (-3.0 - cp * c2 + 2.0 * s2 * sp + (c2 + 3.0 * cp).hypot(s2 * sp))
}

fn restricted_setting(alpha: f64, phi0: f64) -> PlanarSetting {
    PlanarSetting::pure(
        alpha,
        [theta0_closed_form(alpha, phi0), -FRAC_PI_2],
        [phi0, -phi0],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalModel {
    pub alpha: f64,
    pub phi0: f64,
    pub theta0: f64,
    pub violation: f64,
    pub classical_max: f64,
    pub qace: f64,
    #[serde(skip)]
    pub model: QuantumInstrumentModel,
}

/// `s = 3√2 + 2`; the optimum sits at `φ_0 = atan(2/√s)` and
/// `α = ½(atan(1/√s) + atan(√(s/2)))`.
pub fn optimal_angles() -> (f64, f64) {
    let s = 3.0 * 2f64.sqrt() + 2.0;
    let alpha = 0.5 * ((1.0 / s.sqrt()).atan() + (s / 2.0).sqrt().atan());
    let phi0 = (2.0 / s.sqrt()).atan();
    (alpha, phi0)
}

/// The two-qubit model reaching the largest violation `3 - 2√2`.
pub fn optimal_two_qubit() -> Result<OptimalModel, ConstructionError> {
    let (alpha, phi0) = optimal_angles();
    let setting = restricted_setting(alpha, phi0);
    let model = setting.model();
    let beh = behavior(&model)?;
    let classical_max = cace_lower_bound(&beh);
    let q = qace(&model)?;
    Ok(OptimalModel {
        alpha,
        phi0,
        theta0: setting.thetas[0],
        violation: classical_max - q,
        classical_max,
        qace: q,
        model,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub violation: f64,
    pub phi0: f64,
    pub theta0: f64,
}

/// Restricted-family violation at state angle `alpha`, maximized over `φ_0`.
pub fn v_alpha(alpha: f64) -> Result<AlphaPoint, ConstructionError> {
    let r = brent_max(|p| restricted_violation(alpha, p), 0.0, FRAC_PI_2, 1e-12)?;
    let phi0 = r.argmax[0];
    Ok(AlphaPoint {
        alpha,
        violation: r.value,
        phi0,
        theta0: theta0_closed_form(alpha, phi0),
    })
}

/// Largest violation at state angle `alpha` with all four angles free.
pub fn v_alpha_unrestricted(alpha: f64) -> Result<(f64, PlanarSetting), ConstructionError> {
    let f = |v: &[f64]| PlanarSetting::pure(alpha, [v[0], v[1]], [v[2], v[3]]).violation();
    let best = multi_start(f, 4, 0xa1fa)?;
    let v = &best.argmax;
    Ok((
        best.value,
        PlanarSetting::pure(alpha, [v[0], v[1]], [v[2], v[3]]),
    ))
}

fn multi_start(
    f: impl Fn(&[f64]) -> f64,
    dim: usize,
    seed: u64,
) -> Result<crate::optimize::OptResult, ConstructionError> {
    let mut rng = SeededRng::new(seed);
    let mut best: Option<crate::optimize::OptResult> = None;
    for _ in 0..8 {
        let start: Vec<f64> = (0..dim).map(|_| rng.range(-PI, PI)).collect();
        let r = nelder_mead_max(&f, &start, 0.4, 1e-12, 20_000)?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiPoint {
    pub phi: f64,
    pub violation: f64,
    pub alpha: f64,
    pub theta0: f64,
    pub theta1: f64,
}

/// Largest violation for Bob's pair `N^a` at angles `(φ, -φ)`, over pure
/// two-qubit states and Alice's angles (8-start Nelder–Mead).
pub fn v_phi(phi: f64) -> Result<PhiPoint, ConstructionError> {
    let f = |v: &[f64]| PlanarSetting::pure(v[0], [v[1], v[2]], [phi, -phi]).violation();
    let best = multi_start(f, 3, 0xb0b)?;
    let v = &best.argmax;
    Ok(PhiPoint {
        phi,
        violation: best.value,
        alpha: v[0].rem_euclid(PI),
        theta0: v[1],
        theta1: v[2],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessResult {
    /// `(|2n0 + n1| + |n0 - n1| - 3)/4`.
    pub witness: f64,
    /// Main classical bound minus the causal effect on the model.
    pub measured: f64,
    #[serde(skip)]
    pub model: QuantumInstrumentModel,
}

pub fn witness_closed_form(n0: &BlochVector, n1: &BlochVector) -> f64 {
    let [a, b] = [n0.components(), n1.components()];
    let norm = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sum = norm(std::array::from_fn(|k| 2.0 * a[k] + b[k]));
    let diff = norm(std::array::from_fn(|k| a[k] - b[k]));
    (sum + diff - 3.0) / 4.0
}

/// `(√(5+4c) + √(2-2c) - 3)/4` for unit vectors with `n0·n1 = c`.
pub fn witness_unit(c: f64) -> f64 {
    ((5.0 + 4.0 * c).sqrt() + (2.0 - 2.0 * c).sqrt() - 3.0) / 4.0
}

/// Maximally entangled qubits; Bob measures `n0`, `n1`; Alice measures the
/// transposed top eigenprojectors of `2N⁰₀ + N¹₀` and `N¹₀ - N⁰₀`.
pub fn incompatibility_witness(
    n0: &BlochVector,
    n1: &BlochVector,
) -> Result<WitnessResult, ConstructionError> {
    let e0 = n0.effect0();
    let e1 = n1.effect0();
    let ops = [&e0.scale(2.0) + &e1, &e1 - &e0];
    let alice = ops.map(|op| {
        let (_, vecs) = eig2_hermitian(&op).expect("Hermitian by construction");
        BinaryPovm::from_effect0(ComplexMatrix::projector(&vecs[0]).transpose())
            .expect("rank-one projector")
    });
    let model = QuantumInstrumentModel::new(
        crate::quantum::maximally_entangled(2),
        alice,
        [n0.povm(), n1.povm()],
    )?;
    let beh = behavior(&model)?;
    Ok(WitnessResult {
        witness: witness_closed_form(n0, n1),
        measured: cace_lower_bounds(&beh)[2] - qace(&model)?,
        model,
    })
}

/// Best witness over the angle between two Bloch vectors of length `r`.
pub fn max_witness_at_length(r: f64) -> Result<f64, ConstructionError> {
    let f = |c: f64| {
        let s = ((1.0 - c * c).max(0.0)).sqrt();
        let n0 = BlochVector::new([0.0, 0.0, r]).expect("r ≤ 1");
        let n1 = BlochVector::new([r * s, 0.0, r * c]).expect("r ≤ 1");
        witness_closed_form(&n0, &n1)
    };
    Ok(brent_max(f, -1.0, 1.0, 1e-12)?.value)
}

/// Bloch length below which no pair of equally noisy measurements gives a
/// positive witness.
pub fn noisy_incompatibility_threshold() -> Result<f64, ConstructionError> {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if max_witness_at_length(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest violation on the isotropic state `(1-p) Φ⁺ + p I/4` over planar
/// measurements (4 angles, 8-start Nelder–Mead).
pub fn isotropic_violation(p: f64) -> Result<(f64, PlanarSetting), ConstructionError> {
    let setting = |v: &[f64]| PlanarSetting {
        alpha: FRAC_PI_4,
        noise: p,
        thetas: [v[0], v[1]],
        phis: [v[2], v[3]],
    };
    let best = multi_start(|v| setting(v).violation(), 4, 0x150)?;
    Ok((best.value, setting(&best.argmax)))
}

/// Closed form of [`isotropic_violation`]: `(1-p) 3√6/8 - 3/4`.
pub fn isotropic_violation_closed_form(p: f64) -> f64 {
    (1.0 - p) * 3.0 * 6f64.sqrt() / 8.0 - 0.75
}

/// Noise level at which the optimized isotropic violation vanishes,
/// bisected on `[lo, hi]` until the bracket is narrower than `width`.
pub fn isotropic_threshold(lo: f64, hi: f64, width: f64) -> Result<(f64, f64), ConstructionError> {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if isotropic_violation(mid)?.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}
