//! Quantum realizations of the instrumental scenario.
//!
//! Alice measures setting `x` and obtains `a`; Bob's measurement is chosen by
//! `a`. With a shared state `ρ` the observed and interventional tables are
//!
//! ```text
//! p(a,b|x)   = Tr[(M^x_a ⊗ N^a_b) ρ]
//! p(b|do(a)) = Tr[N^a_b ρ_B]
//! ```
//!
//! Measurements are stored effect-wise; dichotomic observables are derived
//! views.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{
    check_density, eig2_hermitian, expectation, partial_trace, tensor, ComplexMatrix, MatError,
    Subsystem,
};
use crate::rng::SeededRng;
use crate::scenario::{ace, BellBehavior, DoTable, InstrumentalBehavior, ScenarioError};
use crate::tolerances::TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid post-processing: {0}")]
    InvalidPostProcessing(String),
    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNorm(f64),
    #[error("invalid model JSON: {0}")]
    Json(String),
}

fn validate_effects(effects: &[ComplexMatrix]) -> Result<(), QuantumError> {
    let first = effects
        .first()
        .ok_or_else(|| QuantumError::InvalidPovm("no effects".into()))?;
    let d = first.rows();
    let mut sum = ComplexMatrix::zeros(d, d);
    for (i, e) in effects.iter().enumerate() {
        if e.rows() != d || e.cols() != d {
            return Err(QuantumError::InvalidPovm(format!(
                "effect {i} has the wrong shape"
            )));
        }
        let report = check_density(e);
        if !report.is_psd {
            return Err(QuantumError::InvalidPovm(format!(
                "effect {i} is not positive semidefinite (min eigenvalue {:.3e})",
                report.min_eigenvalue
            )));
        }
        sum = &sum + e;
    }
    let defect = sum.max_abs_diff(&ComplexMatrix::identity(d));
    if defect > TOL.povm {
        return Err(QuantumError::InvalidPovm(format!(
            "effects do not sum to the identity (deviation {defect:.3e})"
        )));
    }
    Ok(())
}

/// Two-outcome POVM `(E_0, E_1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinaryPovm {
    effects: [ComplexMatrix; 2],
}

impl BinaryPovm {
    pub fn new(e0: ComplexMatrix, e1: ComplexMatrix) -> Result<Self, QuantumError> {
        let povm = Self { effects: [e0, e1] };
        povm.validate()?;
        Ok(povm)
    }

    /// Completes `E_0` with `E_1 = I - E_0`.
    pub fn from_effect0(e0: ComplexMatrix) -> Result<Self, QuantumError> {
        let e1 = &ComplexMatrix::identity(e0.rows()) - &e0;
        Self::new(e0, e1)
    }

    /// Effects `((I + M)/2, (I - M)/2)` of a dichotomic observable `M`.
    pub fn from_observable(m: &ComplexMatrix) -> Result<Self, QuantumError> {
        let id = ComplexMatrix::identity(m.rows());
        Self::new((&id + m).scale(0.5), (&id - m).scale(0.5))
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        validate_effects(&self.effects)
    }

    pub fn effect(&self, outcome: usize) -> &ComplexMatrix {
        &self.effects[outcome]
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    /// `E_0 - E_1`.
    pub fn observable(&self) -> ComplexMatrix {
        &self.effects[0] - &self.effects[1]
    }
}

/// POVM with any number of outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self, QuantumError> {
        validate_effects(&effects)?;
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// Qubit effect `(I + n·σ)/2`, `|n| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(n: [f64; 3]) -> Result<Self, QuantumError> {
        let v = Self(n);
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + TOL.bloch {
            return Err(QuantumError::BlochNorm(norm));
        }
        Ok(v)
    }

    /// Unit vector at polar angle `theta` from `z` inside the x–z plane.
    pub fn in_xz_plane(theta: f64) -> Self {
        Self([theta.sin(), 0.0, theta.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Self, QuantumError> {
        Self::new(self.0.map(|x| x * s))
    }

    /// `n·σ`.
    pub fn sigma(&self) -> ComplexMatrix {
        let [x, y, z] = self.0;
        let mut m = ComplexMatrix::pauli_x().scale(x);
        m = &m + &ComplexMatrix::pauli_y().scale(y);
        &m + &ComplexMatrix::pauli_z().scale(z)
    }

    pub fn effect0(&self) -> ComplexMatrix {
        (&ComplexMatrix::identity(2) + &self.sigma()).scale(0.5)
    }

    pub fn povm(&self) -> BinaryPovm {
        BinaryPovm::from_observable(&self.sigma()).expect("Bloch effects are valid")
    }
}

/// Shared state plus Alice's POVMs `alice[x]` and Bob's POVMs `bob[a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumInstrumentModel {
    dims: (usize, usize),
    rho: ComplexMatrix,
    alice: [BinaryPovm; 2],
    bob: [BinaryPovm; 2],
}

impl QuantumInstrumentModel {
    pub fn new(
        rho: ComplexMatrix,
        alice: [BinaryPovm; 2],
        bob: [BinaryPovm; 2],
    ) -> Result<Self, QuantumError> {
        let model = Self {
            dims: (alice[0].dim(), bob[0].dim()),
            rho,
            alice,
            bob,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        let (da, db) = self.dims;
        if self.rho.rows() != da * db || self.rho.cols() != da * db {
            return Err(QuantumError::InvalidState(format!(
                "state is {}x{}, expected {}x{}",
                self.rho.rows(),
                self.rho.cols(),
                da * db,
                da * db
            )));
        }
        validate_state(&self.rho)?;
        for (x, m) in self.alice.iter().enumerate() {
            if m.dim() != da {
                return Err(QuantumError::InvalidPovm(format!(
                    "Alice setting {x} has dimension {}",
                    m.dim()
                )));
            }
            m.validate()?;
        }
        for (a, n) in self.bob.iter().enumerate() {
            if n.dim() != db {
                return Err(QuantumError::InvalidPovm(format!(
                    "Bob setting {a} has dimension {}",
                    n.dim()
                )));
            }
            n.validate()?;
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn alice(&self) -> &[BinaryPovm; 2] {
        &self.alice
    }

    pub fn bob(&self) -> &[BinaryPovm; 2] {
        &self.bob
    }

    pub fn from_json(s: &str) -> Result<Self, QuantumError> {
        let m: Self = serde_json::from_str(s).map_err(|e| QuantumError::Json(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }
}

/// Checks that `rho` is a density matrix.
pub fn validate_state(rho: &ComplexMatrix) -> Result<(), QuantumError> {
    let report = check_density(rho);
    if !report.is_hermitian {
        return Err(QuantumError::InvalidState("not Hermitian".into()));
    }
    if !report.is_psd {
        return Err(QuantumError::InvalidState(format!(
            "not positive semidefinite (min eigenvalue {:.3e})",
            report.min_eigenvalue
        )));
    }
    if (report.trace - 1.0).abs() > TOL.probability {
        return Err(QuantumError::InvalidState(format!(
            "trace {} != 1",
            report.trace
        )));
    }
    Ok(())
}

/// `p(a,b|x) = Tr[(M^x_a ⊗ N^a_b) ρ]`.
pub fn behavior(model: &QuantumInstrumentModel) -> Result<InstrumentalBehavior, QuantumError> {
    let mut p = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                let op = tensor(model.alice[x].effect(a), model.bob[a].effect(b));
                p[a][b][x] = expectation(&op, &model.rho)?;
            }
        }
    }
    Ok(InstrumentalBehavior::new(p)?)
}

/// Bell-scenario table obtained by letting Bob choose his setting freely.
pub fn bell_behavior(model: &QuantumInstrumentModel) -> Result<BellBehavior, QuantumError> {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    let op = tensor(model.alice[x].effect(a), model.bob[y].effect(b));
                    p[a][b][x][y] = expectation(&op, &model.rho)?;
                }
            }
        }
    }
    Ok(BellBehavior::new(p)?)
}

/// `q[b][a] = Tr[N^a_b ρ_B]`.
pub fn do_table(model: &QuantumInstrumentModel) -> Result<DoTable, QuantumError> {
    let rho_b = partial_trace(&model.rho, model.dims, Subsystem::B)?;
    let mut q = [[0.0; 2]; 2];
    for b in 0..2 {
        for a in 0..2 {
            q[b][a] = expectation(model.bob[a].effect(b), &rho_b)?;
        }
    }
    Ok(DoTable::new(q)?)
}

/// Interventional causal effect `max_{a,a',b} Tr[(N^a_b - N^a'_b) ρ_B]`.
pub fn qace(model: &QuantumInstrumentModel) -> Result<f64, QuantumError> {
    Ok(ace(&do_table(model)?))
}

/// `(|00⟩ + … + |d-1,d-1⟩)/√d` as a density matrix.
pub fn maximally_entangled(d: usize) -> ComplexMatrix {
    let mut ket = vec![Complex64::default(); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        ket[i * d + i] = Complex64::new(amp, 0.0);
    }
    ComplexMatrix::projector(&ket)
}

/// Two-qubit maximally entangled state mixed with white noise of weight `p`.
pub fn isotropic_state(p: f64) -> ComplexMatrix {
    let noise = ComplexMatrix::identity(4).scale(p / 4.0);
    &maximally_entangled(2).scale(1.0 - p) + &noise
}

/// Haar-random unit vector in `C^d`.
pub fn random_pure_state(d: usize, rng: &mut SeededRng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.normal(), rng.normal()))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random separable state `Σ_λ p(λ) ρ_A^λ ⊗ ρ_B^λ` with `k_terms` pure
/// product components and flat-Dirichlet weights.
pub fn separable_sample(d_a: usize, d_b: usize, k_terms: usize, seed: u64) -> ComplexMatrix {
    assert!(k_terms >= 1, "a separable sample needs at least one term");
    let mut rng = SeededRng::new(seed);
    let weights = rng.simplex(k_terms);
    let mut rho = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
    for w in weights {
        let ra = ComplexMatrix::projector(&random_pure_state(d_a, &mut rng));
        let rb = ComplexMatrix::projector(&random_pure_state(d_b, &mut rng));
        rho = &rho + &tensor(&ra, &rb).scale(w);
    }
    rho
}

/// Rank-one qubit projective measurement along a uniformly random axis.
pub fn random_projective_qubit_with(rng: &mut SeededRng) -> BinaryPovm {
    BlochVector(rng.unit_vector3()).povm()
}

pub fn random_projective_qubit(seed: u64) -> BinaryPovm {
    random_projective_qubit_with(&mut SeededRng::new(seed))
}

/// Random pure two-qubit state with four random rank-one projective
/// measurements.
pub fn random_qubit_projective_model(rng: &mut SeededRng) -> QuantumInstrumentModel {
    let rho = ComplexMatrix::projector(&random_pure_state(4, rng));
    let alice = [
        random_projective_qubit_with(rng),
        random_projective_qubit_with(rng),
    ];
    let bob = [
        random_projective_qubit_with(rng),
        random_projective_qubit_with(rng),
    ];
    QuantumInstrumentModel::new(rho, alice, bob).expect("sampled model is valid")
}

/// Random `m`-outcome qubit POVM `G_i = S^{-1/2} A_i S^{-1/2}` from random
/// weighted rank-one operators `A_i` with `S = Σ A_i`.
pub fn random_qubit_povm(m: usize, rng: &mut SeededRng) -> Povm {
    assert!(m >= 2, "a random POVM needs at least two outcomes");
    let parts: Vec<ComplexMatrix> = (0..m)
        .map(|_| ComplexMatrix::projector(&random_pure_state(2, rng)).scale(rng.range(0.1, 1.0)))
        .collect();
    let total = parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, p| &acc + p);
    let (vals, vecs) = eig2_hermitian(&total).expect("sum of projectors is Hermitian");
    let mut inv_sqrt = ComplexMatrix::zeros(2, 2);
    for (lam, v) in vals.iter().zip(vecs.iter()) {
        inv_sqrt = &inv_sqrt + &ComplexMatrix::projector(v).scale(1.0 / lam.sqrt());
    }
    let effects: Vec<ComplexMatrix> = parts.iter().map(|p| &(&inv_sqrt * p) * &inv_sqrt).collect();
    // Cancel the O(ε) completeness error of the square root.
    let sum = effects
        .iter()
        .skip(1)
        .fold(effects[0].clone(), |acc, e| &acc + e);
    let fix = &ComplexMatrix::identity(2) - &sum;
    let mut effects = effects;
    effects[0] = &effects[0] + &fix;
    Povm::new(effects).expect("normalized POVM is valid")
}

/// Bob's POVMs `N^a_b = Σ_λ d(b|a,λ) G_λ` obtained by post-processing one
/// parent measurement; `post[λ][a][b] = d(b|a,λ)`.
pub fn compatible_bob_from_parent(
    parent: &Povm,
    post: &[[[f64; 2]; 2]],
) -> Result<[BinaryPovm; 2], QuantumError> {
    if post.len() != parent.len() {
        return Err(QuantumError::InvalidPostProcessing(format!(
            "{} post-processing rows for {} parent outcomes",
            post.len(),
            parent.len()
        )));
    }
    for (lam, row) in post.iter().enumerate() {
        for (a, d) in row.iter().enumerate() {
            if d.iter().any(|&v| !(v >= -TOL.probability))
                || (d[0] + d[1] - 1.0).abs() > TOL.probability
            {
                return Err(QuantumError::InvalidPostProcessing(format!(
                    "d(·|{a},{lam}) = {d:?} is not a distribution"
                )));
            }
        }
    }
    let dim = parent.effects()[0].rows();
    let build = |a: usize| -> Result<BinaryPovm, QuantumError> {
        let mut e = [
            ComplexMatrix::zeros(dim, dim),
            ComplexMatrix::zeros(dim, dim),
        ];
        for (g, d) in parent.effects().iter().zip(post) {
            for b in 0..2 {
                e[b] = &e[b] + &g.scale(d[a][b]);
            }
        }
        let [e0, e1] = e;
        BinaryPovm::new(e0, e1)
    };
    Ok([build(0)?, build(1)?])
}

/// Four-outcome parent `G_ij = (I + ((-1)^i n0 + (-1)^j n1)·σ)/4` whose
/// marginals are the unbiased effects of `n0` and `n1`. Valid whenever
/// `|n0 ± n1| ≤ 1`.
pub fn joint_parent(n0: &BlochVector, n1: &BlochVector) -> Result<Povm, QuantumError> {
    let mut effects = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let si = if i == 0 { 1.0 } else { -1.0 };
            let sj = if j == 0 { 1.0 } else { -1.0 };
            let v: [f64; 3] = std::array::from_fn(|k| si * n0.0[k] + sj * n1.0[k]);
            let n = BlochVector::new(v)?;
            effects.push(n.effect0().scale(0.5));
        }
    }
    Povm::new(effects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn z_basis() -> BinaryPovm {
        BinaryPovm::from_observable(&ComplexMatrix::pauli_z()).unwrap()
    }

    fn x_basis() -> BinaryPovm {
        BinaryPovm::from_observable(&ComplexMatrix::pauli_x()).unwrap()
    }

    fn ket00() -> ComplexMatrix {
        ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0])
    }

    #[test]
    fn product_eigenstate_behavior() {
        let m =
            QuantumInstrumentModel::new(ket00(), [z_basis(), z_basis()], [z_basis(), z_basis()])
                .unwrap();
        let p = behavior(&m).unwrap();
        assert_abs_diff_eq!(p.get(0, 0, 0), 1.0);
        assert_abs_diff_eq!(p.get(0, 0, 1), 1.0);
    }

    #[test]
    fn maximally_entangled_perfect_correlations() {
        let m = QuantumInstrumentModel::new(
            maximally_entangled(2),
            [z_basis(), z_basis()],
            [z_basis(), z_basis()],
        )
        .unwrap();
        let p = behavior(&m).unwrap();
        for x in 0..2 {
            assert_abs_diff_eq!(p.get(0, 0, x), 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(p.get(1, 1, x), 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(p.get(0, 1, x), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(qace(&m).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn xz_plane_model_matches_correlator_identity() {
        // α = π/4, θ0 = 0, θ1 = -π/2, φ0 = 0, φ1 = π/2.
        let obs = |t: f64| BlochVector::in_xz_plane(t).povm();
        let (t, f) = (
            [0.0, -std::f64::consts::FRAC_PI_2],
            [0.0, std::f64::consts::FRAC_PI_2],
        );
        let m = QuantumInstrumentModel::new(
            maximally_entangled(2),
            [obs(t[0]), obs(t[1])],
            [obs(f[0]), obs(f[1])],
        )
        .unwrap();
        let p = behavior(&m).unwrap();
        for x in 0..2 {
            for a in 0..2 {
                let corr = t[x].cos() * f[a].cos() + t[x].sin() * f[a].sin();
                let sa = if a == 0 { 1.0 } else { -1.0 };
                for b in 0..2 {
                    let sb = if b == 0 { 1.0 } else { -1.0 };
                    // Marginals vanish on the maximally entangled state.
                    assert_abs_diff_eq!(
                        p.get(a, b, x),
                        (1.0 + sa * sb * corr) / 4.0,
                        epsilon = 1e-14
                    );
                }
            }
        }
    }

    #[test]
    fn do_table_examples() {
        let m = QuantumInstrumentModel::new(
            maximally_entangled(2),
            [z_basis(), x_basis()],
            [x_basis(), z_basis()],
        )
        .unwrap();
        let q = do_table(&m).unwrap();
        for b in 0..2 {
            for a in 0..2 {
                assert_abs_diff_eq!(q.get(b, a), 0.5, epsilon = 1e-15);
            }
        }
        let m =
            QuantumInstrumentModel::new(ket00(), [z_basis(), z_basis()], [z_basis(), x_basis()])
                .unwrap();
        let q = do_table(&m).unwrap();
        assert_abs_diff_eq!(q.get(0, 0), 1.0);
        assert_abs_diff_eq!(q.get(0, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(qace(&m).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bell_table_projects_onto_instrumental_tables() {
        let mut rng = SeededRng::new(5);
        let m = random_qubit_projective_model(&mut rng);
        let bell = bell_behavior(&m).unwrap();
        assert!(bell.signaling_defect() < 1e-12);
        let mapped = crate::scenario::instrumental_from_bell(&bell);
        let direct = behavior(&m).unwrap();
        let q_map = crate::scenario::do_from_bell(&bell, 0).unwrap();
        let q_dir = do_table(&m).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    assert_abs_diff_eq!(mapped.get(a, b, x), direct.get(a, b, x), epsilon = 1e-14);
                }
                assert_abs_diff_eq!(q_map.get(b, a), q_dir.get(b, a), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn model_validation_errors() {
        let bad_state = ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.0]);
        assert!(matches!(
            QuantumInstrumentModel::new(bad_state, [z_basis(), z_basis()], [z_basis(), z_basis()]),
            Err(QuantumError::InvalidState(_))
        ));
        let not_psd = ComplexMatrix::diag(&[1.5, -0.5]);
        assert!(BinaryPovm::from_effect0(not_psd).is_err());
        let incomplete = BinaryPovm::new(
            ComplexMatrix::diag(&[1.0, 0.0]),
            ComplexMatrix::diag(&[0.0, 0.5]),
        );
        assert!(matches!(incomplete, Err(QuantumError::InvalidPovm(_))));
        assert!(BlochVector::new([1.0, 0.1, 0.0]).is_err());
    }

    #[test]
    fn separable_samples_are_states() {
        for k in 1..6 {
            let rho = separable_sample(2, 3, k, 11 + k as u64);
            let r = check_density(&rho);
            assert!(r.is_psd);
            assert_abs_diff_eq!(r.trace, 1.0, epsilon = 1e-12);
        }
        // k = 1 is a pure product state.
        let rho = separable_sample(2, 2, 1, 3);
        assert_abs_diff_eq!(expectation(&rho, &rho).unwrap(), 1.0, epsilon = 1e-12);
        let ra = partial_trace(&rho, (2, 2), Subsystem::A).unwrap();
        let rb = partial_trace(&rho, (2, 2), Subsystem::B).unwrap();
        assert!(tensor(&ra, &rb).max_abs_diff(&rho) < 1e-12);
        assert_eq!(separable_sample(2, 2, 4, 7), separable_sample(2, 2, 4, 7));
    }

    #[test]
    fn random_projectors_are_idempotent() {
        for seed in 0..20 {
            let p = random_projective_qubit(seed);
            let sum = p.effect(0) + p.effect(1);
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
            for k in 0..2 {
                let sq = p.effect(k) * p.effect(k);
                assert!(sq.max_abs_diff(p.effect(k)) < 1e-12);
            }
        }
        assert_eq!(random_projective_qubit(8), random_projective_qubit(8));
    }

    #[test]
    fn random_bloch_directions_are_isotropic() {
        // The mean of n uniform unit vectors has per-axis std 1/sqrt(3n);
        // for n = 1e5 the norm stays far below 0.02.
        let mut rng = SeededRng::new(2024);
        let n = 100_000;
        let mut mean = [0.0; 3];
        for _ in 0..n {
            let p = random_projective_qubit_with(&mut rng);
            let obs = p.observable();
            mean[0] += obs[(0, 1)].re;
            mean[1] += obs[(1, 0)].im;
            mean[2] += obs[(0, 0)].re;
        }
        let norm = mean
            .iter()
            .map(|m| (m / n as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(norm < 0.02, "mean Bloch vector norm {norm}");
    }

    #[test]
    fn parent_povm_examples() {
        let trivial = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let bob = compatible_bob_from_parent(&trivial, &[[[0.5, 0.5], [0.5, 0.5]]]).unwrap();
        for n in &bob {
            assert!(n.effect(0).max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.5])) < 1e-15);
        }

        let z = Povm::new(vec![
            ComplexMatrix::diag(&[1.0, 0.0]),
            ComplexMatrix::diag(&[0.0, 1.0]),
        ])
        .unwrap();
        let relabel = [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 1.0], [0.0, 1.0]]];
        let bob = compatible_bob_from_parent(&z, &relabel).unwrap();
        assert_eq!(bob[0], z_basis());
        assert_eq!(bob[1], z_basis());

        let n0 = BlochVector::new([0.0, 0.0, 0.5]).unwrap();
        let n1 = BlochVector::new([0.5, 0.0, 0.0]).unwrap();
        let parent = joint_parent(&n0, &n1).unwrap();
        // outcome (i, j): Bob's setting 0 reports i, setting 1 reports j.
        let post: Vec<[[f64; 2]; 2]> = (0..4)
            .map(|l| {
                let (i, j) = (l / 2, l % 2);
                let onehot = |k: usize| if k == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
                [onehot(i), onehot(j)]
            })
            .collect();
        let bob = compatible_bob_from_parent(&parent, &post).unwrap();
        assert!(bob[0].effect(0).max_abs_diff(&n0.effect0()) < 1e-15);
        assert!(bob[1].effect(0).max_abs_diff(&n1.effect0()) < 1e-15);

        assert!(compatible_bob_from_parent(&z, &[[[1.0, 0.0], [1.0, 0.0]]]).is_err());
        assert!(compatible_bob_from_parent(
            &z,
            &[[[0.7, 0.7], [1.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]]]
        )
        .is_err());
    }

    #[test]
    fn random_povms_are_valid() {
        let mut rng = SeededRng::new(77);
        for m in 2..6 {
            let g = random_qubit_povm(m, &mut rng);
            assert_eq!(g.len(), m);
        }
    }

    #[test]
    fn model_json_roundtrip() {
        let mut rng = SeededRng::new(12);
        let m = random_qubit_projective_model(&mut rng);
        let s = m.to_json();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["dims"], serde_json::json!([2, 2]));
        // alice[x][a] is a 2x2 matrix of [re, im] pairs.
        assert!(v["alice"][1][0][1][1].as_array().unwrap().len() == 2);
        let back = QuantumInstrumentModel::from_json(&s).unwrap();
        assert_eq!(back, m);
        let broken = s.replace("\"dims\":[2,2]", "\"dims\":[2,3]");
        assert!(QuantumInstrumentModel::from_json(&broken).is_err());
    }
}
