//! Probability tables of the instrumental and Bell scenarios.
//!
//! All variables are binary. Index conventions follow the tables' names:
//! an [`InstrumentalBehavior`] is `p[a][b][x]`, a [`DoTable`] is `q[b][a]`
//! (the probability of `b` when `A` is forced to `a`), and a
//! [`BellBehavior`] is `p[a][b][x][y]`.
//!
//! The Bell-to-instrumental projection identifies Bob's Bell setting `y`
//! with Alice's outcome `a`: `p(a,b|x) = p_Bell(a,b|x,a)`, while the
//! interventional table is Bob's marginal `q[b][a] = Σ_a' p_Bell(a',b|x,a)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt::sig12;
use crate::tolerances::TOL;

pub type Table3 = [[[f64; 2]; 2]; 2];
pub type Table4 = [[[[f64; 2]; 2]; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("entry {entry} = {value} lies outside [0, 1]")]
    OutOfRange { entry: String, value: f64 },
    #[error("{what} sums to {sum}, expected 1")]
    NotNormalized { what: String, sum: f64 },
    #[error("behavior is signaling (deviation {0:.3e})")]
    Signaling(f64),
    #[error("invalid JSON: {0}")]
    Json(String),
}

fn check_entry(entry: impl FnOnce() -> String, value: f64) -> Result<(), ScenarioError> {
    if !value.is_finite() || value < -TOL.probability || value > 1.0 + TOL.probability {
        return Err(ScenarioError::OutOfRange {
            entry: entry(),
            value,
        });
    }
    Ok(())
}

fn check_sum(what: impl FnOnce() -> String, sum: f64) -> Result<(), ScenarioError> {
    if (sum - 1.0).abs() > TOL.probability {
        return Err(ScenarioError::NotNormalized { what: what(), sum });
    }
    Ok(())
}

/// Observed distribution `p(a,b|x)` of the instrumental scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstrumentalBehavior {
    #[serde(rename = "pabx")]
    p: Table3,
}

impl InstrumentalBehavior {
    pub fn new(p: Table3) -> Result<Self, ScenarioError> {
        let beh = Self { p };
        beh.validate()?;
        Ok(beh)
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize) -> f64) -> Result<Self, ScenarioError> {
        let mut p = [[[0.0; 2]; 2]; 2];
        for (a, pa) in p.iter_mut().enumerate() {
            for (b, pab) in pa.iter_mut().enumerate() {
                for (x, v) in pab.iter_mut().enumerate() {
                    *v = f(a, b, x);
                }
            }
        }
        Self::new(p)
    }

    pub fn uniform() -> Self {
        Self {
            p: [[[0.25; 2]; 2]; 2],
        }
    }

    /// `a = x`, `b = a`: the behavior of a deterministic causal chain.
    pub fn deterministic_chain() -> Self {
        Self::from_fn(|a, b, x| f64::from(u8::from(a == x && b == a))).unwrap()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    check_entry(|| format!("p({a},{b}|{x})"), self.p[a][b][x])?;
                }
            }
        }
        for x in 0..2 {
            let s: f64 = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| self.p[a][b][x])
                .sum();
            check_sum(|| format!("p(·,·|{x})"), s)?;
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, x: usize) -> f64 {
        self.p[a][b][x]
    }

    pub fn table(&self) -> &Table3 {
        &self.p
    }

    /// Clamps negative entries to zero and rescales each `x`-slice to sum
    /// to one. Never applied implicitly.
    pub fn renormalized(&self) -> Result<Self, ScenarioError> {
        let mut p = self.p;
        for x in 0..2 {
            let mut s = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    p[a][b][x] = p[a][b][x].max(0.0);
                    s += p[a][b][x];
                }
            }
            if s <= 0.0 {
                return Err(ScenarioError::NotNormalized {
                    what: format!("p(·,·|{x})"),
                    sum: s,
                });
            }
            for a in 0..2 {
                for b in 0..2 {
                    p[a][b][x] /= s;
                }
            }
        }
        Self::new(p)
    }

    /// Mirrors the outcome of `B` (`b ↔ 1-b`).
    pub fn relabel_b(&self) -> Self {
        let mut p = self.p;
        for a in 0..2 {
            for x in 0..2 {
                p[a][0][x] = self.p[a][1][x];
                p[a][1][x] = self.p[a][0][x];
            }
        }
        Self { p }
    }

    /// Flattened CSV with header `a,b,x,p`, rows in `a`,`b`,`x` order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,x,p\n");
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    out.push_str(&format!("{a},{b},{x},{}\n", sig12(self.p[a][b][x])));
                }
            }
        }
        out
    }
}

/// Interventional distribution `q[b][a] = p(b|do(a))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoTable {
    #[serde(rename = "do")]
    q: [[f64; 2]; 2],
}

impl DoTable {
    pub fn new(q: [[f64; 2]; 2]) -> Result<Self, ScenarioError> {
        let t = Self { q };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for b in 0..2 {
            for a in 0..2 {
                check_entry(|| format!("p({b}|do({a}))"), self.q[b][a])?;
            }
        }
        for a in 0..2 {
            check_sum(|| format!("p(·|do({a}))"), self.q[0][a] + self.q[1][a])?;
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, b: usize, a: usize) -> f64 {
        self.q[b][a]
    }

    pub fn table(&self) -> &[[f64; 2]; 2] {
        &self.q
    }

    /// Signed effect `p(0|do(0)) - p(0|do(1))`.
    pub fn delta(&self) -> f64 {
        self.q[0][0] - self.q[0][1]
    }

    pub fn relabel_b(&self) -> Self {
        Self {
            q: [self.q[1], self.q[0]],
        }
    }
}

/// Bell-scenario distribution `p_Bell(a,b|x,y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellBehavior {
    #[serde(rename = "pabxy")]
    p: Table4,
}

impl BellBehavior {
    /// Validates range and normalization; no-signaling is checked
    /// separately by [`BellBehavior::signaling_defect`].
    pub fn new(p: Table4) -> Result<Self, ScenarioError> {
        let beh = Self { p };
        beh.validate()?;
        Ok(beh)
    }

    /// Like [`BellBehavior::new`] but also rejects signaling tables.
    pub fn new_non_signaling(p: Table4) -> Result<Self, ScenarioError> {
        let beh = Self::new(p)?;
        let d = beh.signaling_defect();
        if d > TOL.probability {
            return Err(ScenarioError::Signaling(d));
        }
        Ok(beh)
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self, ScenarioError> {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        p[a][b][x][y] = f(a, b, x, y);
                    }
                }
            }
        }
        Self::new(p)
    }

    pub fn uniform() -> Self {
        Self {
            p: [[[[0.25; 2]; 2]; 2]; 2],
        }
    }

    /// Local deterministic point `[a = f(x)][b = g(y)]`.
    pub fn deterministic(f: [usize; 2], g: [usize; 2]) -> Self {
        Self::from_fn(|a, b, x, y| f64::from(u8::from(a == f[x] && b == g[y]))).unwrap()
    }

    /// PR-box variant with `a ⊕ b = xy ⊕ εx ⊕ ζy ⊕ η` and uniform marginals.
    pub fn pr_box(eps: usize, zeta: usize, eta: usize) -> Self {
        Self::from_fn(|a, b, x, y| {
            let target = (x * y) ^ (eps * x) ^ (zeta * y) ^ eta;
            if (a ^ b) == target {
                0.5
            } else {
                0.0
            }
        })
        .unwrap()
    }

    /// Product of local response tables `p(a|x)` and `p(b|y)`, indexed
    /// `[setting][outcome]`.
    pub fn product(alice: [[f64; 2]; 2], bob: [[f64; 2]; 2]) -> Result<Self, ScenarioError> {
        Self::from_fn(|a, b, x, y| alice[x][a] * bob[y][b])
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for x in 0..2 {
            for y in 0..2 {
                let mut s = 0.0;
                for a in 0..2 {
                    for b in 0..2 {
                        check_entry(|| format!("p({a},{b}|{x},{y})"), self.p[a][b][x][y])?;
                        s += self.p[a][b][x][y];
                    }
                }
                check_sum(|| format!("p(·,·|{x},{y})"), s)?;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[a][b][x][y]
    }

    pub fn table(&self) -> &Table4 {
        &self.p
    }

    /// Largest violation of the no-signaling equalities in either direction.
    pub fn signaling_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..2 {
            for a in 0..2 {
                let m = |y: usize| self.p[a][0][x][y] + self.p[a][1][x][y];
                worst = worst.max((m(0) - m(1)).abs());
            }
        }
        for y in 0..2 {
            for b in 0..2 {
                let m = |x: usize| self.p[0][b][x][y] + self.p[1][b][x][y];
                worst = worst.max((m(0) - m(1)).abs());
            }
        }
        worst
    }

    /// Correlator `Σ_ab (-1)^(a+b) p(a,b|x,y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.p[0][0][x][y] + self.p[1][1][x][y] - self.p[0][1][x][y] - self.p[1][0][x][y]
    }

    /// Convex combination `Σ w_i B_i`.
    pub fn mixture(parts: &[(f64, BellBehavior)]) -> Result<Self, ScenarioError> {
        Self::from_fn(|a, b, x, y| parts.iter().map(|(w, beh)| w * beh.p[a][b][x][y]).sum())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,x,y,p\n");
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        out.push_str(&format!("{a},{b},{x},{y},{}\n", sig12(self.p[a][b][x][y])));
                    }
                }
            }
        }
        out
    }
}

/// On-disk form of an instrumental behavior with an optional
/// interventional table: `{"pabx": [a][b][x], "do": [b][a]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorFile {
    pub pabx: Table3,
    #[serde(rename = "do", default, skip_serializing_if = "Option::is_none")]
    pub do_table: Option<[[f64; 2]; 2]>,
}

impl BehaviorFile {
    pub fn new(beh: &InstrumentalBehavior, do_table: Option<&DoTable>) -> Self {
        Self {
            pabx: beh.p,
            do_table: do_table.map(|d| d.q),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(s).map_err(|e| ScenarioError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain arrays serialize")
    }

    pub fn behavior(&self) -> Result<InstrumentalBehavior, ScenarioError> {
        InstrumentalBehavior::new(self.pabx)
    }

    pub fn do_table(&self) -> Result<Option<DoTable>, ScenarioError> {
        self.do_table.map(DoTable::new).transpose()
    }
}

/// Largest change of the interventional distribution of `B`.
pub fn ace(table: &DoTable) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for b in 0..2 {
        for a in 0..2 {
            for a2 in 0..2 {
                best = best.max(table.q[b][a] - table.q[b][a2]);
            }
        }
    }
    best
}

/// `max_a (Σ_b max_x p(a,b|x)) - 1`.
///
/// Non-positive exactly when every instrumental inequality holds. Both
/// values of `a` are evaluated; no facet-completeness is implied.
pub fn instrumental_inequality_slack(beh: &InstrumentalBehavior) -> f64 {
    (0..2)
        .map(|a| {
            (0..2)
                .map(|b| beh.p[a][b][0].max(beh.p[a][b][1]))
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
        - 1.0
}

/// Instrumental projection `p(a,b|x) = p_Bell(a,b|x,a)`.
pub fn instrumental_from_bell(bell: &BellBehavior) -> InstrumentalBehavior {
    let mut p = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                p[a][b][x] = bell.p[a][b][x][a];
            }
        }
    }
    InstrumentalBehavior { p }
}

fn do_from_bell_unchecked(bell: &BellBehavior, x: usize) -> [[f64; 2]; 2] {
    let mut q = [[0.0; 2]; 2];
    for b in 0..2 {
        for a in 0..2 {
            q[b][a] = bell.p[0][b][x][a] + bell.p[1][b][x][a];
        }
    }
    q
}

/// Interventional table `q[b][a] = Σ_a' p_Bell(a',b|x_probe,a)`.
///
/// Fails when the answer depends on `x_probe`, which only happens for
/// signaling input.
pub fn do_from_bell(bell: &BellBehavior, x_probe: usize) -> Result<DoTable, ScenarioError> {
    let q = do_from_bell_unchecked(bell, x_probe);
    let other = do_from_bell_unchecked(bell, 1 - x_probe);
    let dev = (0..2)
        .flat_map(|b| (0..2).map(move |a| (b, a)))
        .map(|(b, a)| (q[b][a] - other[b][a]).abs())
        .fold(0.0, f64::max);
    if dev > TOL.probability {
        return Err(ScenarioError::Signaling(dev));
    }
    Ok(DoTable { q })
}

/// Unobserved Bell entry `p_Bell(1-a', b | x, a') = q[b][a'] - p(a',b|x)`.
///
/// A consistent (behavior, do-table) pair keeps this non-negative.
pub fn hidden_bell_entry(
    beh: &InstrumentalBehavior,
    table: &DoTable,
    a_prime: usize,
    b: usize,
    x: usize,
) -> f64 {
    table.q[b][a_prime] - beh.p[a_prime][b][x]
}

/// True when every hidden Bell entry is non-negative within tolerance.
pub fn hidden_entries_consistent(beh: &InstrumentalBehavior, table: &DoTable) -> bool {
    (0..2).all(|a| {
        (0..2).all(|b| (0..2).all(|x| hidden_bell_entry(beh, table, a, b, x) >= -TOL.probability))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dt(q: [[f64; 2]; 2]) -> DoTable {
        DoTable::new(q).unwrap()
    }

    #[test]
    fn ace_examples() {
        assert_eq!(ace(&dt([[1.0, 0.0], [0.0, 1.0]])), 1.0);
        assert_eq!(ace(&dt([[0.5, 0.5], [0.5, 0.5]])), 0.0);
        assert_abs_diff_eq!(ace(&dt([[0.9, 0.6], [0.1, 0.4]])), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn ace_is_invariant_under_b_relabeling() {
        let t = dt([[0.9, 0.6], [0.1, 0.4]]);
        assert_eq!(ace(&t), ace(&t.relabel_b()));
    }

    #[test]
    fn slack_of_deterministic_chain_saturates() {
        assert_eq!(
            instrumental_inequality_slack(&InstrumentalBehavior::deterministic_chain()),
            0.0
        );
    }

    #[test]
    fn slack_of_uniform() {
        assert_eq!(
            instrumental_inequality_slack(&InstrumentalBehavior::uniform()),
            -0.5
        );
    }

    #[test]
    fn slack_detects_direct_instrument_influence() {
        // a always 0 and b copies x: Σ_b max_x p(0,b|x) = 2.
        let beh =
            InstrumentalBehavior::from_fn(|a, b, x| f64::from(u8::from(a == 0 && b == x))).unwrap();
        assert_eq!(instrumental_inequality_slack(&beh), 1.0);
    }

    #[test]
    fn slack_accepts_constant_response_strategy() {
        // a = x, b = 0 is a deterministic classical strategy, so it cannot
        // violate an instrumental inequality.
        let beh =
            InstrumentalBehavior::from_fn(|a, b, x| f64::from(u8::from(a == x && b == 0))).unwrap();
        assert_eq!(instrumental_inequality_slack(&beh), 0.0);
    }

    #[test]
    fn behavior_validation_errors() {
        let mut p = [[[0.25; 2]; 2]; 2];
        p[0][0][0] = 0.3;
        assert!(matches!(
            InstrumentalBehavior::new(p),
            Err(ScenarioError::NotNormalized { .. })
        ));
        p[0][0][0] = -0.1;
        assert!(matches!(
            InstrumentalBehavior::new(p),
            Err(ScenarioError::OutOfRange { .. })
        ));
        assert!(DoTable::new([[0.5, 0.5], [0.6, 0.5]]).is_err());
    }

    #[test]
    fn renormalization_is_explicit() {
        let mut p = [[[0.25; 2]; 2]; 2];
        p[0][0][0] = 0.35;
        let raw = InstrumentalBehavior { p };
        assert!(raw.validate().is_err());
        let fixed = raw.renormalized().unwrap();
        assert_abs_diff_eq!(fixed.get(0, 0, 0), 0.35 / 1.1, epsilon = 1e-15);
    }

    #[test]
    fn map_deterministic_bell() {
        let bell = BellBehavior::deterministic([0, 1], [0, 1]);
        let beh = instrumental_from_bell(&bell);
        assert_eq!(beh, InstrumentalBehavior::deterministic_chain());
        let q = do_from_bell(&bell, 0).unwrap();
        assert_eq!(q.table(), &[[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn map_uniform_bell() {
        assert_eq!(
            instrumental_from_bell(&BellBehavior::uniform()),
            InstrumentalBehavior::uniform()
        );
    }

    #[test]
    fn map_pr_box() {
        let pr = BellBehavior::pr_box(0, 0, 0);
        let beh = instrumental_from_bell(&pr);
        let expected = InstrumentalBehavior::from_fn(|a, b, x| match (a, b, x) {
            (0, 0, 0) | (1, 1, 0) | (0, 0, 1) | (1, 0, 1) => 0.5,
            _ => 0.0,
        })
        .unwrap();
        assert_eq!(beh, expected);
        let q = do_from_bell(&pr, 1).unwrap();
        assert_eq!(q.table(), &[[0.5, 0.5], [0.5, 0.5]]);
    }

    #[test]
    fn map_product_behavior() {
        let alice = [[0.3, 0.7], [0.9, 0.1]];
        let bob = [[0.2, 0.8], [0.6, 0.4]];
        let bell = BellBehavior::product(alice, bob).unwrap();
        let q = do_from_bell(&bell, 0).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(q.get(b, a), bob[a][b], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn do_from_bell_rejects_signaling() {
        // Bob's marginal at y = 0 depends on x.
        let bell = BellBehavior::from_fn(|a, b, x, y| {
            if y == 0 {
                f64::from(u8::from(a == 0 && b == x))
            } else {
                0.25
            }
        })
        .unwrap();
        assert!(bell.signaling_defect() > 0.5);
        assert!(matches!(
            do_from_bell(&bell, 0),
            Err(ScenarioError::Signaling(_))
        ));
        assert!(BellBehavior::new_non_signaling(*bell.table()).is_err());
    }

    #[test]
    fn hidden_entry_examples() {
        let chain = InstrumentalBehavior::deterministic_chain();
        let q = dt([[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(hidden_bell_entry(&chain, &q, 0, 0, 1), 1.0);
        assert!(hidden_entries_consistent(&chain, &q));

        let uni = InstrumentalBehavior::uniform();
        let half = dt([[0.5, 0.5], [0.5, 0.5]]);
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    assert_eq!(hidden_bell_entry(&uni, &half, a, b, x), 0.25);
                }
            }
        }

        let beh = InstrumentalBehavior::from_fn(|a, b, _| match (a, b) {
            (0, 0) => 0.3,
            (0, 1) => 0.2,
            _ => 0.25,
        })
        .unwrap();
        let q = dt([[0.0, 0.5], [1.0, 0.5]]);
        assert_abs_diff_eq!(hidden_bell_entry(&beh, &q, 0, 0, 0), -0.3);
        assert!(!hidden_entries_consistent(&beh, &q));
    }

    #[test]
    fn pr_box_correlators() {
        for e in 0..2 {
            for z in 0..2 {
                for h in 0..2 {
                    let pr = BellBehavior::pr_box(e, z, h);
                    assert_eq!(pr.signaling_defect(), 0.0);
                    for x in 0..2 {
                        for y in 0..2 {
                            assert_eq!(pr.correlator(x, y).abs(), 1.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn json_schema() {
        let chain = InstrumentalBehavior::deterministic_chain();
        let q = dt([[1.0, 0.0], [0.0, 1.0]]);
        let file = BehaviorFile::new(&chain, Some(&q));
        let s = file.to_json();
        let back = BehaviorFile::from_json(&s).unwrap();
        assert_eq!(back.behavior().unwrap(), chain);
        assert_eq!(back.do_table().unwrap(), Some(q));

        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["pabx"][0][0][0], 1.0);
        assert_eq!(v["do"][1][1], 1.0);

        let no_do = BehaviorFile::from_json(
            r#"{"pabx": [[[0.25,0.25],[0.25,0.25]],[[0.25,0.25],[0.25,0.25]]]}"#,
        )
        .unwrap();
        assert_eq!(no_do.do_table().unwrap(), None);
        assert!(matches!(
            BehaviorFile::from_json("{"),
            Err(ScenarioError::Json(_))
        ));

        let bell = serde_json::to_string(&BellBehavior::uniform()).unwrap();
        assert!(bell.starts_with(r#"{"pabxy":"#));
    }

    #[test]
    fn csv_export() {
        let csv = InstrumentalBehavior::deterministic_chain().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "a,b,x,p");
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1], "0,0,0,1");
        assert_eq!(lines[2], "0,0,1,0");
        assert_eq!(BellBehavior::uniform().to_csv().lines().count(), 17);
    }
}
