//! Deterministic derivative-free maximizers.
//!
//! Plateaus are broken towards the lexicographically smallest parameter
//! vector, except in [`grid_refine`], which prefers the box center.

use std::cmp::Ordering;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptError {
    #[error("objective returned {value} at {at:?}")]
    NonFinite { at: Vec<f64>, value: f64 },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("invalid dimension {0}")]
    Dimension(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Brent's bounded scalar method applied to `-f`.
///
/// The result is never worse than the best of `f(lo)`, `f(hi)` and
/// `f((lo + hi)/2)`.
pub fn brent_max(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<OptResult, OptError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(OptError::InvalidBracket { lo, hi });
    }
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<f64, OptError> {
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            Ok(-v)
        } else {
            Err(OptError::NonFinite {
                at: vec![x],
                value: v,
            })
        }
    };

    let golden = 0.5 * (3.0 - 5f64.sqrt());
    let sqrt_eps = f64::EPSILON.sqrt();
    let (mut a, mut b) = (lo, hi);
    let mut x = a + golden * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    let mut converged = false;

    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = sqrt_eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            converged = true;
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            // Parabola through x, w, v.
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = eval(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }

    let mut best = (x, -fx);
    for probe in [lo, 0.5 * (lo + hi), hi] {
        let val = -eval(probe)?;
        if val > best.1 || val == best.1 && probe < best.0 {
            best = (probe, val);
        }
    }
    Ok(OptResult {
        argmax: vec![best.0],
        value: best.1,
        evaluations,
        converged,
    })
}

/// Nelder–Mead simplex maximization with restarts.
///
/// After each convergence a fresh simplex of the original size is built
/// around the best vertex; the search ends when a restart no longer improves
/// the value by more than `tol`. Hitting `max_iter` total iterations returns
/// the best point with `converged = false`.
pub fn nelder_mead_max(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    scale: f64,
    tol: f64,
    max_iter: usize,
) -> Result<OptResult, OptError> {
    let n = start.len();
    if n == 0 || n > 6 {
        return Err(OptError::Dimension(n));
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| -> Result<f64, OptError> {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            Err(OptError::NonFinite {
                at: x.to_vec(),
                value: v,
            })
        } else {
            Ok(v)
        }
    };
    // Best first; ties towards the lexicographically smaller point.
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|p, q| q.1.total_cmp(&p.1).then_with(|| lex_cmp(&p.0, &q.0)));
    };

    let mut iterations = 0;
    let mut center = start.to_vec();
    let mut best_value = f64::NEG_INFINITY;
    let mut converged = false;

    'restart: for _ in 0..20 {
        let mut simplex = Vec::with_capacity(n + 1);
        let v0 = eval(&center)?;
        simplex.push((center.clone(), v0));
        for i in 0..n {
            let mut p = center.clone();
            p[i] += scale;
            let v = eval(&p)?;
            simplex.push((p, v));
        }
        order(&mut simplex);

        loop {
            if iterations >= max_iter {
                converged = false;
                center = simplex[0].0.clone();
                break 'restart;
            }
            iterations += 1;
            let spread = simplex[0].1 - simplex[n].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(p, _)| {
                    p.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread.abs() <= tol && diameter <= tol {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64)
                .collect();
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(1.0);
            let fr = eval(&xr)?;
            if fr > simplex[0].1 {
                let xe = along(2.0);
                let fe = eval(&xe)?;
                simplex[n] = if fe > fr { (xe, fe) } else { (xr, fr) };
            } else if fr > simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let outside = fr > worst.1;
                let xc = along(if outside { 0.5 } else { -0.5 });
                let fc = eval(&xc)?;
                if outside && fc >= fr || !outside && fc > worst.1 {
                    simplex[n] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for s in simplex.iter_mut().skip(1) {
                        let p: Vec<f64> =
                            s.0.iter()
                                .zip(&best)
                                .map(|(x, b)| b + 0.5 * (x - b))
                                .collect();
                        let v = eval(&p)?;
                        *s = (p, v);
                    }
                }
            }
            order(&mut simplex);
        }

        let improved = simplex[0].1 > best_value + tol;
        center = simplex[0].0.clone();
        best_value = best_value.max(simplex[0].1);
        if !improved {
            converged = true;
            break;
        }
    }

    let value = f(&center);
    Ok(OptResult {
        argmax: center,
        value,
        evaluations,
        converged,
    })
}

/// Grid search over a box followed by `refine_rounds` zooms, each shrinking
/// the box by a factor 4 around the incumbent (clipped to the original box).
///
/// Every round evaluates `coarse_steps` points per axis, endpoints included,
/// so the cost per round is `coarse_steps^dim`. The box center is evaluated
/// first and only replaced by a strictly better point.
pub fn grid_refine(
    f: impl Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    coarse_steps: usize,
    refine_rounds: usize,
) -> Result<OptResult, OptError> {
    let dim = bounds.len();
    if dim == 0 || coarse_steps < 2 {
        return Err(OptError::Dimension(dim));
    }
    for &(lo, hi) in bounds {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(OptError::InvalidBracket { lo, hi });
        }
    }
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| -> Result<f64, OptError> {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            Err(OptError::NonFinite {
                at: x.to_vec(),
                value: v,
            })
        } else {
            Ok(v)
        }
    };

    let center: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut best = (center.clone(), eval(&center)?);
    let mut current: Vec<(f64, f64)> = bounds.to_vec();

    for round in 0..=refine_rounds {
        if round > 0 {
            current = current
                .iter()
                .zip(bounds)
                .zip(&best.0)
                .map(|((&(lo, hi), &(blo, bhi)), &c)| {
                    let half = (hi - lo) / 8.0;
                    let (mut a, mut b) = (c - half, c + half);
                    if a < blo {
                        b += blo - a;
                        a = blo;
                    }
                    if b > bhi {
                        a -= b - bhi;
                        b = bhi;
                    }
                    (a.max(blo), b.min(bhi))
                })
                .collect();
        }
        let total = coarse_steps.pow(dim as u32);
        for idx in 0..total {
            let mut rest = idx;
            let mut point = vec![0.0; dim];
            for k in (0..dim).rev() {
                let i = rest % coarse_steps;
                rest /= coarse_steps;
                let (lo, hi) = current[k];
                point[k] = lo + (hi - lo) * i as f64 / (coarse_steps - 1) as f64;
            }
            let v = eval(&point)?;
            if v > best.1 {
                best = (point, v);
            }
        }
    }

    Ok(OptResult {
        argmax: best.0,
        value: best.1,
        evaluations,
        converged: true,
    })
}
