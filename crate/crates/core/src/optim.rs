//! Small first-order solvers used by the Orlicz module: limited-memory BFGS
//! with Armijo backtracking, and a bisection for Minkowski functionals.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct LbfgsOptions {
    pub memory: usize,
    /// Stop when the gradient norm drops below this.
    pub gradient_tol: f64,
    /// Stop when an accepted step changes the objective by less than this.
    pub value_tol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease parameter of the Armijo condition.
    pub armijo: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            gradient_tol: 1e-8,
            value_tol: 1e-12,
            max_iter: 100_000,
            armijo: 1e-4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes a smooth convex objective. `objective` returns the value and the
/// gradient; `+∞` marks points outside the effective domain, which the line
/// search then backs away from.
pub fn minimize<F>(x0: Vec<f64>, mut objective: F, opts: &LbfgsOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut x = x0;
    let (mut fx, mut g) = objective(&x)?;
    if !fx.is_finite() {
        return Err(Error::validation("x0", "initial point outside the domain"));
    }
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut gnorm = norm(&g);

    while gnorm >= opts.gradient_tol {
        if iterations >= opts.max_iter {
            return Err(Error::Convergence {
                iterations,
                best_value: fx,
                gradient_norm: gnorm,
            });
        }
        iterations += 1;

        let mut dir = two_loop(&g, &history);
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut step = if history.is_empty() {
            (1.0 / gnorm).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            let (ft, gt) = objective(&trial)?;
            if ft.is_finite() && ft <= fx + opts.armijo * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            if history.is_empty() {
                // no descent possible even along −g: rounding floor reached
                break;
            }
            history.clear();
            continue;
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let change = (fx - fn_).abs();
        x = xn;
        fx = fn_;
        g = gn;
        gnorm = norm(&g);
        if change < opts.value_tol {
            break;
        }
    }
    Ok(Minimum {
        x,
        value: fx,
        gradient: g,
        gradient_norm: gnorm,
        iterations,
    })
}

fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[derive(Clone, Copy, Debug)]
pub struct BisectionOptions {
    /// Relative tolerance on λ.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub norm: f64,
    /// Young-function evaluations spent (bracketing plus bisection).
    pub evaluations: usize,
}

/// Luxemburg norm `inf{λ > 0 : Φ(x/λ) ≤ 1}` of a fixed element, given the map
/// `λ ↦ Φ(x/λ)`, which is nonincreasing in `λ`.
///
/// The bracket is found by doubling or halving from `λ = 1`, with cap `2^60`.
/// `Φ(x) = 0` is taken to mean `x = 0`.
pub fn luxemburg_norm<F>(mut young_at: F, opts: &BisectionOptions) -> Result<NormEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    const CAP: f64 = 1.152_921_504_606_847e18; // 2^60
    let mut evaluations = 1;
    let v1 = young_at(1.0)?;
    if v1 == 0.0 {
        return Ok(NormEstimate {
            norm: 0.0,
            evaluations,
        });
    }
    // lo: Φ(x/lo) > 1, hi: Φ(x/hi) ≤ 1
    let (mut lo, mut hi);
    if v1 > 1.0 {
        lo = 1.0;
        hi = 2.0;
        loop {
            evaluations += 1;
            if young_at(hi)? <= 1.0 {
                break;
            }
            lo = hi;
            hi *= 2.0;
            if hi > CAP {
                return Err(Error::validation(
                    "x",
                    "Young function exceeds 1 on the whole bracket (element outside V_Φ)",
                ));
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        loop {
            evaluations += 1;
            if young_at(lo)? > 1.0 {
                break;
            }
            hi = lo;
            lo *= 0.5;
            if lo < 1.0 / CAP {
                return Ok(NormEstimate {
                    norm: 0.0,
                    evaluations,
                });
            }
        }
    }
    let mut iter = 0;
    while hi - lo > opts.rel_tol * hi {
        if iter >= opts.max_iter {
            break;
        }
        iter += 1;
        let mid = 0.5 * (lo + hi);
        evaluations += 1;
        if young_at(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NormEstimate {
        norm: 0.5 * (lo + hi),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lbfgs_on_ill_conditioned_quadratic() {
        let scales = [1.0, 10.0, 1000.0];
        let m = minimize(
            vec![1.0, 1.0, 1.0],
            |x| {
                let v = 0.5 * x.iter().zip(&scales).map(|(a, s)| s * a * a).sum::<f64>();
                let g = x.iter().zip(&scales).map(|(a, s)| s * a).collect();
                Ok((v, g))
            },
            &LbfgsOptions {
                value_tol: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.gradient_norm < 1e-8);
        assert!(m.x.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn lbfgs_respects_domain() {
        // minimize x − log x on x > 0, optimum at 1
        let m = minimize(
            vec![5.0],
            |x| {
                if x[0] <= 0.0 {
                    return Ok((f64::INFINITY, vec![0.0]));
                }
                Ok((x[0] - x[0].ln(), vec![1.0 - 1.0 / x[0]]))
            },
            &LbfgsOptions::default(),
        )
        .unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn iteration_cap_reports_convergence_error() {
        let r = minimize(
            vec![1.0, 1.0],
            |x| Ok((x[0].powi(4) + 1e-3 * x[1] * x[1], vec![4.0 * x[0].powi(3), 2e-3 * x[1]])),
            &LbfgsOptions {
                max_iter: 2,
                gradient_tol: 1e-14,
                value_tol: 0.0,
                ..Default::default()
            },
        );
        assert!(matches!(r, Err(Error::Convergence { iterations: 2, .. })));
    }

    #[test]
    fn luxemburg_of_scalar_cosh() {
        // Φ(x) = cosh(x) − 1 with x = 1: solve cosh(1/λ) = 2
        let est = luxemburg_norm(|l| Ok((1.0 / l).cosh() - 1.0), &Default::default()).unwrap();
        let expected = 1.0 / 2f64.acosh();
        assert!((est.norm - expected).abs() < 1e-8 * expected);
        let zero = luxemburg_norm(|_| Ok(0.0), &Default::default()).unwrap();
        assert_eq!(zero.norm, 0.0);
        assert!(luxemburg_norm(|_| Ok(f64::INFINITY), &Default::default()).is_err());
    }
}
