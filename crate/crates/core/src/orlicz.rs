//! The Young pair `(Φ_ρ, Ψ_ρ)` and the associated Luxemburg norms
//! `‖·‖_{exp,ρ}` on observables and `‖·‖_{log,ρ}` on self-adjoint functionals.
//!
//! `Φ_ρ(a) = ½(C_ρ(a) + C_ρ(−a)) − ρ(1)` is explicit. `Ψ_ρ` is its
//! Legendre–Fenchel conjugate and has two routes:
//!
//! * [`psi_sup`]: `sup_a ψ(a) − Φ_ρ(a)`, an unconstrained smooth concave
//!   problem with gradient `ψ − ½(ρ^a − ρ^{-a})` (the primary route);
//! * [`psi_inf`]: `½ inf {F_ρ(ω_+) + F_ρ(ω_-) : ω_+ − ω_- = 2ψ} + ρ(1)`, a convex
//!   problem over positive decompositions, kept as an independent check.
//!
//! Each route returns a [`DualNormCertificate`] bracketing the true value:
//! any `a` gives a lower bound, any feasible decomposition an upper bound.

use crate::algebra::BlockMatrix;
use crate::elements::{HermitianElement, PositiveFunctional, SelfAdjointFunctional};
use crate::entropy::f_rho_positive;
use crate::error::{Error, Result};
use crate::optim::{self, BisectionOptions, LbfgsOptions, NormEstimate};
use crate::perturbation::perturb;
use crate::spectral::pairing;

/// `Φ_ρ(a)`.
pub fn phi(rho: &PositiveFunctional, a: &HermitianElement) -> Result<f64> {
    Ok(phi_with_gradient(rho, a)?.0)
}

/// `Φ_ρ(a)` and its gradient `½(ρ^a − ρ^{-a})`.
fn phi_with_gradient(rho: &PositiveFunctional, a: &HermitianElement) -> Result<(f64, BlockMatrix)> {
    let plus = perturb(rho, a)?;
    let minus = perturb(rho, &a.neg())?;
    let value = (0.5 * (plus.c_value + minus.c_value) - rho.trace()).max(0.0);
    let grad = (plus.perturbed.matrix() - minus.perturbed.matrix()).scale(0.5);
    Ok((value, grad))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgumentKind {
    Element,
    Functional,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YoungEvaluation {
    pub value: f64,
    pub argument_kind: ArgumentKind,
}

/// Options shared by the two `Ψ_ρ` solvers.
#[derive(Clone, Debug)]
pub struct PsiOptions {
    /// Gradient-norm (Frobenius) stopping tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point for [`psi_sup`]; `a = 0` when absent.
    pub warm_start: Option<HermitianElement>,
}

impl Default for PsiOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100_000,
            warm_start: None,
        }
    }
}

impl PsiOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Default::default()
        }
    }

    fn lbfgs(&self) -> LbfgsOptions {
        LbfgsOptions {
            gradient_tol: self.tol,
            max_iter: self.max_iter,
            ..Default::default()
        }
    }
}

/// Two-sided certificate for `Ψ_ρ(ψ)`.
#[derive(Clone, Debug)]
pub struct DualNormCertificate {
    /// Value reported by the route that produced the certificate.
    pub psi_value: f64,
    /// Approximate maximizer of `ψ(a) − Φ_ρ(a)`.
    pub maximizer_a: HermitianElement,
    /// Feasible decomposition with `ω_+ − ω_- = 2ψ`.
    pub decomposition: (PositiveFunctional, PositiveFunctional),
    /// `ψ(a) − Φ_ρ(a)` at `maximizer_a`.
    pub lower_bound: f64,
    /// `½(F_ρ(ω_+) + F_ρ(ω_-)) + ρ(1)` at `decomposition`.
    pub upper_bound: f64,
    /// `upper_bound − lower_bound`.
    pub gap: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

fn sup_objective(rho: &PositiveFunctional, psi: &SelfAdjointFunctional, a: &HermitianElement) -> Result<f64> {
    Ok(pairing(a, psi)? - phi(rho, a)?)
}

fn inf_objective(rho: &PositiveFunctional, plus: &PositiveFunctional, minus: &PositiveFunctional) -> Result<f64> {
    Ok(0.5 * (f_rho_positive(plus, rho)? + f_rho_positive(minus, rho)?) + rho.trace())
}

/// Upper bound from the best feasible decomposition suggested by `a`.
fn decomposition_from_maximizer(
    rho: &PositiveFunctional,
    psi: &SelfAdjointFunctional,
    a: &HermitianElement,
) -> Result<((PositiveFunctional, PositiveFunctional), f64)> {
    let two_psi = psi.matrix().scale(2.0);
    let rho_plus = perturb(rho, a)?.perturbed;
    let rho_minus = perturb(rho, &a.neg())?.perturbed;
    let mut candidates = Vec::new();
    if let Ok(p) = PositiveFunctional::new(&two_psi + rho_minus.matrix()) {
        candidates.push((p, rho_minus.clone()));
    }
    if let Ok(m) = PositiveFunctional::new(rho_plus.matrix() - &two_psi) {
        candidates.push((rho_plus.clone(), m));
    }
    let (jp, jm) = psi.jordan_decomposition();
    candidates.push((jp.scale(2.0), jm.scale(2.0)));

    let mut best: Option<((PositiveFunctional, PositiveFunctional), f64)> = None;
    for (p, m) in candidates {
        let v = inf_objective(rho, &p, &m)?;
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            best = Some(((p, m), v));
        }
    }
    Ok(best.expect("Jordan decomposition is always feasible"))
}

fn check_inputs(rho: &PositiveFunctional, psi: &SelfAdjointFunctional) -> Result<()> {
    psi.matrix().check_same_algebra(rho.matrix(), "psi")?;
    if !rho.is_faithful() {
        return Err(Error::validation("rho", "reference functional must be faithful"));
    }
    Ok(())
}

/// `Ψ_ρ(ψ)` through the conjugate (sup) form, by L-BFGS ascent with Armijo
/// backtracking from `a = 0` (or the warm start).
pub fn psi_sup(rho: &PositiveFunctional, psi: &SelfAdjointFunctional, opts: &PsiOptions) -> Result<DualNormCertificate> {
    check_inputs(rho, psi)?;
    let alg = rho.algebra().clone();
    let x0 = match &opts.warm_start {
        Some(a) => {
            a.matrix().check_same_algebra(rho.matrix(), "warm_start")?;
            a.to_real_coords()
        }
        None => vec![0.0; alg.real_dim()],
    };
    let psi_coords = psi.matrix().to_real_coords();
    let min = optim::minimize(
        x0,
        |x| {
            let a = HermitianElement::from_real_coords(&alg, x);
            let (phi_v, grad) = match phi_with_gradient(rho, &a) {
                Ok(v) => v,
                // exp under/overflow far from the optimum
                Err(Error::Domain { .. }) => return Ok((f64::INFINITY, vec![0.0; x.len()])),
                Err(e) => return Err(e),
            };
            let lin: f64 = x.iter().zip(&psi_coords).map(|(u, v)| u * v).sum();
            let g = grad
                .to_real_coords()
                .iter()
                .zip(&psi_coords)
                .map(|(gp, p)| gp - p)
                .collect();
            Ok((phi_v - lin, g))
        },
        &opts.lbfgs(),
    )?;
    let a = HermitianElement::from_real_coords(&alg, &min.x);
    let lower = sup_objective(rho, psi, &a)?;
    let (decomposition, upper) = decomposition_from_maximizer(rho, psi, &a)?;
    Ok(DualNormCertificate {
        psi_value: lower,
        maximizer_a: a,
        decomposition,
        lower_bound: lower,
        upper_bound: upper,
        gap: upper - lower,
        iterations: min.iterations,
        gradient_norm: min.gradient_norm,
    })
}

/// `Ψ_ρ(ψ)` through the decomposition (inf) form: minimize
/// `½(F_ρ(ω_+) + F_ρ(ω_-)) + ρ(1)` over `ω_- ≻ 0` with `ω_+ = 2ψ + ω_- ≻ 0`,
/// starting from the Jordan decomposition shifted by `ρ`.
///
/// The entropy does not repel iterates from the boundary of the cone, and
/// the optimum can sit very close to it (eigenvalues of `ρ^{-a}` near
/// `λ_min(ρ)·e^{-‖a‖}`), where plain descent methods jam. So this follows the
/// central path of `−μ(log det ω_+ + log det ω_-)` with damped Newton steps,
/// for `μ = 10^{-2}, …, 10^{-14}` and finally `μ = 0`.
pub fn psi_inf(rho: &PositiveFunctional, psi: &SelfAdjointFunctional, opts: &PsiOptions) -> Result<DualNormCertificate> {
    check_inputs(rho, psi)?;
    let alg = rho.algebra().clone();
    let two_psi = psi.matrix().scale(2.0);
    let log_rho = rho.log()?;
    let (_, jm) = psi.jordan_decomposition();
    let problem = InfProblem {
        rho,
        two_psi: &two_psi,
        log_rho: &log_rho,
        n: alg.real_dim(),
    };

    let mut x = &jm.matrix().scale(2.0) + rho.matrix();
    let mut iterations = 0;
    let mut mu = 1e-2;
    loop {
        let stage_tol = if mu > 0.0 { mu } else { opts.tol };
        let (xn, it) = problem.newton(x, mu, stage_tol, opts.max_iter.saturating_sub(iterations))?;
        x = xn;
        iterations += it;
        if mu == 0.0 {
            break;
        }
        mu = if mu > 1e-14 { mu * 0.1 } else { 0.0 };
    }
    let Some(at) = problem.eval(&x, 0.0)? else {
        unreachable!("Newton iterates stay in the cone")
    };
    let (plus, minus) = (at.plus, at.minus);
    let upper = at.value;
    // at the optimum ω_± = ρ^{±a}
    let a_plus = &plus.log()? - &log_rho;
    let a_minus = &log_rho - &minus.log()?;
    let a = HermitianElement::new((&a_plus + &a_minus).scale(0.5))?;
    let lower = sup_objective(rho, psi, &a)?;
    Ok(DualNormCertificate {
        psi_value: upper,
        maximizer_a: a,
        decomposition: (plus, minus),
        lower_bound: lower,
        upper_bound: upper,
        gap: upper - lower,
        iterations,
        gradient_norm: at.gradient.iter().map(|v| v * v).sum::<f64>().sqrt(),
    })
}

struct InfProblem<'a> {
    rho: &'a PositiveFunctional,
    two_psi: &'a BlockMatrix,
    log_rho: &'a BlockMatrix,
    n: usize,
}

struct InfPoint {
    value: f64,
    gradient: Vec<f64>,
    plus: PositiveFunctional,
    minus: PositiveFunctional,
}

impl InfProblem<'_> {
    /// Barrier objective at `ω_- = minus_m`, or `None` outside the open cone.
    fn eval(&self, minus_m: &BlockMatrix, mu: f64) -> Result<Option<InfPoint>> {
        let (Ok(minus), Ok(plus)) = (PositiveFunctional::new(minus_m.clone()), PositiveFunctional::new(self.two_psi + minus_m)) else {
            return Ok(None);
        };
        if !minus.is_faithful() || !plus.is_faithful() {
            return Ok(None);
        }
        let mut value = inf_objective(self.rho, &plus, &minus)?;
        // ∇F_ρ(ω) = log ω − log ρ
        let mut grad = (&(&plus.log()? + &minus.log()?) - &self.log_rho.scale(2.0)).scale(0.5);
        if mu > 0.0 {
            let log_det = |w: &PositiveFunctional| w.spectrum().iter_values().map(f64::ln).sum::<f64>();
            value -= mu * (log_det(&plus) + log_det(&minus));
            let inv = &plus.spectrum().apply(f64::recip) + &minus.spectrum().apply(f64::recip);
            grad = &grad - &inv.scale(mu);
        }
        Ok(Some(InfPoint {
            value,
            gradient: grad.to_real_coords(),
            plus,
            minus,
        }))
    }

    /// Hessian of the barrier objective in real coordinates.
    fn hessian(&self, at: &InfPoint, mu: f64) -> nalgebra::DMatrix<f64> {
        let alg = at.plus.algebra();
        let n = self.n;
        let mut h = nalgebra::DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let neg_recip = |x: f64| -1.0 / x;
        let recip_sq = |x: f64| 1.0 / (x * x);
        for k in 0..n {
            e[k] = 1.0;
            let dx = BlockMatrix::from_real_coords(alg, &e);
            let mut col = (&at.plus.spectrum().frechet(&dx, f64::ln, f64::recip)
                + &at.minus.spectrum().frechet(&dx, f64::ln, f64::recip))
                .scale(0.5);
            if mu > 0.0 {
                let b = &at.plus.spectrum().frechet(&dx, neg_recip, recip_sq)
                    + &at.minus.spectrum().frechet(&dx, neg_recip, recip_sq);
                col = &col + &b.scale(mu);
            }
            for (i, v) in col.to_real_coords().into_iter().enumerate() {
                h[(i, k)] = v;
            }
            e[k] = 0.0;
        }
        (&h + h.transpose()) * 0.5
    }

    /// Damped Newton until the gradient norm drops below `tol` or no further
    /// decrease is representable.
    fn newton(&self, mut x: BlockMatrix, mu: f64, tol: f64, max_iter: usize) -> Result<(BlockMatrix, usize)> {
        let alg = self.rho.algebra();
        let Some(mut at) = self.eval(&x, mu)? else {
            return Err(Error::validation("psi", "starting decomposition is not faithful"));
        };
        let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut iterations = 0;
        while norm(&at.gradient) >= tol {
            if iterations >= max_iter {
                return Err(Error::Convergence {
                    iterations,
                    best_value: at.value,
                    gradient_norm: norm(&at.gradient),
                });
            }
            iterations += 1;
            let rhs = nalgebra::DVector::from_iterator(self.n, at.gradient.iter().map(|v| -v));
            let dir = match self.hessian(&at, mu).cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => rhs,
            };
            let slope: f64 = dir.iter().zip(&at.gradient).map(|(d, g)| d * g).sum();
            // the Newton decrement predicts a change below rounding
            if -slope <= 4.0 * f64::EPSILON * (1.0 + at.value.abs()) {
                break;
            }
            let dir_m = BlockMatrix::from_real_coords(alg, dir.as_slice());
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..60 {
                let trial = &x + &dir_m.scale(step);
                if let Some(p) = self.eval(&trial, mu)? {
                    if p.value < at.value && p.value <= at.value + 1e-4 * step * slope {
                        accepted = Some((trial, p));
                        break;
                    }
                }
                step *= 0.5;
            }
            // rounding floor: no further decrease is representable
            let Some((xn, p)) = accepted else { break };
            x = xn;
            at = p;
        }
        Ok((x, iterations))
    }
}

/// Closed-form conjugate of `u ↦ cosh(u) − 1`:
/// `u·arcsinh(u) − √(1 + u²) + 1`.
pub fn cosh_conjugate(u: f64) -> f64 {
    u * u.asinh() - (1.0 + u * u).sqrt() + 1.0
}

/// A Young function evaluated along rays, for the Luxemburg construction.
pub trait YoungFunction {
    type Arg;

    fn evaluate(&mut self, x: &Self::Arg) -> Result<YoungEvaluation>;

    fn scale(x: &Self::Arg, s: f64) -> Self::Arg;
}

/// `Φ_ρ` on observables.
#[derive(Clone, Debug)]
pub struct ExpYoung<'a> {
    pub rho: &'a PositiveFunctional,
}

impl YoungFunction for ExpYoung<'_> {
    type Arg = HermitianElement;

    fn evaluate(&mut self, a: &HermitianElement) -> Result<YoungEvaluation> {
        let value = match phi(self.rho, a) {
            Ok(v) if v.is_finite() => v,
            Ok(_) | Err(Error::Domain { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        Ok(YoungEvaluation {
            value,
            argument_kind: ArgumentKind::Element,
        })
    }

    fn scale(x: &HermitianElement, s: f64) -> HermitianElement {
        x.scale(s)
    }
}

/// `Ψ_ρ` on self-adjoint functionals, through [`psi_sup`] with warm starts
/// along the ray.
#[derive(Clone, Debug)]
pub struct LogYoung<'a> {
    pub rho: &'a PositiveFunctional,
    pub opts: PsiOptions,
    /// Last maximizer and the functional it belongs to.
    last: Option<(SelfAdjointFunctional, HermitianElement)>,
    pub solver_iterations: usize,
}

impl<'a> LogYoung<'a> {
    pub fn new(rho: &'a PositiveFunctional, opts: PsiOptions) -> Self {
        Self {
            rho,
            opts,
            last: None,
            solver_iterations: 0,
        }
    }
}

impl YoungFunction for LogYoung<'_> {
    type Arg = SelfAdjointFunctional;

    fn evaluate(&mut self, psi: &SelfAdjointFunctional) -> Result<YoungEvaluation> {
        let mut opts = self.opts.clone();
        if let Some((prev_psi, prev_a)) = &self.last {
            // the maximizer scales roughly like arcsinh of ψ/ρ; rescaling by the
            // ratio of magnitudes is a good enough guess
            let r = psi.matrix().frobenius_norm() / prev_psi.matrix().frobenius_norm().max(f64::MIN_POSITIVE);
            opts.warm_start = Some(prev_a.scale(r.clamp(0.25, 4.0)));
        }
        let cert = psi_sup(self.rho, psi, &opts)?;
        self.solver_iterations += cert.iterations;
        self.last = Some((psi.clone(), cert.maximizer_a.clone()));
        Ok(YoungEvaluation {
            value: cert.psi_value,
            argument_kind: ArgumentKind::Functional,
        })
    }

    fn scale(x: &SelfAdjointFunctional, s: f64) -> SelfAdjointFunctional {
        x.scale(s)
    }
}

/// `‖x‖_Y = inf{λ > 0 : Y(x/λ) ≤ 1}` by bisection on `λ` with relative
/// tolerance `tol`.
pub fn luxemburg_norm<Y: YoungFunction>(young: &mut Y, x: &Y::Arg, tol: f64) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::validation("tol", "must be positive"));
    }
    optim::luxemburg_norm(
        |lambda| Ok(young.evaluate(&Y::scale(x, 1.0 / lambda))?.value),
        &BisectionOptions {
            rel_tol: tol,
            ..Default::default()
        },
    )
}

/// `‖a‖_{exp,ρ}`.
pub fn exp_norm(rho: &PositiveFunctional, a: &HermitianElement) -> Result<NormEstimate> {
    exp_norm_with_tol(rho, a, 1e-8)
}

pub fn exp_norm_with_tol(rho: &PositiveFunctional, a: &HermitianElement, tol: f64) -> Result<NormEstimate> {
    a.matrix().check_same_algebra(rho.matrix(), "a")?;
    rho.require_faithful("rho")?;
    luxemburg_norm(&mut ExpYoung { rho }, a, tol)
}

/// `‖ψ‖_{log,ρ}`.
pub fn log_norm(rho: &PositiveFunctional, psi: &SelfAdjointFunctional) -> Result<NormEstimate> {
    log_norm_with(rho, psi, 1e-8, PsiOptions::with_tol(1e-10))
}

pub fn log_norm_with(
    rho: &PositiveFunctional,
    psi: &SelfAdjointFunctional,
    tol: f64,
    opts: PsiOptions,
) -> Result<NormEstimate> {
    check_inputs(rho, psi)?;
    let mut young = LogYoung::new(rho, opts);
    luxemburg_norm(&mut young, psi, tol)
}

/// `sup_a ω(a) − C_ρ(a)`, the conjugate of `C_ρ`, which equals `F_ρ(ω)` on
/// faithful `ω`. Returns the value and the maximizer.
pub fn c_rho_conjugate(
    rho: &PositiveFunctional,
    omega: &PositiveFunctional,
    tol: f64,
) -> Result<(f64, HermitianElement)> {
    omega.matrix().check_same_algebra(rho.matrix(), "omega")?;
    rho.require_faithful("rho")?;
    let alg = rho.algebra().clone();
    let w = omega.matrix().to_real_coords();
    let min = optim::minimize(
        vec![0.0; alg.real_dim()],
        |x| {
            let a = HermitianElement::from_real_coords(&alg, x);
            let r = match perturb(rho, &a) {
                Ok(r) => r,
                Err(Error::Domain { .. }) => return Ok((f64::INFINITY, vec![0.0; x.len()])),
                Err(e) => return Err(e),
            };
            let lin: f64 = x.iter().zip(&w).map(|(u, v)| u * v).sum();
            let g = r
                .perturbed
                .matrix()
                .to_real_coords()
                .iter()
                .zip(&w)
                .map(|(p, q)| p - q)
                .collect();
            Ok((r.c_value - lin, g))
        },
        &LbfgsOptions {
            gradient_tol: tol,
            ..Default::default()
        },
    )?;
    Ok((-min.value, HermitianElement::from_real_coords(&alg, &min.x)))
}
