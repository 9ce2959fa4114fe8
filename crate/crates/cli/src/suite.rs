//! The property suite: every identity and inequality of the library checked
//! on seeded random instances.
//!
//! Each instance draws from its own generator, seeded from
//! `(seed, invariant, dim, trial)`, so instances are independent of the
//! execution order and of the thread count, and a single failure can be
//! replayed from its recorded seed.

use std::path::Path;

use qexp::channels::{self, tensor_product, Channel, PetzMap};
use qexp::entropy::{donald_residual, f_rho, kosaki_lower_bound, relative_entropy, renyi_f};
use qexp::lp::{embed, lp_duality_gap, lp_norm};
use qexp::manifold::{self, Chart};
use qexp::orlicz::{self, PsiOptions};
use qexp::perturbation::{c_directional_difference, c_rho, chain_rule_residual, perturb, perturbed_entropy_residual};
use qexp::random;
use qexp::series::perturbed_vector_series;
use qexp::spectral::{pairing, schatten_norm};
use qexp::{BlockMatrix, HermitianElement, MatrixAlgebra, PositiveFunctional};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::cli::SuiteArgs;
use crate::error::{CliError, CliResult};
use crate::output::{matrix, Obj};

pub const MAX_DIM: usize = 8;
/// Failures serialized per invariant.
const MAX_RECORDED_FAILURES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    /// Every value must be below the threshold.
    Below(f64),
    /// Every value must be above the threshold.
    Above(f64),
}

impl Check {
    pub fn passes(self, v: f64) -> bool {
        match self {
            Check::Below(t) => v < t,
            Check::Above(t) => v > t,
        }
    }

    fn threshold(self) -> f64 {
        match self {
            Check::Below(t) | Check::Above(t) => t,
        }
    }

    fn worse(self, a: f64, b: f64) -> f64 {
        if a.is_nan() || b.is_nan() {
            return f64::NAN;
        }
        match self {
            Check::Below(_) => a.max(b),
            Check::Above(_) => a.min(b),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Check::Below(_) => "max_below",
            Check::Above(_) => "min_above",
        }
    }
}

/// Value of one instance and the inputs that produced it.
pub struct Instance {
    pub value: f64,
    pub inputs: Vec<(&'static str, BlockMatrix)>,
}

impl Instance {
    fn new(value: f64) -> Self {
        Self { value, inputs: Vec::new() }
    }

    fn with(mut self, name: &'static str, m: &BlockMatrix) -> Self {
        self.inputs.push((name, m.clone()));
        self
    }
}

type InstanceFn = fn(&MatrixAlgebra, &mut ChaCha8Rng, usize) -> qexp::Result<Instance>;

pub struct Invariant {
    pub name: &'static str,
    pub check: Check,
    /// Upper bound on trials per dimension for the expensive checks.
    pub trial_cap: Option<usize>,
    /// Smallest dimension where the invariant is meaningful.
    pub min_dim: usize,
    pub run: InstanceFn,
}

fn inv(name: &'static str, check: Check, run: InstanceFn) -> Invariant {
    Invariant {
        name,
        check,
        trial_cap: None,
        min_dim: 1,
        run,
    }
}

fn capped(name: &'static str, check: Check, cap: usize, run: InstanceFn) -> Invariant {
    Invariant {
        name,
        check,
        trial_cap: Some(cap),
        min_dim: 1,
        run,
    }
}

pub fn invariants() -> Vec<Invariant> {
    use Check::*;
    vec![
        inv("donald_identity", Below(1e-9), donald_identity),
        inv("joint_convexity", Below(1e-12), joint_convexity),
        inv("f_strict_convexity", Above(1e-12), f_strict_convexity),
        inv("commutative_reduction", Below(1e-12), commutative_reduction),
        inv("kosaki_lower_bound", Below(1e-9), kosaki_bound),
        inv("renyi_monotone", Below(1e-10), renyi_monotone),
        inv("renyi_limit", Below(1e-2), renyi_limit),
        inv("perturbed_entropy", Below(1e-9), perturbed_entropy),
        inv("chain_rule", Below(1e-9), chain_rule),
        inv("gradient", Below(1e-6), gradient),
        inv("subgradient_inequality", Above(-1e-12), subgradient),
        inv("c_strict_convexity", Above(1e-12), c_strict_convexity),
        capped("series_oracle", Below(1e-4), 20, series_oracle),
        inv("fenchel_young", Below(1e-8), fenchel_young),
        inv("fenchel_equality", Below(1e-4), fenchel_equality),
        inv("conjugate_duality", Below(1e-4), conjugate_duality),
        inv("exp_norm_triangle", Below(1e-6), exp_norm_triangle),
        inv("young_holder", Below(1e-8), young_holder),
        inv("embedding_chain", Below(1e-12), embedding_chain),
        inv("lp_duality_gap", Below(1e-8), lp_duality),
        inv("adjointness", Below(1e-10), adjointness),
        inv("f_monotonicity", Above(-1e-10), f_monotonicity),
        inv("lp_contraction", Above(-1e-8), lp_contraction),
        inv("log_norm_contraction", Below(1e-6), log_norm_contraction),
        inv("petz_identities", Below(1e-9), petz_identities),
        inv("sufficiency_positive", Below(1e-8), sufficiency_positive),
        // every channel out of a one-dimensional algebra is sufficient
        Invariant {
            min_dim: 2,
            ..inv("sufficiency_negative", Above(1e-8), sufficiency_negative)
        },
        inv("transport_family", Below(1e-8), transport_state),
        inv("transport_exp_norm", Below(1e-6), transport_norm),
        inv("divergence_forms", Below(1e-9), divergence_forms),
        inv("pythagorean", Below(1e-9), pythagorean),
        inv("chart_round_trip", Below(1e-9), chart_round_trip),
        inv("transition_consistency", Below(1e-9), transition_consistency),
    ]
}

// ---- instances ----

fn donald_identity(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, trial: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let parts: Vec<PositiveFunctional> = (0..2 + trial % 2).map(|_| random::positive(rng, alg)).collect();
    let mut inst = Instance::new(donald_residual(&parts, &rho)?).with("rho", rho.matrix());
    for p in &parts {
        inst = inst.with("part", p.matrix());
    }
    Ok(inst)
}

fn joint_convexity(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let (w1, w2, r1, r2) = (random::state(rng, alg), random::state(rng, alg), random::state(rng, alg), random::state(rng, alg));
    let mut worst = f64::NEG_INFINITY;
    for i in 1..=9 {
        let l = i as f64 / 10.0;
        let w = w1.scale(l).add(&w2.scale(1.0 - l))?;
        let r = r1.scale(l).add(&r2.scale(1.0 - l))?;
        let lhs = relative_entropy(&w, &r)?;
        let rhs = l * relative_entropy(&w1, &r1)? + (1.0 - l) * relative_entropy(&w2, &r2)?;
        worst = worst.max(lhs - rhs);
    }
    Ok(Instance::new(worst)
        .with("omega1", w1.matrix())
        .with("omega2", w2.matrix())
        .with("rho1", r1.matrix())
        .with("rho2", r2.matrix()))
}

fn f_strict_convexity(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let (w1, w2) = (random::positive(rng, alg), random::positive(rng, alg));
    let mid = w1.scale(0.5).add(&w2.scale(0.5))?;
    let f = |w: &PositiveFunctional| f_rho(&w.to_self_adjoint(), &rho);
    let gap = 0.5 * (f(&w1)? + f(&w2)?) - f(&mid)?;
    Ok(Instance::new(gap).with("rho", rho.matrix()).with("omega1", w1.matrix()).with("omega2", w2.matrix()))
}

fn commutative_reduction(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let alg = MatrixAlgebra::commutative(alg.dim());
    let rho = random::state(rng, &alg);
    let w = random::state(rng, &alg);
    let a = random::hermitian(rng, &alg).scale(3.0);
    let diag = |m: &BlockMatrix| m.blocks().iter().map(|b| b[(0, 0)].re).collect::<Vec<f64>>();
    let (r, x, o) = (diag(rho.matrix()), diag(a.matrix()), diag(w.matrix()));
    let phi_oracle: f64 = r.iter().zip(&x).map(|(ri, xi)| ri * (xi.cosh() - 1.0)).sum();
    let kl: f64 = o.iter().zip(&r).map(|(oi, ri)| oi * (oi.ln() - ri.ln())).sum();
    let e1 = (orlicz::phi(&rho, &a)? - phi_oracle).abs();
    let e2 = (relative_entropy(&w, &rho)? - kl).abs();
    Ok(Instance::new(e1.max(e2)).with("rho", rho.matrix()).with("omega", w.matrix()).with("a", a.matrix()))
}

fn kosaki_bound(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let w = random::state(rng, alg);
    let step = random::step_function(rng, alg);
    let excess = kosaki_lower_bound(&w, &rho, &step)? - relative_entropy(&w, &rho)?;
    Ok(Instance::new(excess).with("rho", rho.matrix()).with("omega", w.matrix()))
}

const RENYI_GRID: [f64; 5] = [1.001, 1.01, 1.1, 1.5, 2.0];

fn renyi_values(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng) -> qexp::Result<(Vec<f64>, f64, PositiveFunctional, PositiveFunctional)> {
    let rho = random::state(rng, alg);
    let w = random::state(rng, alg);
    let vals = RENYI_GRID.iter().map(|&a| renyi_f(&w, &rho, a)).collect::<qexp::Result<Vec<_>>>()?;
    let ratio = relative_entropy(&w, &rho)? / w.trace();
    Ok((vals, ratio, rho, w))
}

fn renyi_monotone(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let (vals, _, rho, w) = renyi_values(alg, rng)?;
    let violation = vals.windows(2).map(|p| p[0] - p[1]).fold(0.0, f64::max);
    Ok(Instance::new(violation).with("rho", rho.matrix()).with("omega", w.matrix()))
}

fn renyi_limit(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let (vals, ratio, rho, w) = renyi_values(alg, rng)?;
    Ok(Instance::new((vals[0] - ratio).abs()).with("rho", rho.matrix()).with("omega", w.matrix()))
}

fn perturbed_entropy(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let w = random::positive(rng, alg);
    let h = random::hermitian(rng, alg);
    let generic = perturbed_entropy_residual(&w, &rho, &h)?;
    // ω = ρ^h attains the supremum defining C_ρ
    let rho_h = perturb(&rho, &h)?;
    let at_max = perturbed_entropy_residual(&rho_h.perturbed, &rho, &h)?;
    Ok(Instance::new(generic.max(at_max)).with("rho", rho.matrix()).with("omega", w.matrix()).with("h", h.matrix()))
}

fn chain_rule(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    let k = random::hermitian(rng, alg);
    let r = chain_rule_residual(&rho, &h, &k)?.max(chain_rule_residual(&rho, &h, &h.neg())?);
    Ok(Instance::new(r).with("rho", rho.matrix()).with("h", h.matrix()).with("k", k.matrix()))
}

fn gradient(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    let g = perturb(&rho, &h)?.perturbed;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let b = random::hermitian(rng, alg);
        let fd = c_directional_difference(&rho, &h, &b, 1e-5)?;
        worst = worst.max((fd - pairing(&b, &g)?).abs());
    }
    Ok(Instance::new(worst).with("rho", rho.matrix()).with("h", h.matrix()))
}

fn subgradient(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let a = random::hermitian(rng, alg);
    let b = random::hermitian(rng, alg);
    let rb = perturb(&rho, &b)?;
    let gap = c_rho(&rho, &a)? - rb.c_value - pairing(&a.sub(&b), &rb.perturbed)?;
    Ok(Instance::new(gap).with("rho", rho.matrix()).with("a", a.matrix()).with("b", b.matrix()))
}

fn c_strict_convexity(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    let k = random::hermitian(rng, alg);
    let mid = h.add(&k).scale(0.5);
    let gap = 0.5 * (c_rho(&rho, &h)? + c_rho(&rho, &k)?) - c_rho(&rho, &mid)?;
    Ok(Instance::new(gap).with("rho", rho.matrix()).with("h", h.matrix()).with("k", k.matrix()))
}

fn series_oracle(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let a = random::hermitian(rng, alg).scale(0.5);
    let r = perturbed_vector_series(&rho, &a, 6, 32)?;
    Ok(Instance::new(r.residual).with("rho", rho.matrix()).with("a", a.matrix()))
}

fn fenchel_young(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let psi = random::self_adjoint(rng, alg, 0.5);
    let psi_val = orlicz::psi_sup(&rho, &psi, &PsiOptions::default())?.psi_value;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10 {
        let s = rng.random_range(0.0..3.0);
        let a = random::hermitian(rng, alg).scale(s);
        worst = worst.max(pairing(&a, &psi)? - orlicz::phi(&rho, &a)? - psi_val);
    }
    Ok(Instance::new(worst).with("rho", rho.matrix()).with("psi", psi.matrix()))
}

fn fenchel_equality(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let a = random::hermitian(rng, alg);
    let plus = perturb(&rho, &a)?.perturbed;
    let minus = perturb(&rho, &a.neg())?.perturbed;
    let psi = qexp::SelfAdjointFunctional::new((plus.matrix() - minus.matrix()).scale(0.5).hermitian_part())?;
    let psi_val = orlicz::psi_sup(&rho, &psi, &PsiOptions::default())?.psi_value;
    let gap = (orlicz::phi(&rho, &a)? + psi_val - pairing(&a, &psi)?).abs();
    Ok(Instance::new(gap).with("rho", rho.matrix()).with("a", a.matrix()))
}

fn conjugate_duality(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let psi = random::self_adjoint(rng, alg, 0.3);
    let s = orlicz::psi_sup(&rho, &psi, &PsiOptions::default())?;
    let i = orlicz::psi_inf(&rho, &psi, &PsiOptions::default())?;
    let (p, m) = &i.decomposition;
    let infeasibility = (&(p.matrix() - m.matrix()) - &psi.matrix().scale(2.0)).frobenius_norm();
    let gap = (s.psi_value - i.psi_value).abs();
    let value = if infeasibility > 1e-8 { gap.max(infeasibility) } else { gap };
    Ok(Instance::new(value).with("rho", rho.matrix()).with("psi", psi.matrix()))
}

fn exp_norm_triangle(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let a = random::hermitian(rng, alg);
    let b = random::hermitian(rng, alg);
    let n = |x: &HermitianElement| orlicz::exp_norm(&rho, x).map(|e| e.norm);
    let (na, nb) = (n(&a)?, n(&b)?);
    let tri = n(&a.add(&b))? - na - nb;
    let hom = (n(&a.scale(-2.5))? - 2.5 * na).abs();
    Ok(Instance::new(tri.max(hom)).with("rho", rho.matrix()).with("a", a.matrix()).with("b", b.matrix()))
}

fn young_holder(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let a = random::hermitian(rng, alg);
    let psi = random::self_adjoint(rng, alg, 0.5);
    let na = orlicz::exp_norm(&rho, &a)?.norm;
    let np = orlicz::log_norm(&rho, &psi)?.norm;
    let excess = pairing(&a, &psi)?.abs() - 2.0 * na * np;
    Ok(Instance::new(excess).with("rho", rho.matrix()).with("a", a.matrix()).with("psi", psi.matrix()))
}

fn embedding_chain(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let a = random::hermitian(rng, alg);
    let e = embed(a.matrix(), &rho, f64::INFINITY)?;
    let norms = [1.0, 1.5, 2.0, 4.0, f64::INFINITY]
        .iter()
        .map(|&p| lp_norm(&e, &rho, p))
        .collect::<qexp::Result<Vec<_>>>()?;
    let mut worst = norms.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    worst = worst.max((norms[4] - a.sup_norm()).abs());
    Ok(Instance::new(worst).with("rho", rho.matrix()).with("a", a.matrix()))
}

fn lp_duality(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    let p = rng.random_range(1.1..6.0);
    Ok(Instance::new(lp_duality_gap(h.matrix(), &rho, p)?).with("rho", rho.matrix()).with("h", h.matrix()))
}

fn random_channel(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng) -> qexp::Result<Channel> {
    let tdim = rng.random_range(1..=alg.dim());
    let extra = rng.random_range(0..=2);
    random::channel(rng, alg, &MatrixAlgebra::full(tdim), extra)
}

fn adjointness(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let t = random_channel(alg, rng)?;
    let h = random::hermitian(rng, alg);
    let a = random::hermitian(rng, t.target());
    let unital = (&t.adjoint_apply(&BlockMatrix::identity(t.target()))? - &BlockMatrix::identity(alg)).frobenius_norm();
    let tp = (t.apply(h.matrix())?.trace() - h.matrix().trace()).norm();
    let r = t.adjointness_residual(h.matrix(), a.matrix())?.max(unital).max(tp);
    Ok(Instance::new(r).with("h", h.matrix()).with("a", a.matrix()))
}

fn f_monotonicity(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let t = random_channel(alg, rng)?;
    let rho = random::state(rng, alg);
    let w = random::positive(rng, alg);
    Ok(Instance::new(channels::f_monotonicity_residual(&t, &rho, &w)?).with("rho", rho.matrix()).with("omega", w.matrix()))
}

fn lp_contraction(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let t = random_channel(alg, rng)?;
    let rho = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    // h is an L_1 element here; its size is immaterial
    let mut worst = f64::INFINITY;
    for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
        worst = worst.min(channels::lp_contraction_gap(&t, &rho, h.matrix(), p)?);
    }
    Ok(Instance::new(worst).with("rho", rho.matrix()).with("h", h.matrix()))
}

fn log_norm_contraction(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let t = random_channel(alg, rng)?;
    let rho = random::state(rng, alg);
    let psi = random::self_adjoint(rng, alg, 0.5);
    let (before, after) = channels::log_norm_contraction(&t, &rho, &psi, 1e-8)?;
    Ok(Instance::new(after - before).with("rho", rho.matrix()).with("psi", psi.matrix()))
}

fn petz_identities(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let t = random_channel(alg, rng)?;
    let rho = random::state(rng, alg);
    let petz = PetzMap::new(&t, &rho, true)?;
    let target = petz.channel().target().clone();
    let unit = petz.dual(&BlockMatrix::identity(alg))?;
    let unital = schatten_norm(&(&unit - &BlockMatrix::identity(&target)), f64::INFINITY)?;
    let round = schatten_norm(&(&petz.recover(petz.t_rho().matrix())? - rho.matrix()), 1.0)?;
    let b = random::hermitian(rng, &target);
    let dd = petz.double_dual_residual(b.matrix())?;
    Ok(Instance::new(unital.max(round).max(dd)).with("rho", rho.matrix()).with("b", b.matrix()))
}

/// A channel sufficient for `{ρ, ρ^h}` together with `ρ` and `h`, cycling
/// through identity, partial trace of a product state with a factor-supported
/// `h`, and an embedding into a larger block.
pub fn sufficient_construction(
    alg: &MatrixAlgebra,
    rng: &mut ChaCha8Rng,
    which: usize,
) -> qexp::Result<(Channel, PositiveFunctional, HermitianElement)> {
    let d = alg.dim();
    match which % 3 {
        0 => Ok((Channel::identity(alg), random::state(rng, alg), random::hermitian(rng, alg))),
        1 => {
            let r1 = random::state(rng, alg);
            let r2 = random::state(rng, &MatrixAlgebra::full(2));
            let rho = PositiveFunctional::new(tensor_product(r1.matrix(), r2.matrix())?)?;
            let h1 = random::hermitian(rng, alg);
            let h = HermitianElement::new(tensor_product(h1.matrix(), &BlockMatrix::identity(&MatrixAlgebra::full(2)))?)?;
            Ok((Channel::partial_trace(d, 2)?, rho, h))
        }
        _ => Ok((Channel::embedding(alg, 1)?, random::state(rng, alg), random::hermitian(rng, alg))),
    }
}

fn sufficiency_positive(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, trial: usize) -> qexp::Result<Instance> {
    let (t, rho, h) = sufficient_construction(alg, rng, trial)?;
    let r = channels::sufficiency_report(&t, &rho, &h)?;
    Ok(Instance::new(r.max_residual()).with("rho", rho.matrix()).with("h", h.matrix()))
}

fn sufficiency_negative(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, trial: usize) -> qexp::Result<Instance> {
    let t = if trial.is_multiple_of(2) {
        Channel::depolarizing(alg, 1.0)?
    } else {
        Channel::measurement(alg)?
    };
    let rho = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    let r = channels::sufficiency_report(&t, &rho, &h)?;
    let min = [
        r.entropy_preserved.residual,
        r.transported_state.residual,
        r.fixed_point_h.residual,
        r.recovery_exact.residual,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    Ok(Instance::new(min).with("rho", rho.matrix()).with("h", h.matrix()))
}

fn transported(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, trial: usize) -> qexp::Result<(Vec<channels::TransportedMember>, BlockMatrix)> {
    let (t, rho, h) = sufficient_construction(alg, rng, trial)?;
    // a second generator with the same structure as h
    let (_, _, h2) = sufficient_construction(alg, &mut ChaCha8Rng::seed_from_u64(rng.random()), trial)?;
    let h2 = if h2.algebra() == rho.algebra() { h2 } else { h.scale(-0.5) };
    let fam = [h.clone(), h2, h.add(&h.scale(0.3))];
    Ok((channels::transport_family(&t, &rho, &fam)?, rho.into_matrix()))
}

fn transport_state(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, trial: usize) -> qexp::Result<Instance> {
    let (members, rho) = transported(alg, rng, trial)?;
    let worst = members.iter().map(|m| m.state_residual).fold(0.0, f64::max);
    Ok(Instance::new(worst).with("rho", &rho))
}

fn transport_norm(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, trial: usize) -> qexp::Result<Instance> {
    let (members, rho) = transported(alg, rng, trial)?;
    let worst = members.iter().map(|m| m.norm_residual).fold(0.0, f64::max);
    Ok(Instance::new(worst).with("rho", &rho))
}

fn divergence_forms(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    let k = random::hermitian(rng, alg);
    let d = manifold::canonical_divergence(&rho, &h, &k)?;
    let same = manifold::canonical_divergence(&rho, &h, &h)?;
    let negativity = (-d.bregman).max(0.0);
    let r = d.residual().max(negativity).max(same.bregman.abs()).max(same.entropy_form.abs());
    Ok(Instance::new(r).with("rho", rho.matrix()).with("h", h.matrix()).with("k", k.matrix()))
}

fn pythagorean(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let (h, k, l) = (random::hermitian(rng, alg), random::hermitian(rng, alg), random::hermitian(rng, alg));
    let generic = manifold::pythagorean_residual(&rho, &h, &k, &l)?;
    let c = random::hermitian(rng, alg);
    let ho = manifold::orthogonal_partner(&rho, &k, &l, &c)?;
    let d = |x: &HermitianElement, y: &HermitianElement| manifold::canonical_divergence(&rho, x, y).map(|d| d.bregman);
    let three_point = (d(&ho, &k)? + d(&k, &l)? - d(&ho, &l)?).abs();
    Ok(Instance::new(generic.max(three_point))
        .with("rho", rho.matrix())
        .with("h", h.matrix())
        .with("k", k.matrix())
        .with("l", l.matrix())
        .with("c", c.matrix()))
}

fn chart_round_trip(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let rho = random::state(rng, alg);
    let sigma = random::state(rng, alg);
    let w = random::state(rng, alg);
    let h = random::hermitian(rng, alg);
    let chart = Chart::new(rho.clone())?;
    let back = (chart.inverse(&chart.forward(&h)?)?.matrix() - h.matrix()).frobenius_norm();
    let probe = chart.inverse_probe_residual(&sigma, &w)?;
    Ok(Instance::new(back.max(probe)).with("rho", rho.matrix()).with("sigma", sigma.matrix()).with("h", h.matrix()))
}

fn transition_consistency(alg: &MatrixAlgebra, rng: &mut ChaCha8Rng, _: usize) -> qexp::Result<Instance> {
    let (r1, r2, r3) = (random::state(rng, alg), random::state(rng, alg), random::state(rng, alg));
    let h = random::hermitian(rng, alg);
    let direct = manifold::transition_residual(&r1, &r2, &h)?;
    let via = manifold::transition(&r2, &r3, &manifold::transition(&r1, &r2, &h)?)?;
    let once = manifold::transition(&r1, &r3, &h)?;
    let compose = (via.matrix() - once.matrix()).frobenius_norm();
    Ok(Instance::new(direct.max(compose))
        .with("rho1", r1.matrix())
        .with("rho2", r2.matrix())
        .with("rho3", r3.matrix())
        .with("h1", h.matrix()))
}

// ---- runner ----

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one instance; FNV-1a on the invariant name keeps it independent of
/// the invariant's position in the list.
pub fn instance_seed(seed: u64, name: &str, dim: usize, trial: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    mix(mix(mix(seed ^ h) ^ dim as u64) ^ trial as u64)
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub invariant: &'static str,
    pub block_dims: Vec<usize>,
    pub trial: usize,
    pub instance_seed: u64,
    pub value: f64,
    pub error: Option<String>,
    pub inputs: Vec<(&'static str, BlockMatrix)>,
}

impl Failure {
    fn to_json(&self) -> Value {
        let mut inputs = Obj::new();
        for (i, (name, m)) in self.inputs.iter().enumerate() {
            inputs.insert(&format!("{i}_{name}"), matrix(m));
        }
        let mut o = Obj::new()
            .set("invariant", self.invariant)
            .set("block_dims", self.block_dims.clone())
            .set("trial", self.trial)
            .set("instance_seed", self.instance_seed)
            .f("value", self.value);
        if let Some(e) = &self.error {
            o.insert("error", e.clone());
        }
        o.set("inputs", inputs).into()
    }
}

#[derive(Clone, Debug)]
pub struct InvariantSummary {
    pub name: &'static str,
    pub check: Check,
    pub instances: usize,
    pub worst: f64,
    pub failed: usize,
    pub failures: Vec<Failure>,
}

impl InvariantSummary {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn to_json(&self) -> Value {
        Obj::new()
            .set("name", self.name)
            .set("check", self.check.label())
            .f("threshold", self.check.threshold())
            .set("instances", self.instances)
            .f("worst", self.worst)
            .set("failed", self.failed)
            .set("passed", self.passed())
            .into()
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub summaries: Vec<InvariantSummary>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.summaries.iter().all(InvariantSummary::passed)
    }

    pub fn summary(&self, name: &str) -> Option<&InvariantSummary> {
        self.summaries.iter().find(|s| s.name == name)
    }
}

struct Job {
    inv: usize,
    alg: MatrixAlgebra,
    trial: usize,
    seed: u64,
}

fn run_one(inv: &Invariant, alg: &MatrixAlgebra, trial: usize, seed: u64) -> (f64, Option<String>, Vec<(&'static str, BlockMatrix)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (inv.run)(alg, &mut rng, trial) {
        Ok(inst) => (inst.value, None, inst.inputs),
        Err(e) => (f64::NAN, Some(e.to_string()), Vec::new()),
    }
}

fn thread_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("QIG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        b = b.num_threads(n.max(1));
    }
    b.build().expect("thread pool")
}

/// Runs the suite. Invariants with a trial cap run `min(trials, cap)` trials
/// per dimension.
pub fn run_suite(dims: &[usize], trials: usize, seed: u64, only: &[String]) -> CliResult<SuiteOutcome> {
    run_suite_with(dims, trials, seed, only, &[])
}

/// As [`run_suite`], with per-invariant threshold overrides.
pub fn run_suite_with(
    dims: &[usize],
    trials: usize,
    seed: u64,
    only: &[String],
    overrides: &[(String, f64)],
) -> CliResult<SuiteOutcome> {
    if dims.is_empty() {
        return Err(CliError::parse("dims", "need at least one dimension"));
    }
    if let Some(&d) = dims.iter().find(|&&d| d == 0 || d > MAX_DIM) {
        return Err(CliError::parse("dims", format!("dimensions must lie in 1..={MAX_DIM}, got {d}")));
    }
    if trials == 0 {
        return Err(CliError::parse("trials", "need at least one trial"));
    }
    let mut all = invariants();
    for name in only.iter().chain(overrides.iter().map(|(n, _)| n)) {
        if !all.iter().any(|i| i.name == name) {
            return Err(CliError::parse("only", format!("unknown invariant {name:?}")));
        }
    }
    for (name, t) in overrides {
        let inv = all.iter_mut().find(|i| i.name == name).expect("checked above");
        inv.check = match inv.check {
            Check::Below(_) => Check::Below(*t),
            Check::Above(_) => Check::Above(*t),
        };
    }
    let selected: Vec<&Invariant> = all.iter().filter(|i| only.is_empty() || only.iter().any(|n| n == i.name)).collect();

    let mut jobs = Vec::new();
    for (k, inv) in selected.iter().enumerate() {
        let n = inv.trial_cap.map_or(trials, |c| trials.min(c));
        for &d in dims.iter().filter(|&&d| d >= inv.min_dim) {
            let alg = MatrixAlgebra::full(d);
            for trial in 0..n {
                jobs.push(Job {
                    inv: k,
                    alg: alg.clone(),
                    trial,
                    seed: instance_seed(seed, inv.name, d, trial),
                });
            }
        }
    }
    let results: Vec<_> = thread_pool().install(|| {
        jobs.par_iter()
            .map(|j| run_one(selected[j.inv], &j.alg, j.trial, j.seed))
            .collect()
    });

    let mut summaries: Vec<InvariantSummary> = selected
        .iter()
        .map(|inv| InvariantSummary {
            name: inv.name,
            check: inv.check,
            instances: 0,
            worst: match inv.check {
                Check::Below(_) => f64::NEG_INFINITY,
                Check::Above(_) => f64::INFINITY,
            },
            failed: 0,
            failures: Vec::new(),
        })
        .collect();
    for (job, (value, error, inputs)) in jobs.iter().zip(results) {
        let s = &mut summaries[job.inv];
        s.instances += 1;
        s.worst = s.check.worse(s.worst, value);
        if error.is_some() || !s.check.passes(value) {
            s.failed += 1;
            if s.failures.len() < MAX_RECORDED_FAILURES {
                s.failures.push(Failure {
                    invariant: s.name,
                    block_dims: job.alg.block_dims().to_vec(),
                    trial: job.trial,
                    instance_seed: job.seed,
                    value,
                    error,
                    inputs,
                });
            }
        }
    }
    Ok(SuiteOutcome { summaries })
}

pub fn outcome_json(dims: &[usize], trials: usize, seed: u64, outcome: &SuiteOutcome) -> Value {
    let failures: Vec<Value> = outcome
        .summaries
        .iter()
        .flat_map(|s| s.failures.iter().map(Failure::to_json))
        .collect();
    Obj::new()
        .set("dims", dims.to_vec())
        .set("trials", trials)
        .set("seed", seed)
        .set("passed", outcome.passed())
        .set("invariants", outcome.summaries.iter().map(InvariantSummary::to_json).collect::<Vec<_>>())
        .set("failures", failures)
        .into()
}

fn failures_in(v: &Value) -> Vec<Value> {
    match v {
        Value::Array(items) => items.clone(),
        Value::Object(o) if o.contains_key("invariant") => vec![v.clone()],
        Value::Object(o) => o
            .get("result")
            .and_then(|r| r.get("failures"))
            .or_else(|| o.get("failures"))
            .and_then(Value::as_array)
            .cloned()
            .unwrap_or_default(),
        _ => Vec::new(),
    }
}

fn as_f64(v: Option<&Value>) -> Option<f64> {
    match v? {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// Re-runs recorded failures; returns the report and whether every replayed
/// instance now passes.
pub fn replay(path: &Path) -> CliResult<(Value, bool)> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::parse("replay", format!("malformed JSON: {e}")))?;
    let all = invariants();
    let mut out = Vec::new();
    let mut all_pass = true;
    for (i, f) in failures_in(&v).iter().enumerate() {
        let field = format!("replay[{i}]");
        let name = f
            .get("invariant")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::parse(&field, "missing invariant"))?;
        let inv = all
            .iter()
            .find(|x| x.name == name)
            .ok_or_else(|| CliError::parse(&field, format!("unknown invariant {name:?}")))?;
        let dims: Vec<usize> = f
            .get("block_dims")
            .and_then(|d| serde_json::from_value(d.clone()).ok())
            .ok_or_else(|| CliError::parse(&field, "missing block_dims"))?;
        let alg = MatrixAlgebra::new(dims).map_err(|e| e.in_field(&field))?;
        let trial = f.get("trial").and_then(Value::as_u64).unwrap_or(0) as usize;
        let seed = f
            .get("instance_seed")
            .and_then(Value::as_u64)
            .ok_or_else(|| CliError::parse(&field, "missing instance_seed"))?;
        let (value, error, _) = run_one(inv, &alg, trial, seed);
        let recorded = as_f64(f.get("value"));
        let reproduced = recorded.is_some_and(|r| r.to_bits() == value.to_bits() || (r.is_nan() && value.is_nan()));
        let passed = error.is_none() && inv.check.passes(value);
        all_pass &= passed;
        let mut o = Obj::new()
            .set("invariant", inv.name)
            .set("instance_seed", seed)
            .f("value", value)
            .set("reproduced", reproduced)
            .set("passed", passed);
        if let Some(e) = error {
            o.insert("error", e);
        }
        out.push(Value::from(o));
    }
    Ok((Obj::new().set("replayed", out).set("passed", all_pass).into(), all_pass))
}

fn parse_override(s: &str) -> CliResult<(String, f64)> {
    let (name, t) = s
        .split_once('=')
        .ok_or_else(|| CliError::parse("threshold", format!("expected NAME=VALUE, got {s:?}")))?;
    let t: f64 = t.parse().map_err(|_| CliError::parse("threshold", format!("not a number: {t:?}")))?;
    Ok((name.to_string(), t))
}

pub fn run_command(a: &SuiteArgs) -> CliResult<(Value, bool)> {
    if let Some(p) = &a.replay {
        return replay(p);
    }
    let overrides = a.threshold.iter().map(|s| parse_override(s)).collect::<CliResult<Vec<_>>>()?;
    let outcome = run_suite_with(&a.dims, a.trials, a.seed, &a.only, &overrides)?;
    let ok = outcome.passed();
    Ok((outcome_json(&a.dims, a.trials, a.seed, &outcome), ok))
}

/// Per-invariant worst values, for callers that only need numbers.
pub fn worst_values(outcome: &SuiteOutcome) -> Vec<(&'static str, f64)> {
    outcome.summaries.iter().map(|s| (s.name, s.worst)).collect()
}
