use qexp::channels::{self, PetzMap};
use qexp::entropy::{f_rho, f_rho_lower_bound, relative_entropy, renyi_f};
use qexp::lp::{lp_duality_gap, lp_norm, parse_exponent};
use qexp::manifold::{self, Chart};
use qexp::orlicz::{self, PsiOptions};
use qexp::perturbation::{c_directional_difference, perturb};
use qexp::spectral::{pairing, schatten_norm};
use qexp::BlockMatrix;
use serde_json::Value;

use crate::cli::*;
use crate::error::CliResult;
use crate::input::{self, tolerance};
use crate::output::{matrix, num, nums, Obj};
use crate::suite;

/// Command name as typed on the command line.
pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Entropy(_) => "entropy",
        Command::FRho(_) => "f-rho",
        Command::Perturb(_) => "perturb",
        Command::CRho(_) => "c-rho",
        Command::NormExp(_) => "norm-exp",
        Command::NormLog(_) => "norm-log",
        Command::NormLp(_) => "norm-lp",
        Command::Divergence(_) => "divergence",
        Command::PetzDual(_) => "petz-dual",
        Command::Recovery(_) => "recovery",
        Command::CheckSufficiency(_) => "check-sufficiency",
        Command::TransportFamily(_) => "transport-family",
        Command::Chart(_) => "chart",
        Command::Transition(_) => "transition",
        Command::RenyiF(_) => "renyi-f",
        Command::PropertySuite(_) => "property-suite",
    }
}

/// Runs a command and returns its `result` object. Suite failures surface as
/// [`crate::error::CliError::SuiteFailure`] after the report is built, so the
/// report is returned alongside.
pub fn run(cmd: &Command) -> CliResult<(Value, bool)> {
    let ok = |v: Obj| Ok((Value::from(v), true));
    match cmd {
        Command::Entropy(a) => {
            let omega = input::positive(&a.omega, "omega")?;
            let rho = input::positive(&a.rho, "rho")?;
            ok(Obj::new().f("S", relative_entropy(&omega, &rho)?))
        }
        Command::FRho(a) => {
            let omega = input::self_adjoint(&a.omega, "omega")?;
            let rho = input::positive(&a.rho, "rho")?;
            let f = f_rho(&omega, &rho)?;
            let mut o = Obj::new().f("F", f);
            if let Some(w) = omega.to_positive() {
                o.insert("lower_bound", num(f_rho_lower_bound(&w, &rho)));
            }
            ok(o)
        }
        Command::Perturb(a) => {
            let rho = input::positive(&a.rho, "rho")?;
            let h = input::hermitian(&a.h, "h")?;
            let r = perturb(&rho, &h)?;
            ok(Obj::new()
                .set("perturbed", matrix(r.perturbed.matrix()))
                .f("c_value", r.c_value)
                .f("min_eigenvalue", r.perturbed.min_eigenvalue()))
        }
        Command::CRho(a) => {
            let rho = input::positive(&a.rho, "rho")?;
            let h = input::hermitian(&a.h, "h")?;
            let r = perturb(&rho, &h)?;
            let mut o = Obj::new().f("C", r.c_value).set("gradient", matrix(r.perturbed.matrix()));
            if let Some(d) = &a.direction {
                let b = input::hermitian(d, "direction")?;
                let eps = tolerance(a.eps, "eps")?;
                let fd = c_directional_difference(&rho, &h, &b, eps)?;
                let exact = pairing(&b, &r.perturbed)?;
                o.insert("directional_difference", num(fd));
                o.insert("gradient_pairing", num(exact));
                o.insert("mismatch", num((fd - exact).abs()));
            }
            ok(o)
        }
        Command::NormExp(a) => {
            let rho = input::positive(&a.rho, "rho")?;
            let x = input::hermitian(&a.a, "a")?;
            let est = orlicz::exp_norm_with_tol(&rho, &x, tolerance(a.tol, "tol")?)?;
            ok(Obj::new()
                .f("norm", est.norm)
                .set("diagnostics", Obj::new().set("evaluations", est.evaluations)))
        }
        Command::NormLog(a) => {
            let rho = input::positive(&a.rho, "rho")?;
            let psi = input::self_adjoint(&a.psi, "psi")?;
            let opts = PsiOptions {
                tol: tolerance(a.solver_tol, "solver_tol")?,
                max_iter: a.max_iter,
                warm_start: None,
            };
            let est = orlicz::log_norm_with(&rho, &psi, tolerance(a.tol, "tol")?, opts.clone())?;
            let mut o = Obj::new()
                .f("norm", est.norm)
                .set("diagnostics", Obj::new().set("evaluations", est.evaluations));
            if a.certificate {
                let s = orlicz::psi_sup(&rho, &psi, &opts)?;
                let i = orlicz::psi_inf(&rho, &psi, &opts)?;
                o.insert(
                    "psi",
                    Obj::new()
                        .f("sup_form", s.psi_value)
                        .f("inf_form", i.psi_value)
                        .f("gap", (s.psi_value - i.psi_value).abs())
                        .set("maximizer_a", matrix(s.maximizer_a.matrix()))
                        .set("omega_plus", matrix(i.decomposition.0.matrix()))
                        .set("omega_minus", matrix(i.decomposition.1.matrix()))
                        .set(
                            "diagnostics",
                            Obj::new()
                                .set("sup_iterations", s.iterations)
                                .f("sup_gradient_norm", s.gradient_norm)
                                .set("inf_iterations", i.iterations)
                                .f("inf_gradient_norm", i.gradient_norm),
                        ),
                );
            }
            ok(o)
        }
        Command::NormLp(a) => {
            let rho = input::positive(&a.rho, "rho")?;
            let h = input::matrix(&a.h, "h")?;
            let p = parse_exponent(&a.p)?;
            let mut o = Obj::new().f("p", p).f("norm", lp_norm(&h, &rho, p)?);
            if p > 1.0 && p.is_finite() {
                o.insert("duality_gap", num(lp_duality_gap(&h, &rho, p)?));
            }
            ok(o)
        }
        Command::Divergence(a) => {
            let rho = input::positive(&a.rho, "rho")?;
            let h = input::hermitian(&a.h, "h")?;
            let k = input::hermitian(&a.k, "k")?;
            let d = manifold::canonical_divergence(&rho, &h, &k)?;
            let mut o = Obj::new()
                .f("D", d.bregman)
                .f("entropy_form", d.entropy_form)
                .f("form_residual", d.residual());
            if let Some(l) = &a.l {
                let l = input::hermitian(l, "l")?;
                o.insert("cross_term", num(manifold::cross_term(&rho, &h, &k, &l)?));
                o.insert("pythagorean_residual", num(manifold::pythagorean_residual(&rho, &h, &k, &l)?));
            }
            ok(o)
        }
        Command::PetzDual(a) => {
            let ch = input::channel(&a.channel, "channel")?;
            let rho = input::positive(&a.rho, "rho")?;
            let x = input::matrix(&a.a, "a")?;
            x.algebra().check_same(ch.source(), "a")?;
            let petz = PetzMap::new(&ch, &rho, !a.no_support_restriction)?;
            let dual = petz.dual(&x)?;
            let unit = petz.dual(&BlockMatrix::identity(ch.source()))?;
            let unitality = schatten_norm(&(&unit - &BlockMatrix::identity(petz.channel().target())), f64::INFINITY)?;
            ok(Obj::new()
                .set("petz_dual", matrix(&petz.restriction.lift(&dual)))
                .set("support_restricted", !petz.restriction.trivial)
                .f("unitality_residual", unitality))
        }
        Command::Recovery(a) => {
            let ch = input::channel(&a.channel, "channel")?;
            let rho = input::positive(&a.rho, "rho")?;
            let sigma = input::matrix(&a.sigma, "sigma")?;
            sigma.algebra().check_same(ch.target(), "sigma")?;
            let petz = PetzMap::new(&ch, &rho, !a.no_support_restriction)?;
            let rec = petz.recover(&petz.restriction.compress(&sigma)?)?;
            let round = petz.recover(petz.t_rho().matrix())?;
            ok(Obj::new()
                .set("recovered", matrix(&rec))
                .set("support_restricted", !petz.restriction.trivial)
                .f("discarded_weight", petz.restriction.leakage(&sigma)?)
                .f("round_trip_residual", schatten_norm(&(&round - rho.matrix()), 1.0)?))
        }
        Command::CheckSufficiency(a) => {
            let ch = input::channel(&a.channel, "channel")?;
            let rho = input::positive(&a.rho, "rho")?;
            let h = input::hermitian(&a.h, "h")?;
            let r = channels::sufficiency_report(&ch, &rho, &h)?;
            let cert = |c: channels::Certificate| Obj::new().set("holds", c.holds).f("residual", c.residual);
            ok(Obj::new()
                .set("sufficient", r.all_hold())
                .set("consistent", r.consistent())
                .set("entropy_preserved", cert(r.entropy_preserved))
                .set("transported_state", cert(r.transported_state))
                .set("fixed_point_h", cert(r.fixed_point_h))
                .set("recovery_exact", cert(r.recovery_exact))
                .set("transported_h0", matrix(r.transported_h0.matrix()))
                .set("support_restricted", r.support_restricted))
        }
        Command::TransportFamily(a) => {
            let ch = input::channel(&a.channel, "channel")?;
            let rho = input::positive(&a.rho, "rho")?;
            let fam = input::hermitian_list(&a.family, "family")?;
            let members = channels::transport_family(&ch, &rho, &fam)?;
            let list: Vec<Value> = members
                .iter()
                .map(|m| {
                    Obj::new()
                        .set("h0", matrix(m.h0.matrix()))
                        .set("sufficient", m.sufficient)
                        .f("state_residual", m.state_residual)
                        .f("exp_norm_residual", m.norm_residual)
                        .into()
                })
                .collect();
            ok(Obj::new().set("all_sufficient", members.iter().all(|m| m.sufficient)).set("family", list))
        }
        Command::Chart(a) => {
            let rho = input::positive(&a.rho, "rho")?;
            let chart = Chart::new(rho)?;
            if let Some(h) = &a.h {
                let h = input::hermitian(h, "h")?;
                let img = chart.forward_checked(&h)?;
                let back = chart.inverse(&img.state)?;
                ok(Obj::new()
                    .set("direction", "forward")
                    .set("state", matrix(img.state.matrix()))
                    .f("exp_norm", img.exp_norm)
                    .set("in_unit_ball", img.in_unit_ball)
                    .f("round_trip_residual", (back.matrix() - h.matrix()).frobenius_norm()))
            } else {
                let sigma = input::positive(a.sigma.as_deref().expect("clap enforces h or sigma"), "sigma")?;
                let h = chart.inverse(&sigma)?;
                let back = chart.forward(&h)?;
                ok(Obj::new()
                    .set("direction", "inverse")
                    .set("h", matrix(h.matrix()))
                    .f("round_trip_residual", schatten_norm(&(back.matrix() - sigma.matrix()), 1.0)?))
            }
        }
        Command::Transition(a) => {
            let rho1 = input::positive(&a.rho1, "rho1")?;
            let rho2 = input::positive(&a.rho2, "rho2")?;
            let h1 = input::hermitian(&a.h1, "h1")?;
            let h2 = manifold::transition(&rho1, &rho2, &h1)?;
            ok(Obj::new()
                .set("h2", matrix(h2.matrix()))
                .f("consistency_residual", manifold::transition_residual(&rho1, &rho2, &h1)?))
        }
        Command::RenyiF(a) => {
            let omega = input::positive(&a.omega, "omega")?;
            let rho = input::positive(&a.rho, "rho")?;
            let vals = a
                .alpha
                .iter()
                .map(|&al| renyi_f(&omega, &rho, al))
                .collect::<qexp::Result<Vec<f64>>>()?;
            let ratio = relative_entropy(&omega, &rho)? / omega.trace();
            ok(Obj::new()
                .set("alpha", nums(&a.alpha))
                .set("f", nums(&vals))
                .f("entropy_ratio", ratio))
        }
        Command::PropertySuite(a) => suite::run_command(a),
    }
}
