//! Frozen reference values, each computed independently of the library
//! (closed forms, scalar calculus, or direct matrix arithmetic).

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use qexp::channels::{petz_dual, recovery, sufficiency_report, tensor_product, Channel};
use qexp::entropy::{f_rho, kosaki_lower_bound, relative_entropy, renyi_f, StepFunction};
use qexp::lp::{embed, lp_duality_gap, lp_norm};
use qexp::manifold::canonical_divergence;
use qexp::orlicz::{cosh_conjugate, exp_norm, phi, psi_sup, PsiOptions};
use qexp::perturbation::perturb;
use qexp::series::perturbed_vector_series;
use qexp::spectral::{eig_herm, mat_fn, pairing, schatten_norm};
use qexp::*;

fn pauli_x() -> BlockMatrix {
    let m = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    BlockMatrix::from_matrix(m).unwrap()
}

#[test]
fn pauli_x_spectrum() {
    let s = eig_herm(&pauli_x()).unwrap();
    assert_relative_eq!(s.values()[0][0], -1.0, epsilon = 1e-15);
    assert_relative_eq!(s.values()[0][1], 1.0, epsilon = 1e-15);
}

#[test]
fn square_root_of_diagonal() {
    let r = mat_fn(&BlockMatrix::diag(&[4.0, 9.0]), f64::sqrt, |v| v >= 0.0).unwrap();
    assert!((&r - &BlockMatrix::diag(&[2.0, 3.0])).frobenius_norm() < 1e-15);
}

#[test]
fn pairing_and_schatten_examples() {
    let a = HermitianElement::diag(&[1.0, -1.0]);
    let rho = PositiveFunctional::diag(&[0.25, 0.75]).unwrap();
    assert_eq!(pairing(&a, &rho).unwrap(), -0.5);
    let x = BlockMatrix::diag(&[3.0, -4.0]);
    assert_eq!(schatten_norm(&x, 1.0).unwrap(), 7.0);
    assert_eq!(schatten_norm(&x, f64::INFINITY).unwrap(), 4.0);
}

#[test]
fn kl_example() {
    let w = PositiveFunctional::diag(&[0.5, 0.5]).unwrap();
    let r = PositiveFunctional::diag(&[0.25, 0.75]).unwrap();
    let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
    assert_relative_eq!(relative_entropy(&w, &r).unwrap(), expected, epsilon = 1e-15);
    assert!((expected - 0.143841).abs() < 1e-6);
    let a = PositiveFunctional::diag(&[1.0, 0.0]).unwrap();
    let b = PositiveFunctional::diag(&[0.0, 1.0]).unwrap();
    assert_eq!(relative_entropy(&a, &b).unwrap(), f64::INFINITY);
}

#[test]
fn shifted_entropy_examples() {
    let rho = PositiveFunctional::diag(&[0.3, 0.7]).unwrap();
    assert_relative_eq!(f_rho(&rho.to_self_adjoint(), &rho).unwrap(), -1.0, epsilon = 1e-15);
    let two = rho.scale(2.0).to_self_adjoint();
    assert_relative_eq!(f_rho(&two, &rho).unwrap(), 2.0 * (2f64.ln() - 1.0), epsilon = 1e-14);
    let neg = SelfAdjointFunctional::diag(&[0.5, -0.1]);
    assert_eq!(f_rho(&neg, &rho).unwrap(), f64::INFINITY);
}

#[test]
fn constant_step_function_bracket() {
    let rho = PositiveFunctional::diag(&[0.2, 0.5]).unwrap();
    let w = PositiveFunctional::diag(&[0.4, 0.1]).unwrap();
    let s = StepFunction::constant_one(1, rho.algebra()).unwrap();
    assert_relative_eq!(kosaki_lower_bound(&w, &rho, &s).unwrap(), -0.7, epsilon = 1e-15);
}

#[test]
fn renyi_at_reference_state_vanishes() {
    let rho = PositiveFunctional::diag(&[0.1, 0.2, 0.7]).unwrap();
    for alpha in [1.001, 1.5, 2.0, 3.0] {
        assert!(renyi_f(&rho, &rho, alpha).unwrap().abs() < 1e-12);
    }
}

#[test]
fn perturbation_closed_form() {
    let rho = PositiveFunctional::diag(&[0.5, 0.5]).unwrap();
    let r = perturb(&rho, &HermitianElement::diag(&[1.0, -1.0])).unwrap();
    assert_relative_eq!(r.c_value, 1.5430806348152437, epsilon = 1e-15);
}

#[test]
fn series_diagonal_converges_to_square_root() {
    let rho = PositiveFunctional::diag(&[0.3, 0.7]).unwrap();
    let a = HermitianElement::diag(&[0.5, -0.5]);
    let r = perturbed_vector_series(&rho, &a, 6, 32).unwrap();
    // scalar tail Σ_{n>6} (1/4)^n/n! · ‖ρ^{1/2}‖ is below 1e-7
    assert!(r.residual < 1e-7, "{}", r.residual);
}

#[test]
fn orlicz_worked_example() {
    let rho = PositiveFunctional::diag(&[0.5, 0.5]).unwrap();
    let a = HermitianElement::diag(&[1.0, -1.0]);
    assert_relative_eq!(phi(&rho, &a).unwrap(), 1f64.cosh() - 1.0, epsilon = 1e-15);
    let n = exp_norm(&rho, &a).unwrap().norm;
    assert_relative_eq!(n, 0.7593257175002074, max_relative = 1e-8);
}

#[test]
fn diagonal_conjugate_oracle() {
    // scalar Legendre transform of cosh − 1, evaluated at u = sinh(1)
    assert_relative_eq!(cosh_conjugate(1f64.sinh()), 1f64.sinh() - 1f64.cosh() + 1.0, epsilon = 1e-15);
    let rho = PositiveFunctional::diag(&[0.2, 0.3, 0.5]).unwrap();
    let psi = SelfAdjointFunctional::diag(&[0.3, -0.1, 0.05]);
    let expected: f64 = [(0.2, 0.3), (0.3, -0.1), (0.5, 0.05)]
        .iter()
        .map(|&(r, p): &(f64, f64)| r * cosh_conjugate(p / r))
        .sum();
    let c = psi_sup(&rho, &psi, &PsiOptions::default()).unwrap();
    assert_relative_eq!(c.psi_value, expected, epsilon = 1e-12);
}

#[test]
fn kosaki_examples() {
    let rho = PositiveFunctional::diag(&[0.2, 0.8]).unwrap();
    for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
        let expected = if p.is_infinite() { 1.0 } else { 1f64.powf(1.0 / p) };
        assert_relative_eq!(lp_norm(rho.matrix(), &rho, p).unwrap(), expected, epsilon = 1e-14);
    }
    let a = BlockMatrix::diag(&[0.7, -1.3]);
    let e = embed(&a, &rho, f64::INFINITY).unwrap();
    assert_relative_eq!(lp_norm(&e, &rho, f64::INFINITY).unwrap(), 1.3, epsilon = 1e-14);
    assert!(lp_duality_gap(rho.matrix(), &rho, 2.0).unwrap() < 1e-10);
    // ℓ_3 norm of diag(1, 2) relative to ρ: ρ^{-1/3} h ρ^{-1/3}
    let h = BlockMatrix::diag(&[1.0, 2.0]);
    let expected = ((1.0 / 0.2f64.powf(2.0 / 3.0)).powi(3) + (2.0 / 0.8f64.powf(2.0 / 3.0)).powi(3)).powf(1.0 / 3.0);
    assert_relative_eq!(lp_norm(&h, &rho, 3.0).unwrap(), expected, max_relative = 1e-13);
}

#[test]
fn partial_trace_petz_examples() {
    let r1 = PositiveFunctional::diag(&[0.35, 0.65]).unwrap();
    let r2 = PositiveFunctional::new(BlockMatrix::from_matrix(DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(0.6, 0.0), C64::new(0.1, 0.1), C64::new(0.1, -0.1), C64::new(0.4, 0.0)],
    ))
    .unwrap())
    .unwrap();
    let rho = PositiveFunctional::new(tensor_product(r1.matrix(), r2.matrix()).unwrap()).unwrap();
    let t = Channel::partial_trace(2, 2).unwrap();
    let one = BlockMatrix::identity(&MatrixAlgebra::full(2));
    let a = BlockMatrix::diag(&[1.5, -0.5]);
    let got = petz_dual(&t, &rho, &tensor_product(&a, &one).unwrap()).unwrap();
    assert!((&got - &a).frobenius_norm() < 1e-12);
    let sigma = BlockMatrix::diag(&[0.9, 0.1]);
    let rec = recovery(&t, &rho, &sigma).unwrap();
    assert!((&rec - &tensor_product(&sigma, r2.matrix()).unwrap()).frobenius_norm() < 1e-12);

    let h1 = HermitianElement::diag(&[0.4, -0.2]);
    let h = HermitianElement::new(tensor_product(h1.matrix(), &one).unwrap()).unwrap();
    let rep = sufficiency_report(&t, &rho, &h).unwrap();
    assert!(rep.all_hold(), "{rep:?}");
    assert!((rep.transported_h0.matrix() - h1.matrix()).frobenius_norm() < 1e-12);
}

#[test]
fn measurement_with_generic_h_is_not_sufficient() {
    let rho = PositiveFunctional::diag(&[0.4, 0.6]).unwrap();
    let t = Channel::measurement(rho.algebra()).unwrap();
    let h = HermitianElement::new(pauli_x().scale(0.5)).unwrap();
    let rep = sufficiency_report(&t, &rho, &h).unwrap();
    assert!(rep.none_hold(), "{rep:?}");
}

#[test]
fn divergence_self_vanishes() {
    let rho = PositiveFunctional::diag(&[0.3, 0.7]).unwrap();
    let h = HermitianElement::new(pauli_x().scale(0.3)).unwrap();
    let d = canonical_divergence(&rho, &h, &h).unwrap();
    assert!(d.bregman.abs() < 1e-15 && d.entropy_form.abs() < 1e-14);
}
