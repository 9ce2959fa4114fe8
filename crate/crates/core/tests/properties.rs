use proptest::prelude::*;
use qexp::channels::{f_monotonicity_residual, lp_contraction_gap, Channel, PetzMap};
use qexp::entropy::{donald_residual, f_rho, f_rho_lower_bound, kosaki_lower_bound, relative_entropy, renyi_f};
use qexp::lp::{embed, lp_duality_gap, lp_norm};
use qexp::manifold::{canonical_divergence, orthogonal_partner, pythagorean_residual, transition, transition_residual, Chart};
use qexp::orlicz::{exp_norm, phi, psi_inf, psi_sup, PsiOptions};
use qexp::perturbation::{c_directional_difference, c_gradient, chain_rule_residual, perturbed_entropy_residual};
use qexp::random;
use qexp::spectral::{eig_herm, pairing, schatten_norm};
use qexp::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn algebra_strategy() -> impl Strategy<Value = MatrixAlgebra> {
    prop_oneof![
        (2usize..=4).prop_map(MatrixAlgebra::full),
        (2usize..=4).prop_map(MatrixAlgebra::commutative),
        Just(MatrixAlgebra::new(vec![2, 1]).unwrap()),
    ]
}

fn setup() -> impl Strategy<Value = (MatrixAlgebra, ChaCha8Rng)> {
    (algebra_strategy(), any::<u64>()).prop_map(|(a, s)| (a, ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs((alg, mut rng) in setup()) {
        let h = random::hermitian(&mut rng, &alg);
        let s = eig_herm(h.matrix()).unwrap();
        let back = s.apply(|v| v);
        prop_assert!((&back - h.matrix()).frobenius_norm() < 1e-10 * h.matrix().frobenius_norm().max(1.0));
    }

    #[test]
    fn holder_and_pairing_bounds((alg, mut rng) in setup()) {
        let h = random::hermitian(&mut rng, &alg);
        let k = random::hermitian(&mut rng, &alg);
        let hk = schatten_norm(&h.matrix().matmul(k.matrix()), 1.0).unwrap();
        prop_assert!(hk <= schatten_norm(h.matrix(), 2.0).unwrap() * schatten_norm(k.matrix(), 2.0).unwrap() + 1e-12);
        let w = random::positive(&mut rng, &alg);
        prop_assert!(pairing(&h, &w).unwrap().abs() <= h.sup_norm() * w.trace() + 1e-12);
    }

    #[test]
    fn donald_identity((alg, mut rng) in setup(), parts in 2usize..=3) {
        let rho = random::state(&mut rng, &alg);
        let ws: Vec<_> = (0..parts).map(|_| random::positive(&mut rng, &alg)).collect();
        prop_assert!(donald_residual(&ws, &rho).unwrap() < 1e-9);
    }

    #[test]
    fn joint_convexity((alg, mut rng) in setup(), lambda in 0.1f64..0.9) {
        let (w1, w2) = (random::state(&mut rng, &alg), random::state(&mut rng, &alg));
        let (r1, r2) = (random::state(&mut rng, &alg), random::state(&mut rng, &alg));
        let w = w1.scale(lambda).add(&w2.scale(1.0 - lambda)).unwrap();
        let r = r1.scale(lambda).add(&r2.scale(1.0 - lambda)).unwrap();
        let lhs = relative_entropy(&w, &r).unwrap();
        let rhs = lambda * relative_entropy(&w1, &r1).unwrap() + (1.0 - lambda) * relative_entropy(&w2, &r2).unwrap();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn shifted_entropy_lower_bound((alg, mut rng) in setup()) {
        let rho = random::positive(&mut rng, &alg);
        let w = random::positive(&mut rng, &alg);
        let f = f_rho(&w.to_self_adjoint(), &rho).unwrap();
        prop_assert!(f >= f_rho_lower_bound(&w, &rho) - 1e-12);
        prop_assert!(f_rho_lower_bound(&w, &rho) >= -rho.trace() - 1e-12);
        let scaled = rho.scale(1.7);
        let eq = f_rho(&scaled.to_self_adjoint(), &rho).unwrap();
        prop_assert!((eq - f_rho_lower_bound(&scaled, &rho)).abs() < 1e-12);
    }

    #[test]
    fn kosaki_bound_below_entropy((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let w = random::state(&mut rng, &alg);
        let s = random::step_function(&mut rng, &alg);
        prop_assert!(kosaki_lower_bound(&w, &rho, &s).unwrap() <= relative_entropy(&w, &rho).unwrap() + 1e-9);
    }

    #[test]
    fn renyi_monotone((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let w = random::state(&mut rng, &alg);
        let grid = [1.001, 1.01, 1.1, 1.5, 2.0];
        let vals: Vec<f64> = grid.iter().map(|&a| renyi_f(&w, &rho, a).unwrap()).collect();
        for pair in vals.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-10);
        }
        prop_assert!((vals[0] - relative_entropy(&w, &rho).unwrap()).abs() < 1e-2);
    }

    #[test]
    fn perturbation_identities((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let w = random::positive(&mut rng, &alg);
        let h = random::hermitian(&mut rng, &alg);
        let k = random::hermitian(&mut rng, &alg);
        prop_assert!(perturbed_entropy_residual(&w, &rho, &h).unwrap() < 1e-9);
        prop_assert!(chain_rule_residual(&rho, &h, &k).unwrap() < 1e-9);
    }

    #[test]
    fn gradient_matches_differences((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let h = random::hermitian(&mut rng, &alg);
        let g = c_gradient(&rho, &h).unwrap();
        for _ in 0..5 {
            let b = random::hermitian(&mut rng, &alg);
            let fd = c_directional_difference(&rho, &h, &b, 1e-5).unwrap();
            prop_assert!((fd - pairing(&b, &g).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn phi_even_and_commutative((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let a = random::hermitian(&mut rng, &alg);
        prop_assert!((phi(&rho, &a).unwrap() - phi(&rho, &a.neg()).unwrap()).abs() < 1e-12);
        if alg.is_commutative() {
            let r = rho.spectrum().values().iter().map(|v| v[0]);
            let x = a.matrix().blocks().iter().map(|b| b[(0, 0)].re);
            let expected: f64 = r.zip(x).map(|(ri, xi)| ri * (xi.cosh() - 1.0)).sum();
            prop_assert!((phi(&rho, &a).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn fenchel_young((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let psi = random::self_adjoint(&mut rng, &alg, 0.3);
        let cert = psi_sup(&rho, &psi, &PsiOptions::default()).unwrap();
        for _ in 0..5 {
            let a = random::hermitian(&mut rng, &alg).scale(2.0);
            prop_assert!(pairing(&a, &psi).unwrap() <= phi(&rho, &a).unwrap() + cert.psi_value + 1e-8);
        }
    }

    #[test]
    fn exp_norm_is_a_norm((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let a = random::hermitian(&mut rng, &alg);
        let b = random::hermitian(&mut rng, &alg);
        let na = exp_norm(&rho, &a).unwrap().norm;
        let nb = exp_norm(&rho, &b).unwrap().norm;
        prop_assert!(exp_norm(&rho, &a.add(&b)).unwrap().norm <= na + nb + 1e-6);
        prop_assert!((exp_norm(&rho, &a.scale(-2.0)).unwrap().norm - 2.0 * na).abs() < 1e-6);
    }

    #[test]
    fn embedding_chain((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let a = random::hermitian(&mut rng, &alg);
        let e = embed(a.matrix(), &rho, f64::INFINITY).unwrap();
        let ps = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| lp_norm(&e, &rho, p).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        prop_assert!((norms[4] - a.sup_norm()).abs() < 1e-10);
    }

    #[test]
    fn lp_duality((alg, mut rng) in setup(), p in 1.1f64..6.0) {
        let rho = random::state(&mut rng, &alg);
        let h = random::hermitian(&mut rng, &alg);
        prop_assert!(lp_duality_gap(h.matrix(), &rho, p).unwrap() < 1e-8);
    }

    #[test]
    fn channel_contractions((alg, mut rng) in setup(), tdim in 1usize..=3) {
        let target = MatrixAlgebra::full(tdim);
        let t = random::channel(&mut rng, &alg, &target, 1).unwrap();
        let rho = random::state(&mut rng, &alg);
        let w = random::positive(&mut rng, &alg);
        prop_assert!(f_monotonicity_residual(&t, &rho, &w).unwrap() >= -1e-10);
        let h = random::hermitian(&mut rng, &alg);
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            prop_assert!(lp_contraction_gap(&t, &rho, h.matrix(), p).unwrap() >= -1e-8);
        }
        let a = random::hermitian(&mut rng, &target);
        prop_assert!(t.adjointness_residual(w.matrix(), a.matrix()).unwrap() < 1e-10);
    }

    #[test]
    fn petz_unital_and_recovers((alg, mut rng) in setup()) {
        let target = MatrixAlgebra::full(2);
        let t = random::channel(&mut rng, &alg, &target, 0).unwrap();
        let rho = random::state(&mut rng, &alg);
        let petz = PetzMap::new(&t, &rho, true).unwrap();
        let one = petz.dual(&BlockMatrix::identity(&alg)).unwrap();
        prop_assert!((&one - &BlockMatrix::identity(petz.channel().target())).frobenius_norm() < 1e-10);
        let back = petz.recover(petz.t_rho().matrix()).unwrap();
        prop_assert!((&back - rho.matrix()).frobenius_norm() < 1e-10);
        let b = random::hermitian(&mut rng, petz.channel().target());
        prop_assert!(petz.double_dual_residual(b.matrix()).unwrap() < 1e-9);
    }

    #[test]
    fn divergence_forms_agree((alg, mut rng) in setup()) {
        let rho = random::state(&mut rng, &alg);
        let h = random::hermitian(&mut rng, &alg);
        let k = random::hermitian(&mut rng, &alg);
        let l = random::hermitian(&mut rng, &alg);
        let d = canonical_divergence(&rho, &h, &k).unwrap();
        prop_assert!(d.residual() < 1e-9);
        prop_assert!(d.bregman > 0.0);
        prop_assert!(pythagorean_residual(&rho, &h, &k, &l).unwrap() < 1e-9);
        let c = random::hermitian(&mut rng, &alg);
        let h_orth = orthogonal_partner(&rho, &k, &l, &c).unwrap();
        let lhs = canonical_divergence(&rho, &h_orth, &k).unwrap().bregman + canonical_divergence(&rho, &k, &l).unwrap().bregman;
        prop_assert!((lhs - canonical_divergence(&rho, &h_orth, &l).unwrap().bregman).abs() < 1e-9);
    }

    #[test]
    fn charts_and_transitions((alg, mut rng) in setup()) {
        let (r1, r2, r3) = (random::state(&mut rng, &alg), random::state(&mut rng, &alg), random::state(&mut rng, &alg));
        let h = random::hermitian(&mut rng, &alg);
        let chart = Chart::new(r1.clone()).unwrap();
        let s = chart.forward(&h).unwrap();
        prop_assert!((chart.inverse(&s).unwrap().matrix() - h.matrix()).frobenius_norm() < 1e-10);
        let w = random::state(&mut rng, &alg);
        prop_assert!(chart.inverse_probe_residual(&r2, &w).unwrap() < 1e-9);
        prop_assert!(transition_residual(&r1, &r2, &h).unwrap() < 1e-9);
        let via = transition(&r2, &r3, &transition(&r1, &r2, &h).unwrap()).unwrap();
        let direct = transition(&r1, &r3, &h).unwrap();
        prop_assert!((via.matrix() - direct.matrix()).frobenius_norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn conjugate_routes_agree(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = MatrixAlgebra::full(n);
        let rho = random::state(&mut rng, &alg);
        let psi = random::self_adjoint(&mut rng, &alg, 0.3);
        let s = psi_sup(&rho, &psi, &PsiOptions::default()).unwrap();
        let i = psi_inf(&rho, &psi, &PsiOptions::default()).unwrap();
        prop_assert!((s.psi_value - i.psi_value).abs() < 1e-4);
        prop_assert!(i.psi_value >= s.psi_value - 1e-4);
        let (p, m) = &i.decomposition;
        let resid = (&(p.matrix() - m.matrix()) - &psi.matrix().scale(2.0)).frobenius_norm();
        prop_assert!(resid < 1e-8);
    }

    #[test]
    fn depolarizing_is_not_sufficient(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = MatrixAlgebra::full(2);
        let rho = random::state(&mut rng, &alg);
        let h = random::hermitian(&mut rng, &alg);
        let t = Channel::depolarizing(&alg, 1.0).unwrap();
        let r = qexp::channels::sufficiency_report(&t, &rho, &h).unwrap();
        prop_assert!(r.none_hold());
    }
}
