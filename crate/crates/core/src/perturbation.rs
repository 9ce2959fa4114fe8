//! Perturbed functionals `ρ^h = exp(log ρ + h)` and the conjugate functional
//! `C_ρ(h) = ρ^h(1)`.

use crate::algebra::BlockMatrix;
use crate::elements::{HermitianElement, PositiveFunctional};
use crate::entropy::relative_entropy;
use crate::error::{Error, Result};
use crate::spectral::{eig_herm_unchecked, pairing, schatten_norm};

#[derive(Clone, Debug)]
pub struct PerturbationResult {
    /// `ρ^h`.
    pub perturbed: PositiveFunctional,
    /// `C_ρ(h) = ρ^h(1)`.
    pub c_value: f64,
}

/// `ρ^h = exp(log ρ + h)`, computed by eigendecomposition of `log ρ + h`.
pub fn perturb(rho: &PositiveFunctional, h: &HermitianElement) -> Result<PerturbationResult> {
    h.matrix().check_same_algebra(rho.matrix(), "h")?;
    let log_rho = rho.log()?;
    let generator = (&log_rho + h.matrix()).hermitian_part();
    let mut spectrum = eig_herm_unchecked(&generator);
    spectrum.map_values(f64::exp);
    let perturbed = PositiveFunctional::from_spectrum(spectrum);
    if !perturbed.is_faithful() {
        // exp underflow: the perturbation is too large for double precision
        return Err(Error::domain(
            "perturbed functional underflowed",
            perturbed.min_eigenvalue(),
        ));
    }
    let c_value = perturbed.trace();
    Ok(PerturbationResult { perturbed, c_value })
}

/// `C_ρ(h)`.
pub fn c_rho(rho: &PositiveFunctional, h: &HermitianElement) -> Result<f64> {
    Ok(perturb(rho, h)?.c_value)
}

/// Gateaux derivative of `C_ρ` at `h`, which is `ρ^h`.
pub fn c_gradient(rho: &PositiveFunctional, h: &HermitianElement) -> Result<PositiveFunctional> {
    Ok(perturb(rho, h)?.perturbed)
}

/// Central difference `(C_ρ(h + εb) − C_ρ(h − εb)) / 2ε`.
pub fn c_directional_difference(
    rho: &PositiveFunctional,
    h: &HermitianElement,
    direction: &HermitianElement,
    eps: f64,
) -> Result<f64> {
    let plus = c_rho(rho, &h.add(&direction.scale(eps)))?;
    let minus = c_rho(rho, &h.sub(&direction.scale(eps)))?;
    Ok((plus - minus) / (2.0 * eps))
}

/// `|ω(h) + S(ω‖ρ^h) − S(ω‖ρ)|`.
pub fn perturbed_entropy_residual(
    omega: &PositiveFunctional,
    rho: &PositiveFunctional,
    h: &HermitianElement,
) -> Result<f64> {
    let rho_h = perturb(rho, h)?.perturbed;
    let lhs = pairing(h, omega)? + relative_entropy(omega, &rho_h)?;
    let rhs = relative_entropy(omega, rho)?;
    if lhs.is_infinite() && rhs.is_infinite() {
        return Ok(0.0);
    }
    Ok((lhs - rhs).abs())
}

/// `max(‖ρ^{h+k} − (ρ^h)^k‖_1, |C_ρ(h+k) − C_{ρ^h}(k)|)`.
pub fn chain_rule_residual(
    rho: &PositiveFunctional,
    h: &HermitianElement,
    k: &HermitianElement,
) -> Result<f64> {
    let joint = perturb(rho, &h.add(k))?;
    let first = perturb(rho, h)?;
    let nested = perturb(&first.perturbed, k)?;
    let state = schatten_norm(&(joint.perturbed.matrix() - nested.perturbed.matrix()), 1.0)?;
    Ok(state.max((joint.c_value - nested.c_value).abs()))
}

/// Recovers the perturbation from the perturbed functional:
/// `h = log ρ^h − log ρ`.
pub fn recover_perturbation(
    rho: &PositiveFunctional,
    perturbed: &PositiveFunctional,
) -> Result<HermitianElement> {
    perturbed
        .matrix()
        .check_same_algebra(rho.matrix(), "perturbed")?;
    let d: BlockMatrix = &perturbed.log()? - &rho.log()?;
    Ok(HermitianElement::from_hermitian_part(&d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_perturbation_is_identity() {
        let rho = PositiveFunctional::diag(&[0.3, 0.7]).unwrap();
        let r = perturb(&rho, &HermitianElement::zeros(rho.algebra())).unwrap();
        assert!((r.perturbed.matrix() - rho.matrix()).frobenius_norm() < 1e-15);
        assert!((r.c_value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_closed_form() {
        let rho = PositiveFunctional::diag(&[0.5, 0.5]).unwrap();
        let r = perturb(&rho, &HermitianElement::diag(&[1.0, -1.0])).unwrap();
        let e = std::f64::consts::E;
        let expected = BlockMatrix::diag(&[0.5 * e, 0.5 / e]);
        assert!((r.perturbed.matrix() - &expected).frobenius_norm() < 1e-15);
        assert!((r.c_value - 1f64.cosh()).abs() < 1e-15);
        assert!((r.c_value - 1.543081).abs() < 1e-6);
    }

    #[test]
    fn scalar_shift_scales() {
        let rho = PositiveFunctional::diag(&[0.2, 0.3, 0.5]).unwrap();
        let c = 0.7;
        let shift = HermitianElement::identity(rho.algebra()).scale(c);
        let r = perturb(&rho, &shift).unwrap();
        let expected = rho.matrix().scale(c.exp());
        assert!((r.perturbed.matrix() - &expected).frobenius_norm() < 1e-14);
        assert!((r.c_value - c.exp()).abs() < 1e-14);
    }

    #[test]
    fn non_faithful_base_is_domain_error() {
        let rho = PositiveFunctional::diag(&[1.0, 0.0]).unwrap();
        let h = HermitianElement::zeros(rho.algebra());
        assert!(matches!(perturb(&rho, &h), Err(Error::Domain { .. })));
    }

    #[test]
    fn commuting_chain_rule() {
        let rho = PositiveFunctional::diag(&[0.1, 0.9]).unwrap();
        let h = HermitianElement::diag(&[0.3, -0.2]);
        let k = HermitianElement::diag(&[-0.8, 0.4]);
        assert!(chain_rule_residual(&rho, &h, &k).unwrap() < 1e-12);
        // k = −h returns to ρ
        let back = perturb(&perturb(&rho, &h).unwrap().perturbed, &h.neg()).unwrap();
        assert!((back.perturbed.matrix() - rho.matrix()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn diagonal_gradient() {
        let rho = PositiveFunctional::diag(&[0.25, 0.75]).unwrap();
        let h = HermitianElement::diag(&[0.5, -0.3]);
        let g = c_gradient(&rho, &h).unwrap();
        let expected = BlockMatrix::diag(&[0.25 * 0.5f64.exp(), 0.75 * (-0.3f64).exp()]);
        assert!((g.matrix() - &expected).frobenius_norm() < 1e-15);
    }
}
