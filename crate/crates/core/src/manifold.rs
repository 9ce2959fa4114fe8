//! Charts `h ↦ ρ^h` of the exponential manifold, exponential families, chart
//! transitions and the canonical divergence.

use crate::algebra::BlockMatrix;
use crate::elements::{HermitianElement, PositiveFunctional};
use crate::entropy::relative_entropy;
use crate::error::{Error, Result};
use crate::orlicz::exp_norm;
use crate::perturbation::{perturb, recover_perturbation};
use crate::spectral::{pairing, schatten_norm};

/// The chart centred at a faithful `ρ`, with domain the unit ball of
/// `‖·‖_{exp,ρ}`. At finite dimension `h ↦ ρ^h` is defined everywhere, so the
/// ball is only reported, never enforced.
#[derive(Clone, Debug)]
pub struct Chart {
    base: PositiveFunctional,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct ChartImage {
    pub state: PositiveFunctional,
    pub exp_norm: f64,
    pub in_unit_ball: bool,
}

impl Chart {
    pub fn new(base: PositiveFunctional) -> Result<Self> {
        base.require_faithful("chart base")?;
        Ok(Self { base, radius: 1.0 })
    }

    pub fn base(&self) -> &PositiveFunctional {
        &self.base
    }

    /// `ρ^h`.
    pub fn forward(&self, h: &HermitianElement) -> Result<PositiveFunctional> {
        Ok(perturb(&self.base, h)?.perturbed)
    }

    /// `ρ^h` together with the chart-domain flag `‖h‖_{exp,ρ} < 1`.
    pub fn forward_checked(&self, h: &HermitianElement) -> Result<ChartImage> {
        let norm = exp_norm(&self.base, h)?.norm;
        Ok(ChartImage {
            state: self.forward(h)?,
            exp_norm: norm,
            in_unit_ball: norm < self.radius,
        })
    }

    /// `log σ − log ρ`.
    pub fn inverse(&self, sigma: &PositiveFunctional) -> Result<HermitianElement> {
        sigma.require_faithful("sigma")?;
        recover_perturbation(&self.base, sigma)
    }

    /// `|ω(h) − (S(ω‖ρ) − S(ω‖σ))|` for `h = log σ − log ρ`.
    pub fn inverse_probe_residual(&self, sigma: &PositiveFunctional, omega: &PositiveFunctional) -> Result<f64> {
        let h = self.inverse(sigma)?;
        let diff = relative_entropy(omega, &self.base)? - relative_entropy(omega, sigma)?;
        Ok((pairing(&h, omega)? - diff).abs())
    }
}

/// `E_ρ(E) = {ρ^h : h ∈ span(generators)}`.
#[derive(Clone, Debug)]
pub struct ExponentialFamily {
    pub base: PositiveFunctional,
    pub generators: Vec<HermitianElement>,
}

impl ExponentialFamily {
    pub fn new(base: PositiveFunctional, generators: Vec<HermitianElement>) -> Result<Self> {
        base.require_faithful("family base")?;
        for (i, g) in generators.iter().enumerate() {
            g.matrix()
                .check_same_algebra(base.matrix(), "generator")
                .map_err(|e| e.in_field(&format!("generators[{i}]")))?;
        }
        Ok(Self { base, generators })
    }

    /// `Σ θ_i g_i`.
    pub fn parameter(&self, theta: &[f64]) -> Result<HermitianElement> {
        if theta.len() != self.generators.len() {
            return Err(Error::validation(
                "theta",
                format!("expected {} coordinates, got {}", self.generators.len(), theta.len()),
            ));
        }
        Ok(self
            .generators
            .iter()
            .zip(theta)
            .fold(HermitianElement::zeros(self.base.algebra()), |acc, (g, t)| acc.add(&g.scale(*t))))
    }

    /// `ρ^{Σ θ_i g_i}`.
    pub fn member(&self, theta: &[f64]) -> Result<PositiveFunctional> {
        Ok(perturb(&self.base, &self.parameter(theta)?)?.perturbed)
    }
}

/// Transition `e_{ρ2} ∘ s_{ρ1}: h1 ↦ h1 + (log ρ1 − log ρ2)`.
pub fn transition(rho1: &PositiveFunctional, rho2: &PositiveFunctional, h1: &HermitianElement) -> Result<HermitianElement> {
    rho1.require_faithful("rho1")?;
    rho2.require_faithful("rho2")?;
    let k = recover_perturbation(rho2, rho1)?;
    h1.matrix().check_same_algebra(rho1.matrix(), "h1")?;
    Ok(h1.add(&k))
}

/// `‖ρ2^{transition(h1)} − ρ1^{h1}‖_1`.
pub fn transition_residual(rho1: &PositiveFunctional, rho2: &PositiveFunctional, h1: &HermitianElement) -> Result<f64> {
    let h2 = transition(rho1, rho2, h1)?;
    let a = perturb(rho1, h1)?.perturbed;
    let b = perturb(rho2, &h2)?.perturbed;
    schatten_norm(&(a.matrix() - b.matrix()), 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Divergence {
    /// `C_ρ(h) − C_ρ(k) − ⟨h − k, ρ^k⟩`.
    pub bregman: f64,
    /// `S(ρ^k‖ρ^h) − (ρ^k − ρ^h)(1)`.
    pub entropy_form: f64,
}

impl Divergence {
    pub fn residual(&self) -> f64 {
        (self.bregman - self.entropy_form).abs()
    }
}

/// `D_ρ(h‖k)` in both forms.
pub fn canonical_divergence(rho: &PositiveFunctional, h: &HermitianElement, k: &HermitianElement) -> Result<Divergence> {
    let ph = perturb(rho, h)?;
    let pk = perturb(rho, k)?;
    let bregman = ph.c_value - pk.c_value - pairing(&h.sub(k), &pk.perturbed)?;
    let entropy_form = relative_entropy(&pk.perturbed, &ph.perturbed)? - (pk.c_value - ph.c_value);
    Ok(Divergence { bregman, entropy_form })
}

/// `|D(h‖k) + D(k‖l) − D(h‖l) − ⟨k − h, ρ^k − ρ^l⟩|`.
pub fn pythagorean_residual(
    rho: &PositiveFunctional,
    h: &HermitianElement,
    k: &HermitianElement,
    l: &HermitianElement,
) -> Result<f64> {
    let hk = canonical_divergence(rho, h, k)?.bregman;
    let kl = canonical_divergence(rho, k, l)?.bregman;
    let hl = canonical_divergence(rho, h, l)?.bregman;
    let cross = cross_term(rho, h, k, l)?;
    Ok((hk + kl - hl - cross).abs())
}

/// `⟨k − h, ρ^k − ρ^l⟩`.
pub fn cross_term(rho: &PositiveFunctional, h: &HermitianElement, k: &HermitianElement, l: &HermitianElement) -> Result<f64> {
    let d = perturb(rho, k)?.perturbed.matrix() - perturb(rho, l)?.perturbed.matrix();
    pairing(&k.sub(h), &d)
}

/// `h = k − c'` with `c'` the Hilbert–Schmidt projection of `c` orthogonal to
/// `ρ^k − ρ^l`, so that `⟨k − h, ρ^k − ρ^l⟩ = 0`.
pub fn orthogonal_partner(
    rho: &PositiveFunctional,
    k: &HermitianElement,
    l: &HermitianElement,
    c: &HermitianElement,
) -> Result<HermitianElement> {
    let d: BlockMatrix = perturb(rho, k)?.perturbed.matrix() - perturb(rho, l)?.perturbed.matrix();
    let dd = d.re_trace_product(&d);
    let c_perp = if dd > 0.0 {
        let coef = c.matrix().re_trace_product(&d) / dd;
        HermitianElement::new((c.matrix() - &d.scale(coef)).hermitian_part())?
    } else {
        c.clone()
    };
    Ok(k.sub(&c_perp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_round_trip() {
        let rho = PositiveFunctional::diag(&[0.25, 0.75]).unwrap();
        let chart = Chart::new(rho.clone()).unwrap();
        let h = HermitianElement::diag(&[0.4, -0.1]);
        let s = chart.forward(&h).unwrap();
        let expected = BlockMatrix::diag(&[0.25 * 0.4f64.exp(), 0.75 * (-0.1f64).exp()]);
        assert!((s.matrix() - &expected).frobenius_norm() < 1e-15);
        assert!((chart.inverse(&s).unwrap().matrix() - h.matrix()).frobenius_norm() < 1e-12);
        assert!(chart.inverse(&rho).unwrap().matrix().frobenius_norm() < 1e-15);
        assert!(chart.forward_checked(&h).unwrap().in_unit_ball);
    }

    #[test]
    fn diagonal_divergence_is_generalized_kl() {
        let rho = PositiveFunctional::diag(&[0.3, 0.7]).unwrap();
        let h = HermitianElement::diag(&[0.2, -0.5]);
        let k = HermitianElement::diag(&[-0.1, 0.3]);
        let d = canonical_divergence(&rho, &h, &k).unwrap();
        let rh = [0.3 * 0.2f64.exp(), 0.7 * (-0.5f64).exp()];
        let rk = [0.3 * (-0.1f64).exp(), 0.7 * 0.3f64.exp()];
        let kl: f64 = rh
            .iter()
            .zip(&rk)
            .map(|(a, b)| b * (b.ln() - a.ln()) - b + a)
            .sum();
        assert!((d.bregman - kl).abs() < 1e-14);
        assert!(d.residual() < 1e-14);
        assert_eq!(canonical_divergence(&rho, &h, &h).unwrap().bregman, 0.0);
    }

    #[test]
    fn transition_identity_cases() {
        let rho = PositiveFunctional::diag(&[0.4, 0.6]).unwrap();
        let h = HermitianElement::diag(&[0.1, 0.2]);
        let same = transition(&rho, &rho, &h).unwrap();
        assert!((same.matrix() - h.matrix()).frobenius_norm() < 1e-15);
        let k = HermitianElement::diag(&[0.3, -0.3]);
        let rho1 = perturb(&rho, &k).unwrap().perturbed;
        let zero = HermitianElement::zeros(rho.algebra());
        let got = transition(&rho1, &rho, &zero).unwrap();
        assert!((got.matrix() - k.matrix()).frobenius_norm() < 1e-14);
    }
}
