//! Expansional (Dyson) series for the perturbed vector
//!
//! `ξ(a) = Σ_n ∫_{1/2 ≥ t_1 ≥ ... ≥ t_n ≥ 0} Δ^{t_n} a Δ^{t_{n-1}-t_n} a ... Δ^{t_1-t_2} a ρ^{1/2}`
//!
//! with `Δ^t X = ρ^t X ρ^{-t}`. Written out, the `n`-th term is
//! `∫ ρ^{t_n} a ρ^{t_{n-1}-t_n} a ... a ρ^{1/2-t_1}`, and the full sum is
//! `exp((log ρ + a)/2)`. This module evaluates the truncated series by
//! quadrature and is used only to validate [`crate::perturbation::perturb`].
//!
//! The simplex integrals are nested: with
//! `K_0(s) = ρ^s` and `K_n(s) = ∫_0^s K_{n-1}(t) a ρ^{s-t} dt`, the `n`-th term
//! is `K_n(1/2)`. Each level substitutes `t = s·u` and applies a `Q`-point
//! Gauss–Legendre rule in `u`; `K_{n-1}` is carried as its values at the `Q`
//! nodes of `[0, 1/2]` and interpolated in between, which keeps the cost at
//! `O(N·Q³)` instead of `O(Q^N)`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{BlockMatrix, C64};
use crate::elements::{HermitianElement, PositiveFunctional};
use crate::error::{Error, Result};
use crate::quadrature::{lagrange_basis, GaussLegendre};
use crate::spectral::{eig_herm_unchecked, schatten_norm};

pub const MAX_ORDER: usize = 6;

#[derive(Clone, Debug)]
pub struct SeriesResult {
    /// Partial sum `ξ_N`.
    pub xi: BlockMatrix,
    /// Hilbert–Schmidt norm of every term `n = 0..=N`.
    pub term_norms: Vec<f64>,
    /// `‖ξ_N − exp((log ρ + a)/2)‖_2`.
    pub residual: f64,
}

/// Partial sum of the expansional series up to order `order` with
/// `points` quadrature nodes per integration axis.
pub fn perturbed_vector_series(
    rho: &PositiveFunctional,
    a: &HermitianElement,
    order: usize,
    points: usize,
) -> Result<SeriesResult> {
    a.matrix().check_same_algebra(rho.matrix(), "a")?;
    rho.require_faithful("rho")?;
    if order > MAX_ORDER {
        return Err(Error::validation(
            "order",
            format!("truncation order must be <= {MAX_ORDER}, got {order}"),
        ));
    }
    if points == 0 {
        return Err(Error::validation("points", "need at least one quadrature point"));
    }
    let rule = GaussLegendre::new(points);
    let spec = rho.spectrum();

    let mut xi_blocks = Vec::with_capacity(spec.values().len());
    let mut term_sq = vec![0.0; order + 1];
    for ((lam, u), ab) in spec
        .values()
        .iter()
        .zip(spec.vectors())
        .zip(a.matrix().blocks())
    {
        let a_eig = u.adjoint() * ab * u;
        let terms = block_terms(lam, &a_eig, order, &rule);
        let mut sum = DMatrix::zeros(lam.len(), lam.len());
        for (n, t) in terms.iter().enumerate() {
            term_sq[n] += t.norm_squared();
            sum += t;
        }
        xi_blocks.push(u * sum * u.adjoint());
    }
    let xi = BlockMatrix::from_blocks(rho.algebra().clone(), xi_blocks)?;

    let generator = (&rho.log()? + a.matrix()).hermitian_part();
    let exact = eig_herm_unchecked(&generator).apply(|v| (v / 2.0).exp());
    let residual = schatten_norm(&(&xi - &exact), 2.0)?;
    Ok(SeriesResult {
        xi,
        term_norms: term_sq.into_iter().map(f64::sqrt).collect(),
        residual,
    })
}

fn diag_power(lam: &DVector<f64>, t: f64) -> DVector<C64> {
    lam.map(|l| C64::new(l.powf(t), 0.0))
}

/// Terms `K_0(1/2), ..., K_N(1/2)` in the eigenbasis of `ρ`.
fn block_terms(
    lam: &DVector<f64>,
    a: &DMatrix<C64>,
    order: usize,
    rule: &GaussLegendre,
) -> Vec<DMatrix<C64>> {
    let d = lam.len();
    let half = 0.5;
    // nodes of [0, 1/2] on which K_{n-1} is tabulated
    let grid: Vec<f64> = rule.nodes.iter().map(|x| half * x).collect();
    let bary = rule.barycentric_weights();

    let k0 = |s: f64| DMatrix::from_diagonal(&diag_power(lam, s));
    let mut terms = vec![k0(half)];
    if order == 0 {
        return terms;
    }

    // K_{n-1} evaluated at arbitrary t ∈ [0, 1/2]
    let eval_prev = |table: &Option<Vec<DMatrix<C64>>>, t: f64| -> DMatrix<C64> {
        match table {
            None => k0(t),
            Some(vals) => {
                let basis = lagrange_basis(&rule.nodes, &bary, t / half);
                let mut acc = DMatrix::zeros(d, d);
                for (c, v) in basis.iter().zip(vals) {
                    acc += v * C64::new(*c, 0.0);
                }
                acc
            }
        }
    };
    // K_n(s) = s ∫_0^1 K_{n-1}(s u) a ρ^{s(1-u)} du
    let next_at = |table: &Option<Vec<DMatrix<C64>>>, s: f64| -> DMatrix<C64> {
        let mut acc = DMatrix::zeros(d, d);
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let mut prod = eval_prev(table, s * u) * a;
            let right = diag_power(lam, s * (1.0 - u));
            for (j, r) in right.iter().enumerate() {
                prod.column_mut(j).scale_mut(r.re);
            }
            acc += prod * C64::new(w * s, 0.0);
        }
        acc
    };

    let mut table: Option<Vec<DMatrix<C64>>> = None;
    for n in 1..=order {
        terms.push(next_at(&table, half));
        if n < order {
            let vals: Vec<DMatrix<C64>> = grid.iter().map(|&s| next_at(&table, s)).collect();
            table = Some(vals);
        }
    }
    terms
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_order_is_square_root() {
        let rho = PositiveFunctional::diag(&[0.36, 0.64]).unwrap();
        let a = HermitianElement::zeros(rho.algebra());
        let r = perturbed_vector_series(&rho, &a, 0, 4).unwrap();
        assert!((&r.xi - &BlockMatrix::diag(&[0.6, 0.8])).frobenius_norm() < 1e-15);
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn diagonal_terms_follow_scalar_exponential() {
        // commuting case: n-th term is ρ^{1/2} (a/2)^n / n!
        let lam = [0.2, 0.8];
        let av = [0.4, -0.3];
        let rho = PositiveFunctional::diag(&lam).unwrap();
        let a = HermitianElement::diag(&av);
        let r = perturbed_vector_series(&rho, &a, 4, 12).unwrap();
        let mut fact = 1.0;
        for n in 0..=4usize {
            if n > 0 {
                fact *= n as f64;
            }
            let expected: f64 = lam
                .iter()
                .zip(&av)
                .map(|(l, x)| (l.sqrt() * (x / 2.0).powi(n as i32) / fact).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((r.term_norms[n] - expected).abs() < 1e-14, "n={n}");
        }
        let partial: Vec<f64> = lam
            .iter()
            .zip(&av)
            .map(|(l, x)| {
                let y = x / 2.0;
                l.sqrt() * (1.0 + y + y * y / 2.0 + y.powi(3) / 6.0 + y.powi(4) / 24.0)
            })
            .collect();
        assert!((&r.xi - &BlockMatrix::diag(&partial)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn order_cap() {
        let rho = PositiveFunctional::diag(&[0.5, 0.5]).unwrap();
        let a = HermitianElement::zeros(rho.algebra());
        assert!(perturbed_vector_series(&rho, &a, 7, 4).is_err());
    }
}
