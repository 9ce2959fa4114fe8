//! Symmetric Kosaki `L_p(M, ρ)` spaces.
//!
//! At finite dimension the interpolation space is reached through the
//! isometry `i_{p,ρ}: k ↦ ρ^{1/2q} k ρ^{1/2q}` (`1/p + 1/q = 1`), so
//! `‖h‖_{p,ρ} = ‖ρ^{-1/2q} h ρ^{-1/2q}‖_p`.

use crate::algebra::BlockMatrix;
use crate::elements::{HermitianElement, PositiveFunctional};
use crate::error::{Error, Result};
use crate::spectral::{schatten_norm, singular_values};

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::validation("p", format!("must lie in [1, ∞], got {p}")));
    }
    Ok(())
}

/// `1/(2q)` for the conjugate exponent `q` of `p`.
pub fn half_conjugate_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        0.5
    } else {
        (1.0 - 1.0 / p) / 2.0
    }
}

/// Parses `p` from a string, accepting `"inf"` for `∞`.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let t = s.trim();
    let p = if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        f64::INFINITY
    } else {
        t.parse::<f64>()
            .map_err(|_| Error::validation("p", format!("not a number: {s:?}")))?
    };
    check_p(p)?;
    Ok(p)
}

/// `i_{p,ρ}^{-1}(h) = ρ^{-1/2q} h ρ^{-1/2q}`.
pub fn unembed(h: &BlockMatrix, rho: &PositiveFunctional, p: f64) -> Result<BlockMatrix> {
    check_p(p)?;
    h.check_same_algebra(rho.matrix(), "lp")?;
    rho.require_faithful("rho")?;
    let e = half_conjugate_exponent(p);
    if e == 0.0 {
        return Ok(h.clone());
    }
    let w = rho.power(-e)?;
    Ok(w.matmul(h).matmul(&w))
}

/// `‖h‖_{p,ρ}`.
pub fn lp_norm(h: &BlockMatrix, rho: &PositiveFunctional, p: f64) -> Result<f64> {
    let k = unembed(h, rho, p)?;
    schatten_norm(&k, p)
}

/// `ρ^{1/2q} a ρ^{1/2q}`: the embedding `i_{p,ρ}`, with `p = ∞` giving
/// `i_{∞,ρ}(a) = ρ^{1/2} a ρ^{1/2}`.
pub fn embed(a: &BlockMatrix, rho: &PositiveFunctional, p: f64) -> Result<BlockMatrix> {
    check_p(p)?;
    a.check_same_algebra(rho.matrix(), "embed")?;
    rho.require_faithful("rho")?;
    let e = half_conjugate_exponent(p);
    if e == 0.0 {
        return Ok(a.clone());
    }
    let w = rho.power(e)?;
    Ok(w.matmul(a).matmul(&w))
}

/// `i_{∞,ρ}` on self-adjoint elements.
pub fn embed_element(a: &HermitianElement, rho: &PositiveFunctional) -> Result<BlockMatrix> {
    embed(a.matrix(), rho, f64::INFINITY)
}

/// Duality between `L_p(M,ρ)` and `L_q(M,ρ)`:
/// `⟨i_{p,ρ}(k), i_{q,ρ}(l)⟩ = Re Tr[kl]`.
pub fn lp_pairing(h: &BlockMatrix, g: &BlockMatrix, rho: &PositiveFunctional, p: f64) -> Result<f64> {
    let q = conjugate(p);
    let k = unembed(h, rho, p)?;
    let l = unembed(g, rho, q)?;
    Ok(k.re_trace_product(&l))
}

/// Conjugate exponent, `1/p + 1/q = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Norming functional of `h` in `L_q(M,ρ)`, built from the polar
/// decomposition `ρ^{-1/2q} h ρ^{-1/2q} = V|k|`: the element
/// `i_{q,ρ}(|k|^{p-1} V† / ‖k‖_p^{p-1})` has unit `q`-norm and pairs with `h`
/// to `‖h‖_{p,ρ}`.
pub fn norming_functional(h: &BlockMatrix, rho: &PositiveFunctional, p: f64) -> Result<BlockMatrix> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::validation("p", format!("duality requires 1 < p < ∞, got {p}")));
    }
    let k = unembed(h, rho, p)?;
    let norm = schatten_norm(&k, p)?;
    if norm == 0.0 {
        return Ok(BlockMatrix::zeros(h.algebra()));
    }
    // polar part via SVD: k = U Σ W†, V = U W†, |k| = W Σ W†;
    // |k|^{p-1} V† = W Σ^{p-1} U†
    let blocks = k
        .blocks()
        .iter()
        .map(|b| {
            let svd = b.clone().svd(true, true);
            let u = svd.u.expect("u requested");
            let vt = svd.v_t.expect("v_t requested");
            let mut w = vt.adjoint();
            for (j, s) in svd.singular_values.iter().enumerate() {
                w.column_mut(j).scale_mut((s / norm).powf(p - 1.0));
            }
            w * u.adjoint()
        })
        .collect();
    let l = BlockMatrix::from_blocks(h.algebra().clone(), blocks)?;
    embed(&l, rho, conjugate(p))
}

/// `|‖h‖_{p,ρ} − ⟨h, g⟩ / ‖g‖_{q,ρ}|` for the analytic maximizer `g` from
/// [`norming_functional`].
pub fn lp_duality_gap(h: &BlockMatrix, rho: &PositiveFunctional, p: f64) -> Result<f64> {
    let norm = lp_norm(h, rho, p)?;
    let g = norming_functional(h, rho, p)?;
    let gnorm = lp_norm(&g, rho, conjugate(p))?;
    if gnorm == 0.0 {
        return Ok(norm);
    }
    let value = lp_pairing(h, &g, rho, p)? / gnorm;
    Ok((norm - value).abs())
}

/// Hilbert–Schmidt inner-product form of `‖h‖_{2,ρ}²`, evaluated directly as
/// `Tr[(ρ^{-1/4} h ρ^{-1/4})† (ρ^{-1/4} h ρ^{-1/4})]`.
pub fn l2_inner_norm_sq(h: &BlockMatrix, rho: &PositiveFunctional) -> Result<f64> {
    rho.require_faithful("rho")?;
    let w = rho.power(-0.25)?;
    let k = w.matmul(h).matmul(&w);
    Ok(k.adjoint().matmul(&k).trace().re)
}

/// Largest singular value of the unembedded element; `‖h‖_{∞,ρ}`.
pub fn sup_norm_weighted(h: &BlockMatrix, rho: &PositiveFunctional) -> Result<f64> {
    let k = unembed(h, rho, f64::INFINITY)?;
    Ok(singular_values(&k).into_iter().fold(0.0, f64::max))
}
