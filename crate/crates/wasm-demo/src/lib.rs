//! Qubit-sized entry points for the browser demo.
//!
//! States are given by Bloch vectors `(x, y, z)` with `x² + y² + z² < 1`;
//! observables by Pauli coefficients `(a0, ax, ay, az)`. The `*_impl`
//! functions are plain Rust so they can be tested natively.

use qexp::entropy::{relative_entropy, renyi_f};
use qexp::manifold::canonical_divergence;
use qexp::orlicz::exp_norm;
use qexp::{BlockMatrix, HermitianElement, PositiveFunctional, C64};
use wasm_bindgen::prelude::*;

fn pauli_combination(c: [f64; 4]) -> qexp::Result<BlockMatrix> {
    let [a0, x, y, z] = c;
    let m = qexp::nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(a0 + z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(a0 - z, 0.0),
        ],
    );
    BlockMatrix::from_matrix(m)
}

fn bloch(v: &[f64]) -> qexp::Result<PositiveFunctional> {
    let [x, y, z] = take::<3>(v, "bloch")?;
    PositiveFunctional::new(pauli_combination([0.5, 0.5 * x, 0.5 * y, 0.5 * z])?)
}

fn observable(v: &[f64]) -> qexp::Result<HermitianElement> {
    HermitianElement::new(pauli_combination(take::<4>(v, "observable")?)?)
}

fn take<const N: usize>(v: &[f64], field: &str) -> qexp::Result<[f64; N]> {
    v.try_into().map_err(|_| qexp::Error::Validation {
        field: field.into(),
        reason: format!("expected {N} numbers, got {}", v.len()),
    })
}

/// `[S(ω‖ρ)/ω(1), f(α_1), f(α_2), ...]`.
pub fn renyi_curve_impl(omega: &[f64], rho: &[f64], alphas: &[f64]) -> qexp::Result<Vec<f64>> {
    let (w, r) = (bloch(omega)?, bloch(rho)?);
    let mut out = vec![relative_entropy(&w, &r)?];
    for &a in alphas {
        out.push(renyi_f(&w, &r, a)?);
    }
    Ok(out)
}

/// `[‖a‖_exp, C_ρ(a) + C_ρ(−a) − 2]`, the second entry being twice Φ_ρ(a).
pub fn exp_norm_impl(rho: &[f64], a: &[f64]) -> qexp::Result<Vec<f64>> {
    let (r, a) = (bloch(rho)?, observable(a)?);
    let n = exp_norm(&r, &a)?.norm;
    Ok(vec![n, 2.0 * qexp::orlicz::phi(&r, &a)?])
}

/// Divergence from `h` to points along the segment `h → k`:
/// `D_ρ(h‖h + t(k − h))` for `steps + 1` equally spaced `t ∈ [0, 1]`.
pub fn divergence_profile_impl(rho: &[f64], h: &[f64], k: &[f64], steps: usize) -> qexp::Result<Vec<f64>> {
    let r = bloch(rho)?;
    let (h, k) = (observable(h)?, observable(k)?);
    let d = k.sub(&h);
    (0..=steps.max(1))
        .map(|i| {
            let t = i as f64 / steps.max(1) as f64;
            canonical_divergence(&r, &h, &h.add(&d.scale(t))).map(|x| x.bregman)
        })
        .collect()
}

fn js(r: qexp::Result<Vec<f64>>) -> Result<Vec<f64>, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn renyi_curve(omega: &[f64], rho: &[f64], alphas: &[f64]) -> Result<Vec<f64>, JsValue> {
    js(renyi_curve_impl(omega, rho, alphas))
}

#[wasm_bindgen]
pub fn exp_norm_qubit(rho: &[f64], a: &[f64]) -> Result<Vec<f64>, JsValue> {
    js(exp_norm_impl(rho, a))
}

#[wasm_bindgen]
pub fn divergence_profile(rho: &[f64], h: &[f64], k: &[f64], steps: usize) -> Result<Vec<f64>, JsValue> {
    js(divergence_profile_impl(rho, h, k, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renyi_curve_approaches_entropy_and_increases() {
        let v = renyi_curve_impl(&[0.3, 0.0, 0.2], &[0.0, 0.1, -0.4], &[1.001, 1.5, 2.0]).unwrap();
        assert!((v[1] - v[0]).abs() < 1e-2);
        assert!(v[1] <= v[2] && v[2] <= v[3]);
    }

    #[test]
    fn maximally_mixed_exp_norm_of_z() {
        // ½(cosh(1/λ)·2) − 1 = 1 at λ = 1/acosh(2)
        let v = exp_norm_impl(&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((v[0] - 1.0 / 2f64.acosh()).abs() < 1e-7);
    }

    #[test]
    fn divergence_profile_starts_at_zero_and_grows() {
        let v = divergence_profile_impl(&[0.2, 0.0, 0.0], &[0.0, 0.1, 0.0, 0.0], &[0.0, 0.0, 0.5, -0.3], 4).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v[0].abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }

    #[test]
    fn impure_bloch_vector_is_rejected() {
        assert!(renyi_curve_impl(&[1.0, 0.0, 0.5], &[0.0; 3], &[2.0]).is_err());
        assert!(renyi_curve_impl(&[0.0; 2], &[0.0; 3], &[2.0]).is_err());
    }
}
