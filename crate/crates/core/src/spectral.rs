//! Hermitian functional calculus, Schatten norms and the trace pairing.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{BlockMatrix, MatrixAlgebra, C64, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Blockwise eigendecomposition `x = ⊕_i U_i diag(λ_i) U_i†`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    algebra: MatrixAlgebra,
    values: Vec<DVector<f64>>,
    vectors: Vec<DMatrix<C64>>,
}

impl Spectrum {
    pub fn algebra(&self) -> &MatrixAlgebra {
        &self.algebra
    }

    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn vectors(&self) -> &[DMatrix<C64>] {
        &self.vectors
    }

    pub fn iter_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flat_map(|v| v.iter().copied())
    }

    pub fn min(&self) -> f64 {
        self.iter_values().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.iter_values().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spectral (operator) norm of the decomposed element.
    pub fn max_abs(&self) -> f64 {
        self.iter_values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `⊕ U diag(f(λ)) U†`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> BlockMatrix {
        let blocks = self
            .values
            .iter()
            .zip(&self.vectors)
            .map(|(vals, u)| {
                let mut scaled = u.clone();
                for (j, &v) in vals.iter().enumerate() {
                    let fv = f(v);
                    scaled.column_mut(j).scale_mut(fv);
                }
                scaled * u.adjoint()
            })
            .collect();
        BlockMatrix::from_blocks(self.algebra.clone(), blocks).expect("shapes are preserved")
    }

    /// Like [`apply`](Self::apply) but checks `guard` on every eigenvalue first.
    pub fn apply_guarded(
        &self,
        f: impl FnMut(f64) -> f64,
        guard: impl Fn(f64) -> bool,
        context: &str,
    ) -> Result<BlockMatrix> {
        if let Some(bad) = self.iter_values().find(|&v| !guard(v)) {
            return Err(Error::domain(context, bad));
        }
        Ok(self.apply(f))
    }

    /// Fréchet derivative of `x ↦ f(x)` at the decomposed element, applied to
    /// `dx`, by the Daleckii–Krein formula with divided differences of `f`.
    /// `df` is used on (near-)coincident eigenvalues.
    pub fn frechet(&self, dx: &BlockMatrix, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> BlockMatrix {
        let blocks = self
            .values
            .iter()
            .zip(&self.vectors)
            .zip(dx.blocks())
            .map(|((vals, u), d)| {
                let mut y = u.adjoint() * d * u;
                let n = vals.len();
                for i in 0..n {
                    for j in 0..n {
                        let (a, b) = (vals[i], vals[j]);
                        let dd = if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) {
                            df(0.5 * (a + b))
                        } else {
                            (f(a) - f(b)) / (a - b)
                        };
                        y[(i, j)] *= dd;
                    }
                }
                u * y * u.adjoint()
            })
            .collect();
        BlockMatrix::from_blocks(self.algebra.clone(), blocks).expect("shapes are preserved")
    }

    /// Replaces eigenvalues by `g(λ)` in place; used for clipping.
    pub(crate) fn map_values(&mut self, mut g: impl FnMut(f64) -> f64) {
        for v in self.values.iter_mut() {
            v.apply(|x| *x = g(*x));
        }
    }
}

fn hermitian_block_eigen(b: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let n = b.nrows();
    if n == 1 {
        return (DVector::from_element(1, b[(0, 0)].re), DMatrix::identity(1, 1));
    }
    let sym = (b + b.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    // ascending order, so that results do not depend on the solver's ordering
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}

/// Eigendecomposition of a Hermitian element, block by block.
///
/// The input is symmetrized before decomposition; a relative Hermiticity
/// deviation above [`HERMITIAN_TOL`] is a validation error.
pub fn eig_herm(x: &BlockMatrix) -> Result<Spectrum> {
    let dev = x.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::validation(
            "matrix",
            format!("not Hermitian (relative deviation {dev:e})"),
        ));
    }
    Ok(eig_herm_unchecked(x))
}

pub(crate) fn eig_herm_unchecked(x: &BlockMatrix) -> Spectrum {
    let (values, vectors) = x.blocks().iter().map(hermitian_block_eigen).unzip();
    Spectrum {
        algebra: x.algebra().clone(),
        values,
        vectors,
    }
}

/// Applies a real function through the spectral theorem.
///
/// Every eigenvalue must satisfy `domain_guard`, otherwise a
/// [`Error::Domain`] carrying the first offending eigenvalue is returned.
pub fn mat_fn(
    x: &BlockMatrix,
    f: impl FnMut(f64) -> f64,
    domain_guard: impl Fn(f64) -> bool,
) -> Result<BlockMatrix> {
    eig_herm(x)?.apply_guarded(f, domain_guard, "functional calculus")
}

pub fn exp_herm(x: &BlockMatrix) -> Result<BlockMatrix> {
    mat_fn(x, f64::exp, |_| true)
}

pub fn log_pd(x: &BlockMatrix) -> Result<BlockMatrix> {
    eig_herm(x)?.apply_guarded(f64::ln, |v| v > 0.0, "logarithm")
}

/// Singular values of every block, concatenated.
pub fn singular_values(x: &BlockMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.algebra().dim());
    for b in x.blocks() {
        let herm = b.nrows() == 1
            || (b - b.adjoint()).norm() <= 1e-14 * b.norm().max(f64::MIN_POSITIVE);
        if herm {
            let (vals, _) = hermitian_block_eigen(b);
            out.extend(vals.iter().map(|v| v.abs()));
        } else {
            out.extend(b.clone().singular_values().iter().copied());
        }
    }
    out
}

/// Schatten `p`-norm `(Σ s_i^p)^{1/p}`; `p = ∞` gives the largest singular value.
pub fn schatten_norm(x: &BlockMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::validation("p", format!("Schatten exponent must be >= 1, got {p}")));
    }
    let sv = singular_values(x);
    Ok(schatten_from_singular_values(&sv, p))
}

pub(crate) fn schatten_from_singular_values(sv: &[f64], p: f64) -> f64 {
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || smax == 0.0 {
        return smax;
    }
    if p == 1.0 {
        return sv.iter().sum();
    }
    // scale by the largest singular value to avoid overflow for large p
    let s: f64 = sv.iter().map(|v| (v / smax).powf(p)).sum();
    smax * s.powf(1.0 / p)
}

/// The duality `ψ(a) = Re Tr[ψ a]` between observables and functionals.
pub fn pairing<A, F>(a: &A, psi: &F) -> Result<f64>
where
    A: AsRef<BlockMatrix> + ?Sized,
    F: AsRef<BlockMatrix> + ?Sized,
{
    let (a, psi) = (a.as_ref(), psi.as_ref());
    a.check_same_algebra(psi, "pairing")?;
    Ok(psi.re_trace_product(a))
}

/// Cached decomposition shared between clones of a functional.
pub(crate) type SharedSpectrum = Arc<Spectrum>;

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(re: [[f64; 2]; 2], im: [[f64; 2]; 2]) -> BlockMatrix {
        BlockMatrix::from_matrix(DMatrix::from_fn(2, 2, |i, j| C64::new(re[i][j], im[i][j]))).unwrap()
    }

    #[test]
    fn diagonal_spectrum() {
        let s = eig_herm(&BlockMatrix::diag(&[1.0, 2.0])).unwrap();
        let mut v: Vec<f64> = s.iter_values().collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![1.0, 2.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = m2([[0.0, 1.0], [1.0, 0.0]], [[0.0; 2]; 2]);
        let s = eig_herm(&x).unwrap();
        let mut v: Vec<f64> = s.iter_values().collect();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let x = m2([[0.0, 1.0], [0.0, 0.0]], [[0.0; 2]; 2]);
        assert!(matches!(eig_herm(&x), Err(Error::Validation { .. })));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = mat_fn(&BlockMatrix::diag(&[4.0, 9.0]), f64::sqrt, |v| v >= 0.0).unwrap();
        assert!((&r - &BlockMatrix::diag(&[2.0, 3.0])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn log_of_singular_is_domain_error() {
        match log_pd(&BlockMatrix::diag(&[1.0, 0.0])) {
            Err(Error::Domain { eigenvalue, .. }) => assert_eq!(eigenvalue, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schatten_examples() {
        let x = BlockMatrix::diag(&[3.0, -4.0]);
        assert_eq!(schatten_norm(&x, 1.0).unwrap(), 7.0);
        assert_eq!(schatten_norm(&x, f64::INFINITY).unwrap(), 4.0);
        assert!((schatten_norm(&x, 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!(schatten_norm(&x, 0.5).is_err());
    }

    #[test]
    fn pairing_examples() {
        let rho = BlockMatrix::diag(&[0.25, 0.75]);
        let i = BlockMatrix::identity(rho.algebra());
        assert_eq!(pairing(&i, &rho).unwrap(), 1.0);
        assert_eq!(pairing(&i, &BlockMatrix::zeros(rho.algebra())).unwrap(), 0.0);
        assert_eq!(pairing(&BlockMatrix::diag(&[1.0, -1.0]), &rho).unwrap(), -0.5);
        assert!(pairing(&BlockMatrix::diag(&[1.0]), &rho).is_err());
    }

    #[test]
    fn blockwise_calculus_matches_dense() {
        let alg = MatrixAlgebra::new(vec![2, 1]).unwrap();
        let x = BlockMatrix::from_blocks(
            alg.clone(),
            vec![
                DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.3, 0.2), C64::new(0.3, -0.2), C64::new(-0.5, 0.0)]),
                DMatrix::from_element(1, 1, C64::new(0.7, 0.0)),
            ],
        )
        .unwrap();
        let blockwise = exp_herm(&x).unwrap();
        let dense = exp_herm(&BlockMatrix::from_matrix(x.to_dense()).unwrap()).unwrap();
        assert!((blockwise.to_dense() - dense.to_dense()).norm() < 1e-13);
    }
}
