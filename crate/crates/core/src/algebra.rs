//! Finite direct sums of full matrix algebras and their elements.
//!
//! Every finite-dimensional von Neumann algebra is of the form
//! `M_{n_1}(C) ⊕ ... ⊕ M_{n_k}(C)`. Elements are stored block by block; the
//! off-diagonal blocks are identically zero and never materialized. A single
//! block is `B(C^n)`, all-`1×1` blocks give the commutative algebra `C^k`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for Hermiticity and positivity checks on ingestion.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixAlgebra {
    block_dims: Vec<usize>,
}

impl MatrixAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::validation("block_dims", "at least one block required"));
        }
        if let Some(i) = block_dims.iter().position(|&n| n == 0) {
            return Err(Error::validation(
                format!("block_dims[{i}]"),
                "block dimension must be >= 1",
            ));
        }
        Ok(Self { block_dims })
    }

    /// The full matrix algebra `M_n(C)`.
    pub fn full(n: usize) -> Self {
        Self::new(vec![n]).expect("n must be positive")
    }

    /// The commutative algebra `C^n` (diagonal matrices).
    pub fn commutative(n: usize) -> Self {
        Self::new(vec![1; n]).expect("n must be positive")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Total dimension `N = Σ n_i` of the underlying Hilbert space.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Real dimension of the self-adjoint part, `Σ n_i²`.
    pub fn real_dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&n| n == 1)
    }

    /// Offsets of each block along the diagonal of the dense `N×N` matrix.
    pub fn offsets(&self) -> Vec<usize> {
        self.block_dims
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n;
                Some(o)
            })
            .collect()
    }

    pub fn check_same(&self, other: &MatrixAlgebra, field: &str) -> Result<()> {
        if self != other {
            return Err(Error::validation(
                field,
                format!(
                    "algebra mismatch: {:?} vs {:?}",
                    self.block_dims, other.block_dims
                ),
            ));
        }
        Ok(())
    }
}

/// A general (not necessarily Hermitian) element of a [`MatrixAlgebra`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    algebra: MatrixAlgebra,
    blocks: Vec<DMatrix<C64>>,
}

impl BlockMatrix {
    pub fn from_blocks(algebra: MatrixAlgebra, blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::validation(
                "blocks",
                format!(
                    "expected {} blocks, got {}",
                    algebra.num_blocks(),
                    blocks.len()
                ),
            ));
        }
        for (i, (b, &n)) in blocks.iter().zip(algebra.block_dims()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::validation(
                    format!("blocks[{i}]"),
                    format!("expected {n}x{n}, got {}x{}", b.nrows(), b.ncols()),
                ));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::validation(
                    format!("blocks[{i}]"),
                    "entries must be finite",
                ));
            }
        }
        Ok(Self { algebra, blocks })
    }

    /// Convenience constructor for a single full block.
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::validation("matrix", "must be square and nonempty"));
        }
        let alg = MatrixAlgebra::full(m.nrows());
        Self::from_blocks(alg, vec![m])
    }

    /// Extracts the diagonal blocks of a dense matrix. Entries outside the
    /// blocks must vanish (relative tolerance [`HERMITIAN_TOL`]).
    pub fn from_dense(algebra: MatrixAlgebra, dense: &DMatrix<C64>) -> Result<Self> {
        let n = algebra.dim();
        if dense.nrows() != n || dense.ncols() != n {
            return Err(Error::validation(
                "matrix",
                format!("expected {n}x{n}, got {}x{}", dense.nrows(), dense.ncols()),
            ));
        }
        let bm = Self::project_dense(&algebra, dense);
        let inside = bm.frobenius_norm();
        let total = dense.norm();
        let outside = (total * total - inside * inside).max(0.0).sqrt();
        if outside > HERMITIAN_TOL * total.max(1.0) * 10.0 {
            return Err(Error::validation(
                "matrix",
                format!("off-block entries of norm {outside:e} do not belong to the algebra"),
            ));
        }
        Ok(bm)
    }

    /// The trace-preserving conditional expectation of `M_N` onto the algebra:
    /// keeps the diagonal blocks, drops the rest.
    pub(crate) fn project_dense(algebra: &MatrixAlgebra, dense: &DMatrix<C64>) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .zip(algebra.offsets())
            .map(|(&n, o)| dense.view((o, o), (n, n)).into_owned())
            .collect();
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.algebra.dim();
        let mut out = DMatrix::zeros(n, n);
        for (b, o) in self.blocks.iter().zip(self.algebra.offsets()) {
            out.view_mut((o, o), b.shape()).copy_from(b);
        }
        out
    }

    pub fn zeros(algebra: &MatrixAlgebra) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&n| DMatrix::zeros(n, n))
            .collect();
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn identity(algebra: &MatrixAlgebra) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&n| DMatrix::identity(n, n))
            .collect();
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }

    /// Diagonal element with the given real entries, laid out along the
    /// diagonal of the blocks in order.
    pub fn from_real_diagonal(algebra: &MatrixAlgebra, diag: &[f64]) -> Result<Self> {
        if diag.len() != algebra.dim() {
            return Err(Error::validation(
                "diagonal",
                format!("expected {} entries, got {}", algebra.dim(), diag.len()),
            ));
        }
        let mut out = Self::zeros(algebra);
        let mut k = 0;
        for b in out.blocks.iter_mut() {
            for i in 0..b.nrows() {
                b[(i, i)] = C64::new(diag[k], 0.0);
                k += 1;
            }
        }
        Ok(out)
    }

    /// `diag(values)` as a single full block.
    pub fn diag(values: &[f64]) -> Self {
        Self::from_real_diagonal(&MatrixAlgebra::full(values.len()), values)
            .expect("nonempty diagonal")
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<DMatrix<C64>> {
        self.blocks
    }

    pub(crate) fn map_blocks(&self, f: impl FnMut(&DMatrix<C64>) -> DMatrix<C64>) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub(crate) fn zip_blocks(
        &self,
        other: &Self,
        mut f: impl FnMut(&DMatrix<C64>, &DMatrix<C64>) -> DMatrix<C64>,
    ) -> Self {
        debug_assert_eq!(self.algebra, other.algebra);
        Self {
            algebra: self.algebra.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn check_same_algebra(&self, other: &Self, field: &str) -> Result<()> {
        self.algebra.check_same(&other.algebra, field)
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_blocks(|b| b * C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map_blocks(|b| b * s)
    }

    /// Matrix product within the algebra.
    pub fn matmul(&self, other: &Self) -> Self {
        self.zip_blocks(other, |a, b| a * b)
    }

    /// `self * other * self†`.
    pub fn sandwich(&self, other: &Self) -> Self {
        self.zip_blocks(other, |a, b| a * b * a.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// `Re Tr[self · other]`, computed without forming the product.
    pub fn re_trace_product(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let n = a.nrows();
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += (a[(i, j)] * b[(j, i)]).re;
                    }
                }
                acc
            })
            .sum()
    }

    /// Relative Frobenius deviation from Hermiticity, `‖x − x†‖ / ‖x‖`.
    pub fn hermitian_deviation(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let diff: f64 = self
            .blocks
            .iter()
            .map(|b| (b - b.adjoint()).norm_squared())
            .sum::<f64>()
            .sqrt();
        diff / norm
    }

    /// `(x + x†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        self.map_blocks(|b| (b + b.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Coordinates of a Hermitian element in an orthonormal real basis of the
    /// self-adjoint part (Hilbert–Schmidt inner product). Only the Hermitian
    /// part of `self` is seen.
    pub fn to_real_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.algebra.real_dim());
        let r2 = std::f64::consts::SQRT_2;
        for b in &self.blocks {
            let n = b.nrows();
            for i in 0..n {
                out.push(b[(i, i)].re);
                for j in (i + 1)..n {
                    let z = (b[(i, j)] + b[(j, i)].conj()) * 0.5;
                    out.push(z.re * r2);
                    out.push(z.im * r2);
                }
            }
        }
        out
    }

    /// Inverse of [`to_real_coords`](Self::to_real_coords).
    pub fn from_real_coords(algebra: &MatrixAlgebra, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), algebra.real_dim());
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut it = coords.iter().copied();
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&n| {
                let mut b = DMatrix::zeros(n, n);
                for i in 0..n {
                    b[(i, i)] = C64::new(it.next().unwrap(), 0.0);
                    for j in (i + 1)..n {
                        let re = it.next().unwrap() * r2;
                        let im = it.next().unwrap() * r2;
                        b[(i, j)] = C64::new(re, im);
                        b[(j, i)] = C64::new(re, -im);
                    }
                }
                b
            })
            .collect();
        Self {
            algebra: algebra.clone(),
            blocks,
        }
    }
}

impl Add for &BlockMatrix {
    type Output = BlockMatrix;
    fn add(self, rhs: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch in addition");
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &BlockMatrix {
    type Output = BlockMatrix;
    fn sub(self, rhs: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch in subtraction");
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl Neg for &BlockMatrix {
    type Output = BlockMatrix;
    fn neg(self) -> BlockMatrix {
        self.map_blocks(|b| -b)
    }
}

impl Mul<f64> for &BlockMatrix {
    type Output = BlockMatrix;
    fn mul(self, rhs: f64) -> BlockMatrix {
        self.scale(rhs)
    }
}

impl AsRef<BlockMatrix> for BlockMatrix {
    fn as_ref(&self) -> &BlockMatrix {
        self
    }
}
