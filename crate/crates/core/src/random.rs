//! Seeded random instances for property checks.
//!
//! * faithful states: `W W† + ε·1` with `W` complex Gaussian per block,
//!   `ε = 1e-3`, normalized to unit trace;
//! * Hermitian elements: symmetrized complex Gaussian per block, rescaled to
//!   `‖·‖_∞ = s` with `s` uniform on `[0.1, 1]`;
//! * channels: the row blocks of a Haar-like isometry `C^{N_s} → C^{N_t} ⊗ C^r`
//!   (QR of a complex Gaussian matrix), composed with the target block
//!   projection.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{BlockMatrix, MatrixAlgebra, C64};
use crate::channels::Channel;
use crate::elements::{HermitianElement, PositiveFunctional, SelfAdjointFunctional};
use crate::entropy::StepFunction;
use crate::error::Result;

pub const STATE_REGULARIZER: f64 = 1e-3;

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) / std::f64::consts::SQRT_2
    })
}

fn gaussian_blocks<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> BlockMatrix {
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&n| gaussian_matrix(rng, n, n))
        .collect();
    BlockMatrix::from_blocks(algebra.clone(), blocks).expect("shapes follow the algebra")
}

/// Faithful state of unit trace.
pub fn state<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> PositiveFunctional {
    let w = gaussian_blocks(rng, algebra);
    let m = &w.matmul(&w.adjoint()) + &BlockMatrix::identity(algebra).scale(STATE_REGULARIZER);
    let t = m.trace().re;
    PositiveFunctional::new(m.scale(1.0 / t).hermitian_part()).expect("regularized Gram matrix is PSD")
}

/// Faithful positive functional with trace uniform on `[0.5, 2]`.
pub fn positive<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> PositiveFunctional {
    let s = rng.random_range(0.5..2.0);
    state(rng, algebra).scale(s)
}

fn hermitian_matrix<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> BlockMatrix {
    let g = gaussian_blocks(rng, algebra).hermitian_part();
    let norm = crate::spectral::schatten_norm(&g, f64::INFINITY).expect("p = ∞ is valid");
    let s = rng.random_range(0.1..=1.0);
    if norm == 0.0 {
        g
    } else {
        g.scale(s / norm)
    }
}

/// Hermitian element with `‖h‖_∞ ∈ [0.1, 1]`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> HermitianElement {
    HermitianElement::new(hermitian_matrix(rng, algebra)).expect("symmetrized")
}

/// Self-adjoint functional with `‖ψ‖_∞ ≤ scale`.
pub fn self_adjoint<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra, scale: f64) -> SelfAdjointFunctional {
    SelfAdjointFunctional::new(hermitian_matrix(rng, algebra).scale(scale)).expect("symmetrized")
}

/// Unit vector of the real coordinate space of the Hermitian elements, i.e. a
/// direction with unit Frobenius norm.
pub fn direction<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> HermitianElement {
    let mut v: Vec<f64> = (0..algebra.real_dim()).map(|_| rng.sample(StandardNormal)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    HermitianElement::from_real_coords(algebra, &v)
}

/// Random channel with `extra_kraus` more Kraus operators than the minimum
/// needed for an isometry.
pub fn channel<R: Rng + ?Sized>(
    rng: &mut R,
    source: &MatrixAlgebra,
    target: &MatrixAlgebra,
    extra_kraus: usize,
) -> Result<Channel> {
    let (ns, nt) = (source.dim(), target.dim());
    let r = ns.div_ceil(nt) + extra_kraus;
    let g = gaussian_matrix(rng, r * nt, ns);
    let q = g.qr().q();
    Channel::from_isometry(source.clone(), target.clone(), &q)
}

/// Step function with `n ∈ [1, 20]`, up to 8 intervals on `[1/n, 100]`
/// (log-uniform breakpoints) and values `u·1 + noise`.
pub fn step_function<R: Rng + ?Sized>(rng: &mut R, algebra: &MatrixAlgebra) -> StepFunction {
    let n: u32 = rng.random_range(1..=20);
    let m: usize = rng.random_range(1..=8);
    let lo = (1.0 / n as f64).ln();
    let hi = 100f64.ln();
    let mut inner: Vec<f64> = (0..m).map(|_| rng.random_range(lo..hi).exp()).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    let mut breakpoints = vec![1.0 / n as f64];
    breakpoints.extend(inner.into_iter().filter(|&t| t > 1.0 / n as f64));
    let values = (1..breakpoints.len())
        .map(|_| {
            let u = rng.random_range(0.0..1.0);
            let noise = gaussian_blocks(rng, algebra).scale(rng.random_range(0.0..0.5));
            &BlockMatrix::identity(algebra).scale(u) + &noise
        })
        .collect();
    StepFunction::with_tail(n, breakpoints, values, BlockMatrix::identity(algebra))
        .expect("sorted breakpoints starting at 1/n")
}
