//! Finite-dimensional quantum exponential manifold.
//!
//! Algebras are direct sums of full matrix blocks. Functionals are identified
//! with their density matrices through the trace pairing, so positive
//! functionals, self-adjoint functionals and observables all live as
//! block-diagonal Hermitian matrices.

pub mod algebra;
pub mod channels;
pub mod elements;
pub mod entropy;
pub mod error;
pub mod json;
pub mod lp;
pub mod manifold;
pub mod optim;
pub mod orlicz;
pub mod perturbation;
pub mod quadrature;
pub mod random;
pub mod series;
pub mod spectral;

pub use algebra::{BlockMatrix, MatrixAlgebra, C64};
pub use elements::{HermitianElement, PositiveFunctional, SelfAdjointFunctional};
pub use error::{Error, Result};
pub use channels::{Channel, PetzMap, SufficiencyReport};
pub use nalgebra;
