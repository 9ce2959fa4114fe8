//! Typed views of Hermitian block matrices: observables, self-adjoint
//! functionals and positive functionals (densities).

use std::fmt;
use std::sync::Arc;

use crate::algebra::{BlockMatrix, MatrixAlgebra, HERMITIAN_TOL};
use crate::error::{Error, Result};
use crate::spectral::{eig_herm_unchecked, SharedSpectrum, Spectrum};

fn ingest_hermitian(matrix: BlockMatrix) -> Result<(BlockMatrix, f64)> {
    let dev = matrix.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::validation(
            "blocks",
            format!("not Hermitian (relative deviation {dev:e})"),
        ));
    }
    Ok((matrix.hermitian_part(), dev))
}

macro_rules! hermitian_common {
    ($t:ident) => {
        impl $t {
            pub fn matrix(&self) -> &BlockMatrix {
                &self.matrix
            }

            pub fn into_matrix(self) -> BlockMatrix {
                self.matrix
            }

            pub fn algebra(&self) -> &MatrixAlgebra {
                self.matrix.algebra()
            }

            /// Relative Hermiticity deviation removed by symmetrization on
            /// ingestion.
            pub fn ingestion_deviation(&self) -> f64 {
                self.deviation
            }
        }

        impl AsRef<BlockMatrix> for $t {
            fn as_ref(&self) -> &BlockMatrix {
                &self.matrix
            }
        }
    };
}

/// Self-adjoint element `a = a*` of the algebra (an observable / perturbation).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianElement {
    matrix: BlockMatrix,
    deviation: f64,
}

hermitian_common!(HermitianElement);

impl HermitianElement {
    pub fn new(matrix: BlockMatrix) -> Result<Self> {
        let (matrix, deviation) = ingest_hermitian(matrix)?;
        Ok(Self { matrix, deviation })
    }

    /// Wraps a matrix already known to be exactly Hermitian up to rounding.
    pub(crate) fn from_hermitian_part(matrix: &BlockMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
            deviation: 0.0,
        }
    }

    pub fn zeros(algebra: &MatrixAlgebra) -> Self {
        Self::from_hermitian_part(&BlockMatrix::zeros(algebra))
    }

    pub fn identity(algebra: &MatrixAlgebra) -> Self {
        Self::from_hermitian_part(&BlockMatrix::identity(algebra))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_hermitian_part(&BlockMatrix::diag(values))
    }

    pub fn from_real_diagonal(algebra: &MatrixAlgebra, diag: &[f64]) -> Result<Self> {
        Ok(Self::from_hermitian_part(&BlockMatrix::from_real_diagonal(algebra, diag)?))
    }

    pub fn spectrum(&self) -> Spectrum {
        eig_herm_unchecked(&self.matrix)
    }

    /// Operator norm `‖a‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.spectrum().max_abs()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_hermitian_part(&(&self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_hermitian_part(&(&self.matrix - &other.matrix))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
            deviation: 0.0,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn to_real_coords(&self) -> Vec<f64> {
        self.matrix.to_real_coords()
    }

    pub fn from_real_coords(algebra: &MatrixAlgebra, coords: &[f64]) -> Self {
        Self {
            matrix: BlockMatrix::from_real_coords(algebra, coords),
            deviation: 0.0,
        }
    }
}

/// Element of the self-adjoint predual `M_*^s`, represented by its
/// Hermitian density.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfAdjointFunctional {
    matrix: BlockMatrix,
    deviation: f64,
}

hermitian_common!(SelfAdjointFunctional);

impl SelfAdjointFunctional {
    pub fn new(matrix: BlockMatrix) -> Result<Self> {
        let (matrix, deviation) = ingest_hermitian(matrix)?;
        Ok(Self { matrix, deviation })
    }

    pub(crate) fn from_hermitian_part(matrix: &BlockMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
            deviation: 0.0,
        }
    }

    pub fn zeros(algebra: &MatrixAlgebra) -> Self {
        Self::from_hermitian_part(&BlockMatrix::zeros(algebra))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_hermitian_part(&BlockMatrix::diag(values))
    }

    /// `ψ(1)`.
    pub fn total(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
            deviation: 0.0,
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        eig_herm_unchecked(&self.matrix)
    }

    /// Jordan decomposition `ψ = ψ_+ − ψ_-` with orthogonal supports.
    pub fn jordan_decomposition(&self) -> (PositiveFunctional, PositiveFunctional) {
        let spec = self.spectrum();
        let plus = spec.apply(|v| v.max(0.0));
        let minus = spec.apply(|v| (-v).max(0.0));
        (
            PositiveFunctional::new(plus).expect("positive part is PSD"),
            PositiveFunctional::new(minus).expect("negative part is PSD"),
        )
    }

    /// `ψ` as a positive functional, or `None` when it has an eigenvalue below
    /// `−1e-12·‖ψ‖`.
    pub fn to_positive(&self) -> Option<PositiveFunctional> {
        PositiveFunctional::new(self.matrix.clone()).ok()
    }
}

/// Positive functional `ω ∈ M_*^+`, stored as its density `h_ω` together with
/// a cached spectrum.
///
/// Eigenvalues in `[−1e-12·‖ω‖, 0]` are clipped to zero in the cached
/// spectrum; the stored density is the symmetrized input.
#[derive(Clone)]
pub struct PositiveFunctional {
    matrix: BlockMatrix,
    deviation: f64,
    trace: f64,
    spectrum: SharedSpectrum,
}

hermitian_common!(PositiveFunctional);

impl fmt::Debug for PositiveFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PositiveFunctional")
            .field("matrix", &self.matrix)
            .field("trace", &self.trace)
            .finish()
    }
}

impl PartialEq for PositiveFunctional {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl PositiveFunctional {
    pub fn new(matrix: BlockMatrix) -> Result<Self> {
        let (matrix, deviation) = ingest_hermitian(matrix)?;
        let mut spectrum = eig_herm_unchecked(&matrix);
        let norm = spectrum.max_abs();
        let floor = -HERMITIAN_TOL * norm;
        let min = spectrum.min();
        if min < floor {
            return Err(Error::validation(
                "blocks",
                format!("not positive semidefinite (minimum eigenvalue {min:e})"),
            ));
        }
        spectrum.map_values(|v| v.max(0.0));
        Ok(Self::assemble(matrix, deviation, spectrum))
    }

    fn assemble(matrix: BlockMatrix, deviation: f64, spectrum: Spectrum) -> Self {
        let trace = matrix.trace().re;
        Self {
            matrix,
            deviation,
            trace,
            spectrum: Arc::new(spectrum),
        }
    }

    /// Builds `⊕ U diag(λ) U†` from a spectrum with nonnegative eigenvalues.
    pub(crate) fn from_spectrum(spectrum: Spectrum) -> Self {
        debug_assert!(spectrum.min() >= 0.0);
        let matrix = spectrum.apply(|v| v).hermitian_part();
        Self::assemble(matrix, 0.0, spectrum)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::new(BlockMatrix::diag(values))
    }

    pub fn from_real_diagonal(algebra: &MatrixAlgebra, diag: &[f64]) -> Result<Self> {
        Self::new(BlockMatrix::from_real_diagonal(algebra, diag)?)
    }

    /// `ω(1)`.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum.min()
    }

    pub fn is_faithful(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.spectrum.max_abs() == 0.0
    }

    pub(crate) fn require_faithful(&self, what: &str) -> Result<()> {
        if !self.is_faithful() {
            return Err(Error::domain(
                format!("{what} must be faithful"),
                self.min_eigenvalue(),
            ));
        }
        Ok(())
    }

    /// `log ω`; requires a faithful functional.
    pub fn log(&self) -> Result<BlockMatrix> {
        self.spectrum
            .apply_guarded(f64::ln, |v| v > 0.0, "logarithm of a positive functional")
    }

    /// Fractional power `ω^s`. Negative `s` needs a faithful functional;
    /// `s = 0` returns the support projection.
    pub fn power(&self, s: f64) -> Result<BlockMatrix> {
        if s < 0.0 {
            self.spectrum.apply_guarded(
                |v| v.powf(s),
                |v| v > 0.0,
                "negative power of a positive functional",
            )
        } else if s == 0.0 {
            Ok(self.spectrum.apply(|v| if v > 0.0 { 1.0 } else { 0.0 }))
        } else {
            Ok(self.spectrum.apply(|v| v.powf(s)))
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        assert!(s >= 0.0, "positive functionals scale by nonnegative factors");
        let mut spec = (*self.spectrum).clone();
        spec.map_values(|v| v * s);
        Self {
            matrix: self.matrix.scale(s),
            deviation: 0.0,
            trace: self.trace * s,
            spectrum: Arc::new(spec),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.matrix.check_same_algebra(&other.matrix, "sum")?;
        Self::new(&self.matrix + &other.matrix)
    }

    pub fn to_self_adjoint(&self) -> SelfAdjointFunctional {
        SelfAdjointFunctional {
            matrix: self.matrix.clone(),
            deviation: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    use crate::algebra::C64;

    #[test]
    fn trace_and_faithfulness() {
        let rho = PositiveFunctional::diag(&[0.25, 0.75]).unwrap();
        assert_eq!(rho.trace(), 1.0);
        assert!(rho.is_faithful());
        let sing = PositiveFunctional::diag(&[1.0, 0.0]).unwrap();
        assert!(!sing.is_faithful());
        assert!(sing.log().is_err());
    }

    #[test]
    fn rounding_negatives_are_clipped() {
        let omega = PositiveFunctional::diag(&[1.0, -1e-14]).unwrap();
        assert_eq!(omega.min_eigenvalue(), 0.0);
        assert!(PositiveFunctional::diag(&[1.0, -1e-6]).is_err());
    }

    #[test]
    fn jordan_parts_reconstruct() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.2, 0.0), C64::new(0.3, 0.1), C64::new(0.3, -0.1), C64::new(-0.4, 0.0)],
        );
        let psi = SelfAdjointFunctional::new(BlockMatrix::from_matrix(m).unwrap()).unwrap();
        let (p, n) = psi.jordan_decomposition();
        let back = p.matrix() - n.matrix();
        assert!((&back - psi.matrix()).frobenius_norm() < 1e-14);
        assert!(psi.to_positive().is_none());
    }

    #[test]
    fn symmetrization_records_deviation() {
        let mut m = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        m[(0, 1)] = C64::new(1.0 + 1e-13, 0.0);
        let a = HermitianElement::new(BlockMatrix::from_matrix(m).unwrap()).unwrap();
        assert!(a.ingestion_deviation() > 0.0);
        assert_eq!(a.matrix().hermitian_deviation(), 0.0);
    }
}
