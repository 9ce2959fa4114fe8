//! Completely positive trace-preserving maps between block algebras, their
//! Petz duals and recovery maps, and sufficiency certificates.
//!
//! A channel is stored as Kraus operators acting on the dense ambient spaces,
//! composed with the block projections of source and target:
//! `T(h) = E_t(Σ K h K†)` and `T*(a) = E_s(Σ K† a K)`.

use nalgebra::DMatrix;

use crate::algebra::{BlockMatrix, MatrixAlgebra, C64};
use crate::elements::{HermitianElement, PositiveFunctional, SelfAdjointFunctional};
use crate::entropy::{f_rho, relative_entropy};
use crate::error::{Error, Result};
use crate::orlicz::{exp_norm, log_norm_with, PsiOptions};
use crate::perturbation::perturb;
use crate::spectral::{eig_herm_unchecked, schatten_norm};

/// Tolerance on `T*(1) = 1`.
pub const TRACE_PRESERVING_TOL: f64 = 1e-10;
/// Relative eigenvalue threshold defining the kernel of `T(ρ)`.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Threshold under which a sufficiency residual counts as zero.
pub const SUFFICIENCY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    source: MatrixAlgebra,
    target: MatrixAlgebra,
    kraus: Vec<DMatrix<C64>>,
}

fn basis_op(rows: usize, cols: usize, i: usize, j: usize, v: f64) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(rows, cols);
    m[(i, j)] = C64::new(v, 0.0);
    m
}

impl Channel {
    /// Validates shapes (`dim(target) × dim(source)`) and trace preservation.
    pub fn new(source: MatrixAlgebra, target: MatrixAlgebra, kraus: Vec<DMatrix<C64>>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::validation("kraus", "need at least one Kraus operator"));
        }
        let (nt, ns) = (target.dim(), source.dim());
        for (i, k) in kraus.iter().enumerate() {
            if k.shape() != (nt, ns) {
                return Err(Error::validation(
                    format!("kraus[{i}]"),
                    format!("expected {nt}x{ns}, got {}x{}", k.nrows(), k.ncols()),
                ));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::validation(format!("kraus[{i}]"), "entries must be finite"));
            }
        }
        let ch = Self { source, target, kraus };
        let unit = ch.adjoint_apply(&BlockMatrix::identity(&ch.target))?;
        let dev = (&unit - &BlockMatrix::identity(&ch.source)).frobenius_norm();
        if dev > TRACE_PRESERVING_TOL {
            return Err(Error::validation(
                "kraus",
                format!("not trace-preserving: ‖T*(1) − 1‖ = {dev:e}"),
            ));
        }
        Ok(ch)
    }

    pub fn identity(algebra: &MatrixAlgebra) -> Self {
        let n = algebra.dim();
        Self {
            source: algebra.clone(),
            target: algebra.clone(),
            kraus: vec![DMatrix::identity(n, n)],
        }
    }

    /// `Tr_B: M_{da·db} → M_{da}` with basis `|i⟩ ⊗ |j⟩ ↦ i·db + j`.
    pub fn partial_trace(da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::validation("dims", "factor dimensions must be positive"));
        }
        let kraus = (0..db)
            .map(|j| {
                let mut k = DMatrix::zeros(da, da * db);
                for i in 0..da {
                    k[(i, i * db + j)] = C64::new(1.0, 0.0);
                }
                k
            })
            .collect();
        Self::new(MatrixAlgebra::full(da * db), MatrixAlgebra::full(da), kraus)
    }

    /// `h ↦ (1 − p) h + p Tr(h) 1/d` on `algebra`; `p = 1` is the completely
    /// depolarizing channel.
    pub fn depolarizing(algebra: &MatrixAlgebra, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::validation("p", "must lie in [0, 1]"));
        }
        let d = algebra.dim();
        let mut kraus = Vec::new();
        if p < 1.0 {
            kraus.push(DMatrix::identity(d, d) * C64::new((1.0 - p).sqrt(), 0.0));
        }
        if p > 0.0 {
            let c = (p / d as f64).sqrt();
            for i in 0..d {
                for j in 0..d {
                    kraus.push(basis_op(d, d, i, j, c));
                }
            }
        }
        Self::new(algebra.clone(), algebra.clone(), kraus)
    }

    /// Measurement in the standard basis, onto the commutative algebra of the
    /// same dimension.
    pub fn measurement(source: &MatrixAlgebra) -> Result<Self> {
        let d = source.dim();
        let kraus = (0..d).map(|i| basis_op(d, d, i, i, 1.0)).collect();
        Self::new(source.clone(), MatrixAlgebra::commutative(d), kraus)
    }

    /// `σ ↦ σ ⊕ 0` into a single block of dimension `dim(source) + extra`.
    pub fn embedding(source: &MatrixAlgebra, extra: usize) -> Result<Self> {
        let n = source.dim();
        let mut v = DMatrix::zeros(n + extra, n);
        for i in 0..n {
            v[(i, i)] = C64::new(1.0, 0.0);
        }
        Self::new(source.clone(), MatrixAlgebra::full(n + extra), vec![v])
    }

    /// Kraus operators from the row blocks of an isometry
    /// `V: C^{N_s} → C^{N_t} ⊗ C^r` (`V†V = 1`), stacked as `r` blocks of
    /// `N_t` rows.
    pub fn from_isometry(source: MatrixAlgebra, target: MatrixAlgebra, v: &DMatrix<C64>) -> Result<Self> {
        let (nt, ns) = (target.dim(), source.dim());
        if v.ncols() != ns || !v.nrows().is_multiple_of(nt) || v.nrows() == 0 {
            return Err(Error::validation(
                "isometry",
                format!("expected (r·{nt})x{ns}, got {}x{}", v.nrows(), v.ncols()),
            ));
        }
        let r = v.nrows() / nt;
        let kraus = (0..r).map(|j| v.rows(j * nt, nt).into_owned()).collect();
        Self::new(source, target, kraus)
    }

    pub fn source(&self) -> &MatrixAlgebra {
        &self.source
    }

    pub fn target(&self) -> &MatrixAlgebra {
        &self.target
    }

    pub fn kraus(&self) -> &[DMatrix<C64>] {
        &self.kraus
    }

    /// `T(h)`.
    pub fn apply(&self, h: &BlockMatrix) -> Result<BlockMatrix> {
        h.algebra().check_same(&self.source, "h").map_err(|e| e.in_field("apply"))?;
        let d = h.to_dense();
        let mut acc = DMatrix::zeros(self.target.dim(), self.target.dim());
        for k in &self.kraus {
            acc += k * &d * k.adjoint();
        }
        Ok(BlockMatrix::project_dense(&self.target, &acc))
    }

    /// `T*(a)`.
    pub fn adjoint_apply(&self, a: &BlockMatrix) -> Result<BlockMatrix> {
        a.algebra().check_same(&self.target, "a").map_err(|e| e.in_field("adjoint_apply"))?;
        let d = a.to_dense();
        let mut acc = DMatrix::zeros(self.source.dim(), self.source.dim());
        for k in &self.kraus {
            acc += k.adjoint() * &d * k;
        }
        Ok(BlockMatrix::project_dense(&self.source, &acc))
    }

    pub fn apply_positive(&self, omega: &PositiveFunctional) -> Result<PositiveFunctional> {
        PositiveFunctional::new(self.apply(omega.matrix())?.hermitian_part())
    }

    pub fn apply_self_adjoint(&self, psi: &SelfAdjointFunctional) -> Result<SelfAdjointFunctional> {
        SelfAdjointFunctional::new(self.apply(psi.matrix())?.hermitian_part())
    }

    pub fn adjoint_apply_element(&self, a: &HermitianElement) -> Result<HermitianElement> {
        HermitianElement::new(self.adjoint_apply(a.matrix())?.hermitian_part())
    }

    /// `|Tr[T(h) a] − Tr[h T*(a)]|`.
    pub fn adjointness_residual(&self, h: &BlockMatrix, a: &BlockMatrix) -> Result<f64> {
        let lhs = self.apply(h)?.matmul(a).trace();
        let rhs = h.matmul(&self.adjoint_apply(a)?).trace();
        Ok((lhs - rhs).norm())
    }

    /// Compression of the target to the support `e` of `T(ρ)`:
    /// `K ↦ W†K` where the columns of `W` are the support eigenvectors of
    /// `T(ρ)` block by block. Blocks with empty support are dropped.
    pub fn restrict_to_support(&self, rho: &PositiveFunctional) -> Result<SupportRestriction> {
        let t_rho = self.apply(rho.matrix())?.hermitian_part();
        let spec = eig_herm_unchecked(&t_rho);
        let threshold = SUPPORT_TOL * spec.max_abs();
        let offsets = self.target.offsets();
        let mut cols: Vec<(usize, nalgebra::DVector<C64>)> = Vec::new();
        let mut dims = Vec::new();
        for ((vals, vecs), off) in spec.values().iter().zip(spec.vectors()).zip(offsets) {
            let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > threshold).collect();
            if keep.is_empty() {
                continue;
            }
            dims.push(keep.len());
            for i in keep {
                cols.push((off, vecs.column(i).into_owned()));
            }
        }
        if dims.is_empty() {
            return Err(Error::domain("T(rho) vanishes", 0.0));
        }
        let nt = self.target.dim();
        let mut w = DMatrix::zeros(nt, cols.len());
        for (c, (off, v)) in cols.into_iter().enumerate() {
            w.view_mut((off, c), (v.len(), 1)).copy_from(&v);
        }
        let compressed = MatrixAlgebra::new(dims)?;
        let kraus = self.kraus.iter().map(|k| w.adjoint() * k).collect();
        let channel = Channel {
            source: self.source.clone(),
            target: compressed,
            kraus,
        };
        let trivial = w.ncols() == nt;
        Ok(SupportRestriction {
            channel,
            isometry: w,
            original_target: self.target.clone(),
            trivial,
        })
    }
}

/// A channel compressed to the support of `T(ρ)`, with the maps between the
/// original and compressed targets.
#[derive(Clone, Debug)]
pub struct SupportRestriction {
    pub channel: Channel,
    isometry: DMatrix<C64>,
    original_target: MatrixAlgebra,
    /// `true` when `T(ρ)` was already faithful and nothing was removed.
    pub trivial: bool,
}

impl SupportRestriction {
    /// `x ↦ W x W†` back into the original target.
    pub fn lift(&self, x: &BlockMatrix) -> BlockMatrix {
        let d = &self.isometry * x.to_dense() * self.isometry.adjoint();
        BlockMatrix::project_dense(&self.original_target, &d)
    }

    /// `y ↦ W† y W` into the compressed target.
    pub fn compress(&self, y: &BlockMatrix) -> Result<BlockMatrix> {
        y.algebra().check_same(&self.original_target, "target")?;
        let d = self.isometry.adjoint() * y.to_dense() * &self.isometry;
        Ok(BlockMatrix::project_dense(self.channel.target(), &d))
    }

    /// Weight of `y` outside the support, `‖y − e y e‖_1`.
    pub fn leakage(&self, y: &BlockMatrix) -> Result<f64> {
        let back = self.lift(&self.compress(y)?);
        schatten_norm(&(y - &back), 1.0)
    }
}

/// The Petz dual `T*_ρ(a) = T(ρ)^{-1/2} T(ρ^{1/2} a ρ^{1/2}) T(ρ)^{-1/2}` and
/// the recovery map `T_ρ(σ) = ρ^{1/2} T*(T(ρ)^{-1/2} σ T(ρ)^{-1/2}) ρ^{1/2}`,
/// both on the compressed target.
#[derive(Clone, Debug)]
pub struct PetzMap {
    pub restriction: SupportRestriction,
    rho: PositiveFunctional,
    t_rho: PositiveFunctional,
    rho_sqrt: BlockMatrix,
    t_rho_inv_sqrt: BlockMatrix,
}

impl PetzMap {
    /// With `restrict_support = false` a singular `T(ρ)` is a domain error.
    pub fn new(channel: &Channel, rho: &PositiveFunctional, restrict_support: bool) -> Result<Self> {
        rho.matrix().algebra().check_same(channel.source(), "rho")?;
        rho.require_faithful("rho")?;
        let restriction = channel.restrict_to_support(rho)?;
        if !restriction.trivial && !restrict_support {
            let t = channel.apply_positive(rho)?;
            return Err(Error::domain(
                "T(rho) is not faithful and support restriction is disabled",
                t.min_eigenvalue(),
            ));
        }
        let t_rho = restriction.channel.apply_positive(rho)?;
        t_rho.require_faithful("T(rho)")?;
        Ok(Self {
            rho_sqrt: rho.power(0.5)?,
            t_rho_inv_sqrt: t_rho.power(-0.5)?,
            restriction,
            rho: rho.clone(),
            t_rho,
        })
    }

    pub fn channel(&self) -> &Channel {
        &self.restriction.channel
    }

    pub fn rho(&self) -> &PositiveFunctional {
        &self.rho
    }

    /// `T(ρ)` on the compressed target.
    pub fn t_rho(&self) -> &PositiveFunctional {
        &self.t_rho
    }

    /// `T*_ρ(a)` on the compressed target.
    pub fn dual(&self, a: &BlockMatrix) -> Result<BlockMatrix> {
        let inner = self.channel().apply(&self.rho_sqrt.matmul(a).matmul(&self.rho_sqrt))?;
        Ok(self.t_rho_inv_sqrt.matmul(&inner).matmul(&self.t_rho_inv_sqrt))
    }

    pub fn dual_element(&self, a: &HermitianElement) -> Result<HermitianElement> {
        HermitianElement::new(self.dual(a.matrix())?.hermitian_part())
    }

    /// `T_ρ(σ)` for `σ` on the compressed target.
    pub fn recover(&self, sigma: &BlockMatrix) -> Result<BlockMatrix> {
        let inner = self.t_rho_inv_sqrt.matmul(sigma).matmul(&self.t_rho_inv_sqrt);
        let back = self.channel().adjoint_apply(&inner)?;
        Ok(self.rho_sqrt.matmul(&back).matmul(&self.rho_sqrt))
    }

    /// `‖(T_ρ)*_{T(ρ)}(b) − T*(b)‖_∞`: the Petz dual of the recovery map with
    /// respect to `T(ρ)` is `T*`.
    pub fn double_dual_residual(&self, b: &BlockMatrix) -> Result<f64> {
        let t_sqrt = self.t_rho.power(0.5)?;
        let rec_t = self.recover(self.t_rho.matrix())?.hermitian_part();
        let rec_t = PositiveFunctional::new(rec_t)?;
        let w = rec_t.power(-0.5)?;
        let inner = self.recover(&t_sqrt.matmul(b).matmul(&t_sqrt))?;
        let dd = w.matmul(&inner).matmul(&w);
        schatten_norm(&(&dd - &self.channel().adjoint_apply(b)?), f64::INFINITY)
    }
}

/// `T*_ρ(a)` in the original target algebra (zero outside the support of
/// `T(ρ)`).
pub fn petz_dual(channel: &Channel, rho: &PositiveFunctional, a: &BlockMatrix) -> Result<BlockMatrix> {
    a.algebra().check_same(channel.source(), "a")?;
    let petz = PetzMap::new(channel, rho, true)?;
    Ok(petz.restriction.lift(&petz.dual(a)?))
}

/// `T_ρ(σ)` for `σ` on the original target; the part of `σ` outside the
/// support of `T(ρ)` is discarded.
pub fn recovery(channel: &Channel, rho: &PositiveFunctional, sigma: &BlockMatrix) -> Result<BlockMatrix> {
    sigma.algebra().check_same(channel.target(), "sigma")?;
    let petz = PetzMap::new(channel, rho, true)?;
    petz.recover(&petz.restriction.compress(sigma)?)
}

/// `F_ρ(ω) − F_{T(ρ)}(T(ω))`, nonnegative by data processing.
pub fn f_monotonicity_residual(channel: &Channel, rho: &PositiveFunctional, omega: &PositiveFunctional) -> Result<f64> {
    omega.matrix().algebra().check_same(channel.source(), "omega")?;
    let petz = PetzMap::new(channel, rho, true)?;
    let t_omega = petz.channel().apply_positive(omega)?;
    let before = f_rho(&omega.to_self_adjoint(), rho)?;
    let after = f_rho(&t_omega.to_self_adjoint(), petz.t_rho())?;
    if before.is_infinite() && after.is_infinite() {
        return Ok(0.0);
    }
    Ok(before - after)
}

/// `‖h‖_{p,ρ} − ‖T(h)‖_{p,T(ρ)}`, nonnegative by contraction.
pub fn lp_contraction_gap(channel: &Channel, rho: &PositiveFunctional, h: &BlockMatrix, p: f64) -> Result<f64> {
    let petz = PetzMap::new(channel, rho, true)?;
    let th = petz.channel().apply(h)?;
    Ok(crate::lp::lp_norm(h, rho, p)? - crate::lp::lp_norm(&th, petz.t_rho(), p)?)
}

/// `(‖ψ‖_{log,ρ}, ‖T(ψ)‖_{log,T(ρ)})`.
pub fn log_norm_contraction(
    channel: &Channel,
    rho: &PositiveFunctional,
    psi: &SelfAdjointFunctional,
    tol: f64,
) -> Result<(f64, f64)> {
    let petz = PetzMap::new(channel, rho, true)?;
    let t_psi = petz.channel().apply_self_adjoint(psi)?;
    let opts = PsiOptions::with_tol(1e-10);
    let before = log_norm_with(rho, psi, tol, opts.clone())?.norm;
    let after = log_norm_with(petz.t_rho(), &t_psi, tol, opts)?.norm;
    Ok((before, after))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub holds: bool,
    pub residual: f64,
}

impl Certificate {
    fn from_residual(residual: f64) -> Self {
        Self {
            holds: residual < SUFFICIENCY_TOL,
            residual,
        }
    }
}

/// The four equivalent sufficiency conditions for the pair `{ρ, ρ^h}`.
#[derive(Clone, Debug)]
pub struct SufficiencyReport {
    /// `|S(T(ρ^h)‖T(ρ)) − S(ρ^h‖ρ)|`.
    pub entropy_preserved: Certificate,
    /// `max(‖T(ρ^h) − T(ρ)^{h_0}‖_1, ‖T*(h_0) − h‖_∞)`.
    pub transported_state: Certificate,
    /// `‖T*(T*_ρ(h)) − h‖_∞`.
    pub fixed_point_h: Certificate,
    /// `‖T_ρ(T(ρ^h)) − ρ^h‖_1`.
    pub recovery_exact: Certificate,
    /// `h_0 = T*_ρ(h)` on the compressed target.
    pub transported_h0: HermitianElement,
    /// Whether the target was compressed to the support of `T(ρ)`.
    pub support_restricted: bool,
}

impl SufficiencyReport {
    pub fn all_hold(&self) -> bool {
        self.flags().iter().all(|&f| f)
    }

    pub fn none_hold(&self) -> bool {
        self.flags().iter().all(|&f| !f)
    }

    /// All four certificates agree.
    pub fn consistent(&self) -> bool {
        self.all_hold() || self.none_hold()
    }

    pub fn flags(&self) -> [bool; 4] {
        [
            self.entropy_preserved.holds,
            self.transported_state.holds,
            self.fixed_point_h.holds,
            self.recovery_exact.holds,
        ]
    }

    pub fn max_residual(&self) -> f64 {
        [
            self.entropy_preserved.residual,
            self.transported_state.residual,
            self.fixed_point_h.residual,
            self.recovery_exact.residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn sufficiency_report(channel: &Channel, rho: &PositiveFunctional, h: &HermitianElement) -> Result<SufficiencyReport> {
    h.matrix().algebra().check_same(channel.source(), "h")?;
    let petz = PetzMap::new(channel, rho, true)?;
    sufficiency_with(&petz, h)
}

fn sufficiency_with(petz: &PetzMap, h: &HermitianElement) -> Result<SufficiencyReport> {
    let ch = petz.channel();
    let rho = petz.rho();
    let rho_h = perturb(rho, h)?.perturbed;
    let t_rho_h = ch.apply_positive(&rho_h)?;

    let s_before = relative_entropy(&rho_h, rho)?;
    let s_after = relative_entropy(&t_rho_h, petz.t_rho())?;
    let entropy = (s_before - s_after).abs();

    let h0 = petz.dual_element(h)?;
    let back = ch.adjoint_apply(h0.matrix())?;
    let fixed = schatten_norm(&(&back - h.matrix()), f64::INFINITY)?;

    let transported = perturb(petz.t_rho(), &h0)?.perturbed;
    let state = schatten_norm(&(t_rho_h.matrix() - transported.matrix()), 1.0)?;

    let recovered = petz.recover(t_rho_h.matrix())?;
    let recovery = schatten_norm(&(&recovered - rho_h.matrix()), 1.0)?;

    Ok(SufficiencyReport {
        entropy_preserved: Certificate::from_residual(entropy),
        transported_state: Certificate::from_residual(state.max(fixed)),
        fixed_point_h: Certificate::from_residual(fixed),
        recovery_exact: Certificate::from_residual(recovery),
        transported_h0: h0,
        support_restricted: !petz.restriction.trivial,
    })
}

/// One member of a transported exponential family.
#[derive(Clone, Debug)]
pub struct TransportedMember {
    /// `T*_ρ(h)` on the compressed target.
    pub h0: HermitianElement,
    /// `‖T(ρ^h) − T(ρ)^{h_0}‖_1`.
    pub state_residual: f64,
    /// `|‖h‖_{exp,ρ} − ‖h_0‖_{exp,T(ρ)}|`.
    pub norm_residual: f64,
    pub sufficient: bool,
}

/// Transports the generators `E` of an exponential family through `T*_ρ`.
pub fn transport_family(
    channel: &Channel,
    rho: &PositiveFunctional,
    family: &[HermitianElement],
) -> Result<Vec<TransportedMember>> {
    let petz = PetzMap::new(channel, rho, true)?;
    family
        .iter()
        .enumerate()
        .map(|(i, h)| {
            h.matrix()
                .algebra()
                .check_same(channel.source(), "h")
                .map_err(|e| e.in_field(&format!("family[{i}]")))?;
            let report = sufficiency_with(&petz, h)?;
            let h0 = report.transported_h0.clone();
            let norm_residual = (exp_norm(rho, h)?.norm - exp_norm(petz.t_rho(), &h0)?.norm).abs();
            Ok(TransportedMember {
                state_residual: report.transported_state.residual,
                sufficient: report.all_hold(),
                h0,
                norm_residual,
            })
        })
        .collect()
}

/// `x ⊗ y` for single-block elements.
pub fn tensor_product(x: &BlockMatrix, y: &BlockMatrix) -> Result<BlockMatrix> {
    if x.algebra().num_blocks() != 1 || y.algebra().num_blocks() != 1 {
        return Err(Error::validation("tensor", "factors must be full matrix algebras"));
    }
    BlockMatrix::from_matrix(x.blocks()[0].kronecker(&y.blocks()[0]))
}
