//! Relative entropy, the shifted entropy `F_ρ`, the Kosaki variational lower
//! bound and the sandwiched Rényi function `f(α)`.
//!
//! All logarithms are natural. `+∞` is returned as `f64::INFINITY`.

use crate::algebra::{BlockMatrix, MatrixAlgebra, HERMITIAN_TOL};
use crate::elements::{PositiveFunctional, SelfAdjointFunctional};
use crate::error::{Error, Result};
use crate::lp;

/// `S(ω‖ρ) = Tr ω(log ω − log ρ)` when `s(ω) ≤ s(ρ)`, `+∞` otherwise.
///
/// The support of `ρ` is the span of eigenvectors with eigenvalue above
/// `1e-12·‖ρ‖`; the support condition fails when `Tr[(1 − s(ρ))ω]` exceeds
/// `1e-12·‖ω‖`.
pub fn relative_entropy(omega: &PositiveFunctional, rho: &PositiveFunctional) -> Result<f64> {
    omega
        .matrix()
        .check_same_algebra(rho.matrix(), "relative_entropy")?;
    if omega.is_zero() {
        return Ok(0.0);
    }
    let os = omega.spectrum();
    let rs = rho.spectrum();
    let omega_norm = os.max_abs();
    let rho_floor = HERMITIAN_TOL * rs.max_abs();
    let omega_floor = HERMITIAN_TOL * omega_norm;

    let entropy_part: f64 = os
        .iter_values()
        .filter(|&v| v > omega_floor)
        .map(|v| v * v.ln())
        .sum();

    let mut cross = 0.0;
    let mut outside = 0.0;
    for ((vals, u), w) in rs
        .values()
        .iter()
        .zip(rs.vectors())
        .zip(omega.matrix().blocks())
    {
        // diagonal of U† ω U: weight of ω on each eigenvector of ρ
        let rotated = u.adjoint() * w * u;
        for (j, &mu) in vals.iter().enumerate() {
            let weight = rotated[(j, j)].re;
            if mu > rho_floor {
                cross += weight * mu.ln();
            } else {
                outside += weight;
            }
        }
    }
    if outside > omega_floor {
        return Ok(f64::INFINITY);
    }
    Ok(entropy_part - cross)
}

fn require_faithful_base(rho: &PositiveFunctional) -> Result<()> {
    if !rho.is_faithful() {
        return Err(Error::validation(
            "rho",
            format!(
                "reference functional must be faithful (minimum eigenvalue {:e})",
                rho.min_eigenvalue()
            ),
        ));
    }
    Ok(())
}

/// `F_ρ(ω) = S(ω‖ρ) − ω(1)` for positive `ω`, `+∞` for any `ω` with an
/// eigenvalue below `−1e-12·‖ω‖`.
pub fn f_rho(omega: &SelfAdjointFunctional, rho: &PositiveFunctional) -> Result<f64> {
    omega.matrix().check_same_algebra(rho.matrix(), "f_rho")?;
    require_faithful_base(rho)?;
    match omega.to_positive() {
        Some(pos) => f_rho_positive(&pos, rho),
        None => Ok(f64::INFINITY),
    }
}

/// [`f_rho`] for an argument already known to be positive.
pub fn f_rho_positive(omega: &PositiveFunctional, rho: &PositiveFunctional) -> Result<f64> {
    require_faithful_base(rho)?;
    Ok(relative_entropy(omega, rho)? - omega.trace())
}

/// The lower bound `ω(1)(log(ω(1)/ρ(1)) − 1)` on `F_ρ(ω)`, attained exactly on
/// the ray `ω = λρ`.
pub fn f_rho_lower_bound(omega: &PositiveFunctional, rho: &PositiveFunctional) -> f64 {
    let t = omega.trace();
    if t == 0.0 {
        return 0.0;
    }
    t * ((t / rho.trace()).ln() - 1.0)
}

/// `|S(ω‖ρ) + Σ S(ω_i‖ω) − Σ S(ω_i‖ρ)|` with `ω = Σ ω_i`.
pub fn donald_residual(parts: &[PositiveFunctional], rho: &PositiveFunctional) -> Result<f64> {
    let first = parts
        .first()
        .ok_or_else(|| Error::validation("omega_parts", "at least one part required"))?;
    let mut sum = first.matrix().clone();
    for (i, p) in parts.iter().enumerate().skip(1) {
        p.matrix()
            .check_same_algebra(first.matrix(), &format!("omega_parts[{i}]"))?;
        sum = &sum + p.matrix();
    }
    let omega = PositiveFunctional::new(sum)?;
    let lhs = relative_entropy(&omega, rho)?
        + parts
            .iter()
            .map(|p| relative_entropy(p, &omega))
            .sum::<Result<f64>>()?;
    let rhs = parts
        .iter()
        .map(|p| relative_entropy(p, rho))
        .sum::<Result<f64>>()?;
    if lhs.is_infinite() && rhs.is_infinite() {
        return Ok(0.0);
    }
    Ok((lhs - rhs).abs())
}

/// Step function `x: (1/n, ∞) → M` with finitely many values.
///
/// `x = values[j]` on `(t_j, t_{j+1}]` and `x = 1` on `(t_m, ∞)`, so that
/// `y = 1 − x` vanishes on the tail.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    n: u32,
    breakpoints: Vec<f64>,
    values: Vec<BlockMatrix>,
    tail_value: BlockMatrix,
}

impl StepFunction {
    /// `breakpoints = [t_0 = 1/n, t_1, ..., t_m]`, strictly increasing, and
    /// `values.len() == m`.
    pub fn new(n: u32, breakpoints: Vec<f64>, values: Vec<BlockMatrix>) -> Result<Self> {
        let first = values
            .first()
            .map(|v| v.algebra().clone())
            .ok_or_else(|| Error::validation("values", "use StepFunction::constant_one for m = 0"))?;
        let tail = BlockMatrix::identity(&first);
        Self::with_tail(n, breakpoints, values, tail)
    }

    /// `x ≡ 1` on `(1/n, ∞)`.
    pub fn constant_one(n: u32, algebra: &MatrixAlgebra) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("n", "cutoff index must be >= 1"));
        }
        Self::with_tail(
            n,
            vec![1.0 / n as f64],
            Vec::new(),
            BlockMatrix::identity(algebra),
        )
    }

    /// Full constructor; the tail value must be the identity.
    pub fn with_tail(
        n: u32,
        breakpoints: Vec<f64>,
        values: Vec<BlockMatrix>,
        tail_value: BlockMatrix,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("n", "cutoff index must be >= 1"));
        }
        let t0 = 1.0 / n as f64;
        match breakpoints.first() {
            Some(&b) if (b - t0).abs() <= 1e-15 * t0 => {}
            _ => {
                return Err(Error::validation(
                    "breakpoints[0]",
                    format!("first breakpoint must equal 1/n = {t0}"),
                ))
            }
        }
        if let Some(i) = breakpoints
            .windows(2)
            .position(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::validation(
                format!("breakpoints[{}]", i + 1),
                "breakpoints must be finite and strictly increasing",
            ));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::validation(
                "values",
                format!(
                    "expected {} values for {} breakpoints, got {}",
                    breakpoints.len() - 1,
                    breakpoints.len(),
                    values.len()
                ),
            ));
        }
        let identity = BlockMatrix::identity(tail_value.algebra());
        if (&tail_value - &identity).frobenius_norm() > 1e-12 {
            return Err(Error::validation(
                "tail_value",
                "tail value must be the identity for the integral to converge",
            ));
        }
        for (i, v) in values.iter().enumerate() {
            v.check_same_algebra(&tail_value, &format!("values[{i}]"))?;
        }
        let breakpoints = {
            let mut b = breakpoints;
            b[0] = t0;
            b
        };
        Ok(Self {
            n,
            breakpoints,
            values,
            tail_value,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[BlockMatrix] {
        &self.values
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        self.tail_value.algebra()
    }

    /// Inserts the breakpoint `t` (no-op when already present), splitting the
    /// interval that contains it. The function itself is unchanged.
    pub fn refine(&self, t: f64) -> Self {
        let mut out = self.clone();
        if t <= self.breakpoints[0] || self.breakpoints.contains(&t) {
            return out;
        }
        let idx = self.breakpoints.partition_point(|&b| b < t);
        out.breakpoints.insert(idx, t);
        let value = if idx <= self.values.len() {
            self.values[idx - 1].clone()
        } else {
            // beyond t_m: the tail value is repeated on the new interval
            self.tail_value.clone()
        };
        out.values.insert(idx - 1, value);
        out
    }
}

/// Evaluates the bracket of the Kosaki variational formula for one step
/// function:
///
/// `ω(1) log n − ∫_{1/n}^∞ (ω(y*y) + t^{-1} ρ(x x*)) dt/t`, `y = 1 − x`,
///
/// with the per-interval integrals in closed form. The result never exceeds
/// `S(ω‖ρ)`.
pub fn kosaki_lower_bound(
    omega: &PositiveFunctional,
    rho: &PositiveFunctional,
    step: &StepFunction,
) -> Result<f64> {
    omega
        .matrix()
        .check_same_algebra(rho.matrix(), "kosaki_lower_bound")?;
    omega
        .matrix()
        .check_same_algebra(&step.tail_value, "step_function")?;
    let identity = BlockMatrix::identity(omega.algebra());
    let mut integral = 0.0;
    for (j, x) in step.values.iter().enumerate() {
        let (lo, hi) = (step.breakpoints[j], step.breakpoints[j + 1]);
        let y = &identity - x;
        let omega_yy = omega.matrix().re_trace_product(&y.adjoint().matmul(&y));
        let rho_xx = rho.matrix().re_trace_product(&x.matmul(&x.adjoint()));
        integral += omega_yy * (hi / lo).ln() + rho_xx * (1.0 / lo - 1.0 / hi);
    }
    // tail: x = 1, y = 0, ∫_{t_m}^∞ ρ(1) dt/t² = ρ(1)/t_m
    let t_last = *step.breakpoints.last().expect("nonempty breakpoints");
    integral += rho.trace() / t_last;
    Ok(omega.trace() * (step.n as f64).ln() - integral)
}

/// `f(α) = (α − 1)^{-1} log(‖h_ω‖_{α,ρ}^α / ω(1))`.
pub fn renyi_f(omega: &PositiveFunctional, rho: &PositiveFunctional, alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::validation("alpha", format!("must be > 1, got {alpha}")));
    }
    if omega.is_zero() {
        return Err(Error::validation("omega", "must be nonzero"));
    }
    let norm = lp::lp_norm(omega.matrix(), rho, alpha)?;
    Ok((alpha * norm.ln() - omega.trace().ln()) / (alpha - 1.0))
}
