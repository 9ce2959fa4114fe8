//! Gauss–Legendre rules and barycentric interpolation on their nodes.

/// Gauss–Legendre nodes and weights on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `q`-point rule, exact for polynomials of degree `2q − 1`.
    pub fn new(q: usize) -> Self {
        assert!(q >= 1, "at least one quadrature point");
        let mut nodes = vec![0.0; q];
        let mut weights = vec![0.0; q];
        let n = q as f64;
        for i in 0..q.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_q
            let mut x = ((i as f64 + 0.75) / (n + 0.5) * std::f64::consts::PI).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(q, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(q, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] → [0, 1]
            nodes[i] = (1.0 - x) / 2.0;
            nodes[q - 1 - i] = (1.0 + x) / 2.0;
            weights[i] = w / 2.0;
            weights[q - 1 - i] = w / 2.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Barycentric weights for polynomial interpolation through `nodes`.
    pub fn barycentric_weights(&self) -> Vec<f64> {
        let x = &self.nodes;
        (0..x.len())
            .map(|j| {
                1.0 / (0..x.len())
                    .filter(|&k| k != j)
                    .map(|k| x[j] - x[k])
                    .product::<f64>()
            })
            .collect()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Lagrange basis values `ℓ_j(t)` for interpolation through `nodes`, via the
/// second barycentric formula.
pub fn lagrange_basis(nodes: &[f64], bary: &[f64], t: f64) -> Vec<f64> {
    if let Some(j) = nodes.iter().position(|&x| x == t) {
        let mut out = vec![0.0; nodes.len()];
        out[j] = 1.0;
        return out;
    }
    let terms: Vec<f64> = nodes
        .iter()
        .zip(bary)
        .map(|(&x, &w)| w / (t - x))
        .collect();
    let denom: f64 = terms.iter().sum();
    terms.into_iter().map(|v| v / denom).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for q in [1, 2, 5, 8, 32] {
            let g = GaussLegendre::new(q);
            for deg in 0..(2 * q) {
                let s: f64 = g
                    .nodes
                    .iter()
                    .zip(&g.weights)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((s - exact).abs() < 1e-13, "q={q} deg={deg}: {s}");
            }
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let g = GaussLegendre::new(7);
        let bary = g.barycentric_weights();
        let f = |x: f64| 3.0 * x.powi(6) - x.powi(3) + 0.5;
        let vals: Vec<f64> = g.nodes.iter().map(|&x| f(x)).collect();
        for t in [0.0, 0.13, 0.5, 0.99, 1.0] {
            let l = lagrange_basis(&g.nodes, &bary, t);
            let interp: f64 = l.iter().zip(&vals).map(|(a, b)| a * b).sum();
            assert!((interp - f(t)).abs() < 1e-12);
        }
    }
}
