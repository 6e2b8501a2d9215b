//! Gauss–Legendre quadrature on `[0,1]`, optionally split into panels at
//! known breakpoints of a piecewise-smooth integrand.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` nodes, found by Newton iteration on the three-term
    /// Legendre recurrence.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("quadrature order must be positive".into()));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x =
                (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature settings for population distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    /// Total number of nodes per dimension, shared out over the panels.
    pub nodes_per_dim: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes_per_dim: 200 }
    }
}

/// Composite Gauss–Legendre rule on `[0,1]`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Splits `[0,1]` at `breakpoints` (interior points, any order) and
    /// places a Gauss–Legendre rule on every panel so that the total node
    /// count is at least `total_nodes`.
    pub fn new(total_nodes: usize, breakpoints: &[f64]) -> Result<Self> {
        let mut edges: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| *b > 0.0 && *b < 1.0)
            .collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        edges.insert(0, 0.0);
        edges.push(1.0);
        let panels = edges.len() - 1;
        let gl = GaussLegendre::new(total_nodes.div_ceil(panels).max(1))?;
        let mut nodes = Vec::with_capacity(gl.nodes.len() * panels);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in edges.windows(2) {
            let (a, b) = (p[0], p[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Ok(CompositeRule { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules() {
        let g = GaussLegendre::new(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((g.nodes()[0] + r).abs() < 1e-15 && (g.nodes()[1] - r).abs() < 1e-15);
        assert!((g.weights()[0] - 1.0).abs() < 1e-15);
        let g = GaussLegendre::new(3).unwrap();
        assert!((g.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(g.nodes()[1], 0.0);
    }

    #[test]
    fn polynomial_exactness() {
        for order in [1, 5, 20, 67, 200] {
            let rule = CompositeRule::new(order, &[]).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-13, "order {order}");
            let deg = 2 * order - 1;
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((rule.integrate(|x| x.powi(deg as i32)) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn panels_capture_jumps() {
        let rule = CompositeRule::new(200, &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert_eq!(rule.len(), 201);
        let step = |x: f64| if x <= 1.0 / 3.0 { 1.0 } else { 0.0 };
        assert!((rule.integrate(step) - 1.0 / 3.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x.exp()) - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
