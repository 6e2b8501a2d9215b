//! Codegree distances between agents and the kernel weights built from them.
//!
//! The empirical codegree distance of agents `i` and `j` is the root mean
//! squared difference between columns `i` and `j` of `D²/n`:
//!
//! ```text
//! δ̂ᵢⱼ = [ (1/n) Σₜ ( (1/n) Σₛ Dₜₛ (Dᵢₛ − Dⱼₛ) )² ]^{1/2}
//! ```
//!
//! Its population counterpart replaces `D` by the link function. The network
//! distance `d` compares link profiles `f(w, ·)` directly.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::LinkFunction;
use crate::model::Adjacency;
use crate::quadrature::{CompositeRule, QuadratureSpec};

/// Symmetric `n × n` matrix of empirical codegree distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CodegreeMatrix {
    values: DMatrix<f64>,
}

impl CodegreeMatrix {
    /// Wraps precomputed distances after checking the matrix invariants.
    pub fn from_values(values: DMatrix<f64>) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n {
            return Err(Error::Validation("codegree matrix must be square".into()));
        }
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::Validation(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[(i, j)];
                if !(0.0..=1.0).contains(&v) || v != values[(j, i)] {
                    return Err(Error::Validation(format!(
                        "invalid codegree distance {v} at ({i},{j})"
                    )));
                }
            }
        }
        Ok(CodegreeMatrix { values })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

/// Computes `δ̂` for every pair of agents.
///
/// `D²` and `(D²)ᵀD²` hold integers below 2⁵³ for any realistic `n`, so the
/// squared column differences are formed exactly and rounding enters only in
/// the final scaling and square root. Identical columns give exactly zero.
pub fn codegree_distance_matrix(d: &Adjacency) -> CodegreeMatrix {
    let n = d.n();
    let a = d.to_f64();
    let common = &a * &a;
    let gram = &common * &common;
    let scale = 1.0 / (n as f64).powi(3);
    let mut values = DMatrix::zeros(n, n);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sq = gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)];
                    (sq.max(0.0) * scale).sqrt()
                })
                .collect()
        })
        .collect();
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            values[(i, j)] = *v;
        }
    }
    // the formula is symmetric; make the stored matrix symmetric bit for bit
    for i in 0..n {
        values[(i, i)] = 0.0;
        for j in 0..i {
            values[(i, j)] = values[(j, i)];
        }
    }
    CodegreeMatrix { values }
}

/// Kernel functions of a non-negative argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `K(u) = ¾ (1 − u²) 1{u² < 1}`.
    Epanechnikov,
}

impl Kernel {
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Kernel::Epanechnikov => {
                let u2 = u * u;
                if u2 < 1.0 {
                    0.75 * (1.0 - u2)
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest kernel value, attained at `u = 0`.
    pub fn peak(self) -> f64 {
        self.eval(0.0)
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            other => Err(Error::Config(format!(
                "unknown kernel `{other}`; expected epanechnikov"
            ))),
        }
    }
}

/// Bandwidth as a function of the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// `h(n) = n^{−1/9} / 10`.
    Standard,
    Fixed(f64),
}

impl BandwidthRule {
    pub fn bandwidth(self, n: usize) -> Result<f64> {
        let h = match self {
            BandwidthRule::Standard => (n as f64).powf(-1.0 / 9.0) / 10.0,
            BandwidthRule::Fixed(h) => h,
        };
        if h > 0.0 && h.is_finite() {
            Ok(h)
        } else {
            Err(Error::Config(format!("bandwidth must be positive, got {h}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kernel: Kernel,
    pub bandwidth: BandwidthRule,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            kernel: Kernel::Epanechnikov,
            bandwidth: BandwidthRule::Standard,
        }
    }
}

/// `K(δ̂² / h)`.
#[inline]
pub fn kernel_weight(spec: &KernelSpec, delta_hat: f64, h: f64) -> f64 {
    spec.kernel.eval(delta_hat * delta_hat / h)
}

/// Kernel weights `Wᵢⱼ = K(δ̂ᵢⱼ² / h)` with `h` from the bandwidth rule at
/// `n = C.n()`.
pub fn weight_matrix(c: &CodegreeMatrix, spec: &KernelSpec) -> Result<DMatrix<f64>> {
    let n = c.n();
    let h = spec.bandwidth.bandwidth(n)?;
    Ok(DMatrix::from_fn(n, n, |i, j| kernel_weight(spec, c.get(i, j), h)))
}

/// Population distances for a known link function, evaluated by composite
/// Gauss–Legendre quadrature with panels split at the link's breakpoints.
pub struct PopulationGeometry<'a> {
    link: &'a LinkFunction,
    rule: CompositeRule,
    /// `f(t_a, s_b)` on the node grid, row-major.
    grid: Vec<f64>,
}

impl<'a> PopulationGeometry<'a> {
    pub fn new(link: &'a LinkFunction, quad: QuadratureSpec) -> Result<Self> {
        let rule = CompositeRule::new(quad.nodes_per_dim, &link.breakpoints())?;
        let m = rule.len();
        let mut grid = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                grid[a * m + b] = link.value(rule.nodes[a], rule.nodes[b]);
            }
        }
        Ok(PopulationGeometry { link, rule, grid })
    }

    pub fn rule(&self) -> &CompositeRule {
        &self.rule
    }

    /// `f(w, ·)` at the quadrature nodes.
    pub fn link_profile(&self, w: f64) -> Result<Vec<f64>> {
        check_unit(w)?;
        Ok(self.rule.nodes.iter().map(|&s| self.link.value(w, s)).collect())
    }

    /// The codegree function `p(w, t) = ∫ f(t, s) f(w, s) ds` at the nodes `t`.
    pub fn codegree_profile(&self, w: f64) -> Result<Vec<f64>> {
        let fw = self.link_profile(w)?;
        Ok(self.apply(&fw))
    }

    /// `d(wᵢ, wⱼ) = ‖f(wᵢ,·) − f(wⱼ,·)‖₂`.
    pub fn network_distance(&self, wi: f64, wj: f64) -> Result<f64> {
        let (a, b) = (self.link_profile(wi)?, self.link_profile(wj)?);
        Ok(self.l2(&a, &b))
    }

    /// `δ(wᵢ, wⱼ) = ‖p(wᵢ,·) − p(wⱼ,·)‖₂`.
    pub fn codegree_distance(&self, wi: f64, wj: f64) -> Result<f64> {
        let (a, b) = (self.link_profile(wi)?, self.link_profile(wj)?);
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let inner = self.apply(&diff);
        Ok(self.rule.integrate_values(&inner, |v| v * v).sqrt())
    }

    /// Distance between two profiles sampled at the nodes.
    pub fn l2(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.rule.integrate_values(&diff, |v| v * v).sqrt()
    }

    /// `t ↦ ∫ f(t, s) g(s) ds` for `g` sampled at the nodes.
    fn apply(&self, g: &[f64]) -> Vec<f64> {
        let m = self.rule.len();
        let wg: Vec<f64> = g.iter().zip(&self.rule.weights).map(|(g, w)| g * w).collect();
        (0..m)
            .map(|a| {
                self.grid[a * m..(a + 1) * m]
                    .iter()
                    .zip(&wg)
                    .map(|(f, v)| f * v)
                    .sum()
            })
            .collect()
    }
}

impl CompositeRule {
    fn integrate_values(&self, values: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        values.iter().zip(&self.weights).map(|(&v, &w)| w * f(v)).sum()
    }
}

fn check_unit(w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(Error::Domain(format!("social characteristic must lie in [0,1], got {w}")))
    }
}

/// Population network distance `d(wᵢ, wⱼ)` by quadrature.
pub fn population_network_distance(
    link: &LinkFunction,
    wi: f64,
    wj: f64,
    quad: QuadratureSpec,
) -> Result<f64> {
    check_unit(wi)?;
    check_unit(wj)?;
    let rule = CompositeRule::new(quad.nodes_per_dim, &link.breakpoints())?;
    let sq = rule.integrate(|t| {
        let d = link.value(wi, t) - link.value(wj, t);
        d * d
    });
    Ok(sq.sqrt())
}

/// Population codegree distance `δ(wᵢ, wⱼ)` by nested quadrature.
pub fn population_codegree_distance(
    link: &LinkFunction,
    wi: f64,
    wj: f64,
    quad: QuadratureSpec,
) -> Result<f64> {
    PopulationGeometry::new(link, quad)?.codegree_distance(wi, wj)
}
