//! Domain types of the outcome/link-formation model.
//!
//! Agent `i` carries covariates `Xᵢ`, a binary outcome
//! `yᵢ = 1{Xᵢβ + λ(wᵢ) − εᵢ ≥ 0}` and an unobserved social characteristic
//! `wᵢ`. Links form independently given the `w`s:
//! `Dᵢⱼ = 1{f(wᵢ, wⱼ) ≥ ηᵢⱼ}` for `i ≠ j`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Logistic cdf `F(x) = 1 / (1 + e^{-x})`, stable for large `|x|`.
#[inline]
pub fn logistic_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln F(x)`, computed without forming `F(x)` so it stays finite far into the
/// left tail.
#[inline]
pub fn log_logistic_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Inverse logistic cdf `ln(p / (1 - p))` for `p ∈ (0,1)`.
pub fn logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("logit requires p in (0,1), got {p}")));
    }
    Ok((p / (1.0 - p)).ln())
}

/// `λ(w) = 1.5 w² + ln w`, the social influence used in the simulation design.
/// Defined on `(0,1]`; `λ(1) = 1.5`.
pub fn lambda_true(w: f64) -> Result<f64> {
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::Domain(format!(
            "social influence is defined on (0,1], got w = {w}"
        )));
    }
    Ok(1.5 * w * w + w.ln())
}

/// The social-influence function `λ`.
#[derive(Clone)]
pub enum SocialInfluence {
    /// `1.5 w² + ln w`.
    Reference,
    /// `λ ≡ 0`: no social influence.
    Zero,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl SocialInfluence {
    /// Evaluates `λ(w)` for `w ∈ (0,1]`.
    pub fn eval(&self, w: f64) -> Result<f64> {
        match self {
            SocialInfluence::Reference => lambda_true(w),
            SocialInfluence::Zero => Ok(0.0),
            SocialInfluence::Custom(f) => {
                let v = f(w);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Domain(format!("λ({w}) = {v} is not finite")))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SocialInfluence::Reference => "reference",
            SocialInfluence::Zero => "zero",
            SocialInfluence::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for SocialInfluence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SocialInfluence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reference" | "default" => Ok(SocialInfluence::Reference),
            "zero" | "none" => Ok(SocialInfluence::Zero),
            other => Err(Error::Config(format!(
                "unknown social influence `{other}`; expected reference or zero"
            ))),
        }
    }
}

/// True slope vector and social-influence function of a simulation design.
#[derive(Debug, Clone)]
pub struct TrueParameters {
    pub beta: Vec<f64>,
    pub lambda: SocialInfluence,
}

impl TrueParameters {
    pub fn new(beta: Vec<f64>, lambda: SocialInfluence) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::Config("beta must have at least one component".into()));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config("beta must be finite".into()));
        }
        Ok(TrueParameters { beta, lambda })
    }

    pub fn k(&self) -> usize {
        self.beta.len()
    }
}

impl Default for TrueParameters {
    /// `β = 1` (scalar covariate) and `λ(w) = 1.5 w² + ln w`.
    fn default() -> Self {
        TrueParameters {
            beta: vec![1.0],
            lambda: SocialInfluence::Reference,
        }
    }
}

/// Symmetric binary adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    cells: Vec<u8>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Adjacency {
            n,
            cells: vec![0; n * n],
        }
    }

    /// Builds an adjacency matrix from a list of undirected edges.
    /// Duplicate edges are ignored; self-links and out-of-range ids are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = Adjacency::empty(n);
        for (row, &(i, j)) in edges.iter().enumerate() {
            if i == j {
                return Err(Error::Validation(format!(
                    "edge {row} is a self-link ({i},{i})"
                )));
            }
            if i >= n || j >= n {
                return Err(Error::Validation(format!(
                    "edge {row} ({i},{j}) references an agent outside 0..{n}"
                )));
            }
            adj.cells[i * n + j] = 1;
            adj.cells[j * n + i] = 1;
        }
        Ok(adj)
    }

    /// Checks symmetry, binary entries and an empty diagonal of a dense
    /// row-major matrix.
    pub fn from_dense(n: usize, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::Validation(format!(
                "adjacency of {n} agents needs {} cells, got {}",
                n * n,
                cells.len()
            )));
        }
        for i in 0..n {
            if cells[i * n + i] != 0 {
                return Err(Error::Validation(format!("self-link at agent {i}")));
            }
            for j in 0..n {
                let v = cells[i * n + j];
                if v > 1 {
                    return Err(Error::Validation(format!(
                        "adjacency entry ({i},{j}) = {v} is not binary"
                    )));
                }
                if v != cells[j * n + i] {
                    return Err(Error::Validation(format!(
                        "adjacency is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Adjacency { n, cells })
    }

    pub(crate) fn from_cells_unchecked(n: usize, cells: Vec<u8>) -> Self {
        Adjacency { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.cells[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.cells[i * self.n..(i + 1) * self.n]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|&v| v as usize).sum()
    }

    /// Undirected edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j) == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// Relabels agents: agent `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut cells = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                cells[perm[i] * n + perm[j]] = self.get(i, j);
            }
        }
        Adjacency { n, cells }
    }
}

/// Latent draws of a simulated sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentDraws {
    /// Social characteristics, each in `(0,1)`.
    pub w: Vec<f64>,
    /// Logistic outcome errors.
    pub eps: Vec<f64>,
    /// Symmetric link shocks; the diagonal is 1.
    pub eta: DMatrix<f64>,
}

/// Observed data: covariates `X` (n×k), outcomes `y` and adjacency `D`,
/// plus the latent draws when the sample was simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSample {
    x: DMatrix<f64>,
    y: Vec<u8>,
    d: Adjacency,
    latent: Option<LatentDraws>,
}

impl NetworkSample {
    pub fn new(
        x: DMatrix<f64>,
        y: Vec<u8>,
        d: Adjacency,
        latent: Option<LatentDraws>,
    ) -> Result<Self> {
        let n = y.len();
        if n < 2 {
            return Err(Error::Validation(format!("need at least 2 agents, got {n}")));
        }
        if x.ncols() < 1 {
            return Err(Error::Validation("need at least one covariate".into()));
        }
        if x.nrows() != n || d.n() != n {
            return Err(Error::Validation(format!(
                "dimension mismatch: {} covariate rows, {n} outcomes, {} agents in the network",
                x.nrows(),
                d.n()
            )));
        }
        if let Some((idx, _)) = y.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::Validation(format!("outcome of agent {idx} is not 0/1")));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % n, pos / n);
            return Err(Error::Validation(format!(
                "covariate x[{r},{c}] is not finite"
            )));
        }
        if let Some(l) = &latent {
            if l.w.len() != n || l.eps.len() != n || l.eta.shape() != (n, n) {
                return Err(Error::Validation("latent draws do not match n".into()));
            }
            if l.w.iter().any(|&w| !(w > 0.0 && w < 1.0)) {
                return Err(Error::Validation("latent w must lie in (0,1)".into()));
            }
            if l.eta != l.eta.transpose() {
                return Err(Error::Validation("latent eta is not symmetric".into()));
            }
        }
        Ok(NetworkSample { x, y, d, latent })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.d
    }

    pub fn latent(&self) -> Option<&LatentDraws> {
        self.latent.as_ref()
    }

    /// Same observations with the latent draws dropped.
    pub fn without_latent(&self) -> Self {
        NetworkSample {
            latent: None,
            ..self.clone()
        }
    }

    /// Same agents with covariates replaced; `x` must keep `n` rows.
    pub fn with_covariates(&self, x: DMatrix<f64>) -> Result<Self> {
        NetworkSample::new(x, self.y.clone(), self.d.clone(), self.latent.clone())
    }
}
