//! Link functions `f: [0,1]² → [0,1]` giving the probability that agents with
//! social characteristics `x` and `y` form a link.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const THIRD: f64 = 1.0 / 3.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

/// A symmetric link function.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkFunction {
    /// Three-block stochastic blockmodel with linking probability 1/3.
    Blockmodel,
    /// `exp(x+y) / (1 + exp(x+y))`.
    Beta,
    /// `1 - (x-y)²`.
    Homophily,
    /// User supplied values on a uniform mesh of `[0,1]²`.
    Grid(Arc<GridLink>),
}

impl LinkFunction {
    pub const NAMES: [&'static str; 4] = ["blockmodel", "beta", "homophily", "grid"];

    /// Evaluates `f(x, y)`, rejecting arguments outside `[0,1]`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!(
                "link function arguments must lie in [0,1], got ({x}, {y})"
            )));
        }
        Ok(self.value(x, y))
    }

    /// Evaluates `f(x, y)` without a domain check. Callers guarantee
    /// `x, y ∈ [0,1]`.
    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        match self {
            LinkFunction::Blockmodel => blockmodel(x, y),
            LinkFunction::Beta => {
                let s = x + y;
                // symmetric in x,y because the sum is
                1.0 / (1.0 + (-s).exp())
            }
            LinkFunction::Homophily => {
                let d = x - y;
                1.0 - d * d
            }
            LinkFunction::Grid(g) => g.value(x, y),
        }
    }

    /// Points in `(0,1)` where the function (in either argument) may jump or
    /// have a kink. Quadrature panels are split there.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            LinkFunction::Blockmodel => vec![THIRD, TWO_THIRDS],
            LinkFunction::Beta | LinkFunction::Homophily => Vec::new(),
            LinkFunction::Grid(g) => g.mesh_interior(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LinkFunction::Blockmodel => "blockmodel",
            LinkFunction::Beta => "beta",
            LinkFunction::Homophily => "homophily",
            LinkFunction::Grid(_) => "grid",
        }
    }
}

impl fmt::Display for LinkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinkFunction {
    type Err = Error;

    /// Parses one of the analytic link names. `grid` needs a payload and is
    /// built with [`GridLink::new`] instead.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "blockmodel" | "f1" => Ok(LinkFunction::Blockmodel),
            "beta" | "f2" => Ok(LinkFunction::Beta),
            "homophily" | "f3" => Ok(LinkFunction::Homophily),
            "grid" => Err(Error::Config(
                "the grid link function needs a value grid; supply one explicitly".into(),
            )),
            other => Err(Error::Config(format!(
                "unknown link function `{other}`; expected one of {{{}}}",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

#[inline]
fn blockmodel(x: f64, y: f64) -> f64 {
    let linked = if x <= THIRD {
        y > THIRD
    } else if x <= TWO_THIRDS {
        y <= TWO_THIRDS
    } else {
        y > TWO_THIRDS || y <= THIRD
    };
    if linked {
        THIRD
    } else {
        0.0
    }
}

/// Link function tabulated on an `m × m` uniform mesh of `[0,1]²`
/// (node `(a, b)` sits at `(a/(m-1), b/(m-1))`).
///
/// Values are interpolated bilinearly, symmetrized as `(g(x,y)+g(y,x))/2` and
/// clamped to `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridLink {
    m: usize,
    values: Vec<f64>,
}

impl GridLink {
    /// `values` is row-major, `values[a*m + b] = g(a/(m-1), b/(m-1))`.
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config("grid link needs at least a 2x2 mesh".into()));
        }
        if values.len() != m * m {
            return Err(Error::Config(format!(
                "grid link expects {} values for a {m}x{m} mesh, got {}",
                m * m,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("grid link value {v} is not finite")));
        }
        Ok(GridLink { m, values })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    fn raw(&self, x: f64, y: f64) -> f64 {
        let last = (self.m - 1) as f64;
        let (fx, fy) = (x * last, y * last);
        let a = (fx.floor() as usize).min(self.m - 2);
        let b = (fy.floor() as usize).min(self.m - 2);
        let (tx, ty) = (fx - a as f64, fy - b as f64);
        let at = |r: usize, c: usize| self.values[r * self.m + c];
        (1.0 - tx) * (1.0 - ty) * at(a, b)
            + tx * (1.0 - ty) * at(a + 1, b)
            + (1.0 - tx) * ty * at(a, b + 1)
            + tx * ty * at(a + 1, b + 1)
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        (0.5 * (self.raw(x, y) + self.raw(y, x))).clamp(0.0, 1.0)
    }

    fn mesh_interior(&self) -> Vec<f64> {
        let last = (self.m - 1) as f64;
        (1..self.m - 1).map(|a| a as f64 / last).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blockmodel_branches() {
        let f = LinkFunction::Blockmodel;
        assert_eq!(f.eval(0.5, 0.5).unwrap(), 1.0 / 3.0);
        assert_eq!(f.eval(0.2, 0.2).unwrap(), 0.0);
        assert_eq!(f.eval(0.2, 0.5).unwrap(), 1.0 / 3.0);
        assert_eq!(f.eval(0.5, 0.9).unwrap(), 0.0);
        assert_eq!(f.eval(0.9, 0.9).unwrap(), 1.0 / 3.0);
        assert_eq!(f.eval(0.9, 0.1).unwrap(), 1.0 / 3.0);
        assert_eq!(f.eval(0.9, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn beta_and_homophily_closed_forms() {
        assert_eq!(LinkFunction::Beta.eval(0.0, 0.0).unwrap(), 0.5);
        for x in [0.0, 0.13, 0.5, 1.0] {
            assert_eq!(LinkFunction::Homophily.eval(x, x).unwrap(), 1.0);
        }
        assert_eq!(LinkFunction::Homophily.eval(0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        for f in [LinkFunction::Blockmodel, LinkFunction::Beta, LinkFunction::Homophily] {
            assert!(matches!(f.eval(-0.1, 0.5), Err(Error::Domain(_))));
            assert!(matches!(f.eval(0.5, 1.5), Err(Error::Domain(_))));
            assert!(f.eval(0.5, f64::NAN).is_err());
        }
    }

    #[test]
    fn grid_is_symmetrized_and_clamped() {
        // asymmetric 2x2 grid: g(0,1)=1.4, g(1,0)=0
        let g = GridLink::new(2, vec![0.0, 1.4, 0.0, 0.2]).unwrap();
        let f = LinkFunction::Grid(Arc::new(g));
        assert_eq!(f.eval(0.0, 1.0).unwrap(), 0.7);
        assert_eq!(f.eval(1.0, 0.0).unwrap(), 0.7);
        assert_eq!(f.eval(0.3, 0.8).unwrap(), f.eval(0.8, 0.3).unwrap());
        let big = GridLink::new(2, vec![2.0; 4]).unwrap();
        assert_eq!(big.value(0.4, 0.4), 1.0);
    }

    #[test]
    fn grid_reproduces_bilinear_function() {
        // g(x,y) = x*y is reproduced exactly by bilinear interpolation
        let m = 5;
        let vals = (0..m * m)
            .map(|i| ((i / m) as f64 / 4.0) * ((i % m) as f64 / 4.0))
            .collect();
        let g = GridLink::new(m, vals).unwrap();
        assert!((g.value(0.3, 0.7) - 0.21).abs() < 1e-15);
    }

    #[test]
    fn parse_names() {
        assert_eq!("beta".parse::<LinkFunction>().unwrap(), LinkFunction::Beta);
        let err = "bogus".parse::<LinkFunction>().unwrap_err().to_string();
        assert!(err.contains("blockmodel, beta, homophily, grid"), "{err}");
    }
}
