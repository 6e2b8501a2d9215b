//! Data-generating process.

use nalgebra::DMatrix;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::link::LinkFunction;
use crate::model::{Adjacency, LatentDraws, NetworkSample, TrueParameters};
use crate::rng::{sample_rng, SimRng};

/// How the social characteristics `wᵢ` are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatentSpec {
    /// I.i.d. uniform on the open interval `(0,1)`.
    Uniform,
    /// Every agent gets the same `w₀ ∈ (0,1)`.
    Constant(f64),
}

/// How covariates are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovariateSpec {
    /// Independent standard normals.
    StandardNormal,
    /// All covariates identically zero.
    Zero,
}

/// Full description of a simulated design.
#[derive(Debug, Clone)]
pub struct SimulationSetup {
    pub link: LinkFunction,
    pub params: TrueParameters,
    pub latent: LatentSpec,
    pub covariates: CovariateSpec,
}

impl SimulationSetup {
    pub fn new(link: LinkFunction, params: TrueParameters) -> Self {
        SimulationSetup {
            link,
            params,
            latent: LatentSpec::Uniform,
            covariates: CovariateSpec::StandardNormal,
        }
    }
}

/// Draws from the standard logistic distribution by inversion.
pub fn draw_standard_logistic(rng: &mut SimRng) -> f64 {
    let u: f64 = rng.sample(Open01);
    (u / (1.0 - u)).ln()
}

/// `1{index − ε ≥ 0}`.
#[inline]
pub fn outcome(index: f64, eps: f64) -> u8 {
    (index - eps >= 0.0) as u8
}

/// Simulates one sample of `n` agents with standard normal covariates and
/// uniform social characteristics. The same inputs always give the same
/// sample.
pub fn simulate_sample(
    n: usize,
    link: &LinkFunction,
    params: &TrueParameters,
    seed: u64,
) -> Result<NetworkSample> {
    let setup = SimulationSetup::new(link.clone(), params.clone());
    simulate_with(n, &setup, &mut sample_rng(seed))
}

/// Simulates one sample from an explicit generator.
///
/// Draw order: covariates row by row, then `w`, then `ε`, then the upper
/// triangle of `η` row by row.
pub fn simulate_with(n: usize, setup: &SimulationSetup, rng: &mut SimRng) -> Result<NetworkSample> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 agents, got {n}")));
    }
    let k = setup.params.k();
    let mut x = DMatrix::zeros(n, k);
    if setup.covariates == CovariateSpec::StandardNormal {
        for i in 0..n {
            for c in 0..k {
                x[(i, c)] = rng.sample(StandardNormal);
            }
        }
    }

    let w: Vec<f64> = match setup.latent {
        LatentSpec::Uniform => (0..n).map(|_| rng.sample(Open01)).collect(),
        LatentSpec::Constant(w0) => {
            if !(w0 > 0.0 && w0 < 1.0) {
                return Err(Error::Config(format!("constant w must lie in (0,1), got {w0}")));
            }
            vec![w0; n]
        }
    };
    let eps: Vec<f64> = (0..n).map(|_| draw_standard_logistic(rng)).collect();

    let mut eta = DMatrix::from_element(n, n, 1.0);
    let mut cells = vec![0u8; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let e: f64 = rng.random();
            eta[(i, j)] = e;
            eta[(j, i)] = e;
            if setup.link.value(w[i], w[j]) >= e {
                cells[i * n + j] = 1;
                cells[j * n + i] = 1;
            }
        }
    }

    let beta = &setup.params.beta;
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let xb: f64 = (0..k).map(|c| x[(i, c)] * beta[c]).sum();
        let index = xb + setup.params.lambda.eval(w[i])?;
        y.push(outcome(index, eps[i]));
    }

    NetworkSample::new(
        x,
        y,
        Adjacency::from_cells_unchecked(n, cells),
        Some(LatentDraws { w, eps, eta }),
    )
}
