//! Identification by network matching for binary response models whose
//! unobserved social characteristic drives both the outcome and link
//! formation.
//!
//! The crate simulates the outcome/link-formation model, computes codegree
//! distances from an observed adjacency matrix, estimates the slope by a
//! kernel-weighted matched-pairs conditional logit, recovers the social
//! influence of each agent, and runs Monte Carlo bias studies against logit
//! baselines.

pub mod distance;
pub mod error;
pub mod estimators;
pub mod io;
pub mod link;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod simulate;

pub use distance::{
    codegree_distance_matrix, kernel_weight, population_codegree_distance,
    population_network_distance, weight_matrix, BandwidthRule, CodegreeMatrix, Kernel,
    KernelSpec, PopulationGeometry,
};
pub use error::{Error, Result};
pub use estimators::{
    estimate, estimate_beta, estimate_lambda, estimate_prob_y, EstimationResult, EstimatorConfig,
};
pub use link::{GridLink, LinkFunction};
pub use model::{
    lambda_true, logistic_cdf, logit, Adjacency, LatentDraws, NetworkSample, SocialInfluence,
    TrueParameters,
};
pub use quadrature::QuadratureSpec;
pub use simulate::{simulate_sample, simulate_with, CovariateSpec, LatentSpec, SimulationSetup};
