//! Estimators of the slope and social influence, plus logit baselines.

pub mod logit;
pub mod matched;
pub mod newton;
pub mod objective;

pub use logit::{baseline_infeasible, baseline_naive, baseline_with_controls, fit_logit_mle, LogitFit};
pub use matched::{
    estimate, estimate_beta, estimate_beta_weighted, estimate_lambda, estimate_prob_y,
    sample_weights, EstimationResult, EstimatorConfig, LambdaEstimates, ProbClip,
};
pub use newton::{NewtonOptions, SecondOrder};
pub use objective::{pairwise_objective, DiscordantPairs, Normalization};
