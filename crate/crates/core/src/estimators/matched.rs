//! Matched-pairs estimation of the slope `β` and of the social influence
//! `λ(wᵢ)`.
//!
//! Pairs of agents whose codegree distance is small have (asymptotically)
//! the same social influence, which cancels from the conditional probability
//! of `yᵢ = 1` given `yᵢ + yⱼ = 1`. Weighting discordant pairs by
//! `K(δ̂ᵢⱼ²/h)` and maximising the pairwise conditional logit recovers `β`;
//! `λ(wᵢ)` then follows by inverting a kernel-smoothed outcome probability.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::distance::{codegree_distance_matrix, weight_matrix, KernelSpec};
use crate::error::{Error, Result};
use crate::estimators::newton::{minimize, NewtonOptions};
use crate::estimators::objective::{DiscordantPairs, Normalization};
use crate::model::{logit, NetworkSample};

/// Clipping of the smoothed probability before logit inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbClip {
    /// `1/(n+1)`.
    Auto,
    Fixed(f64),
}

impl ProbClip {
    pub fn resolve(self, n: usize) -> Result<f64> {
        let c = match self {
            ProbClip::Auto => 1.0 / (n as f64 + 1.0),
            ProbClip::Fixed(c) => c,
        };
        if c > 0.0 && c < 0.5 {
            Ok(c)
        } else {
            Err(Error::Config(format!("probability clip must lie in (0, 0.5), got {c}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub kernel: KernelSpec,
    pub optimizer: NewtonOptions,
    pub prob_clip: ProbClip,
    pub normalization: Normalization,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            kernel: KernelSpec::default(),
            optimizer: NewtonOptions::default(),
            prob_clip: ProbClip::Auto,
            normalization: Normalization::Mean,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let o = &self.optimizer;
        if o.gradient_tolerance.is_nan() || o.gradient_tolerance <= 0.0 {
            return Err(Error::Config("gradient tolerance must be positive".into()));
        }
        if !(o.armijo > 0.0 && o.armijo < 1.0) || !(o.backtrack > 0.0 && o.backtrack < 1.0) {
            return Err(Error::Config("line-search constants must lie in (0,1)".into()));
        }
        if let ProbClip::Fixed(_) = self.prob_clip {
            self.prob_clip.resolve(2)?;
        }
        Ok(())
    }
}

/// Output of the matched-pairs estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub beta_hat: Vec<f64>,
    /// `None` entries are agents with no positive kernel weight.
    pub lambda_hat: Option<Vec<Option<f64>>>,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Total kernel weight over discordant pairs.
    pub effective_pair_mass: f64,
    pub notes: Vec<String>,
}

/// Kernel weights for `sample` from its codegree distances.
pub fn sample_weights(sample: &NetworkSample, kernel: &KernelSpec) -> Result<DMatrix<f64>> {
    let c = codegree_distance_matrix(sample.adjacency());
    weight_matrix(&c, kernel)
}

/// Estimates `β` with kernel weights computed from the sample's network.
pub fn estimate_beta(sample: &NetworkSample, config: &EstimatorConfig) -> Result<EstimationResult> {
    let w = sample_weights(sample, &config.kernel)?;
    estimate_beta_weighted(sample, &w, config)
}

/// Estimates `β` for given pair weights. Non-convergence is reported in the
/// result, not raised.
pub fn estimate_beta_weighted(
    sample: &NetworkSample,
    weights: &DMatrix<f64>,
    config: &EstimatorConfig,
) -> Result<EstimationResult> {
    config.validate()?;
    let pairs = DiscordantPairs::collect(sample, weights)?;
    let norm = config.normalization;
    let out = minimize(
        |b| pairs.evaluate(b, norm),
        DVector::zeros(sample.k()),
        &config.optimizer,
    );
    let mut notes = out.notes;
    notes.insert(0, format!("{} discordant pairs with positive weight", pairs.len()));
    Ok(EstimationResult {
        beta_hat: out.x.iter().copied().collect(),
        lambda_hat: None,
        converged: out.converged,
        iterations: out.iterations,
        gradient_norm: out.gradient_norm,
        effective_pair_mass: pairs.total_weight(),
        notes,
    })
}

/// Kernel-smoothed `P(yᵢ = 1)`: `Σⱼ yⱼ Wᵢⱼ / Σⱼ Wᵢⱼ` over all `j`, `i`
/// included.
pub fn estimate_prob_y(sample: &NetworkSample, weights: &DMatrix<f64>, i: usize) -> Result<f64> {
    let n = sample.n();
    if i >= n {
        return Err(Error::Validation(format!("agent {i} out of range 0..{n}")));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (j, &yj) in sample.y().iter().enumerate() {
        let w = weights[(i, j)];
        num += w * yj as f64;
        den += w;
    }
    if den.is_nan() || den <= 0.0 {
        return Err(Error::DegenerateMatching(format!(
            "agent {i} has no positive kernel weight"
        )));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaEstimates {
    pub values: Vec<Option<f64>>,
    pub notes: Vec<String>,
}

/// `λ̂(wᵢ) = (Σⱼ Wᵢⱼ)⁻¹ Σⱼ (F⁻¹(P̂ᵢ) − Xⱼ′β̂) Wᵢⱼ`, with `P̂ᵢ` clipped to
/// `[c, 1 − c]` before inversion.
pub fn estimate_lambda(
    sample: &NetworkSample,
    beta_hat: &[f64],
    weights: &DMatrix<f64>,
    config: &EstimatorConfig,
) -> Result<LambdaEstimates> {
    let (n, k) = (sample.n(), sample.k());
    if beta_hat.len() != k {
        return Err(Error::Validation(format!(
            "beta has {} components, sample has {k} covariates",
            beta_hat.len()
        )));
    }
    if beta_hat.iter().any(|b| !b.is_finite()) {
        return Err(Error::Validation("beta estimate is not finite".into()));
    }
    if weights.shape() != (n, n) {
        return Err(Error::Validation("weight matrix does not match the sample".into()));
    }
    let clip = config.prob_clip.resolve(n)?;
    let x = sample.x();
    let index: Vec<f64> = (0..n)
        .map(|j| (0..k).map(|c| x[(j, c)] * beta_hat[c]).sum())
        .collect();

    let mut values = Vec::with_capacity(n);
    let mut notes = Vec::new();
    let mut clipped = 0usize;
    for i in 0..n {
        let p = match estimate_prob_y(sample, weights, i) {
            Ok(p) => p,
            Err(e) => {
                notes.push(format!("lambda not estimable for agent {i}: {e}"));
                values.push(None);
                continue;
            }
        };
        let pc = p.clamp(clip, 1.0 - clip);
        if pc != p {
            clipped += 1;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            let w = weights[(i, j)];
            num += w * index[j];
            den += w;
        }
        values.push(Some(logit(pc)? - num / den));
    }
    if clipped > 0 {
        notes.push(format!("{clipped} smoothed probabilities clipped to [{clip:e}, 1 - {clip:e}]"));
    }
    Ok(LambdaEstimates { values, notes })
}

/// Full pipeline: distances, weights, `β̂`, then `λ̂`.
pub fn estimate(sample: &NetworkSample, config: &EstimatorConfig) -> Result<EstimationResult> {
    let w = sample_weights(sample, &config.kernel)?;
    let mut result = estimate_beta_weighted(sample, &w, config)?;
    let lambda = estimate_lambda(sample, &result.beta_hat, &w, config)?;
    result.lambda_hat = Some(lambda.values);
    result.notes.extend(lambda.notes);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Adjacency;

    fn path3() -> NetworkSample {
        let d = Adjacency::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let x = DMatrix::from_row_slice(3, 1, &[0.2, -0.4, 1.0]);
        NetworkSample::new(x, vec![1, 0, 1], d, None).unwrap()
    }

    #[test]
    fn prob_y_simple_cases() {
        let s = path3();
        let w = DMatrix::from_element(3, 3, 0.4);
        assert!((estimate_prob_y(&s, &w, 0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let ones = NetworkSample::new(
            DMatrix::zeros(3, 1),
            vec![1, 1, 1],
            Adjacency::empty(3),
            None,
        )
        .unwrap();
        assert_eq!(estimate_prob_y(&ones, &w, 2).unwrap(), 1.0);
        let zero = DMatrix::zeros(3, 3);
        assert!(matches!(
            estimate_prob_y(&s, &zero, 1),
            Err(Error::DegenerateMatching(_))
        ));
    }

    #[test]
    fn lambda_zero_at_half_probability() {
        let x = DMatrix::from_row_slice(4, 1, &[0.3, 0.1, -2.0, 1.0]);
        let s = NetworkSample::new(x, vec![1, 0, 1, 0], Adjacency::empty(4), None).unwrap();
        let w = DMatrix::from_element(4, 4, 1.0);
        let l = estimate_lambda(&s, &[0.0], &w, &EstimatorConfig::default()).unwrap();
        assert!(l.values.iter().all(|v| v.unwrap().abs() < 1e-15));
    }

    #[test]
    fn lambda_clips_certain_outcomes() {
        let s = NetworkSample::new(
            DMatrix::zeros(3, 1),
            vec![1, 1, 1],
            Adjacency::empty(3),
            None,
        )
        .unwrap();
        let w = DMatrix::from_element(3, 3, 0.75);
        let l = estimate_lambda(&s, &[1.0], &w, &EstimatorConfig::default()).unwrap();
        // clip = 1/4, logit(3/4) = ln 3
        for v in &l.values {
            assert!((v.unwrap() - 3f64.ln()).abs() < 1e-14);
        }
        assert!(l.notes.iter().any(|n| n.contains("clipped")));
    }

    #[test]
    fn lambda_flags_unmatched_agents() {
        let s = path3();
        let mut w = DMatrix::from_element(3, 3, 0.5);
        for j in 0..3 {
            w[(1, j)] = 0.0;
        }
        let l = estimate_lambda(&s, &[1.0], &w, &EstimatorConfig::default()).unwrap();
        assert!(l.values[1].is_none());
        assert!(l.values[0].is_some() && l.values[2].is_some());
    }

    #[test]
    fn clip_validation() {
        assert_eq!(ProbClip::Auto.resolve(9).unwrap(), 0.1);
        assert!(ProbClip::Fixed(0.5).resolve(9).is_err());
        assert!(ProbClip::Fixed(0.0).resolve(9).is_err());
    }

    #[test]
    fn single_pair_separation_does_not_converge() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let s = NetworkSample::new(x, vec![1, 0], Adjacency::empty(2), None).unwrap();
        let w = DMatrix::from_element(2, 2, 1.0);
        let r = estimate_beta_weighted(&s, &w, &EstimatorConfig::default()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 100);
        assert!(r.beta_hat[0] > 10.0);
    }
}
