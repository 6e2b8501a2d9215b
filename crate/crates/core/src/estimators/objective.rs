//! Kernel-weighted pairwise conditional-logit objective.
//!
//! For a discordant pair `(i, j)` (`yᵢ ≠ yⱼ`) with `Δᵢⱼ = Xᵢ − Xⱼ`, the
//! summand `yᵢ ln F(Δᵢⱼ′b) + yⱼ ln F(−Δᵢⱼ′b)` reduces to `ln F(zᵢⱼ′b)` with
//! `zᵢⱼ = Δᵢⱼ` if `yᵢ = 1` and `−Δᵢⱼ` otherwise. Only unordered pairs `i < j`
//! are stored.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::newton::SecondOrder;
use crate::model::{log_logistic_cdf, logistic_cdf, NetworkSample};

/// Scaling applied to the weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Sum,
    /// Divide by the total weight of the discordant pairs.
    Mean,
}

/// Pair chunk size for deterministic parallel accumulation.
const CHUNK: usize = 4096;

/// Discordant pairs carrying positive kernel weight.
#[derive(Debug, Clone)]
pub struct DiscordantPairs {
    k: usize,
    /// Signed covariate differences, `k` per pair.
    z: Vec<f64>,
    weights: Vec<f64>,
    total_weight: f64,
}

impl DiscordantPairs {
    /// Collects the discordant pairs of `sample` with `Wᵢⱼ > 0`.
    pub fn collect(sample: &NetworkSample, weights: &DMatrix<f64>) -> Result<Self> {
        let n = sample.n();
        if weights.shape() != (n, n) {
            return Err(Error::Validation(format!(
                "weight matrix is {}x{}, sample has {n} agents",
                weights.nrows(),
                weights.ncols()
            )));
        }
        let k = sample.k();
        let (x, y) = (sample.x(), sample.y());
        let mut z = Vec::new();
        let mut w = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if y[i] == y[j] {
                    continue;
                }
                let wij = weights[(i, j)];
                if !wij.is_finite() || wij < 0.0 {
                    return Err(Error::Validation(format!(
                        "weight ({i},{j}) = {wij} is not a non-negative number"
                    )));
                }
                if wij == 0.0 {
                    continue;
                }
                let sign = if y[i] == 1 { 1.0 } else { -1.0 };
                for c in 0..k {
                    z.push(sign * (x[(i, c)] - x[(j, c)]));
                }
                w.push(wij);
            }
        }
        let total_weight = chunked_sum(&w);
        if w.is_empty() || total_weight <= 0.0 {
            return Err(Error::DegenerateMatching(
                "no discordant pair carries positive kernel weight".into(),
            ));
        }
        Ok(DiscordantPairs {
            k,
            z,
            weights: w,
            total_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ Wᵢⱼ` over discordant pairs.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Value, gradient and hessian of the negative weighted log-likelihood.
    ///
    /// Pairs are accumulated in fixed-size chunks whose partial sums are
    /// combined in order, so the result does not depend on the thread count.
    pub fn evaluate(&self, b: &DVector<f64>, normalization: Normalization) -> SecondOrder {
        let k = self.k;
        let partials: Vec<(f64, Vec<f64>, Vec<f64>)> = self
            .weights
            .par_chunks(CHUNK)
            .zip(self.z.par_chunks(CHUNK * k))
            .map(|(ws, zs)| {
                let mut value = 0.0;
                let mut grad = vec![0.0; k];
                let mut hess = vec![0.0; k * k];
                for (w, z) in ws.iter().zip(zs.chunks_exact(k)) {
                    let u: f64 = z.iter().zip(b.iter()).map(|(a, b)| a * b).sum();
                    let p = logistic_cdf(u);
                    let q = logistic_cdf(-u);
                    value -= w * log_logistic_cdf(u);
                    let gq = w * q;
                    let hq = w * p * q;
                    for r in 0..k {
                        grad[r] -= gq * z[r];
                        for c in 0..=r {
                            hess[r * k + c] += hq * z[r] * z[c];
                        }
                    }
                }
                (value, grad, hess)
            })
            .collect();

        let scale = match normalization {
            Normalization::Sum => 1.0,
            Normalization::Mean => 1.0 / self.total_weight,
        };
        let mut value = 0.0;
        let mut gradient = DVector::zeros(k);
        let mut hessian = DMatrix::zeros(k, k);
        for (v, g, h) in &partials {
            value += v;
            for r in 0..k {
                gradient[r] += g[r];
                for c in 0..=r {
                    hessian[(r, c)] += h[r * k + c];
                }
            }
        }
        for r in 0..k {
            for c in 0..r {
                hessian[(c, r)] = hessian[(r, c)];
            }
        }
        SecondOrder {
            value: value * scale,
            gradient: gradient * scale,
            hessian: hessian * scale,
        }
    }
}

fn chunked_sum(v: &[f64]) -> f64 {
    v.chunks(CHUNK).map(|c| c.iter().sum::<f64>()).sum()
}

/// The weighted pairwise objective at `b`.
pub fn pairwise_objective(
    b: &DVector<f64>,
    sample: &NetworkSample,
    weights: &DMatrix<f64>,
    normalization: Normalization,
) -> Result<SecondOrder> {
    if b.len() != sample.k() {
        return Err(Error::Validation(format!(
            "parameter has {} components, sample has {} covariates",
            b.len(),
            sample.k()
        )));
    }
    Ok(DiscordantPairs::collect(sample, weights)?.evaluate(b, normalization))
}
