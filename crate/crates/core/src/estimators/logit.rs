//! Maximum-likelihood logit and the comparison estimators built on it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::estimators::newton::{minimize, NewtonOptions, SecondOrder};
use crate::model::{log_logistic_cdf, logistic_cdf, NetworkSample, SocialInfluence};

#[derive(Debug, Clone, PartialEq)]
pub struct LogitFit {
    /// Intercept first when one was requested, then one entry per feature.
    pub coefficients: Vec<f64>,
    pub converged: bool,
    /// The data are (quasi-)perfectly separated; coefficients diverge.
    pub separated: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub notes: Vec<String>,
}

/// Mean negative log-likelihood of a logit with design `z` (rows = observations).
fn neg_loglik(z: &DMatrix<f64>, y: &[u8], b: &DVector<f64>) -> SecondOrder {
    let scale = 1.0 / z.nrows() as f64;
    let eta = z * b;
    let m = z.ncols();
    let mut value = 0.0;
    let mut resid = DVector::zeros(z.nrows());
    let mut curv = DVector::zeros(z.nrows());
    for (i, &e) in eta.iter().enumerate() {
        let yi = y[i] as f64;
        value -= if y[i] == 1 {
            log_logistic_cdf(e)
        } else {
            log_logistic_cdf(-e)
        };
        let p = logistic_cdf(e);
        resid[i] = p - yi;
        curv[i] = p * logistic_cdf(-e);
    }
    let gradient = z.transpose() * &resid * scale;
    let mut hessian = DMatrix::zeros(m, m);
    for r in 0..m {
        for c in 0..=r {
            let h: f64 = (0..z.nrows()).map(|i| curv[i] * z[(i, r)] * z[(i, c)]).sum::<f64>() * scale;
            hessian[(r, c)] = h;
            hessian[(c, r)] = h;
        }
    }
    SecondOrder {
        value: value * scale,
        gradient,
        hessian,
    }
}

/// Logistic regression by damped Newton iterations from zero.
///
/// Separation is flagged, never raised: `separated` is set when the linear
/// predictor classifies every observation strictly correctly, or when the
/// fit fails to converge with coefficients running off.
pub fn fit_logit_mle(features: &DMatrix<f64>, y: &[u8], include_intercept: bool) -> Result<LogitFit> {
    let n = features.nrows();
    if y.len() != n {
        return Err(Error::Validation(format!(
            "{n} feature rows but {} outcomes",
            y.len()
        )));
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::Validation("outcomes must be 0/1".into()));
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("features contain non-finite values".into()));
    }
    let m = features.ncols() + include_intercept as usize;
    if n <= m {
        return Err(Error::Validation(format!(
            "need more observations ({n}) than coefficients ({m})"
        )));
    }
    let z = if include_intercept {
        let mut z = DMatrix::from_element(n, m, 1.0);
        z.columns_mut(1, m - 1).copy_from(features);
        z
    } else {
        features.clone()
    };

    let out = minimize(|b| neg_loglik(&z, y, b), DVector::zeros(m), &NewtonOptions::default());
    let eta = &z * &out.x;
    let perfect = eta
        .iter()
        .zip(y)
        .all(|(&e, &yi)| (yi == 1 && e > 0.0) || (yi == 0 && e < 0.0));
    // a finite maximiser cannot classify every observation strictly correctly
    let separated = perfect || (!out.converged && out.x.amax() > 25.0);
    let mut notes = out.notes;
    if separated {
        notes.push(format!(
            "perfect separation: coefficient norm {:.3e} diverging",
            out.x.norm()
        ));
    }
    Ok(LogitFit {
        coefficients: out.x.iter().copied().collect(),
        converged: out.converged && !separated,
        separated,
        iterations: out.iterations,
        gradient_norm: out.gradient_norm,
        notes,
    })
}

/// Fits with intercept and returns the coefficients of the first `k`
/// features, turning separation and non-convergence into errors.
fn slopes(features: DMatrix<f64>, y: &[u8], k: usize, label: &str) -> Result<Vec<f64>> {
    let fit = fit_logit_mle(&features, y, true)?;
    if fit.separated {
        return Err(Error::Separation(format!("{label}: {}", fit.notes.join("; "))));
    }
    if !fit.converged {
        return Err(Error::NonConvergence(format!("{label}: {}", fit.notes.join("; "))));
    }
    Ok(fit.coefficients[1..=k].to_vec())
}

/// Logit of `y` on `X` alone.
pub fn baseline_naive(sample: &NetworkSample) -> Result<Vec<f64>> {
    slopes(sample.x().clone(), sample.y(), sample.k(), "naive logit")
}

/// Logit of `y` on `X` and the true `λ(wᵢ)`, with a free coefficient on
/// `λ`. Needs the latent draws.
pub fn baseline_infeasible(sample: &NetworkSample, lambda: &SocialInfluence) -> Result<Vec<f64>> {
    let latent = sample.latent().ok_or_else(|| {
        Error::Precondition("the infeasible logit needs the latent social characteristics".into())
    })?;
    let (n, k) = (sample.n(), sample.k());
    let mut z = DMatrix::zeros(n, k + 1);
    z.columns_mut(0, k).copy_from(sample.x());
    let mut constant = true;
    for (i, &w) in latent.w.iter().enumerate() {
        z[(i, k)] = lambda.eval(w)?;
        constant &= z[(i, k)] == z[(0, k)];
    }
    if constant {
        // λ(w) collinear with the intercept; drop it
        return slopes(sample.x().clone(), sample.y(), k, "infeasible logit");
    }
    slopes(z, sample.y(), k, "infeasible logit")
}

/// Logit of `y` on `X`, the neighbour covariate sums `Σⱼ Dᵢⱼ Xⱼ` and the
/// neighbour outcome sum `Σⱼ Dᵢⱼ yⱼ`. Isolated agents get zero controls.
pub fn baseline_with_controls(sample: &NetworkSample) -> Result<Vec<f64>> {
    let (n, k) = (sample.n(), sample.k());
    let (x, y, d) = (sample.x(), sample.y(), sample.adjacency());
    let mut z = DMatrix::zeros(n, 2 * k + 1);
    z.columns_mut(0, k).copy_from(x);
    for i in 0..n {
        let row = d.row(i);
        for (j, &dij) in row.iter().enumerate() {
            if dij == 1 {
                for c in 0..k {
                    z[(i, k + c)] += x[(j, c)];
                }
                z[(i, 2 * k)] += y[j] as f64;
            }
        }
    }
    slopes(z, y, k, "logit with controls")
}
