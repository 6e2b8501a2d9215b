//! Damped Newton minimisation with Armijo backtracking for smooth convex
//! objectives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Objective value with its gradient and hessian at a point.
#[derive(Debug, Clone)]
pub struct SecondOrder {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Convergence needs `‖∇f‖ ≤ gradient_tolerance`.
    pub gradient_tolerance: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Step shrink factor per backtracking round.
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iterations: 100,
            gradient_tolerance: 1e-8,
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub x: DVector<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub notes: Vec<String>,
}

/// Newton direction `−H⁻¹g`. Falls back to a ridge-regularised system and
/// finally to steepest descent when `H` is not numerically positive definite.
fn direction(eval: &SecondOrder) -> (DVector<f64>, Option<&'static str>) {
    let g = &eval.gradient;
    if let Some(ch) = eval.hessian.clone().cholesky() {
        let p = -ch.solve(g);
        if p.iter().all(|v| v.is_finite()) {
            return (p, None);
        }
    }
    let k = g.len();
    let scale = eval.hessian.diagonal().amax().max(1e-300);
    let mut ridge = 1e-10 * scale;
    for _ in 0..40 {
        let h = &eval.hessian + DMatrix::identity(k, k) * ridge;
        if let Some(ch) = h.cholesky() {
            let p = -ch.solve(g);
            if p.iter().all(|v| v.is_finite()) {
                return (p, Some("hessian regularised"));
            }
        }
        ridge *= 10.0;
    }
    (-g.clone(), Some("steepest descent fallback"))
}

/// Minimises `f` from `x0`.
///
/// The run counts as converged once the gradient norm is within tolerance
/// and the Newton step has become negligible; a last full Newton step is
/// then applied if it lowers the gradient further. Under perfect separation
/// the gradient vanishes while Newton steps stay of order one, so such runs
/// exhaust `max_iterations` and come back unconverged.
pub fn minimize<F>(mut f: F, x0: DVector<f64>, opts: &NewtonOptions) -> NewtonOutcome
where
    F: FnMut(&DVector<f64>) -> SecondOrder,
{
    let mut notes = Vec::new();
    let mut x = x0;
    let mut cur = f(&x);
    let mut iterations = 0;

    let finish = |x, cur: &SecondOrder, converged, iterations, notes| NewtonOutcome {
        x,
        value: cur.value,
        gradient_norm: cur.gradient.norm(),
        converged,
        iterations,
        notes,
    };

    loop {
        if !cur.value.is_finite() || cur.gradient.iter().any(|v| !v.is_finite()) {
            notes.push(format!("non-finite objective after {iterations} iterations"));
            return finish(x, &cur, false, iterations, notes);
        }
        let (p, note) = direction(&cur);
        let gnorm = cur.gradient.norm();
        let step_tol = 1e-6 * (1.0 + x.norm());
        if gnorm <= opts.gradient_tolerance && p.norm() <= step_tol {
            let polished_x = &x + &p;
            let polished = f(&polished_x);
            if polished.value.is_finite() && polished.gradient.norm() <= gnorm {
                return finish(polished_x, &polished, true, iterations, notes);
            }
            return finish(x, &cur, true, iterations, notes);
        }
        if iterations >= opts.max_iterations {
            notes.push(format!(
                "reached {} iterations with gradient norm {gnorm:e}",
                opts.max_iterations
            ));
            return finish(x, &cur, false, iterations, notes);
        }
        if let Some(n) = note {
            if !notes.iter().any(|s| s == n) {
                notes.push(n.to_string());
            }
        }

        let slope = cur.gradient.dot(&p);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let cand_x = &x + &p * alpha;
            let cand = f(&cand_x);
            let sufficient = cand.value <= cur.value + opts.armijo * alpha * slope;
            // value differences at rounding level carry no information
            let level = (cand.value - cur.value).abs() <= 8.0 * f64::EPSILON * cur.value.abs().max(1.0)
                && cand.gradient.norm() < gnorm;
            if cand.value.is_finite() && (sufficient || level) {
                accepted = Some((cand_x, cand));
                break;
            }
            alpha *= opts.backtrack;
        }
        match accepted {
            Some((nx, next)) => {
                x = nx;
                cur = next;
                iterations += 1;
            }
            None => {
                // no representable decrease left along the Newton direction
                let converged = gnorm <= opts.gradient_tolerance;
                if !converged {
                    notes.push(format!(
                        "line search failed at iteration {iterations} with gradient norm {gnorm:e}"
                    ));
                }
                return finish(x, &cur, converged, iterations, notes);
            }
        }
    }
}
