//! Replications and their aggregation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::BandwidthRule;
use crate::error::{Error, Result};
use crate::estimators::{
    baseline_infeasible, baseline_naive, baseline_with_controls, estimate_beta,
};
use crate::montecarlo::design::{EstimatorKind, StudyDesign};
use crate::rng::cell_rng;
use crate::simulate::{simulate_with, SimulationSetup};

/// Outcome of one estimator on one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateOutcome {
    /// `β̂ − β` for the first slope component.
    Bias(f64),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub n: usize,
    pub rep_index: usize,
    pub outcomes: BTreeMap<EstimatorKind, EstimateOutcome>,
}

fn run_estimator(
    kind: EstimatorKind,
    design: &StudyDesign,
    sample: &crate::model::NetworkSample,
) -> Result<f64> {
    let slope = match kind {
        EstimatorKind::Matched => {
            let r = estimate_beta(sample, &design.config)?;
            if !r.converged {
                return Err(Error::NonConvergence(r.notes.join("; ")));
            }
            r.beta_hat[0]
        }
        EstimatorKind::Naive => baseline_naive(sample)?[0],
        EstimatorKind::Infeasible => baseline_infeasible(sample, &design.params.lambda)?[0],
        EstimatorKind::WithControls => baseline_with_controls(sample)?[0],
    };
    Ok(slope - design.params.beta[0])
}

/// Simulates the sample of cell `(n, rep_index)` and runs every requested
/// estimator on it. Failures are recorded, not raised.
pub fn run_replication(design: &StudyDesign, n: usize, rep_index: usize) -> ReplicationRecord {
    let mut outcomes = BTreeMap::new();
    let setup = SimulationSetup::new(design.link.clone(), design.params.clone());
    let mut rng = cell_rng(design.master_seed, n, rep_index);
    match simulate_with(n, &setup, &mut rng) {
        Ok(sample) => {
            for kind in design.ordered_estimators() {
                let out = match run_estimator(kind, design, &sample) {
                    Ok(b) => EstimateOutcome::Bias(b),
                    Err(e) => EstimateOutcome::Failed(e.to_string()),
                };
                outcomes.insert(kind, out);
            }
        }
        Err(e) => {
            for kind in design.ordered_estimators() {
                outcomes.insert(kind, EstimateOutcome::Failed(format!("simulation: {e}")));
            }
        }
    }
    ReplicationRecord {
        n,
        rep_index,
        outcomes,
    }
}

/// Aggregate statistics of one `(n, estimator)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub estimator: EstimatorKind,
    pub mean_bias: Option<f64>,
    pub mean_absolute_error: Option<f64>,
    pub std_dev: Option<f64>,
    pub used_replications: usize,
    pub failed_replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureNote {
    pub n: usize,
    pub rep_index: usize,
    pub estimator: EstimatorKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignEcho {
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub link: String,
    pub lambda: String,
    pub beta: Vec<f64>,
    pub estimators: Vec<EstimatorKind>,
    pub master_seed: u64,
    pub bandwidth: String,
    /// Stream id layout of the per-cell generators.
    pub seeding: String,
}

impl DesignEcho {
    fn from_design(d: &StudyDesign) -> Self {
        DesignEcho {
            sample_sizes: d.sample_sizes.clone(),
            replications: d.replications,
            link: d.link.name().to_string(),
            lambda: d.params.lambda.name().to_string(),
            beta: d.params.beta.clone(),
            estimators: d.ordered_estimators(),
            master_seed: d.master_seed,
            bandwidth: match d.config.kernel.bandwidth {
                BandwidthRule::Standard => "n^(-1/9)/10".to_string(),
                BandwidthRule::Fixed(h) => h.to_string(),
            },
            seeding: "ChaCha8(master_seed) stream 1 + (n << 32 | rep_index)".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub design: DesignEcho,
    pub cells: Vec<CellSummary>,
    pub failures: Vec<FailureNote>,
}

impl StudyReport {
    pub fn cell(&self, n: usize, estimator: EstimatorKind) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.n == n && c.estimator == estimator)
    }
}

/// Mean, mean absolute value and sample standard deviation.
fn summarize(values: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None, None);
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let mae = values.iter().map(|v| v.abs()).sum::<f64>() / m;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(mae), Some(sd))
}

/// Aggregates replication records in design order.
pub fn aggregate(design: &StudyDesign, records: &[ReplicationRecord]) -> StudyReport {
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for &n in &design.sample_sizes {
        for kind in design.ordered_estimators() {
            let mut used = Vec::new();
            let mut failed = 0;
            let mut recs: Vec<&ReplicationRecord> = records.iter().filter(|r| r.n == n).collect();
            recs.sort_by_key(|r| r.rep_index);
            for r in recs {
                match r.outcomes.get(&kind) {
                    Some(EstimateOutcome::Bias(b)) => used.push(*b),
                    Some(EstimateOutcome::Failed(reason)) => {
                        failed += 1;
                        failures.push(FailureNote {
                            n,
                            rep_index: r.rep_index,
                            estimator: kind,
                            reason: reason.clone(),
                        });
                    }
                    None => {}
                }
            }
            let (mean_bias, mean_absolute_error, std_dev) = summarize(&used);
            cells.push(CellSummary {
                n,
                estimator: kind,
                mean_bias,
                mean_absolute_error,
                std_dev,
                used_replications: used.len(),
                failed_replications: failed,
            });
        }
    }
    StudyReport {
        design: DesignEcho::from_design(design),
        cells,
        failures,
    }
}

/// Runs every `(n, replication)` cell and aggregates.
///
/// `jobs` bounds the worker count (`None` uses the global pool). Each cell
/// owns its random stream and result slot, so the report does not depend on
/// `jobs` or on scheduling.
pub fn run_study(design: &StudyDesign, jobs: Option<usize>) -> Result<StudyReport> {
    design.validate()?;
    let mut sizes = design.sample_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let tasks: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..design.replications).map(move |r| (n, r)))
        .collect();
    let work = || -> Vec<ReplicationRecord> {
        tasks
            .par_iter()
            .map(|&(n, r)| run_replication(design, n, r))
            .collect()
    };
    let records = match jobs {
        Some(j) => {
            if j == 0 {
                return Err(Error::Config("job count must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
                .install(work)
        }
        None => work(),
    };
    let mut design = design.clone();
    design.sample_sizes = sizes;
    Ok(aggregate(&design, &records))
}
