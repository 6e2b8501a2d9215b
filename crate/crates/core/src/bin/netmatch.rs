//! Command-line front end: simulate samples, compute codegree distances,
//! estimate on user data and run Monte Carlo studies.
//!
//! Exit codes: 0 success, 2 usage/configuration, 3 input validation,
//! 4 degenerate matching, 5 non-convergence (result still written),
//! 1 other I/O failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use netmatch::distance::{codegree_distance_matrix, BandwidthRule, Kernel};
use netmatch::estimators::{estimate, EstimatorConfig, ProbClip};
use netmatch::io;
use netmatch::montecarlo::{design, emit_report, parse_design, run_study, ReportFormat, StudyDesign};
use netmatch::{Error, LinkFunction, SocialInfluence, TrueParameters};

#[derive(Parser)]
#[command(name = "netmatch", version, about = "Network-matching estimators for binary outcomes")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LinkArg {
    Blockmodel,
    Beta,
    Homophily,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum LambdaArg {
    Reference,
    Zero,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Epanechnikov,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Csv,
    Bin,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Csv,
    Json,
    Markdown,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one sample and write edges.csv, covariates.csv and sample.json.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "blockmodel")]
        link: LinkArg,
        /// Value grid (m rows of m comma-separated values) for --link grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "reference")]
        lambda: LambdaArg,
        /// True slope, repeated for every covariate.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute the codegree distance matrix of an edge list.
    Distance {
        #[arg(long)]
        edges: PathBuf,
        /// Covariate file; fixes the number of agents.
        #[arg(long)]
        covariates: Option<PathBuf>,
        /// Number of agents when no covariate file is given.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: MatrixFormat,
    },
    /// Estimate the slope and social influence from observed data.
    Estimate {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        covariates: PathBuf,
        /// Fixed bandwidth (default n^(-1/9)/10).
        #[arg(long)]
        bandwidth: Option<f64>,
        #[arg(long, value_enum, default_value = "epanechnikov")]
        kernel: KernelArg,
        /// Probability clip before logit inversion (default 1/(n+1)).
        #[arg(long)]
        clip: Option<f64>,
        /// Result JSON path.
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV of the social-influence estimates.
        #[arg(long)]
        lambda_out: Option<PathBuf>,
    },
    /// Run a Monte Carlo study and write report.{csv,json,md}.
    Mc {
        /// Design file; the reference design is used when omitted.
        #[arg(long)]
        design: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, env = "NETMATCH_JOBS")]
        jobs: Option<usize>,
        /// Overrides the design's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the design's bandwidth.
        #[arg(long)]
        bandwidth: Option<f64>,
        /// Report formats to write (default: all).
        #[arg(long, value_enum)]
        format: Vec<ReportArg>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Validation(_)
        | Error::Parse { .. }
        | Error::Domain(_)
        | Error::Precondition(_)
        | Error::Json(_) => 3,
        Error::DegenerateMatching(_) => 4,
        Error::NonConvergence(_) | Error::Separation(_) => 5,
        Error::Io { .. } => 1,
    }
}

fn build_link(link: LinkArg, grid: Option<&Path>) -> netmatch::Result<LinkFunction> {
    Ok(match link {
        LinkArg::Blockmodel => LinkFunction::Blockmodel,
        LinkArg::Beta => LinkFunction::Beta,
        LinkArg::Homophily => LinkFunction::Homophily,
        LinkArg::Grid => {
            let path = grid.ok_or_else(|| Error::Config("--link grid needs --grid <csv>".into()))?;
            design::read_grid_link(path)?
        }
    })
}

fn ensure_dir(dir: &Path) -> netmatch::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli) -> netmatch::Result<u8> {
    match cli.command {
        Command::Simulate {
            n,
            k,
            link,
            grid,
            seed,
            lambda,
            beta,
            out,
        } => {
            if k == 0 {
                return Err(Error::Config("--k must be at least 1".into()));
            }
            let link = build_link(link, grid.as_deref())?;
            let lambda = match lambda {
                LambdaArg::Reference => SocialInfluence::Reference,
                LambdaArg::Zero => SocialInfluence::Zero,
            };
            let params = TrueParameters::new(vec![beta; k], lambda)?;
            let sample = netmatch::simulate_sample(n, &link, &params, seed)?;
            ensure_dir(&out)?;
            io::write_atomic(&out.join("edges.csv"), io::edges_to_csv(sample.adjacency()).as_bytes())?;
            io::write_atomic(
                &out.join("covariates.csv"),
                io::covariates_to_csv(sample.x(), sample.y()).as_bytes(),
            )?;
            io::write_atomic(&out.join("sample.json"), io::sample_to_json(&sample)?.as_bytes())?;
            info!("simulated {n} agents with {} edges", sample.adjacency().edges().len());
            Ok(0)
        }
        Command::Distance {
            edges,
            covariates,
            n,
            out,
            format,
        } => {
            let list = io::read_edges(&edges)?;
            let n = match (covariates, n) {
                (Some(c), _) => io::read_covariates(&c)?.y.len(),
                (None, Some(n)) => n,
                (None, None) => list
                    .iter()
                    .map(|&(_, j)| j + 1)
                    .max()
                    .ok_or_else(|| Error::Config("empty edge list: pass --n or --covariates".into()))?,
            };
            let adj = netmatch::Adjacency::from_edges(n, &list)?;
            let c = codegree_distance_matrix(&adj);
            let bytes = match format {
                MatrixFormat::Csv => io::codegree_to_csv(&c).into_bytes(),
                MatrixFormat::Bin => io::codegree_to_bytes(&c),
            };
            io::write_atomic(&out, &bytes)?;
            Ok(0)
        }
        Command::Estimate {
            edges,
            covariates,
            bandwidth,
            kernel,
            clip,
            out,
            lambda_out,
        } => {
            let sample = io::load_sample(&edges, &covariates)?;
            let mut config = EstimatorConfig::default();
            config.kernel.kernel = match kernel {
                KernelArg::Epanechnikov => Kernel::Epanechnikov,
            };
            if let Some(h) = bandwidth {
                config.kernel.bandwidth = BandwidthRule::Fixed(h);
            }
            if let Some(c) = clip {
                config.prob_clip = ProbClip::Fixed(c);
            }
            config.validate()?;
            let result = estimate(&sample, &config)?;
            let mut json = serde_json::to_string_pretty(&result)?;
            json.push('\n');
            io::write_atomic(&out, json.as_bytes())?;
            if let (Some(path), Some(values)) = (lambda_out, &result.lambda_hat) {
                io::write_atomic(&path, io::lambda_to_csv(values).as_bytes())?;
            }
            info!("beta_hat = {:?}, converged = {}", result.beta_hat, result.converged);
            Ok(if result.converged { 0 } else { 5 })
        }
        Command::Mc {
            design,
            out,
            jobs,
            seed,
            bandwidth,
            format,
        } => {
            let mut study = match &design {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    parse_design(&text, path.parent())?
                }
                None => StudyDesign::default(),
            };
            if let Some(s) = seed {
                study.master_seed = s;
            }
            if let Some(h) = bandwidth {
                study.config.kernel.bandwidth = BandwidthRule::Fixed(h);
            }
            let report = run_study(&study, jobs)?;
            ensure_dir(&out)?;
            let formats: Vec<ReportFormat> = if format.is_empty() {
                ReportFormat::ALL.to_vec()
            } else {
                format
                    .iter()
                    .map(|f| match f {
                        ReportArg::Csv => ReportFormat::Csv,
                        ReportArg::Json => ReportFormat::Json,
                        ReportArg::Markdown => ReportFormat::Markdown,
                    })
                    .collect()
            };
            for f in formats {
                let path = out.join(format!("report.{}", f.extension()));
                io::write_atomic(&path, emit_report(&report, f)?.as_bytes())?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("netmatch: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
