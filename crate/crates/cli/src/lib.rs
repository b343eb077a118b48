//! Command-line front end of `planimetric`.
//!
//! Exit codes: 0 when every certificate passes, 1 when one fails, 2 on
//! invalid input, 3 on engine or IO errors.

pub mod config;
pub mod report;

use planimetric::distances::DistanceEngine;
use planimetric::kernel::bergman_metric_numeric;
use planimetric::verify::{self, Certificate, SamplePlan};
use planimetric::{ComplexPoint, Domain, Error};
use thiserror::Error as ThisError;

pub use config::{parse_config, Command, Format, MetricKind, RunConfig, Suite};
pub use report::{Outcome, Report, CSV_COLUMNS};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "PLANIMETRIC_THREADS";

/// Minimum boundary distance of monotonicity sample points.
const MONOTONICITY_DEPTH: f64 = 0.05;

#[derive(Debug, ThisError)]
pub enum CliError {
    /// Help or version text requested.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Engine(Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Invalid(_) => 2,
            CliError::Engine(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    /// Errors caused by the request itself count as invalid input.
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDomain(_)
            | Error::InvalidPlan(_)
            | Error::PointOutsideDomain { .. }
            | Error::NonFinite(_)
            | Error::NotNested { .. }
            | Error::UnsupportedDomain { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Engine(e),
        }
    }
}

/// Applies [`THREADS_ENV`] to the global worker pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("{THREADS_ENV} must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Executes a validated configuration.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let domain = config.domain()?;
    let engine = DistanceEngine::with_options(domain.clone(), config.options);
    let point = |p: Option<config::Point>| ComplexPoint::from(p.expect("validated"));
    let outcome = match config.command {
        Command::Distance => {
            let metric = config.metric.expect("validated");
            let (z, w) = (point(config.z), point(config.w));
            let estimate = match metric {
                MetricKind::Bergman => engine.bergman(z, w)?,
                MetricKind::Kobayashi => engine.kobayashi(z, w)?,
                MetricKind::Caratheodory => engine.caratheodory(z, w)?,
            };
            Outcome::Distance {
                metric: metric.as_str().into(),
                estimate,
            }
        }
        Command::Metric => {
            let metric = config.metric.expect("validated");
            let z = point(config.z);
            let value = match metric {
                MetricKind::Bergman => bergman_metric_numeric(&domain, z)?,
                MetricKind::Kobayashi => engine.kobayashi_metric(z)?,
                MetricKind::Caratheodory => engine.caratheodory_metric(z)?,
            };
            Outcome::Metric {
                metric: metric.as_str().into(),
                value,
            }
        }
        Command::Certify => Outcome::Certificates(certify(config, domain)?),
        Command::Sweep => Outcome::Certificates(
            config
                .regimes
                .as_deref()
                .unwrap_or_default()
                .iter()
                .map(|&r| verify::lemma4_sharpness_sweep(r))
                .collect::<Result<_, _>>()?,
        ),
    };
    Ok(Report::new(config.clone(), outcome))
}

fn certify(config: &RunConfig, domain: Domain) -> Result<Vec<Certificate>, CliError> {
    let suite = config.suite.expect("validated");
    let settings = config.plan.as_ref().expect("validated");
    let plan = SamplePlan::new(domain.clone(), config.seed)
        .with_ladder(&settings.ladder)
        .with_per_rung(settings.per_rung)
        .with_bulk(settings.bulk)
        .with_options(config.options);
    let cert = match suite {
        Suite::Lemma4 => verify::lemma4_enclosure(&plan)?,
        Suite::Prop1 => verify::prop1_certificate(&plan)?,
        Suite::Cor2 => verify::corollary2_gap(&plan)?,
        Suite::Prop3 => verify::prop3_sweep(&plan)?,
        Suite::RemarkD => verify::remark_d_limit(&plan)?,
        Suite::Monotonicity => {
            let points = verify::sample_points(&domain, settings.points, config.seed, MONOTONICITY_DEPTH)?;
            verify::monotonicity_check(&domain, &Domain::unit_disc(), &points)?
        }
        Suite::Isolated => verify::isolated_point_check(&settings.ladder)?,
    };
    Ok(vec![cert])
}

/// Parses, runs and emits; returns the process exit code. Diagnostics go to
/// standard error as single lines.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_config(args) {
        Ok(c) => c,
        Err(CliError::Help(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            // the report still records what was attempted
            if config.output.format == Format::Json && config.output.path.is_some() {
                let failed = Report::new(config.clone(), Outcome::Error { message: e.to_string() });
                if let Err(io) = failed.emit() {
                    eprintln!("error: {io}");
                }
            }
            return e.exit_code();
        }
    };
    if let Err(e) = report.emit() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    if let Outcome::Certificates(certs) = &report.outcome {
        for c in certs {
            let failed: Vec<&str> = c.checks.iter().filter(|k| !k.passed).map(|k| k.name.as_str()).collect();
            eprintln!(
                "{} on {}: {} (worst margin {:e}{}{})",
                c.suite,
                c.domain,
                if c.passed { "PASS" } else { "FAIL" },
                c.worst_margin,
                if failed.is_empty() { "" } else { ", failed checks: " },
                failed.join(", ")
            );
        }
    }
    if report.passed {
        0
    } else {
        1
    }
}
