//! Run configuration: command-line parsing, config files, and defaults.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use planimetric::distances::EngineOptions;
use planimetric::verify::{SharpnessRegime, DEFAULT_LADDER};
use planimetric::{ComplexPoint, Domain, DomainSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Default per-rung pair count of generated plans.
pub const DEFAULT_PER_RUNG: usize = 16;
/// Default bulk pair count of the Lemma 4 enclosure suite.
pub const DEFAULT_LEMMA4_BULK: usize = 10_000;
/// Default point count of the monotonicity suite.
pub const DEFAULT_MONOTONICITY_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Distance,
    Metric,
    Certify,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Bergman,
    Kobayashi,
    Caratheodory,
}

impl MetricKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::Bergman => "bergman",
            MetricKind::Kobayashi => "kobayashi",
            MetricKind::Caratheodory => "caratheodory",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemma4,
    Prop1,
    Cor2,
    Prop3,
    #[value(name = "remark_d")]
    RemarkD,
    Monotonicity,
    Isolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// A point of the plane as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl From<Point> for ComplexPoint {
    fn from(p: Point) -> Self {
        ComplexPoint::new(p.re, p.im)
    }
}

impl FromStr for Point {
    type Err = String;

    /// Accepts `re`, `imi`, `re+imi` and `re-imi`, with optional exponents.
    fn from_str(text: &str) -> Result<Self, String> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || format!("cannot parse {text:?} as a complex number (expected re+imi)");
        let number = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let coefficient = |t: &str| match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => number(t),
        };
        let p = match s.strip_suffix('i') {
            None => Point { re: number(&s)?, im: 0.0 },
            Some(body) => {
                // split at the last sign that does not belong to an exponent
                let bytes = body.as_bytes();
                let split = (1..bytes.len())
                    .rev()
                    .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
                match split {
                    Some(k) => Point {
                        re: number(&body[..k])?,
                        im: coefficient(&body[k..])?,
                    },
                    None => Point {
                        re: 0.0,
                        im: coefficient(body)?,
                    },
                }
            }
        };
        if p.re.is_finite() && p.im.is_finite() {
            Ok(p)
        } else {
            Err(bad())
        }
    }
}

/// Sample-plan settings of `certify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub ladder: Vec<f64>,
    pub per_rung: usize,
    pub bulk: usize,
    /// Point count of the monotonicity suite.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// `None` writes to standard output.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A fully materialized run. Serializing it and reading it back with
/// `--config` reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regimes: Option<Vec<SharpnessRegime>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanConfig>,
    pub seed: u64,
    pub options: EngineOptions,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn domain(&self) -> Result<Domain, CliError> {
        self.domain.build().map_err(|e| CliError::Invalid(e.to_string()))
    }

    /// Checks that the fields the command needs are present and the others
    /// absent.
    pub fn validate(&self) -> Result<(), CliError> {
        let need = |present: bool, field: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::Invalid(format!("{} requires {field}", self.command_name())))
            }
        };
        let forbid = |present: bool, field: &str| {
            if present {
                Err(CliError::Invalid(format!("{} does not take {field}", self.command_name())))
            } else {
                Ok(())
            }
        };
        self.domain()?;
        match self.command {
            Command::Distance => {
                need(self.z.is_some(), "z")?;
                need(self.w.is_some(), "w")?;
                need(self.metric.is_some(), "metric")?;
            }
            Command::Metric => {
                need(self.z.is_some(), "z")?;
                forbid(self.w.is_some(), "w")?;
                need(self.metric.is_some(), "metric")?;
            }
            Command::Certify => {
                need(self.suite.is_some(), "suite")?;
                need(self.plan.is_some(), "plan")?;
            }
            Command::Sweep => need(self.regimes.as_ref().is_some_and(|r| !r.is_empty()), "regimes")?,
        }
        if !matches!(self.command, Command::Distance | Command::Metric) {
            forbid(self.z.is_some() || self.w.is_some(), "points")?;
            forbid(self.metric.is_some(), "metric")?;
        }
        if self.command != Command::Certify {
            forbid(self.suite.is_some(), "suite")?;
            forbid(self.plan.is_some(), "plan")?;
        }
        if self.command != Command::Sweep {
            forbid(self.regimes.is_some(), "regimes")?;
        }
        if self.options.resolution == 0 || self.options.degree == 0 {
            return Err(CliError::Invalid("resolution and degree must be positive".into()));
        }
        Ok(())
    }

    fn command_name(&self) -> &'static str {
        match self.command {
            Command::Distance => "distance",
            Command::Metric => "metric",
            Command::Certify => "certify",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "planimetric",
    version,
    about = "Invariant distances, metrics and estimate certificates of planar domains",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    /// Read a complete run configuration (JSON) instead of flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Distance between two points.
    Distance {
        #[command(flatten)]
        z: ZArg,
        #[command(flatten)]
        w: WArg,
        #[arg(long, value_enum, default_value_t = MetricKind::Bergman)]
        metric: MetricKind,
        #[command(flatten)]
        common: Common,
    },
    /// Infinitesimal metric at a point.
    Metric {
        #[command(flatten)]
        z: ZArg,
        #[arg(long, value_enum, default_value_t = MetricKind::Bergman)]
        metric: MetricKind,
        #[command(flatten)]
        common: Common,
    },
    /// Run a certificate suite.
    Certify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Comma-separated boundary depths.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<f64>>,
        /// Generated pairs per depth rung.
        #[arg(long)]
        per_rung: Option<usize>,
        /// Pairs drawn uniformly from the domain.
        #[arg(long)]
        bulk: Option<usize>,
        /// Points of the monotonicity suite.
        #[arg(long)]
        points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Lemma 4 sharpness sweeps.
    Sweep {
        /// Comma-separated regimes; all four by default.
        #[arg(long, value_delimiter = ',', value_parser = parse_regime)]
        regime: Option<Vec<SharpnessRegime>>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = true)]
struct ZArg {
    /// First point, as re+imi.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["z_re", "z_im"])]
    z: Option<Point>,
    #[arg(long, allow_hyphen_values = true)]
    z_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "z_re")]
    z_im: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = true)]
struct WArg {
    /// Second point, as re+imi.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["w_re", "w_im"])]
    w: Option<Point>,
    #[arg(long, allow_hyphen_values = true)]
    w_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "w_re")]
    w_im: Option<f64>,
}

fn join(point: Option<Point>, re: Option<f64>, im: Option<f64>) -> Option<Point> {
    point.or(re.map(|re| Point { re, im: im.unwrap_or(0.0) }))
}

#[derive(Debug, Args)]
struct Common {
    /// Domain as JSON, e.g. '{"type":"annulus","r":0.25}'.
    #[arg(long, default_value = r#"{"type":"disc"}"#, value_parser = parse_domain)]
    domain: DomainSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_domain(text: &str) -> Result<DomainSpec, String> {
    let spec = DomainSpec::from_json(text).map_err(|e| e.to_string())?;
    spec.build().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn parse_regime(text: &str) -> Result<SharpnessRegime, String> {
    text.parse().map_err(|e: planimetric::Error| e.to_string())
}

fn options(common: &Common) -> EngineOptions {
    let defaults = EngineOptions::default();
    EngineOptions {
        resolution: common.resolution.unwrap_or(defaults.resolution),
        degree: common.degree.unwrap_or(defaults.degree),
        kmax: common.kmax.unwrap_or(defaults.kmax),
    }
}

fn skeleton(command: Command, common: Common) -> RunConfig {
    RunConfig {
        command,
        options: options(&common),
        domain: common.domain,
        z: None,
        w: None,
        metric: None,
        suite: None,
        regimes: None,
        plan: None,
        seed: common.seed,
        output: OutputConfig {
            path: common.out,
            format: common.format,
        },
    }
}

/// Parses a command line (including the program name) into a validated
/// configuration with every default filled in.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp
        | clap::error::ErrorKind::DisplayVersion
        | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => CliError::Help(e.to_string()),
        _ => CliError::Invalid(one_line(&e.to_string())),
    })?;
    let config = match (cli.config, cli.command) {
        (Some(path), _) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?
        }
        (None, Some(cmd)) => from_command(cmd),
        (None, None) => return Err(CliError::Invalid("a subcommand or --config is required".into())),
    };
    config.validate()?;
    Ok(config)
}

fn from_command(cmd: Cmd) -> RunConfig {
    match cmd {
        Cmd::Distance { z, w, metric, common } => RunConfig {
            z: join(z.z, z.z_re, z.z_im),
            w: join(w.w, w.w_re, w.w_im),
            metric: Some(metric),
            ..skeleton(Command::Distance, common)
        },
        Cmd::Metric { z, metric, common } => RunConfig {
            z: join(z.z, z.z_re, z.z_im),
            metric: Some(metric),
            ..skeleton(Command::Metric, common)
        },
        Cmd::Certify {
            suite,
            ladder,
            per_rung,
            bulk,
            points,
            common,
        } => {
            let default_bulk = if suite == Suite::Lemma4 { DEFAULT_LEMMA4_BULK } else { 0 };
            RunConfig {
                suite: Some(suite),
                plan: Some(PlanConfig {
                    ladder: ladder.unwrap_or_else(|| DEFAULT_LADDER.to_vec()),
                    per_rung: per_rung.unwrap_or(DEFAULT_PER_RUNG),
                    bulk: bulk.unwrap_or(default_bulk),
                    points: points.unwrap_or(DEFAULT_MONOTONICITY_POINTS),
                }),
                ..skeleton(Command::Certify, common)
            }
        }
        Cmd::Sweep { regime, common } => RunConfig {
            regimes: Some(regime.unwrap_or_else(|| SharpnessRegime::ALL.to_vec())),
            ..skeleton(Command::Sweep, common)
        },
    }
}

/// Clap's message without the usage and help trailer, on one line.
fn one_line(text: &str) -> String {
    let message: Vec<&str> = text
        .lines()
        .map(str::trim)
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .filter(|l| !l.is_empty())
        .collect();
    if message.is_empty() {
        return "invalid arguments".into();
    }
    message.join(" ").trim_start_matches("error: ").to_string()
}
