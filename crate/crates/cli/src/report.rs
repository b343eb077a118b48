//! Report documents and their JSON and CSV renderings.

use std::fs;
use std::io::{self, Write};

use planimetric::distances::DistanceEstimate;
use planimetric::verify::{Certificate, SCHEMA_VERSION};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::CliError;

/// CSV column order.
pub const CSV_COLUMNS: [&str; 12] = [
    "claim_id", "domain", "seed", "sample_id", "z_re", "z_im", "w_re", "w_im", "value", "bound_lo", "bound_hi",
    "margin",
];

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Distance {
        metric: String,
        #[serde(flatten)]
        estimate: DistanceEstimate,
    },
    Metric {
        metric: String,
        value: f64,
    },
    Certificates(Vec<Certificate>),
    Error {
        message: String,
    },
}

/// Everything a run produces. Contains no timestamps or host data, so equal
/// configurations give byte-identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    pub passed: bool,
    pub outcome: Outcome,
}

impl Report {
    pub fn new(config: RunConfig, outcome: Outcome) -> Self {
        let passed = match &outcome {
            Outcome::Certificates(certs) => certs.iter().all(|c| c.passed),
            Outcome::Error { .. } => false,
            _ => true,
        };
        Self {
            schema_version: SCHEMA_VERSION,
            config,
            passed,
            outcome,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    /// One row per sample; a distance or metric query is a single row.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let io_err = |e: csv::Error| CliError::Io(e.to_string());
        writer.write_record(CSV_COLUMNS).map_err(io_err)?;
        let domain = self
            .config
            .domain
            .build()
            .map(|d| d.to_string())
            .unwrap_or_default();
        let seed = self.config.seed.to_string();
        let num = |x: f64| x.to_string();
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        let z = self.config.z.map(|p| (p.re, p.im));
        let w = self.config.w.map(|p| (p.re, p.im));
        match &self.outcome {
            Outcome::Distance { metric, estimate } => {
                writer
                    .write_record([
                        metric.clone(),
                        domain,
                        seed,
                        "0".into(),
                        opt(z.map(|p| p.0)),
                        opt(z.map(|p| p.1)),
                        opt(w.map(|p| p.0)),
                        opt(w.map(|p| p.1)),
                        num(estimate.value),
                        num(estimate.lower_end()),
                        num(estimate.upper_end()),
                        String::new(),
                    ])
                    .map_err(io_err)?;
            }
            Outcome::Metric { metric, value } => {
                writer
                    .write_record([
                        metric.clone(),
                        domain,
                        seed,
                        "0".into(),
                        opt(z.map(|p| p.0)),
                        opt(z.map(|p| p.1)),
                        String::new(),
                        String::new(),
                        num(*value),
                        String::new(),
                        String::new(),
                        String::new(),
                    ])
                    .map_err(io_err)?;
            }
            Outcome::Certificates(certs) => {
                for cert in certs {
                    for s in &cert.samples {
                        writer
                            .write_record([
                                s.claim.as_str().to_string(),
                                cert.domain.clone(),
                                cert.seed.to_string(),
                                s.sample_id.to_string(),
                                num(s.z_re),
                                num(s.z_im),
                                num(s.w_re),
                                num(s.w_im),
                                num(s.value),
                                opt(s.bound_lo),
                                opt(s.bound_hi),
                                opt(s.margin),
                            ])
                            .map_err(io_err)?;
                    }
                }
            }
            Outcome::Error { .. } => {}
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn render(&self) -> Result<String, CliError> {
        match self.config.output.format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes the report to the configured path, or standard output.
    pub fn emit(&self) -> Result<(), CliError> {
        let text = self.render()?;
        let io_err = |e: io::Error| CliError::Io(e.to_string());
        match &self.config.output.path {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(io_err)?;
                out.flush().map_err(io_err)
            }
        }
    }
}
