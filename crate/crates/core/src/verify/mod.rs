//! Empirical certificates for the two-sided distance estimates, the bounded
//! gap between Bergman and Kobayashi distances, the boundary ratio and metric
//! limits, Lemma 4 sharpness, monotonicity under inclusion, and the
//! isolated-point contrast.
//!
//! A certificate is a finite-sample witness, never a proof: it reports the
//! constants and margins observed over a seeded sample set.

mod plan;
mod suites;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use plan::{boundary_frame, sample_points, PlannedPair, SamplePlan, DEFAULT_LADDER};
pub use suites::{
    corollary2_gap, isolated_point_check, lemma4_enclosure, lemma4_sharpness_sweep, monotonicity_check,
    prop1_certificate, prop3_sweep, remark_d_limit, SharpnessRegime, B_UPPER_OUTER_LADDER,
};

use crate::ComplexPoint;

/// Version of the serialized certificate layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Default margin floor for a passing certificate.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Which estimate a certificate or sample row speaks to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    #[serde(rename = "Prop1-lower")]
    Prop1Lower,
    #[serde(rename = "Prop1-upper")]
    Prop1Upper,
    #[serde(rename = "Cor2-c")]
    Cor2C,
    #[serde(rename = "Cor2-k")]
    Cor2K,
    Prop3,
    RemarkD,
    Lemma4a,
    Lemma4b,
    Monotonicity,
    IsolatedPoint,
}

impl ClaimId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::Prop1Lower => "Prop1-lower",
            ClaimId::Prop1Upper => "Prop1-upper",
            ClaimId::Cor2C => "Cor2-c",
            ClaimId::Cor2K => "Cor2-k",
            ClaimId::Prop3 => "Prop3",
            ClaimId::RemarkD => "RemarkD",
            ClaimId::Lemma4a => "Lemma4a",
            ClaimId::Lemma4b => "Lemma4b",
            ClaimId::Monotonicity => "Monotonicity",
            ClaimId::IsolatedPoint => "IsolatedPoint",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated sample. Tabulation rows carry no bounds or margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub claim: ClaimId,
    pub sample_id: usize,
    /// Depth rung the sample belongs to, if any.
    pub rung: Option<f64>,
    pub z_re: f64,
    pub z_im: f64,
    pub w_re: f64,
    pub w_im: f64,
    pub value: f64,
    pub bound_lo: Option<f64>,
    pub bound_hi: Option<f64>,
    pub margin: Option<f64>,
}

impl SampleRecord {
    pub(crate) fn new(claim: ClaimId, sample_id: usize, z: ComplexPoint, w: ComplexPoint, value: f64) -> Self {
        Self {
            claim,
            sample_id,
            rung: None,
            z_re: z.re,
            z_im: z.im,
            w_re: w.re,
            w_im: w.im,
            value,
            bound_lo: None,
            bound_hi: None,
            margin: None,
        }
    }

    pub(crate) fn at_rung(mut self, rung: Option<f64>) -> Self {
        self.rung = rung;
        self
    }

    pub(crate) fn bounded(mut self, lo: Option<f64>, hi: Option<f64>, margin: f64) -> Self {
        self.bound_lo = lo;
        self.bound_hi = hi;
        self.margin = Some(margin);
        self
    }
}

/// A named pass/fail test on a summary statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes iff `value ≤ threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    /// Passes iff `value > threshold`.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value > threshold,
        }
    }

    /// Passes iff `value < threshold`.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }
}

/// A per-rung summary statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungSummary {
    pub depth: f64,
    pub label: String,
    pub value: f64,
}

/// Empirical witness for one or more claims over a finite sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub suite: String,
    pub claims: Vec<ClaimId>,
    pub domain: String,
    pub seed: u64,
    /// Empirical constants, e.g. the smallest admissible `c`.
    pub constants: BTreeMap<String, f64>,
    /// Smallest sample margin; negative means a violated bound.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub sample_count: usize,
    pub checks: Vec<Check>,
    pub rungs: Vec<RungSummary>,
    pub diagnostics: BTreeMap<String, f64>,
    pub samples: Vec<SampleRecord>,
    pub passed: bool,
}

impl Certificate {
    pub(crate) fn assemble(
        suite: &str,
        claims: Vec<ClaimId>,
        domain: String,
        seed: u64,
        sample_count: usize,
        samples: Vec<SampleRecord>,
    ) -> Self {
        let worst_margin = samples
            .iter()
            .filter_map(|s| s.margin)
            .fold(f64::INFINITY, f64::min);
        let mut cert = Self {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            claims,
            domain,
            seed,
            constants: BTreeMap::new(),
            worst_margin: if worst_margin.is_finite() { worst_margin } else { 0.0 },
            tolerance: DEFAULT_TOLERANCE,
            sample_count,
            checks: Vec::new(),
            rungs: Vec::new(),
            diagnostics: BTreeMap::new(),
            samples,
            passed: false,
        };
        cert.refresh();
        cert
    }

    /// Whether the certificate passes at margin floor `tolerance`.
    pub fn passes_at(&self, tolerance: f64) -> bool {
        self.worst_margin >= -tolerance && self.checks.iter().all(|c| c.passed)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.refresh();
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    pub(crate) fn push_check(&mut self, check: Check) {
        self.checks.push(check);
        self.refresh();
    }

    pub(crate) fn push_rung(&mut self, depth: f64, label: impl Into<String>, value: f64) {
        self.rungs.push(RungSummary {
            depth,
            label: label.into(),
            value,
        });
    }

    fn refresh(&mut self) {
        self.passed = self.passes_at(self.tolerance);
    }
}

/// Rung label used in constant names, e.g. `"1e-2"`.
pub(crate) fn rung_label(d: f64) -> String {
    format!("{d:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_ids_serialize_to_their_labels() {
        for c in [ClaimId::Prop1Lower, ClaimId::Cor2K, ClaimId::RemarkD] {
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.as_str()));
        }
    }

    #[test]
    fn passing_is_monotone_in_tolerance() {
        let mut row = SampleRecord::new(ClaimId::Lemma4a, 0, ComplexPoint::new(0.0, 0.0), ComplexPoint::new(0.5, 0.0), 1.0);
        row = row.bounded(Some(0.0), Some(1.0), -5e-10);
        let cert = Certificate::assemble("t", vec![ClaimId::Lemma4a], "disc".into(), 1, 1, vec![row]);
        assert!(cert.passes_at(1e-9));
        assert!(cert.passes_at(2e-9));
        assert!(!cert.passes_at(1e-10));
        assert!(cert.passed);
    }

    #[test]
    fn rung_labels() {
        assert_eq!(rung_label(1e-2), "1e-2");
        assert_eq!(rung_label(0.1), "1e-1");
    }
}
