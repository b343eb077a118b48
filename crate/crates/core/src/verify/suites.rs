//! The certificate suites.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{boundary_frame, sample_points, PlannedPair, SamplePlan};
use super::{rung_label, Certificate, Check, ClaimId, SampleRecord};
use crate::disc::{
    bergman_disc, identity_residual, kobayashi_disc, lemma4a_bounds, lemma4b_bounds, prop1prime_classify,
    sharpness_ratio_a, sharpness_ratio_b, DiscPair, Prop1Case,
};
use crate::distances::{DistanceEngine, EngineOptions};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::geometry::{contains, dist_to_boundary};
use crate::kernel::{bergman_metric_numeric, kernel_diag_numeric, m_invariant, ExactBergmanMetric, MetricField};
use crate::ComplexPoint;

/// Outer parameter `|z|` of the nested Lemma 4 (b) sweeps.
pub const B_UPPER_OUTER_LADDER: [f64; 5] = [0.9, 0.99, 0.999, 0.9999, 0.99999];

/// Inner parameter of the nested sweeps and `ε`/`1 − t` of the (a) families.
const INNER_LADDER: [f64; 3] = [1e-1, 1e-2, 1e-3];
const LARGE_S_LADDER: [f64; 3] = [0.9, 0.99, 0.999];

/// Relative slack of the Lemma 4 enclosure suite.
const ENCLOSURE_SLACK: f64 = 1e-12;
/// Deviations below this count as an exact relation in trend verdicts.
const EXACT_DEVIATION: f64 = 1e-9;
/// Membership samples used to test nesting.
const NESTING_SAMPLES: usize = 2000;

fn rel(x: f64, scale: f64) -> f64 {
    x / scale.abs().max(1.0)
}

fn disc_pair(p: &PlannedPair) -> Result<DiscPair> {
    DiscPair::new(p.z, p.w)
}

fn require_unit_disc(domain: &Domain, operation: &'static str) -> Result<()> {
    match domain {
        Domain::Disc(d) if d.radius() == 1.0 => Ok(()),
        _ => Err(Error::UnsupportedDomain {
            operation,
            domain: domain.to_string(),
        }),
    }
}

fn engine_diagnostics(cert: &mut Certificate, options: &EngineOptions) {
    cert.diagnostics.insert("resolution".into(), options.resolution as f64);
    cert.diagnostics.insert("degree".into(), options.degree as f64);
    cert.diagnostics.insert("kmax".into(), options.kmax as f64);
}

/// Lemma 4 (a) and (b) enclosures of `b_𝔻/√2` and the identity
/// `|1 − z̄w|² = (1 − |z|²)(1 − |w|²) + |z − w|²` over the plan's disc pairs.
pub fn lemma4_enclosure(plan: &SamplePlan) -> Result<Certificate> {
    require_unit_disc(&plan.domain, "Lemma 4 enclosure")?;
    let pairs = plan.pairs()?;
    let evals: Vec<(SampleRecord, SampleRecord, f64)> = pairs
        .par_iter()
        .map(|p| {
            let dp = disc_pair(p)?;
            let v = bergman_disc(&dp) / SQRT_2;
            let a = lemma4a_bounds(&dp);
            let b = lemma4b_bounds(&dp);
            let ra = SampleRecord::new(ClaimId::Lemma4a, p.id, p.z, p.w, v)
                .at_rung(p.rung)
                .bounded(Some(a.lower), Some(a.upper), a.margin(v));
            let rb = SampleRecord::new(ClaimId::Lemma4b, p.id, p.z, p.w, v)
                .at_rung(p.rung)
                .bounded(Some(b.lower), Some(b.upper), b.margin(v));
            Ok((ra, rb, identity_residual(&dp)))
        })
        .collect::<Result<_>>()?;
    let residual = evals.iter().map(|e| e.2).fold(0.0, f64::max);
    let mut samples = Vec::with_capacity(2 * evals.len());
    for (a, b, _) in evals {
        samples.push(a);
        samples.push(b);
    }
    let mut cert = Certificate::assemble(
        "lemma4",
        vec![ClaimId::Lemma4a, ClaimId::Lemma4b],
        plan.domain.to_string(),
        plan.seed,
        pairs.len(),
        samples,
    )
    .with_tolerance(ENCLOSURE_SLACK);
    cert.constants.insert("identity_residual".into(), residual);
    cert.push_check(Check::at_most("identity_residual", residual, 1e-12));
    Ok(cert)
}

/// The limiting families showing the Lemma 4 constants cannot be improved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpnessRegime {
    /// `(0, ε)` with `ε → 0`: ratio (a) tends to 1.
    SmallS,
    /// `(−t, t)` with `t → 1`: ratio (a) equals `1 + t`.
    LargeS,
    /// `|z| → 1`, then `|z − w|²/((1 − |z|²)(1 − |w|²)) → 0`: ratio (b) tends to ½.
    BLower,
    /// `|z| → 1`, then `w → 0`: ratio (b) tends to `√2`.
    BUpper,
}

impl SharpnessRegime {
    pub const ALL: [SharpnessRegime; 4] = [
        SharpnessRegime::SmallS,
        SharpnessRegime::LargeS,
        SharpnessRegime::BLower,
        SharpnessRegime::BUpper,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SharpnessRegime::SmallS => "small-s",
            SharpnessRegime::LargeS => "large-s",
            SharpnessRegime::BLower => "b-lower",
            SharpnessRegime::BUpper => "b-upper",
        }
    }

    pub fn target(&self) -> f64 {
        match self {
            SharpnessRegime::SmallS => 1.0,
            SharpnessRegime::LargeS => 2.0,
            SharpnessRegime::BLower => 0.5,
            SharpnessRegime::BUpper => SQRT_2,
        }
    }
}

impl FromStr for SharpnessRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidPlan(format!("unknown sharpness regime {s:?}")))
    }
}

/// Sweeps one sharpness family and reports the attained ratio against its
/// target.
pub fn lemma4_sharpness_sweep(regime: SharpnessRegime) -> Result<Certificate> {
    let real = |x: f64| ComplexPoint::new(x, 0.0);
    // (z, w, closed form if any)
    let mut family: Vec<(ComplexPoint, ComplexPoint, Option<f64>)> = Vec::new();
    match regime {
        SharpnessRegime::SmallS => {
            for eps in INNER_LADDER {
                let exact = ((1.0 + eps) - ((1.0 - eps) * (1.0 + eps)).sqrt()) / eps;
                family.push((real(0.0), real(eps), Some(exact)));
            }
        }
        SharpnessRegime::LargeS => {
            for t in LARGE_S_LADDER {
                family.push((real(-t), real(t), Some(1.0 + t)));
            }
        }
        SharpnessRegime::BLower => {
            for t in B_UPPER_OUTER_LADDER {
                for eps in INNER_LADDER {
                    family.push((real(t), ComplexPoint::from_polar(t, eps * (1.0 - t)), None));
                }
            }
        }
        SharpnessRegime::BUpper => {
            for t in B_UPPER_OUTER_LADDER {
                for eta in INNER_LADDER {
                    family.push((real(t), real(eta), None));
                }
            }
        }
    }
    let (claim, lo, hi) = match regime {
        SharpnessRegime::SmallS | SharpnessRegime::LargeS => (ClaimId::Lemma4a, 1.0, 2.0),
        _ => (ClaimId::Lemma4b, 0.5, SQRT_2),
    };
    let mut samples = Vec::new();
    let mut closed_form_error: f64 = 0.0;
    for (i, &(z, w, exact)) in family.iter().enumerate() {
        let p = DiscPair::new(z, w)?;
        let ratio = match claim {
            ClaimId::Lemma4a => sharpness_ratio_a(&p)?,
            _ => sharpness_ratio_b(&p)?,
        };
        if let Some(e) = exact {
            closed_form_error = closed_form_error.max((ratio - e).abs());
        }
        samples.push(SampleRecord::new(claim, i, z, w, ratio).bounded(
            Some(lo),
            Some(hi),
            (ratio - lo).min(hi - ratio),
        ));
    }
    let attained = samples.last().map(|s| s.value).unwrap_or(f64::NAN);
    let target = regime.target();
    let n = samples.len();
    let mut cert = Certificate::assemble(
        &format!("lemma4-sharpness-{}", regime.as_str()),
        vec![claim],
        Domain::unit_disc().to_string(),
        0,
        n,
        samples,
    );
    cert.constants.insert("attained".into(), attained);
    cert.constants.insert("target".into(), target);
    let threshold = match regime {
        SharpnessRegime::SmallS => 1e-3,
        SharpnessRegime::LargeS => 1.1e-3,
        _ => 1e-2,
    };
    cert.push_check(Check::at_most("attained_vs_target", (attained - target).abs(), threshold));
    if matches!(regime, SharpnessRegime::SmallS | SharpnessRegime::LargeS) {
        cert.constants.insert("closed_form_error".into(), closed_form_error);
        cert.push_check(Check::at_most("closed_form", closed_form_error, 1e-12));
    }
    Ok(cert)
}

struct Prop1Eval {
    pair: PlannedPair,
    b: f64,
    bracket: f64,
    dz: f64,
    dw: f64,
}

impl Prop1Eval {
    fn separation(&self) -> f64 {
        (self.pair.z - self.pair.w).norm()
    }

    /// `|z − w|/√(d(z)d(w))`.
    fn s(&self) -> f64 {
        self.separation() / (self.dz * self.dw).sqrt()
    }

    /// Smallest `c` for each side of the estimate on this pair.
    fn constants(&self) -> (f64, f64) {
        let s = self.s();
        let e = (self.b / SQRT_2).exp_m1();
        if s == 0.0 || e <= 0.0 {
            return (1.0, 1.0);
        }
        (s / e, e / s)
    }
}

/// The smallest `c ≥ 1` with
/// `√2 log(1 + s/c) ≤ b ≤ √2 log(1 + c s)`, `s = |z − w|/√(d(z)d(w))`, on
/// every sample, with margins at that `c` and the consistency of the
/// equivalent near/far form.
pub fn prop1_certificate(plan: &SamplePlan) -> Result<Certificate> {
    let pairs = plan.pairs()?;
    let engine = DistanceEngine::with_options(plan.domain.clone(), plan.options);
    let evals: Vec<Prop1Eval> = pairs
        .par_iter()
        .map(|p| {
            let est = engine.bergman(p.z, p.w)?;
            Ok(Prop1Eval {
                pair: *p,
                b: est.value,
                bracket: est.bracket.lower.max(est.bracket.upper),
                dz: dist_to_boundary(&plan.domain, p.z)?,
                dw: dist_to_boundary(&plan.domain, p.w)?,
            })
        })
        .collect::<Result<_>>()?;

    let (mut c_lower, mut c_upper) = (1.0f64, 1.0f64);
    for e in &evals {
        let (l, u) = e.constants();
        c_lower = c_lower.max(l);
        c_upper = c_upper.max(u);
    }
    let c = c_lower.max(c_upper);

    let mut samples = Vec::with_capacity(evals.len());
    let mut violations = 0usize;
    for e in &evals {
        let s = e.s();
        let lo = SQRT_2 * (s / c).ln_1p();
        let hi = SQRT_2 * (c * s).ln_1p();
        let (below, above) = (e.b - lo, hi - e.b);
        let claim = if below <= above {
            ClaimId::Prop1Lower
        } else {
            ClaimId::Prop1Upper
        };
        samples.push(
            SampleRecord::new(claim, e.pair.id, e.pair.z, e.pair.w, e.b)
                .at_rung(e.pair.rung)
                .bounded(Some(lo), Some(hi), rel(below.min(above), e.b)),
        );
        if s > 0.0 && !prop1prime_consistent(e.b, e.separation(), e.dz, e.dw, c) {
            violations += 1;
        }
    }

    let mut cert = Certificate::assemble(
        "prop1",
        vec![ClaimId::Prop1Lower, ClaimId::Prop1Upper],
        plan.domain.to_string(),
        plan.seed,
        evals.len(),
        samples,
    );
    cert.constants.insert("c".into(), c);
    cert.constants.insert("c_lower".into(), c_lower);
    cert.constants.insert("c_upper".into(), c_upper);
    let mut per_rung = Vec::new();
    for &d in &plan.ladder {
        let rc = evals
            .iter()
            .filter(|e| e.pair.rung == Some(d))
            .map(|e| {
                let (l, u) = e.constants();
                l.max(u)
            })
            .fold(1.0, f64::max);
        cert.constants.insert(format!("c@{}", rung_label(d)), rc);
        cert.push_rung(d, "c", rc);
        per_rung.push(rc);
    }
    cert.push_check(Check::below("c_finite", c, f64::MAX));
    cert.push_check(Check::at_most("prop1prime_violations", violations as f64, 0.0));
    if let [.., prev, last] = per_rung[..] {
        cert.push_check(Check::at_most("rung_stability", (last - prev).abs() / prev, 0.05));
    }
    if let Domain::Disc(_) = plan.domain {
        cert.push_check(Check::at_most("lemma4b_constant", c, 2.0));
    }
    engine_diagnostics(&mut cert, &plan.options);
    cert.diagnostics.insert(
        "max_bracket".into(),
        evals.iter().map(|e| e.bracket).fold(0.0, f64::max),
    );
    Ok(cert)
}

/// Whether the near/far form follows from the log form with constant `c`:
/// far pairs satisfy `|√2 b − log s²| ≤ 2 log c + log 4`, near pairs
/// `s/(2c) ≤ b ≤ 2c s`.
fn prop1prime_consistent(b: f64, sep: f64, dz: f64, dw: f64, c: f64) -> bool {
    let s = sep / (dz * dw).sqrt();
    let slack = 1e-12;
    match prop1prime_classify(sep, dz, dw) {
        Prop1Case::Far => {
            let additive = (SQRT_2 * b - (s * s).ln()).abs();
            additive <= (2.0 * c.ln() + 4f64.ln()) * (1.0 + slack) + slack
        }
        Prop1Case::Near => s / (2.0 * c) <= b * (1.0 + slack) && b <= 2.0 * c * s * (1.0 + slack),
    }
}

/// `sup |b − √2 k|` and, on simply connected domains, `sup |b − √2 c|`,
/// overall and per rung, over anchored pairs: one point descends the ladder
/// while its partner stays fixed. When both points approach the boundary
/// together the gap decays, which says nothing about boundedness.
pub fn corollary2_gap(plan: &SamplePlan) -> Result<Certificate> {
    let pairs = plan.anchored_pairs()?;
    let engine = DistanceEngine::with_options(plan.domain.clone(), plan.options);
    let simply = plan.domain.is_simply_connected();
    let evals: Vec<(PlannedPair, f64, Option<f64>)> = pairs
        .par_iter()
        .map(|p| {
            let b = engine.bergman(p.z, p.w)?.value;
            let k = engine.kobayashi(p.z, p.w)?.value;
            let c = if simply {
                Some(engine.caratheodory(p.z, p.w)?.value)
            } else {
                None
            };
            Ok((*p, b - SQRT_2 * k, c.map(|c| b - SQRT_2 * c)))
        })
        .collect::<Result<_>>()?;

    let mut samples = Vec::new();
    for (p, gk, gc) in &evals {
        samples.push(SampleRecord::new(ClaimId::Cor2K, p.id, p.z, p.w, *gk).at_rung(p.rung));
        if let Some(gc) = gc {
            samples.push(SampleRecord::new(ClaimId::Cor2C, p.id, p.z, p.w, *gc).at_rung(p.rung));
        }
    }
    let claims = if simply {
        vec![ClaimId::Cor2C, ClaimId::Cor2K]
    } else {
        vec![ClaimId::Cor2K]
    };
    let mut cert = Certificate::assemble("cor2", claims, plan.domain.to_string(), plan.seed, evals.len(), samples);

    let sup = |sel: &dyn Fn(&(PlannedPair, f64, Option<f64>)) -> Option<f64>, rung: Option<f64>| -> f64 {
        evals
            .iter()
            .filter(|e| rung.is_none() || e.0.rung == rung)
            .filter_map(sel)
            .map(f64::abs)
            .fold(0.0, f64::max)
    };
    let kinds: Vec<(&str, Box<dyn Fn(&(PlannedPair, f64, Option<f64>)) -> Option<f64>>)> = if simply {
        vec![("k", Box::new(|e| Some(e.1))), ("c", Box::new(|e| e.2))]
    } else {
        vec![("k", Box::new(|e| Some(e.1)))]
    };
    for (kind, sel) in &kinds {
        let overall = sup(sel.as_ref(), None);
        cert.constants.insert(format!("sup_{kind}"), overall);
        cert.push_check(Check::below(format!("sup_{kind}_finite"), overall, f64::MAX));
        let mut per_rung = Vec::new();
        for &d in &plan.ladder {
            let v = sup(sel.as_ref(), Some(d));
            cert.constants.insert(format!("sup_{kind}@{}", rung_label(d)), v);
            cert.push_rung(d, format!("sup_{kind}"), v);
            per_rung.push(v);
        }
        if let [.., prev, last] = per_rung[..] {
            cert.push_check(Check::at_most(
                format!("depth_stability_{kind}"),
                (last - prev).abs(),
                0.1 * prev + EXACT_DEVIATION,
            ));
        }
    }
    engine_diagnostics(&mut cert, &plan.options);
    Ok(cert)
}

/// Base points for the ratio sweep: central, intermediate, and close to the
/// boundary on the side opposite the approach point.
fn prop3_bases(domain: &Domain) -> Result<Vec<ComplexPoint>> {
    let real = |x: f64| ComplexPoint::new(x, 0.0);
    Ok(match domain {
        Domain::Disc(d) => vec![real(0.0), real(-0.5 * d.radius()), real(-0.95 * d.radius())],
        Domain::Conformal(c) => vec![
            c.evaluate_map(real(0.0)).0,
            c.evaluate_map(real(-0.5)).0,
            c.evaluate_map(real(-0.95)).0,
        ],
        Domain::Annulus(a) => {
            let r = a.inner_radius();
            vec![
                real(-r.sqrt()),
                ComplexPoint::new(0.0, 0.5 * (1.0 + r.sqrt())),
                real(-(1.0 - 0.05 * (1.0 - r))),
            ]
        }
        Domain::PuncturedDisc(_) => vec![real(-0.5), ComplexPoint::new(0.0, 0.5), real(-0.95)],
    })
}

/// `b(z, w)/(√2 k(z, w))` for three base points `z` as `w` approaches the
/// outer boundary along the depth ladder.
pub fn prop3_sweep(plan: &SamplePlan) -> Result<Certificate> {
    plan.validate()?;
    let engine = DistanceEngine::with_options(plan.domain.clone(), plan.options);
    let bases = prop3_bases(&plan.domain)?;
    let (p0, n0) = boundary_frame(&plan.domain, 0, 0.0)?;
    let jobs: Vec<(usize, f64, ComplexPoint, ComplexPoint)> = bases
        .iter()
        .enumerate()
        .flat_map(|(i, &z)| plan.ladder.iter().map(move |&d| (i, d, z, p0 + n0 * d)))
        .collect();
    let ratios: Vec<f64> = jobs
        .par_iter()
        .map(|&(_, _, z, w)| {
            let b = engine.bergman(z, w)?.value;
            let k = engine.kobayashi(z, w)?.value;
            Ok(b / (SQRT_2 * k))
        })
        .collect::<Result<_>>()?;

    let samples = jobs
        .iter()
        .zip(&ratios)
        .enumerate()
        .map(|(id, (&(_, d, z, w), &ratio))| SampleRecord::new(ClaimId::Prop3, id, z, w, ratio).at_rung(Some(d)))
        .collect();
    let mut cert = Certificate::assemble(
        "prop3",
        vec![ClaimId::Prop3],
        plan.domain.to_string(),
        plan.seed,
        jobs.len(),
        samples,
    );
    let mut worst_last: f64 = 0.0;
    for i in 0..bases.len() {
        let devs: Vec<(f64, f64)> = jobs
            .iter()
            .zip(&ratios)
            .filter(|(j, _)| j.0 == i)
            .map(|(j, r)| (j.1, (r - 1.0).abs()))
            .collect();
        for &(d, dev) in &devs {
            cert.push_rung(d, format!("base{i}"), dev);
        }
        let exact = devs.iter().all(|&(_, dev)| dev <= EXACT_DEVIATION);
        let worst_step = devs
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::NEG_INFINITY, f64::max);
        cert.push_check(Check {
            name: format!("trend_base{i}"),
            value: if worst_step.is_finite() { worst_step } else { 0.0 },
            threshold: 0.0,
            passed: exact || worst_step < 0.0,
        });
        if let Some(&(_, last)) = devs.last() {
            worst_last = worst_last.max(last);
            cert.push_check(Check::at_most(format!("last_rung_base{i}"), last, 0.1));
        }
    }
    cert.constants.insert("max_last_rung_deviation".into(), worst_last);
    engine_diagnostics(&mut cert, &plan.options);
    Ok(cert)
}

/// `d_D(u) β_D(u; 1)` along inward normals at the ladder depths, compared with
/// the boundary limit `√2/2`.
pub fn remark_d_limit(plan: &SamplePlan) -> Result<Certificate> {
    plan.validate()?;
    let domain = &plan.domain;
    let exact = match domain {
        Domain::Annulus(_) => None,
        _ => Some(ExactBergmanMetric::new(domain)?),
    };
    let components: Vec<(usize, &str)> = match domain {
        Domain::Annulus(_) => vec![(0, "outer"), (1, "inner")],
        _ => vec![(0, "outer")],
    };
    let angles = plan.per_rung.max(1);
    let offset: f64 = ChaCha8Rng::seed_from_u64(plan.seed).gen();
    let mut jobs = Vec::new();
    for &d in &plan.ladder {
        for &(comp, label) in &components {
            for j in 0..angles {
                let theta = 2.0 * PI * (j as f64 + offset) / angles as f64;
                let (p, n) = boundary_frame(domain, comp, theta)?;
                jobs.push((d, label, p + n * d));
            }
        }
    }
    let values: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(_, _, u)| {
            let dist = dist_to_boundary(domain, u)?;
            let beta = match &exact {
                Some(m) => m.density(u)?,
                None => bergman_metric_numeric(domain, u)?,
            };
            Ok((dist, dist * beta))
        })
        .collect::<Result<_>>()?;

    let disc_radius = match domain {
        Domain::Disc(d) => Some(d.radius()),
        _ => None,
    };
    let mut samples = Vec::new();
    let mut closed_form_error: f64 = 0.0;
    for (id, (&(d, _, u), &(_, v))) in jobs.iter().zip(&values).enumerate() {
        let mut row = SampleRecord::new(ClaimId::RemarkD, id, u, u, v).at_rung(Some(d));
        if let Some(r) = disc_radius {
            let want = SQRT_2 * r / (r + u.norm());
            let err = (v - want).abs();
            closed_form_error = closed_form_error.max(err);
            row = row.bounded(Some(want), Some(want), 0.0 - rel(err, want));
        }
        samples.push(row);
    }
    let mut cert = Certificate::assemble(
        "remark_d",
        vec![ClaimId::RemarkD],
        domain.to_string(),
        plan.seed,
        jobs.len(),
        samples,
    );
    let deepest = plan.ladder.iter().copied().fold(f64::INFINITY, f64::min);
    for &(_, label) in &components {
        for &d in &plan.ladder {
            let dev = jobs
                .iter()
                .zip(&values)
                .filter(|(j, _)| j.0 == d && j.1 == label)
                .map(|(_, v)| (v.1 - FRAC_1_SQRT_2).abs())
                .fold(0.0, f64::max);
            cert.push_rung(d, label, dev);
            cert.constants.insert(format!("deviation_{label}@{}", rung_label(d)), dev);
            if d == deepest {
                cert.push_check(Check::at_most(format!("deepest_rung_{label}"), dev, 0.01));
            }
        }
    }
    if disc_radius.is_some() {
        cert.constants.insert("closed_form_error".into(), closed_form_error);
        cert.push_check(Check::at_most("closed_form", closed_form_error, 1e-6));
    }
    Ok(cert)
}

/// `K_inner ≥ K_outer` and `M_inner ≥ M_outer` at the given points of the
/// inner domain, after checking `inner ⊂ outer` by membership sampling.
pub fn monotonicity_check(inner: &Domain, outer: &Domain, points: &[ComplexPoint]) -> Result<Certificate> {
    for &p in points {
        if !contains(inner, p) {
            return Err(Error::PointOutsideDomain { z: p });
        }
    }
    let probes = sample_points(inner, NESTING_SAMPLES, 0, 0.0)?;
    if let Some(&witness) = probes.iter().chain(points).find(|&&p| !contains(outer, p)) {
        return Err(Error::NotNested { witness });
    }
    let evals: Vec<[f64; 4]> = points
        .par_iter()
        .map(|&z| {
            Ok([
                kernel_diag_numeric(inner, z)?,
                kernel_diag_numeric(outer, z)?,
                m_invariant(inner, z)?,
                m_invariant(outer, z)?,
            ])
        })
        .collect::<Result<_>>()?;
    let mut samples = Vec::with_capacity(2 * points.len());
    let mut violations = 0;
    for (i, (&z, e)) in points.iter().zip(&evals).enumerate() {
        for (k, (vi, vo)) in [(e[0], e[1]), (e[2], e[3])].into_iter().enumerate() {
            let margin = rel(vi - vo, vi);
            if margin < -super::DEFAULT_TOLERANCE {
                violations += 1;
            }
            samples.push(SampleRecord::new(ClaimId::Monotonicity, 2 * i + k, z, z, vi).bounded(Some(vo), None, margin));
        }
    }
    let mut cert = Certificate::assemble(
        "monotonicity",
        vec![ClaimId::Monotonicity],
        format!("{inner} in {outer}"),
        0,
        points.len(),
        samples,
    );
    cert.push_check(Check::at_most("violations", violations as f64, 0.0));
    cert.diagnostics.insert("nesting_samples".into(), NESTING_SAMPLES as f64);
    Ok(cert)
}

/// On the punctured disc with `z = 0.5` and `w = t`, `t` along `depths`:
/// `k(z, w)` must grow by more than ½ per rung while `b(z, w)` stays equal to
/// the disc value.
pub fn isolated_point_check(depths: &[f64]) -> Result<Certificate> {
    for &t in depths {
        if !(t > 0.0 && t < 0.5) {
            return Err(Error::InvalidPlan(format!("puncture depth {t} outside (0, 0.5)")));
        }
    }
    let domain = Domain::punctured_disc();
    let engine = DistanceEngine::new(domain.clone());
    let z = ComplexPoint::new(0.5, 0.0);
    let mut samples = Vec::new();
    let mut ks = Vec::new();
    let mut b_error: f64 = 0.0;
    for (i, &t) in depths.iter().enumerate() {
        let w = ComplexPoint::new(t, 0.0);
        let dp = DiscPair::new(z, w)?;
        let k = engine.kobayashi(z, w)?.value;
        let k_disc = kobayashi_disc(&dp);
        let b = engine.bergman(z, w)?.value;
        let b_disc = bergman_disc(&dp);
        b_error = b_error.max((b - b_disc).abs());
        samples.push(
            SampleRecord::new(ClaimId::IsolatedPoint, 2 * i, z, w, k)
                .at_rung(Some(t))
                .bounded(Some(k_disc), None, rel(k - k_disc, k)),
        );
        samples.push(
            SampleRecord::new(ClaimId::IsolatedPoint, 2 * i + 1, z, w, b)
                .at_rung(Some(t))
                .bounded(Some(b_disc), Some(b_disc), 0.0 - rel((b - b_disc).abs(), b)),
        );
        ks.push((t, k));
    }
    let n = depths.len();
    let mut cert = Certificate::assemble(
        "isolated",
        vec![ClaimId::IsolatedPoint],
        domain.to_string(),
        0,
        n,
        samples,
    );
    for &(t, k) in &ks {
        cert.push_rung(t, "k", k);
    }
    let min_increment = ks.windows(2).map(|w| w[1].1 - w[0].1).fold(f64::INFINITY, f64::min);
    if min_increment.is_finite() {
        cert.constants.insert("min_k_increment".into(), min_increment);
        cert.push_check(Check::above("k_increment", min_increment, 0.5));
    }
    cert.constants.insert("max_b_error".into(), b_error);
    cert.push_check(Check::at_most("b_matches_disc", b_error, 1e-9));
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosure_on_disc_passes() {
        let plan = SamplePlan::new(Domain::unit_disc(), 1).with_bulk(500);
        let cert = lemma4_enclosure(&plan).unwrap();
        assert!(cert.passed, "{:?}", cert.checks);
        assert!(cert.worst_margin >= -1e-12);
        assert_eq!(cert.samples.len(), 2 * cert.sample_count);
    }

    #[test]
    fn enclosure_rejects_other_domains() {
        let plan = SamplePlan::new(Domain::annulus(0.5).unwrap(), 1);
        assert!(matches!(lemma4_enclosure(&plan), Err(Error::UnsupportedDomain { .. })));
    }

    #[test]
    fn sharpness_regimes_reach_their_targets() {
        for regime in SharpnessRegime::ALL {
            let cert = lemma4_sharpness_sweep(regime).unwrap();
            assert!(cert.passed, "{}: {:?}", regime.as_str(), cert.checks);
        }
        let large = lemma4_sharpness_sweep(SharpnessRegime::LargeS).unwrap();
        assert!((large.constant("attained").unwrap() - 1.999).abs() < 1e-9);
        assert_eq!("b-upper".parse::<SharpnessRegime>().unwrap(), SharpnessRegime::BUpper);
    }

    #[test]
    fn prop1_on_disc_is_bounded_by_two() {
        let plan = SamplePlan::new(Domain::unit_disc(), 5).with_per_rung(40).with_bulk(200);
        let cert = prop1_certificate(&plan).unwrap();
        let c = cert.constant("c").unwrap();
        assert!((1.0..=2.0).contains(&c), "{c}");
        assert_eq!(cert.check("prop1prime_violations").unwrap().value, 0.0);
        assert!(cert.worst_margin >= -1e-12);
    }

    #[test]
    fn prop1_coincident_pair_is_vacuous() {
        let z = ComplexPoint::new(0.3, 0.1);
        let plan = SamplePlan::new(Domain::unit_disc(), 5)
            .with_per_rung(0)
            .with_pairs(vec![(z, z)]);
        let cert = prop1_certificate(&plan).unwrap();
        assert_eq!(cert.constant("c").unwrap(), 1.0);
        assert_eq!(cert.samples[0].margin, Some(0.0));
    }

    #[test]
    fn disc_gaps_vanish() {
        let plan = SamplePlan::new(Domain::unit_disc(), 2).with_per_rung(8);
        let cert = corollary2_gap(&plan).unwrap();
        assert!(cert.constant("sup_k").unwrap() <= 1e-9);
        assert!(cert.constant("sup_c").unwrap() <= 1e-9);
        assert!(cert.passed);
    }

    #[test]
    fn disc_ratio_is_exact() {
        let cert = prop3_sweep(&SamplePlan::new(Domain::unit_disc(), 1)).unwrap();
        assert!(cert.passed, "{:?}", cert.checks);
        assert!(cert.samples.iter().all(|s| (s.value - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn remark_d_on_disc() {
        let cert = remark_d_limit(&SamplePlan::new(Domain::unit_disc(), 1).with_per_rung(4)).unwrap();
        assert!(cert.passed, "{:?}", cert.checks);
        let u = ComplexPoint::new(0.99, 0.0);
        let beta = ExactBergmanMetric::unit_disc().density(u).unwrap();
        assert!((0.01 * beta - 0.710_660_08).abs() < 1e-8);
    }

    #[test]
    fn monotonicity_of_identical_domains_is_equality() {
        let d = Domain::unit_disc();
        let pts = sample_points(&d, 5, 3, 0.2).unwrap();
        let cert = monotonicity_check(&d, &d, &pts).unwrap();
        assert!(cert.passed);
        assert!(cert.samples.iter().all(|s| s.margin.unwrap().abs() <= 1e-10));
    }

    #[test]
    fn monotonicity_detects_non_nesting() {
        let big = Domain::unit_disc();
        let small = Domain::disc(0.8).unwrap();
        let pts = [ComplexPoint::new(0.1, 0.0)];
        assert!(matches!(
            monotonicity_check(&big, &small, &pts),
            Err(Error::NotNested { .. })
        ));
    }

    #[test]
    fn scaled_disc_kernel_at_origin() {
        let small = Domain::disc(0.8).unwrap();
        let cert = monotonicity_check(&small, &Domain::unit_disc(), &[ComplexPoint::new(0.0, 0.0)]).unwrap();
        assert!((cert.samples[0].value - 1.0 / (0.64 * PI)).abs() < 1e-8);
        assert!(cert.passed);
    }

    #[test]
    fn isolated_point_bergman_matches_disc() {
        let cert = isolated_point_check(&[1e-1, 1e-3]).unwrap();
        assert!(cert.check("b_matches_disc").unwrap().passed);
        assert!(cert.samples[2].value > cert.samples[0].value);
        assert!(cert.worst_margin >= -1e-9);
    }
}
