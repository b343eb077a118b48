//! Seeded sample plans: point pairs at prescribed boundary depths plus
//! optional bulk pairs drawn uniformly from the domain.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distances::EngineOptions;
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::geometry::{contains, dist_to_boundary};
use crate::ComplexPoint;

/// Boundary-depth rungs.
pub const DEFAULT_LADDER: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Deeper rungs would put Gram-route metrics below their conditioning floor.
const DEEPEST_RUNG: f64 = 1e-3;
const SHALLOWEST_RUNG: f64 = 0.5;
/// Bulk points keep this distance from the boundary.
const MIN_BULK_DEPTH: f64 = 1e-3;
const MAX_REJECTIONS: usize = 1000;
/// Anchors of anchored pairs keep this distance from the boundary.
const ANCHOR_DEPTH: f64 = 0.05;

/// A pair to evaluate, tagged with its rung.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannedPair {
    pub id: usize,
    pub rung: Option<f64>,
    pub z: ComplexPoint,
    pub w: ComplexPoint,
}

/// Deterministic description of the pairs a certificate is computed over.
#[derive(Debug, Clone)]
pub struct SamplePlan {
    pub domain: Domain,
    pub seed: u64,
    pub ladder: Vec<f64>,
    /// Pairs per rung. Rung `k` reuses the random draws of every other rung,
    /// so rungs differ only in depth.
    pub per_rung: usize,
    /// Pairs drawn uniformly from the domain.
    pub bulk: usize,
    /// Explicit pairs evaluated in addition to generated ones.
    pub pairs: Vec<(ComplexPoint, ComplexPoint)>,
    pub options: EngineOptions,
}

impl SamplePlan {
    pub fn new(domain: Domain, seed: u64) -> Self {
        Self {
            domain,
            seed,
            ladder: DEFAULT_LADDER.to_vec(),
            per_rung: 16,
            bulk: 0,
            pairs: Vec::new(),
            options: EngineOptions::default(),
        }
    }

    pub fn with_ladder(mut self, ladder: &[f64]) -> Self {
        self.ladder = ladder.to_vec();
        self
    }

    pub fn with_per_rung(mut self, n: usize) -> Self {
        self.per_rung = n;
        self
    }

    pub fn with_bulk(mut self, n: usize) -> Self {
        self.bulk = n;
        self
    }

    pub fn with_pairs(mut self, pairs: Vec<(ComplexPoint, ComplexPoint)>) -> Self {
        self.pairs = pairs;
        self
    }

    pub fn with_options(mut self, options: EngineOptions) -> Self {
        self.options = options;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for &d in &self.ladder {
            if !(DEEPEST_RUNG..=SHALLOWEST_RUNG).contains(&d) {
                return Err(Error::InvalidPlan(format!(
                    "rung {d} outside [{DEEPEST_RUNG}, {SHALLOWEST_RUNG}]"
                )));
            }
        }
        for &(z, w) in &self.pairs {
            for p in [z, w] {
                if !contains(&self.domain, p) {
                    return Err(Error::PointOutsideDomain { z: p });
                }
            }
        }
        Ok(())
    }

    fn draws(&self) -> Vec<Draw> {
        let components = self.domain.boundary_components();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.per_rung)
            .map(|i| {
                let comp_z = rng.gen_range(0..components);
                let comp_w = if components > 1 && i % 4 == 3 { 1 - comp_z } else { comp_z };
                Draw {
                    comp_z,
                    comp_w,
                    theta: rng.gen::<f64>() * 2.0 * PI,
                    spread: rng.gen(),
                    lift: rng.gen(),
                    sign: if rng.gen::<bool>() { 1.0 } else { -1.0 },
                }
            })
            .collect()
    }

    /// Every pair of the plan: ladder pairs rung by rung, then bulk pairs, then
    /// explicit pairs. Generated pairs that fall outside the domain or below
    /// the deepest rung's floor are dropped.
    pub fn pairs(&self) -> Result<Vec<PlannedPair>> {
        self.validate()?;
        let mut out = Vec::new();
        let draws = self.draws();
        let cap = max_depth(&self.domain);
        for &d in &self.ladder {
            for draw in &draws {
                // angular offset log-uniform between d/10 and π
                let delta = ((d / 10.0).ln() * (1.0 - draw.spread) + PI.ln() * draw.spread).exp();
                let dw = (d * 10f64.powf(draw.lift)).min(cap);
                let z = depth_point(&self.domain, draw.comp_z, draw.theta, d)?;
                let w = depth_point(&self.domain, draw.comp_w, draw.theta + draw.sign * delta, dw)?;
                if admissible(&self.domain, z, w, 0.5 * DEEPEST_RUNG) {
                    out.push(PlannedPair {
                        id: out.len(),
                        rung: Some(d),
                        z,
                        w,
                    });
                }
            }
        }
        self.append_bulk_and_explicit(&mut out)?;
        Ok(out)
    }

    /// Like [`Self::pairs`], but each ladder point is paired with a fixed
    /// interior anchor shared by all rungs, so only one point approaches the
    /// boundary.
    pub fn anchored_pairs(&self) -> Result<Vec<PlannedPair>> {
        self.validate()?;
        let mut out = Vec::new();
        let draws = self.draws();
        let mut anchor_rng = ChaCha8Rng::seed_from_u64(self.seed);
        anchor_rng.set_stream(2);
        let anchors = uniform_points(&self.domain, draws.len(), ANCHOR_DEPTH, &mut anchor_rng)?;
        for &d in &self.ladder {
            for (draw, &w) in draws.iter().zip(&anchors) {
                let z = depth_point(&self.domain, draw.comp_z, draw.theta, d)?;
                if admissible(&self.domain, z, w, 0.5 * DEEPEST_RUNG) {
                    out.push(PlannedPair {
                        id: out.len(),
                        rung: Some(d),
                        z,
                        w,
                    });
                }
            }
        }
        self.append_bulk_and_explicit(&mut out)?;
        Ok(out)
    }

    fn append_bulk_and_explicit(&self, out: &mut Vec<PlannedPair>) -> Result<()> {
        let mut bulk_rng = ChaCha8Rng::seed_from_u64(self.seed);
        bulk_rng.set_stream(1);
        let bulk = uniform_points(&self.domain, 2 * self.bulk, MIN_BULK_DEPTH, &mut bulk_rng)?;
        for pair in bulk.chunks_exact(2) {
            out.push(PlannedPair {
                id: out.len(),
                rung: None,
                z: pair[0],
                w: pair[1],
            });
        }
        for &(z, w) in &self.pairs {
            out.push(PlannedPair {
                id: out.len(),
                rung: None,
                z,
                w,
            });
        }
        Ok(())
    }
}

struct Draw {
    comp_z: usize,
    comp_w: usize,
    theta: f64,
    spread: f64,
    lift: f64,
    sign: f64,
}

fn admissible(domain: &Domain, z: ComplexPoint, w: ComplexPoint, floor: f64) -> bool {
    z != w
        && [z, w]
            .iter()
            .all(|&p| contains(domain, p) && dist_to_boundary(domain, p).is_ok_and(|d| d >= floor))
}

/// Largest depth used for the second point of a ladder pair.
fn max_depth(domain: &Domain) -> f64 {
    match domain {
        Domain::Disc(d) => 0.5 * d.radius(),
        Domain::Annulus(a) => 0.45 * (1.0 - a.inner_radius()),
        Domain::Conformal(_) => 0.3,
        Domain::PuncturedDisc(_) => 0.45,
    }
}

/// Boundary point and unit inward normal of component `component` (0 is the
/// outer boundary) at parameter `theta`.
pub fn boundary_frame(domain: &Domain, component: usize, theta: f64) -> Result<(ComplexPoint, ComplexPoint)> {
    let e = ComplexPoint::from_polar(1.0, theta);
    match (domain, component) {
        (Domain::Disc(d), 0) => Ok((e * d.radius(), -e)),
        (Domain::Annulus(_), 0) | (Domain::PuncturedDisc(_), 0) => Ok((e, -e)),
        (Domain::Annulus(a), 1) => Ok((e * a.inner_radius(), e)),
        (Domain::PuncturedDisc(_), 1) => Ok((ComplexPoint::new(0.0, 0.0), e)),
        (Domain::Conformal(c), 0) => Ok((c.boundary_point(theta), c.inward_normal(theta))),
        _ => Err(Error::InvalidPlan(format!(
            "{domain} has no boundary component {component}"
        ))),
    }
}

fn depth_point(domain: &Domain, component: usize, theta: f64, depth: f64) -> Result<ComplexPoint> {
    let (p, n) = boundary_frame(domain, component, theta)?;
    Ok(p + n * depth)
}

fn bounding_radius(domain: &Domain) -> f64 {
    match domain {
        Domain::Disc(d) => d.radius(),
        Domain::Annulus(_) | Domain::PuncturedDisc(_) => 1.0,
        Domain::Conformal(c) => (0..256)
            .map(|k| c.boundary_point(2.0 * PI * k as f64 / 256.0).norm())
            .fold(0.0, f64::max),
    }
}

fn uniform_points(domain: &Domain, count: usize, min_depth: f64, rng: &mut ChaCha8Rng) -> Result<Vec<ComplexPoint>> {
    let radius = bounding_radius(domain);
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0;
    while out.len() < count {
        let p = ComplexPoint::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * 2.0 * PI);
        if contains(domain, p) && dist_to_boundary(domain, p).is_ok_and(|d| d >= min_depth) {
            out.push(p);
            rejected = 0;
        } else {
            rejected += 1;
            if rejected > MAX_REJECTIONS {
                return Err(Error::InvalidPlan(format!(
                    "no admissible point of {domain} found in {MAX_REJECTIONS} draws"
                )));
            }
        }
    }
    Ok(out)
}

/// `count` seeded points, uniform in area, with boundary distance at least
/// `min_depth`.
pub fn sample_points(domain: &Domain, count: usize, seed: u64, min_depth: f64) -> Result<Vec<ComplexPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    uniform_points(domain, count, min_depth, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_are_deterministic() {
        let plan = SamplePlan::new(Domain::annulus(0.25).unwrap(), 7).with_bulk(5);
        assert_eq!(plan.pairs().unwrap(), plan.pairs().unwrap());
        let other = SamplePlan::new(Domain::annulus(0.25).unwrap(), 8).with_bulk(5);
        assert_ne!(plan.pairs().unwrap(), other.pairs().unwrap());
    }

    #[test]
    fn ladder_points_sit_at_their_depth() {
        for domain in [
            Domain::unit_disc(),
            Domain::annulus(0.25).unwrap(),
            Domain::conformal(&[0.2]).unwrap(),
            Domain::punctured_disc(),
        ] {
            let plan = SamplePlan::new(domain.clone(), 3).with_per_rung(12);
            let pairs = plan.pairs().unwrap();
            assert!(pairs.len() >= 30, "{domain}: {}", pairs.len());
            for p in pairs {
                let d = dist_to_boundary(&domain, p.z).unwrap();
                let rung = p.rung.unwrap();
                assert!((d - rung).abs() <= 1e-3 * rung, "{domain}: {d} vs {rung}");
                assert!(contains(&domain, p.w));
            }
        }
    }

    #[test]
    fn rungs_share_their_draws() {
        let plan = SamplePlan::new(Domain::unit_disc(), 11).with_per_rung(6);
        let pairs = plan.pairs().unwrap();
        let first: Vec<_> = pairs.iter().filter(|p| p.rung == Some(1e-1)).collect();
        let last: Vec<_> = pairs.iter().filter(|p| p.rung == Some(1e-3)).collect();
        for (a, b) in first.iter().zip(&last) {
            assert!((a.z.arg() - b.z.arg()).abs() < 1e-12);
        }
    }

    #[test]
    fn anchored_pairs_keep_their_partner() {
        let plan = SamplePlan::new(Domain::annulus(0.25).unwrap(), 9).with_per_rung(5);
        let pairs = plan.anchored_pairs().unwrap();
        assert_eq!(pairs.len(), 15);
        for k in 0..5 {
            assert_eq!(pairs[k].w, pairs[k + 5].w);
            assert_eq!(pairs[k].w, pairs[k + 10].w);
            assert!(dist_to_boundary(&plan.domain, pairs[k].w).unwrap() >= 0.05);
            let d = dist_to_boundary(&plan.domain, pairs[k + 10].z).unwrap();
            assert!((d - 1e-3).abs() <= 1e-6);
        }
    }

    #[test]
    fn rungs_below_the_floor_are_rejected() {
        let plan = SamplePlan::new(Domain::unit_disc(), 1).with_ladder(&[1e-4]);
        assert!(matches!(plan.pairs(), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn sample_points_respect_depth() {
        let a = Domain::annulus(0.5).unwrap();
        for p in sample_points(&a, 200, 4, 1e-2).unwrap() {
            assert!(dist_to_boundary(&a, p).unwrap() >= 1e-2);
        }
    }
}
