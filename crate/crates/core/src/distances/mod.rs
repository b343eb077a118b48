//! Distance engines: closed forms on discs, pullbacks through Riemann maps,
//! graph geodesics of numerical metrics, and deck-orbit minima on coverings.

pub mod covering;
pub mod curve;
pub mod graph;
mod radial;

use serde::{Deserialize, Serialize};

pub use covering::{annulus_kobayashi_metric, punctured_kobayashi_metric, OrbitMinimum, DEFAULT_KMAX};
pub use curve::{disc_geodesic_curve, integrate_metric, Curve};
pub use graph::DEFAULT_RESOLUTION;

use crate::disc::{bergman_disc, kobayashi_disc, DiscPair};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::geometry::{contains, ensure_finite};
use crate::kernel::{AnnulusSeriesMetric, MetricField};
use crate::ComplexPoint;

/// How a distance value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Pullback,
    GraphGeodesic,
    CoveringOrbit,
}

/// Slack around a distance value: the true value lies in
/// `[value − lower, value + upper]` as far as the engine can tell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub const EXACT: Bracket = Bracket {
        lower: 0.0,
        upper: 0.0,
    };

    pub fn symmetric(width: f64) -> Self {
        Self {
            lower: width,
            upper: width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub method: Method,
    pub bracket: Bracket,
}

impl DistanceEstimate {
    fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            bracket: Bracket::EXACT,
        }
    }

    pub fn lower_end(&self) -> f64 {
        (self.value - self.bracket.lower).max(0.0)
    }

    pub fn upper_end(&self) -> f64 {
        self.value + self.bracket.upper
    }
}

/// Tunables shared by the engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineOptions {
    /// Geodesic grid resolution.
    pub resolution: usize,
    /// Gram basis degree for explicit kernel queries.
    pub degree: usize,
    /// Deck-orbit half-width for covering distances.
    pub kmax: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            degree: 40,
            kmax: DEFAULT_KMAX,
        }
    }
}

/// Shortest path of `metric` from `z` to `w` on a grid of the given
/// resolution, smoothed coarse to fine.
///
/// The value integrates the metric along an admissible curve and is therefore
/// an upper estimate; the bracket is the change over the last refinement level.
/// For radial metrics on the annulus the last level is the exact geodesic in
/// the path's homotopy class, obtained from the Clairaut relation.
pub fn graph_geodesic(
    domain: &Domain,
    metric: &dyn MetricField,
    z: ComplexPoint,
    w: ComplexPoint,
    resolution: usize,
) -> Result<DistanceEstimate> {
    let path = graph::shortest_path(domain, metric, z, w, resolution)?;
    Ok(DistanceEstimate {
        value: path.value,
        method: Method::GraphGeodesic,
        bracket: Bracket::symmetric((path.value - path.previous).abs()),
    })
}

/// Graph geodesic together with the smoothed curve it integrates over.
pub fn graph_geodesic_curve(
    domain: &Domain,
    metric: &dyn MetricField,
    z: ComplexPoint,
    w: ComplexPoint,
    resolution: usize,
) -> Result<(DistanceEstimate, Curve)> {
    let path = graph::shortest_path(domain, metric, z, w, resolution)?;
    let estimate = DistanceEstimate {
        value: path.value,
        method: Method::GraphGeodesic,
        bracket: Bracket::symmetric((path.value - path.previous).abs()),
    };
    Ok((estimate, Curve::new(path.points)?))
}

/// Distance engines bound to one domain and option set.
#[derive(Debug, Clone)]
pub struct DistanceEngine {
    domain: Domain,
    options: EngineOptions,
}

impl DistanceEngine {
    pub fn new(domain: Domain) -> Self {
        Self {
            domain,
            options: EngineOptions::default(),
        }
    }

    pub fn with_options(domain: Domain, options: EngineOptions) -> Self {
        Self { domain, options }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn options(&self) -> EngineOptions {
        self.options
    }

    fn check(&self, z: ComplexPoint) -> Result<()> {
        ensure_finite(z, "distance argument")?;
        if contains(&self.domain, z) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain { z })
        }
    }

    /// Preimages in the unit disc for simply connected domains and the
    /// punctured disc.
    fn disc_pair(&self, z: ComplexPoint, w: ComplexPoint) -> Result<DiscPair> {
        match &self.domain {
            Domain::Disc(d) => DiscPair::new(z / d.radius(), w / d.radius()),
            Domain::Conformal(c) => DiscPair::new(c.inverse_map(z)?, c.inverse_map(w)?),
            Domain::PuncturedDisc(_) => DiscPair::new(z, w),
            Domain::Annulus(_) => Err(Error::UnsupportedDomain {
                operation: "disc pullback",
                domain: self.domain.to_string(),
            }),
        }
    }

    /// `b_D(z, w)`.
    pub fn bergman(&self, z: ComplexPoint, w: ComplexPoint) -> Result<DistanceEstimate> {
        self.check(z)?;
        self.check(w)?;
        match &self.domain {
            Domain::Disc(_) | Domain::PuncturedDisc(_) => Ok(DistanceEstimate::exact(
                bergman_disc(&self.disc_pair(z, w)?),
                Method::ClosedForm,
            )),
            Domain::Conformal(_) => Ok(DistanceEstimate::exact(
                bergman_disc(&self.disc_pair(z, w)?),
                Method::Pullback,
            )),
            Domain::Annulus(a) => {
                let metric = AnnulusSeriesMetric::new(a.inner_radius())?;
                graph_geodesic(&self.domain, &metric, z, w, self.options.resolution)
            }
        }
    }

    /// `k_D(z, w)`.
    pub fn kobayashi(&self, z: ComplexPoint, w: ComplexPoint) -> Result<DistanceEstimate> {
        self.check(z)?;
        self.check(w)?;
        match &self.domain {
            Domain::Disc(_) => Ok(DistanceEstimate::exact(
                kobayashi_disc(&self.disc_pair(z, w)?),
                Method::ClosedForm,
            )),
            Domain::Conformal(_) => Ok(DistanceEstimate::exact(
                kobayashi_disc(&self.disc_pair(z, w)?),
                Method::Pullback,
            )),
            Domain::Annulus(a) => {
                let model = covering::annulus_model(a.inner_radius(), z, w);
                let orbit = covering::orbit_minimum(model, self.options.kmax)?;
                Ok(DistanceEstimate::exact(orbit.value, Method::CoveringOrbit))
            }
            Domain::PuncturedDisc(_) => {
                let orbit = covering::orbit_minimum(covering::punctured_model(z, w), self.options.kmax)?;
                Ok(DistanceEstimate::exact(orbit.value, Method::CoveringOrbit))
            }
        }
    }

    /// Deck-orbit details behind [`Self::kobayashi`] on multiply connected domains.
    pub fn kobayashi_orbit(&self, z: ComplexPoint, w: ComplexPoint) -> Result<OrbitMinimum> {
        self.check(z)?;
        self.check(w)?;
        match &self.domain {
            Domain::Annulus(a) => {
                covering::orbit_minimum(covering::annulus_model(a.inner_radius(), z, w), self.options.kmax)
            }
            Domain::PuncturedDisc(_) => {
                covering::orbit_minimum(covering::punctured_model(z, w), self.options.kmax)
            }
            _ => Err(Error::UnsupportedDomain {
                operation: "deck-orbit Kobayashi distance",
                domain: self.domain.to_string(),
            }),
        }
    }

    /// `c_D(z, w)` on simply connected domains, where the Riemann map is extremal.
    pub fn caratheodory(&self, z: ComplexPoint, w: ComplexPoint) -> Result<DistanceEstimate> {
        if !self.domain.is_simply_connected() {
            return Err(Error::UnsupportedDomain {
                operation: "Carathéodory distance",
                domain: self.domain.to_string(),
            });
        }
        self.check(z)?;
        self.check(w)?;
        Ok(DistanceEstimate::exact(
            kobayashi_disc(&self.disc_pair(z, w)?),
            Method::Pullback,
        ))
    }

    /// Infinitesimal Kobayashi metric `κ_D(z; 1)`.
    pub fn kobayashi_metric(&self, z: ComplexPoint) -> Result<f64> {
        self.check(z)?;
        Ok(match &self.domain {
            Domain::Disc(d) => {
                let (r, m) = (d.radius(), z.norm());
                r / ((r - m) * (r + m))
            }
            Domain::Conformal(c) => {
                let zeta = c.inverse_map(z)?;
                let m = zeta.norm();
                1.0 / ((1.0 - m) * (1.0 + m) * c.evaluate_map(zeta).1.norm())
            }
            Domain::Annulus(a) => annulus_kobayashi_metric(a.inner_radius(), z.norm()),
            Domain::PuncturedDisc(_) => punctured_kobayashi_metric(z.norm()),
        })
    }

    /// Infinitesimal Carathéodory metric on simply connected domains.
    pub fn caratheodory_metric(&self, z: ComplexPoint) -> Result<f64> {
        if !self.domain.is_simply_connected() {
            return Err(Error::UnsupportedDomain {
                operation: "Carathéodory metric",
                domain: self.domain.to_string(),
            });
        }
        self.kobayashi_metric(z)
    }
}

/// `b_D(z, w)` with default options.
pub fn bergman_distance(domain: &Domain, z: ComplexPoint, w: ComplexPoint) -> Result<DistanceEstimate> {
    DistanceEngine::new(domain.clone()).bergman(z, w)
}

/// `k_D(z, w)` with default options.
pub fn kobayashi_distance(domain: &Domain, z: ComplexPoint, w: ComplexPoint) -> Result<DistanceEstimate> {
    DistanceEngine::new(domain.clone()).kobayashi(z, w)
}

/// `c_D(z, w)`; simply connected domains only.
pub fn caratheodory_distance(domain: &Domain, z: ComplexPoint, w: ComplexPoint) -> Result<DistanceEstimate> {
    DistanceEngine::new(domain.clone()).caratheodory(z, w)
}

/// `κ_D(z; 1)` with default options.
pub fn kobayashi_metric(domain: &Domain, z: ComplexPoint) -> Result<f64> {
    DistanceEngine::new(domain.clone()).kobayashi_metric(z)
}
