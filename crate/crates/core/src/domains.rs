//! Domain models with holomorphic structure.
//!
//! Four bounded planar domains are supported: discs centred at the origin,
//! conformal images `ϕ(𝔻)` of the unit disc under a polynomial map
//! `ϕ(ζ) = ζ + Σ aₖ ζ^{k+1}`, the annulus `A(r, 1)` and the punctured unit
//! disc. The conformal model carries its Riemann map explicitly, so metrics
//! and distances can be transported exactly between `𝔻` and `ϕ(𝔻)`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segments_intersect, BoundaryPolyline, DEFAULT_ACCURACY};
use crate::ComplexPoint;

/// Radial × angular resolution of the `|ϕ′|` injectivity scan.
const INJECTIVITY_GRID: usize = 512;
/// Samples of the boundary curve used for the self-intersection scan.
const SIMPLICITY_SAMPLES: usize = 4096;
/// Samples of the boundary curve cached for distance queries.
pub(crate) const CACHED_BOUNDARY_SAMPLES: usize = 1024;

const NEWTON_MAX_ITERATIONS: usize = 50;
const NEWTON_RESIDUAL: f64 = 1e-12;

/// Pre-images with modulus above this are treated as boundary points.
const INTERIOR_SLACK: f64 = 1e-12;

/// A coefficient in the JSON domain schema: a bare number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Coefficient> for Complex64 {
    fn from(c: Coefficient) -> Self {
        match c {
            Coefficient::Real(re) => Complex64::new(re, 0.0),
            Coefficient::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Coefficient {
    fn from(c: Complex64) -> Self {
        if c.im == 0.0 {
            Coefficient::Real(c.re)
        } else {
            Coefficient::Complex([c.re, c.im])
        }
    }
}

fn unit_radius() -> f64 {
    1.0
}

fn is_unit_radius(r: &f64) -> bool {
    *r == 1.0
}

/// Serializable description of a [`Domain`].
///
/// ```json
/// {"type":"disc"}
/// {"type":"annulus","r":0.25}
/// {"type":"conformal","coeffs":[0.2]}
/// {"type":"punctured_disc"}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc {
        #[serde(default = "unit_radius", skip_serializing_if = "is_unit_radius")]
        radius: f64,
    },
    Annulus {
        r: f64,
    },
    Conformal {
        coeffs: Vec<Coefficient>,
    },
    PuncturedDisc,
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDomain(e.to_string()))
    }

    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainSpec::Disc { radius } => Ok(Domain::Disc(DiscDomain::new(*radius)?)),
            DomainSpec::Annulus { r } => Ok(Domain::Annulus(AnnulusDomain::new(*r)?)),
            DomainSpec::Conformal { coeffs } => Ok(Domain::Conformal(ConformalDomain::new(
                coeffs.iter().map(|&c| c.into()).collect(),
            )?)),
            DomainSpec::PuncturedDisc => Ok(Domain::PuncturedDisc(PuncturedDisc)),
        }
    }
}

/// Disc `{|z| < radius}` centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscDomain {
    radius: f64,
}

impl DiscDomain {
    pub const UNIT: DiscDomain = DiscDomain { radius: 1.0 };

    pub fn new(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "disc radius must be positive, got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// The annulus `A(r, 1) = {r < |z| < 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusDomain {
    r: f64,
}

impl AnnulusDomain {
    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0 && r < 1.0) {
            return Err(Error::InvalidDomain(format!(
                "annulus inner radius must lie in (0, 1), got {r}"
            )));
        }
        Ok(Self { r })
    }

    pub fn inner_radius(&self) -> f64 {
        self.r
    }

    /// Width `log(1/r)` of the covering strip `log r < Re s < 0`.
    pub fn log_modulus(&self) -> f64 {
        -self.r.ln()
    }
}

/// The punctured unit disc `𝔻 ∖ {0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PuncturedDisc;

/// Image of the unit disc under `ϕ(ζ) = ζ + Σₖ aₖ ζ^{k+1}`.
#[derive(Debug, Clone)]
pub struct ConformalDomain {
    coeffs: Vec<Complex64>,
    /// Power-series coefficients of ϕ, lowest degree first (`[0, 1, a₁, a₂, …]`).
    poly: Vec<Complex64>,
    injectivity_margin: f64,
    boundary: Vec<ComplexPoint>,
}

impl ConformalDomain {
    /// Builds the domain and verifies that ϕ is injective on the closed disc.
    ///
    /// `|ϕ′|` is scanned on a 512 × 512 polar grid and the boundary curve is
    /// checked for self-intersections at 4096 samples; either failure aborts.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("conformal coefficients"));
        }
        let mut poly = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        poly.extend(coeffs.iter().copied());
        while poly.len() > 2 && poly.last().is_some_and(|c| c.norm() == 0.0) {
            poly.pop();
        }
        let mut dom = Self {
            coeffs,
            poly,
            injectivity_margin: 0.0,
            boundary: Vec::new(),
        };

        let margin = dom.derivative_scan();
        if margin <= 1e-9 {
            return Err(Error::InvalidDomain(format!(
                "|ϕ′| vanishes on the closed disc (minimum {margin:e})"
            )));
        }
        dom.injectivity_margin = margin;

        let dense: Vec<_> = (0..SIMPLICITY_SAMPLES)
            .map(|k| dom.boundary_point(2.0 * PI * k as f64 / SIMPLICITY_SAMPLES as f64))
            .collect();
        if let Some(w) = self_intersection(&dense) {
            return Err(Error::InvalidDomain(format!(
                "boundary curve self-intersects near {w}"
            )));
        }

        dom.boundary = (0..CACHED_BOUNDARY_SAMPLES)
            .map(|k| dom.boundary_point(2.0 * PI * k as f64 / CACHED_BOUNDARY_SAMPLES as f64))
            .collect();
        Ok(dom)
    }

    /// The showcase domain `ϕ(ζ) = ζ + 0.2ζ²`.
    pub fn showcase() -> Self {
        Self::new(vec![Complex64::new(0.2, 0.0)]).expect("showcase map is univalent")
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn injectivity_margin(&self) -> f64 {
        self.injectivity_margin
    }

    /// Polynomial degree of ϕ.
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    /// `ϕ(ζ)` and `ϕ′(ζ)` by Horner's scheme.
    pub fn evaluate_map(&self, zeta: ComplexPoint) -> (ComplexPoint, ComplexPoint) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for &c in self.poly.iter().rev() {
            deriv = deriv * zeta + value;
            value = value * zeta + c;
        }
        (value, deriv)
    }

    /// `ϕ(e^{iθ})`.
    pub fn boundary_point(&self, theta: f64) -> ComplexPoint {
        self.evaluate_map(Complex64::from_polar(1.0, theta)).0
    }

    /// Unit inward normal of the boundary at `ϕ(e^{iθ})`.
    pub fn inward_normal(&self, theta: f64) -> ComplexPoint {
        let zeta = Complex64::from_polar(1.0, theta);
        let (_, d) = self.evaluate_map(zeta);
        let outward = zeta * d;
        -outward / outward.norm()
    }

    /// Solves `ϕ(ζ) = z` for `ζ` in the open unit disc.
    ///
    /// Damped Newton seeded at `z`; when that lands outside the disc or stalls,
    /// the seed is replaced by the best point of a coarse polar grid.
    pub fn inverse_map(&self, z: ComplexPoint) -> Result<ComplexPoint> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("inverse_map argument"));
        }
        if let Some(zeta) = self.newton(z, z) {
            if zeta.norm() < 1.0 - INTERIOR_SLACK {
                return Ok(zeta);
            }
        }
        let seed = self.grid_seed(z);
        match self.newton(z, seed) {
            Some(zeta) if zeta.norm() < 1.0 - INTERIOR_SLACK => Ok(zeta),
            _ => Err(Error::NoConvergence {
                z,
                iterations: NEWTON_MAX_ITERATIONS,
            }),
        }
    }

    /// Bergman metric `β_D(z; 1) = √2 / ((1 − |ζ|²)|ϕ′(ζ)|)` with `ζ = ϕ⁻¹(z)`.
    pub fn pushforward_bergman_metric(&self, z: ComplexPoint) -> Result<f64> {
        let zeta = self.inverse_map(z)?;
        let (_, d) = self.evaluate_map(zeta);
        Ok(SQRT_2 / (one_minus_norm_sqr(zeta) * d.norm()))
    }

    /// Cached boundary samples `ϕ(e^{2πik/n})`.
    pub(crate) fn boundary_samples(&self) -> &[ComplexPoint] {
        &self.boundary
    }

    fn newton(&self, z: ComplexPoint, seed: ComplexPoint) -> Option<ComplexPoint> {
        let mut zeta = seed;
        let (mut f, mut df) = self.evaluate_map(zeta);
        let mut res = (f - z).norm();
        for _ in 0..NEWTON_MAX_ITERATIONS {
            if res <= NEWTON_RESIDUAL {
                // one polishing step
                let step = (f - z) / df;
                let polished = zeta - step;
                if (self.evaluate_map(polished).0 - z).norm() <= res {
                    zeta = polished;
                }
                return Some(zeta);
            }
            if df.norm() == 0.0 {
                return None;
            }
            let step = (f - z) / df;
            let mut lambda = 1.0;
            loop {
                let cand = zeta - step * lambda;
                let (cf, cdf) = self.evaluate_map(cand);
                let cres = (cf - z).norm();
                if cres < res || lambda < 1.0 / 64.0 {
                    zeta = cand;
                    f = cf;
                    df = cdf;
                    res = cres;
                    break;
                }
                lambda *= 0.5;
            }
            if !(zeta.re.is_finite() && zeta.im.is_finite()) {
                return None;
            }
        }
        (res <= NEWTON_RESIDUAL).then_some(zeta)
    }

    fn grid_seed(&self, z: ComplexPoint) -> ComplexPoint {
        let mut best = Complex64::new(0.0, 0.0);
        let mut best_res = (self.evaluate_map(best).0 - z).norm();
        for i in 1..=12 {
            let rho = i as f64 / 12.5;
            for j in 0..32 {
                let zeta = Complex64::from_polar(rho, 2.0 * PI * j as f64 / 32.0);
                let res = (self.evaluate_map(zeta).0 - z).norm();
                if res < best_res {
                    best = zeta;
                    best_res = res;
                }
            }
        }
        best
    }

    fn derivative_scan(&self) -> f64 {
        let n = INJECTIVITY_GRID;
        let mut min = f64::INFINITY;
        for i in 0..n {
            let rho = i as f64 / (n - 1) as f64;
            for j in 0..n {
                let zeta = Complex64::from_polar(rho, 2.0 * PI * j as f64 / n as f64);
                min = min.min(self.evaluate_map(zeta).1.norm());
            }
        }
        min
    }
}

/// Finds a crossing between non-adjacent edges of a closed loop.
fn self_intersection(loop_pts: &[ComplexPoint]) -> Option<ComplexPoint> {
    let n = loop_pts.len();
    let (mut lo, mut hi) = (loop_pts[0], loop_pts[0]);
    for p in loop_pts {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let cells = (n as f64).sqrt().ceil() as usize;
    let span = Complex64::new((hi.re - lo.re).max(1e-300), (hi.im - lo.im).max(1e-300));
    let cell_of = |p: ComplexPoint| {
        let cx = (((p.re - lo.re) / span.re) * cells as f64).floor() as isize;
        let cy = (((p.im - lo.im) / span.im) * cells as f64).floor() as isize;
        (
            cx.clamp(0, cells as isize - 1) as usize,
            cy.clamp(0, cells as isize - 1) as usize,
        )
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells * cells];
    for k in 0..n {
        let (a, b) = (loop_pts[k], loop_pts[(k + 1) % n]);
        let (ax, ay) = cell_of(a);
        let (bx, by) = cell_of(b);
        for x in ax.min(bx)..=ax.max(bx) {
            for y in ay.min(by)..=ay.max(by) {
                buckets[x * cells + y].push(k);
            }
        }
    }
    for bucket in &buckets {
        for (i, &k) in bucket.iter().enumerate() {
            for &l in &bucket[i + 1..] {
                let gap = k.abs_diff(l);
                if gap <= 1 || gap == n - 1 {
                    continue;
                }
                let (a, b) = (loop_pts[k], loop_pts[(k + 1) % n]);
                let (c, d) = (loop_pts[l], loop_pts[(l + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Some(a);
                }
            }
        }
    }
    None
}

/// `1 − |z|²` evaluated as `(1 − |z|)(1 + |z|)`.
pub(crate) fn one_minus_norm_sqr(z: ComplexPoint) -> f64 {
    let m = z.norm();
    (1.0 - m) * (1.0 + m)
}

/// A bounded planar domain.
#[derive(Debug, Clone)]
pub enum Domain {
    Disc(DiscDomain),
    Conformal(ConformalDomain),
    Annulus(AnnulusDomain),
    PuncturedDisc(PuncturedDisc),
}

impl Domain {
    pub fn unit_disc() -> Self {
        Domain::Disc(DiscDomain::UNIT)
    }

    pub fn disc(radius: f64) -> Result<Self> {
        Ok(Domain::Disc(DiscDomain::new(radius)?))
    }

    pub fn annulus(r: f64) -> Result<Self> {
        Ok(Domain::Annulus(AnnulusDomain::new(r)?))
    }

    pub fn conformal(coeffs: &[f64]) -> Result<Self> {
        Ok(Domain::Conformal(ConformalDomain::new(
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )?))
    }

    pub fn punctured_disc() -> Self {
        Domain::PuncturedDisc(PuncturedDisc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        DomainSpec::from_json(text)?.build()
    }

    pub fn spec(&self) -> DomainSpec {
        match self {
            Domain::Disc(d) => DomainSpec::Disc { radius: d.radius },
            Domain::Annulus(a) => DomainSpec::Annulus { r: a.r },
            Domain::Conformal(c) => DomainSpec::Conformal {
                coeffs: c.coeffs.iter().map(|&a| a.into()).collect(),
            },
            Domain::PuncturedDisc(_) => DomainSpec::PuncturedDisc,
        }
    }

    /// Simply connected domains admit a Riemann map and hence Carathéodory
    /// distances equal to Kobayashi distances.
    pub fn is_simply_connected(&self) -> bool {
        matches!(self, Domain::Disc(_) | Domain::Conformal(_))
    }

    /// Number of boundary components (the puncture counts as one).
    pub fn boundary_components(&self) -> usize {
        match self {
            Domain::Disc(_) | Domain::Conformal(_) => 1,
            Domain::Annulus(_) | Domain::PuncturedDisc(_) => 2,
        }
    }

    /// Declared relative accuracy of boundary-distance queries.
    pub fn boundary_accuracy(&self) -> f64 {
        match self {
            Domain::Conformal(_) => DEFAULT_ACCURACY,
            _ => 0.0,
        }
    }

    /// Boundary polyline with `n` points per component.
    pub fn polyline(&self, n: usize) -> Result<BoundaryPolyline> {
        crate::geometry::boundary_polyline(self, n)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Disc(d) if d.radius == 1.0 => write!(f, "disc"),
            Domain::Disc(d) => write!(f, "disc(radius={})", d.radius),
            Domain::Annulus(a) => write!(f, "annulus(r={})", a.r),
            Domain::Conformal(c) => {
                write!(f, "conformal[")?;
                for (k, a) in c.coeffs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    if a.im == 0.0 {
                        write!(f, "{}", a.re)?;
                    } else {
                        write!(f, "{}{:+}i", a.re, a.im)?;
                    }
                }
                write!(f, "]")
            }
            Domain::PuncturedDisc(_) => write!(f, "punctured_disc"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_values() {
        let d = ConformalDomain::showcase();
        assert_eq!(d.evaluate_map(c(0.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0)));
        let (v, dv) = d.evaluate_map(c(1.0, 0.0));
        assert!((v - c(1.2, 0.0)).norm() < 1e-15 && (dv - c(1.4, 0.0)).norm() < 1e-15);
        let (v, dv) = d.evaluate_map(c(0.0, 1.0));
        assert!((v - c(-0.2, 1.0)).norm() < 1e-15);
        assert!((dv - c(1.0, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn inverse_map_examples() {
        let d = ConformalDomain::showcase();
        let zeta = d.inverse_map(c(0.55, 0.0)).unwrap();
        assert!((zeta - c(0.5, 0.0)).norm() < 1e-12);
        assert_eq!(d.inverse_map(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            d.inverse_map(c(1.2, 0.0)),
            Err(Error::NoConvergence { .. })
        ));
        assert!(d.inverse_map(c(2.0, 0.5)).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let id = ConformalDomain::new(vec![]).unwrap();
        assert!((id.pushforward_bergman_metric(c(0.0, 0.0)).unwrap() - 1.4142136).abs() < 1e-7);
        assert!((id.pushforward_bergman_metric(c(0.5, 0.0)).unwrap() - 1.8856181).abs() < 1e-7);
        let d = ConformalDomain::showcase();
        assert!((d.pushforward_bergman_metric(c(0.55, 0.0)).unwrap() - 1.5713485).abs() < 1e-7);
    }

    #[test]
    fn rejects_non_univalent_maps() {
        // ϕ′(ζ) = 1 + 1.2ζ vanishes at ζ = −1/1.2 inside the disc
        assert!(ConformalDomain::new(vec![c(0.6, 0.0)]).is_err());
        // ϕ′ = 1 + 4·0.3 ζ³ vanishes at |ζ| = 0.94
        assert!(ConformalDomain::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)]).is_err());
        assert!(ConformalDomain::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn domain_json_schema() {
        let d = Domain::from_json(r#"{"type":"disc"}"#).unwrap();
        assert!(matches!(d, Domain::Disc(DiscDomain { radius }) if radius == 1.0));
        let a = Domain::from_json(r#"{"type":"annulus","r":0.25}"#).unwrap();
        assert_eq!(a.to_string(), "annulus(r=0.25)");
        let k = Domain::from_json(r#"{"type":"conformal","coeffs":[0.2,[0.0,0.01]]}"#).unwrap();
        match k {
            Domain::Conformal(cd) => assert_eq!(cd.coeffs(), &[c(0.2, 0.0), c(0.0, 0.01)]),
            _ => panic!("expected conformal"),
        }
        assert!(matches!(
            Domain::from_json(r#"{"type":"punctured_disc"}"#).unwrap(),
            Domain::PuncturedDisc(_)
        ));
        assert!(Domain::from_json(r#"{"type":"annulus","r":1.5}"#).is_err());
        assert!(Domain::from_json(r#"{"type":"annulus","r":0.5,"extra":1}"#).is_err());
        assert!(Domain::from_json(r#"{"type":"square"}"#).is_err());
    }

    #[test]
    fn spec_round_trips() {
        for text in [
            r#"{"type":"disc"}"#,
            r#"{"type":"disc","radius":0.8}"#,
            r#"{"type":"annulus","r":0.25}"#,
            r#"{"type":"conformal","coeffs":[0.2]}"#,
            r#"{"type":"punctured_disc"}"#,
        ] {
            let spec = DomainSpec::from_json(text).unwrap();
            assert_eq!(serde_json::to_string(&spec).unwrap(), text);
            assert_eq!(spec.build().unwrap().spec(), spec);
        }
    }
}
