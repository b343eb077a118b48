//! Boundary discretization, membership and the boundary-distance function `d_D`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::domains::{ConformalDomain, Domain};
use crate::error::{Error, Result};
use crate::ComplexPoint;

/// Target relative accuracy of `d_D` on sampled boundaries.
pub const DEFAULT_ACCURACY: f64 = 1e-6;

/// Points closer than this to the boundary are rejected.
pub const DEGENERATE_DISTANCE: f64 = 1e-14;

const MIN_SAMPLES: usize = 8;

/// Sampled boundary: one closed loop per component, closing edge implicit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPolyline {
    pub loops: Vec<Vec<ComplexPoint>>,
    /// Target relative accuracy of distance queries refined from this polyline.
    pub accuracy: f64,
}

impl BoundaryPolyline {
    pub fn component_count(&self) -> usize {
        self.loops.len()
    }

    /// Euclidean distance from `z` to the polyline edges.
    pub fn distance(&self, z: ComplexPoint) -> f64 {
        self.loops
            .iter()
            .map(|lp| match lp.len() {
                1 => (z - lp[0]).norm(),
                n => (0..n)
                    .map(|k| point_segment_distance(z, lp[k], lp[(k + 1) % n]))
                    .fold(f64::INFINITY, f64::min),
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn ensure_finite(z: ComplexPoint, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn point_segment_distance(z: ComplexPoint, a: ComplexPoint, b: ComplexPoint) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

fn orient(a: ComplexPoint, b: ComplexPoint, c: ComplexPoint) -> f64 {
    ((b - a).conj() * (c - a)).im
}

/// Proper or touching intersection of closed segments `[a,b]` and `[c,d]`.
pub(crate) fn segments_intersect(
    a: ComplexPoint,
    b: ComplexPoint,
    c: ComplexPoint,
    d: ComplexPoint,
) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: ComplexPoint, q: ComplexPoint, r: ComplexPoint, o: f64| {
        o == 0.0
            && r.re >= p.re.min(q.re)
            && r.re <= p.re.max(q.re)
            && r.im >= p.im.min(q.im)
            && r.im <= p.im.max(q.im)
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}

/// True iff `z` lies in the open domain. Boundary points report false.
pub fn contains(domain: &Domain, z: ComplexPoint) -> bool {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return false;
    }
    let m = z.norm();
    match domain {
        Domain::Disc(d) => m < d.radius(),
        Domain::Annulus(a) => m > a.inner_radius() && m < 1.0,
        Domain::PuncturedDisc(_) => m > 0.0 && m < 1.0,
        Domain::Conformal(c) => c.inverse_map(z).is_ok(),
    }
}

/// `d_D(z) = dist(z, ∂D)`.
///
/// Exact for discs, annuli and the punctured disc. Conformal images use the
/// cached boundary polyline to locate candidate edges and then minimize
/// `|ϕ(e^{iθ}) − z|` over each candidate's parameter interval.
pub fn dist_to_boundary(domain: &Domain, z: ComplexPoint) -> Result<f64> {
    ensure_finite(z, "dist_to_boundary argument")?;
    if !contains(domain, z) {
        return Err(Error::PointOutsideDomain { z });
    }
    let m = z.norm();
    let d = match domain {
        Domain::Disc(disc) => disc.radius() - m,
        Domain::Annulus(a) => (m - a.inner_radius()).min(1.0 - m),
        Domain::PuncturedDisc(_) => m.min(1.0 - m),
        Domain::Conformal(c) => conformal_distance(c, c.boundary_samples(), z),
    };
    if d < DEGENERATE_DISTANCE {
        return Err(Error::DegenerateQuery { z, distance: d });
    }
    Ok(d)
}

/// Boundary distance on a conformal image refined from `n` uniform samples.
pub fn conformal_distance_with(domain: &ConformalDomain, z: ComplexPoint, n: usize) -> Result<f64> {
    if n < MIN_SAMPLES {
        return Err(Error::TooCoarse { n });
    }
    let samples: Vec<_> = (0..n)
        .map(|k| domain.boundary_point(2.0 * PI * k as f64 / n as f64))
        .collect();
    Ok(conformal_distance(domain, &samples, z))
}

fn conformal_distance(domain: &ConformalDomain, samples: &[ComplexPoint], z: ComplexPoint) -> f64 {
    let n = samples.len();
    let step = 2.0 * PI / n as f64;
    let mut seg = Vec::with_capacity(n);
    let mut sag = 0.0_f64;
    for k in 0..n {
        let (a, b) = (samples[k], samples[(k + 1) % n]);
        seg.push(point_segment_distance(z, a, b));
        let mid = domain.boundary_point((k as f64 + 0.5) * step);
        sag = sag.max((mid - (a + b) * 0.5).norm());
    }
    let best = seg.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = 2.0 * sag + 1e-15;
    let dist2 = |theta: f64| (domain.boundary_point(theta) - z).norm_sqr();

    let mut refined = f64::INFINITY;
    for (k, &s) in seg.iter().enumerate() {
        if s > best + slack {
            continue;
        }
        let (lo, hi) = ((k as f64 - 1.0) * step, (k as f64 + 2.0) * step);
        let theta = golden_section(dist2, lo, hi, 1e-13);
        refined = refined.min(dist2(theta).sqrt());
        // the interval ends are sampled points too
        refined = refined.min(dist2(lo).sqrt()).min(dist2(hi).sqrt());
    }
    refined
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn circle(radius: f64, n: usize, clockwise: bool) -> Vec<ComplexPoint> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            Complex64::from_polar(radius, if clockwise { -t } else { t })
        })
        .collect()
}

/// Samples `n` points per boundary component by uniform parameter.
///
/// The outer loop runs counterclockwise and inner loops clockwise, so the
/// domain lies to the left of every loop. The puncture of the punctured disc
/// is a single-vertex loop.
pub fn boundary_polyline(domain: &Domain, n: usize) -> Result<BoundaryPolyline> {
    if n < MIN_SAMPLES {
        return Err(Error::TooCoarse { n });
    }
    let loops = match domain {
        Domain::Disc(d) => vec![circle(d.radius(), n, false)],
        Domain::Annulus(a) => vec![circle(1.0, n, false), circle(a.inner_radius(), n, true)],
        Domain::PuncturedDisc(_) => vec![circle(1.0, n, false), vec![Complex64::new(0.0, 0.0)]],
        Domain::Conformal(c) => vec![(0..n)
            .map(|k| c.boundary_point(2.0 * PI * k as f64 / n as f64))
            .collect()],
    };
    Ok(BoundaryPolyline {
        loops,
        accuracy: DEFAULT_ACCURACY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn distance_examples() {
        let disc = Domain::unit_disc();
        assert!((dist_to_boundary(&disc, c(0.3, 0.0)).unwrap() - 0.7).abs() < 1e-15);
        let ann = Domain::annulus(0.25).unwrap();
        assert_eq!(dist_to_boundary(&ann, c(0.5, 0.0)).unwrap(), 0.25);
        let conf = Domain::conformal(&[0.2]).unwrap();
        let d = dist_to_boundary(&conf, c(0.0, 0.0)).unwrap();
        // dense-sampling oracle: min over θ of √(1.04 + 0.4 cos θ)
        let oracle = (0..200_000)
            .map(|k| (1.04 + 0.4 * (2.0 * PI * k as f64 / 200_000.0).cos()).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!((oracle - 0.8).abs() < 1e-9);
        assert!((d - oracle).abs() <= 1e-6 * oracle, "{d}");
    }

    #[test]
    fn distance_errors() {
        let disc = Domain::unit_disc();
        assert!(matches!(
            dist_to_boundary(&disc, c(1.5, 0.0)),
            Err(Error::PointOutsideDomain { .. })
        ));
        assert!(matches!(
            dist_to_boundary(&disc, c(1.0 - 1e-15, 0.0)),
            Err(Error::DegenerateQuery { .. })
        ));
        assert!(dist_to_boundary(&disc, c(f64::NAN, 0.0)).is_err());
        let punct = Domain::punctured_disc();
        assert!(dist_to_boundary(&punct, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(contains(&Domain::unit_disc(), c(0.5, 0.0)));
        assert!(!contains(&Domain::annulus(0.5).unwrap(), c(0.25, 0.0)));
        assert!(contains(&Domain::conformal(&[0.2]).unwrap(), c(0.0, 0.0)));
        assert!(!contains(&Domain::unit_disc(), c(1.0, 0.0)));
        assert!(!contains(&Domain::conformal(&[0.2]).unwrap(), c(1.2, 0.0)));
        assert!(!contains(&Domain::conformal(&[0.2]).unwrap(), c(-0.85, 0.0)));
        assert!(contains(&Domain::conformal(&[0.2]).unwrap(), c(-0.75, 0.0)));
    }

    #[test]
    fn polyline_examples() {
        let disc = Domain::unit_disc();
        assert!(matches!(boundary_polyline(&disc, 4), Err(Error::TooCoarse { n: 4 })));
        let p = boundary_polyline(&disc, 8).unwrap();
        assert_eq!(p.component_count(), 1);
        for (k, v) in p.loops[0].iter().enumerate() {
            assert!((v - Complex64::from_polar(1.0, k as f64 * PI / 4.0)).norm() < 1e-15);
        }
        let ann = boundary_polyline(&Domain::annulus(0.5).unwrap(), 16).unwrap();
        assert_eq!(ann.component_count(), 2);
        assert!(ann.loops[0].iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        assert!(ann.loops[1].iter().all(|v| (v.norm() - 0.5).abs() < 1e-15));
        assert_eq!(ann.loops[1].len(), 16);
    }

    #[test]
    fn disc_exactness_on_random_points() {
        let disc = Domain::unit_disc();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let z = Complex64::from_polar(rng.gen::<f64>().sqrt() * 0.999, rng.gen::<f64>() * 2.0 * PI);
            let d = dist_to_boundary(&disc, z).unwrap();
            assert!((d - (1.0 - z.norm())).abs() <= 1e-9);
        }
    }

    #[test]
    fn refinement_consistency() {
        let dom = ConformalDomain::showcase();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let zeta = Complex64::from_polar(rng.gen::<f64>().sqrt() * 0.97, rng.gen::<f64>() * 2.0 * PI);
            let z = dom.evaluate_map(zeta).0;
            let a = conformal_distance_with(&dom, z, 256).unwrap();
            let b = conformal_distance_with(&dom, z, 512).unwrap();
            assert!((a - b).abs() <= DEFAULT_ACCURACY * b, "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn boundary_distance_is_one_lipschitz(
            r1 in 0.0..0.97f64, t1 in 0.0..6.283f64,
            r2 in 0.0..0.97f64, t2 in 0.0..6.283f64,
        ) {
            let dom = Domain::conformal(&[0.2]).unwrap();
            let Domain::Conformal(cd) = &dom else { unreachable!() };
            let z = cd.evaluate_map(Complex64::from_polar(r1, t1)).0;
            let w = cd.evaluate_map(Complex64::from_polar(r2, t2)).0;
            let dz = dist_to_boundary(&dom, z).unwrap();
            let dw = dist_to_boundary(&dom, w).unwrap();
            prop_assert!((dz - dw).abs() <= (z - w).norm() + 2.0 * DEFAULT_ACCURACY);
        }
    }
}
