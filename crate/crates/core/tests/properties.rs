//! Property tests for the cross-module invariants.

use std::f64::consts::{PI, SQRT_2};

use planimetric::disc::{bergman_disc, DiscPair};
use planimetric::distances::{graph_geodesic, DistanceEngine, DEFAULT_RESOLUTION};
use planimetric::domains::ConformalDomain;
use planimetric::geometry::dist_to_boundary;
use planimetric::kernel::{bergman_metric_numeric, kernel_diag, ExactBergmanMetric, MetricField, OrthonormalBasis};
use planimetric::verify::{lemma4_enclosure, SamplePlan};
use planimetric::{ComplexPoint, Domain};
use proptest::prelude::*;

fn polar(m: f64, theta: f64) -> ComplexPoint {
    ComplexPoint::from_polar(m, theta)
}

/// Points of the unit disc with `|ζ| ≤ 0.95`.
fn disc_point() -> impl Strategy<Value = ComplexPoint> {
    (0.0f64..0.95, 0.0..2.0 * PI).prop_map(|(m, t)| polar(m, t))
}

/// Points of the annulus `0.25 < |z| < 1` at least 0.01 from its boundary.
fn annulus_point() -> impl Strategy<Value = ComplexPoint> {
    (0.26f64..0.99, 0.0..2.0 * PI).prop_map(|(m, t)| polar(m, t))
}

/// Punctured-disc points away from the puncture and the circle.
fn punctured_point() -> impl Strategy<Value = ComplexPoint> {
    (0.01f64..0.95, 0.0..2.0 * PI).prop_map(|(m, t)| polar(m, t))
}

fn showcase() -> ConformalDomain {
    ConformalDomain::showcase()
}

fn engine(domain: Domain) -> DistanceEngine {
    DistanceEngine::new(domain)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pullback_is_an_isometry(a in disc_point(), b in disc_point()) {
        let c = showcase();
        let e = engine(Domain::Conformal(c.clone()));
        let got = e.bergman(c.evaluate_map(a).0, c.evaluate_map(b).0).unwrap().value;
        let want = bergman_disc(&DiscPair::new(a, b).unwrap());
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{got} vs {want}");
    }

    #[test]
    fn caratheodory_is_smallest(a in disc_point(), b in disc_point()) {
        for domain in [Domain::unit_disc(), Domain::conformal(&[0.2]).unwrap()] {
            let (z, w) = match &domain {
                Domain::Conformal(c) => (c.evaluate_map(a).0, c.evaluate_map(b).0),
                _ => (a, b),
            };
            let e = engine(domain);
            let cd = e.caratheodory(z, w).unwrap().value;
            prop_assert!(cd <= e.kobayashi(z, w).unwrap().value + 1e-10);
            prop_assert!(cd <= e.bergman(z, w).unwrap().value + 1e-10);
        }
    }

    #[test]
    fn closed_form_distances_are_symmetric(a in disc_point(), b in disc_point()) {
        let c = showcase();
        let (za, zb) = (c.evaluate_map(a).0, c.evaluate_map(b).0);
        let e = engine(Domain::Conformal(c));
        prop_assert!((e.bergman(za, zb).unwrap().value - e.bergman(zb, za).unwrap().value).abs() <= 1e-10);
        prop_assert_eq!(e.bergman(za, za).unwrap().value, 0.0);
        prop_assert_eq!(e.kobayashi(za, za).unwrap().value, 0.0);
    }

    #[test]
    fn triangle_inequality_on_closed_forms(a in disc_point(), b in disc_point(), m in disc_point()) {
        let c = showcase();
        let map = |p: ComplexPoint| c.evaluate_map(p).0;
        let e = engine(Domain::Conformal(c.clone()));
        let d = |p, q| e.bergman(map(p), map(q)).unwrap().value;
        prop_assert!(d(a, b) <= d(a, m) + d(m, b) + 1e-9);
        let k = engine(Domain::unit_disc());
        let kd = |p, q| k.kobayashi(p, q).unwrap().value;
        prop_assert!(kd(a, b) <= kd(a, m) + kd(m, b) + 1e-9);
    }

    #[test]
    fn covering_distances_satisfy_triangle_inequality(
        a in annulus_point(), b in annulus_point(), m in annulus_point(),
        p in punctured_point(), q in punctured_point(), s in punctured_point(),
    ) {
        let e = engine(Domain::annulus(0.25).unwrap());
        let k = |x, y| e.kobayashi(x, y).unwrap().value;
        prop_assert!(k(a, b) <= k(a, m) + k(m, b) + 1e-9);
        prop_assert!((k(a, b) - k(b, a)).abs() <= 1e-10);
        let e = engine(Domain::punctured_disc());
        let k = |x, y| e.kobayashi(x, y).unwrap().value;
        prop_assert!(k(p, q) <= k(p, s) + k(s, q) + 1e-9);
    }

    #[test]
    fn removing_a_point_increases_kobayashi(p in punctured_point(), q in punctured_point()) {
        let punctured = engine(Domain::punctured_disc()).kobayashi(p, q).unwrap().value;
        let disc = engine(Domain::unit_disc()).kobayashi(p, q).unwrap().value;
        prop_assert!(punctured >= disc - 1e-12, "{punctured} < {disc}");
    }

    #[test]
    fn certificates_are_conservative(seed in 0u64..1000, tau in 1e-15f64..1e-6) {
        let cert = lemma4_enclosure(&SamplePlan::new(Domain::unit_disc(), seed).with_per_rung(4).with_bulk(50)).unwrap();
        if cert.passes_at(tau) {
            prop_assert!(cert.passes_at(2.0 * tau));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bergman_density_is_positive(a in disc_point()) {
        let c = showcase();
        let z = c.evaluate_map(a).0;
        prop_assert!(c.pushforward_bergman_metric(z).unwrap() > 0.0);
    }

    #[test]
    fn pushforward_agrees_with_the_kernel_metric(a in (0.0f64..0.7, 0.0..2.0 * PI)) {
        let c = showcase();
        let domain = Domain::Conformal(c.clone());
        let z = c.evaluate_map(polar(a.0, a.1)).0;
        prop_assume!(dist_to_boundary(&domain, z).unwrap() >= 0.05);
        let exact = c.pushforward_bergman_metric(z).unwrap();
        let numeric = bergman_metric_numeric(&domain, z).unwrap();
        prop_assert!((numeric - exact).abs() <= 1e-4 * exact, "{numeric} vs {exact}");
    }

    #[test]
    fn kernel_grows_with_degree(m in 0.0f64..0.6, t in 0.0..2.0 * PI) {
        let domain = Domain::conformal(&[0.2]).unwrap();
        let z = polar(m, t);
        let mut previous = 0.0;
        for degree in [10, 20, 40] {
            let basis = OrthonormalBasis::new(&domain, degree).unwrap().with_floor(0.0);
            let k = kernel_diag(&basis, z).unwrap();
            prop_assert!(k >= previous - 1e-12 * k, "degree {degree}: {k} < {previous}");
            previous = k;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Grid paths are admissible curves, so they cannot beat the exact value.
    #[test]
    fn graph_geodesics_bound_from_above(a in disc_point(), b in disc_point()) {
        let c = showcase();
        let domain = Domain::Conformal(c.clone());
        let (z, w) = (c.evaluate_map(a).0, c.evaluate_map(b).0);
        prop_assume!(dist_to_boundary(&domain, z).unwrap() >= 0.02 && dist_to_boundary(&domain, w).unwrap() >= 0.02);
        prop_assume!((z - w).norm() > 1e-3);
        let metric = ExactBergmanMetric::new(&domain).unwrap();
        let est = graph_geodesic(&domain, &metric, z, w, DEFAULT_RESOLUTION).unwrap();
        let exact = bergman_disc(&DiscPair::new(a, b).unwrap());
        prop_assert!(est.value + est.bracket.upper >= exact * (1.0 - 1e-9), "{} < {exact}", est.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The annulus Bergman distance runs a grid geodesic per pair, so few cases.
    #[test]
    fn annulus_bergman_is_a_metric(a in annulus_point(), b in annulus_point(), m in annulus_point()) {
        let e = engine(Domain::annulus(0.25).unwrap());
        let d = |x, y| e.bergman(x, y).unwrap();
        let (ab, ba) = (d(a, b), d(b, a));
        prop_assert!((ab.value - ba.value).abs() <= ab.bracket.upper + ba.bracket.upper + 1e-9);
        let (am, mb) = (d(a, m), d(m, b));
        prop_assert!(ab.lower_end() <= am.upper_end() + mb.upper_end() + 1e-9);
        prop_assert_eq!(e.bergman(a, a).unwrap().value, 0.0);
    }
}

#[test]
fn disc_metric_relation_in_every_direction() {
    let beta = ExactBergmanMetric::unit_disc();
    for k in 0..16 {
        let z = polar(0.6, k as f64 * PI / 8.0);
        assert!((beta.density(z).unwrap() - SQRT_2 / 0.64).abs() < 1e-12);
    }
}
