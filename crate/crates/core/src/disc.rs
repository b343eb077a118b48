//! Closed forms on the unit disc `𝔻`.
//!
//! On the disc the Carathéodory and Kobayashi distances coincide with
//! `tanh⁻¹` of the pseudo-hyperbolic distance `|(z − w)/(1 − z̄w)|`, and the
//! Bergman distance is exactly `√2` times that.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::domains::one_minus_norm_sqr;
use crate::error::{Error, Result};
use crate::geometry::ensure_finite;
use crate::ComplexPoint;

/// Above this pseudo-hyperbolic distance `1 − m` is rebuilt from the identity
/// `|1 − z̄w|² = (1 − |z|²)(1 − |w|²) + |z − w|²`.
const CANCELLATION_GUARD: f64 = 0.99;

/// A pair of points of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPair {
    z: ComplexPoint,
    w: ComplexPoint,
}

impl DiscPair {
    pub fn new(z: ComplexPoint, w: ComplexPoint) -> Result<Self> {
        ensure_finite(z, "disc pair")?;
        ensure_finite(w, "disc pair")?;
        for p in [z, w] {
            if p.norm() >= 1.0 {
                return Err(Error::PointOutsideDomain { z: p });
            }
        }
        Ok(Self { z, w })
    }

    pub fn z(&self) -> ComplexPoint {
        self.z
    }

    pub fn w(&self) -> ComplexPoint {
        self.w
    }

    pub fn swapped(&self) -> Self {
        Self { z: self.w, w: self.z }
    }

    fn separation(&self) -> f64 {
        (self.z - self.w).norm()
    }

    /// `(1 − |z|²)(1 − |w|²)`.
    fn defect(&self) -> f64 {
        one_minus_norm_sqr(self.z) * one_minus_norm_sqr(self.w)
    }

    /// `|1 − z̄w|`.
    fn mobius_denominator(&self) -> f64 {
        (1.0 - self.z.conj() * self.w).norm()
    }
}

/// Lower and upper bound of a two-sided estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundPair {
    /// Whether `value` lies in `[lower − slack, upper + slack]`, slack relative
    /// to `max(1, |value|)`.
    pub fn encloses(&self, value: f64, slack: f64) -> bool {
        self.margin(value) >= -slack
    }

    /// Signed distance of `value` to the nearer bound, relative to `max(1, |value|)`.
    pub fn margin(&self, value: f64) -> f64 {
        (value - self.lower).min(self.upper - value) / value.abs().max(1.0)
    }
}

/// Which template of the two-point estimate applies to a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prop1Case {
    /// `|z − w|² > d(z)d(w)`: logarithmic form with an additive constant.
    Far,
    /// `|z − w|² ≤ d(z)d(w)`: linear form with a multiplicative constant.
    Near,
}

/// `|(z − w)/(1 − z̄w)|`.
pub fn pseudo_hyperbolic(p: &DiscPair) -> f64 {
    let den = p.mobius_denominator();
    if den == 0.0 {
        return 0.0;
    }
    (p.separation() / den).min(1.0)
}

/// `1 − |(z − w)/(1 − z̄w)|`, free of cancellation when the quotient is near 1.
fn pseudo_hyperbolic_complement(p: &DiscPair, m: f64) -> f64 {
    if m <= CANCELLATION_GUARD {
        return 1.0 - m;
    }
    let den = p.mobius_denominator();
    p.defect() / (den * (den + p.separation()))
}

/// `k_𝔻(z, w) = tanh⁻¹ |(z − w)/(1 − z̄w)|`, which is also `c_𝔻(z, w)`.
pub fn kobayashi_disc(p: &DiscPair) -> f64 {
    let m = pseudo_hyperbolic(p);
    if m == 0.0 {
        return 0.0;
    }
    0.5 * (m.ln_1p() - pseudo_hyperbolic_complement(p, m).ln())
}

/// `b_𝔻(z, w) = √2 · k_𝔻(z, w)`.
pub fn bergman_disc(p: &DiscPair) -> f64 {
    SQRT_2 * kobayashi_disc(p)
}

/// Residual of `|1 − z̄w|² = (1 − |z|²)(1 − |w|²) + |z − w|²`.
pub fn identity_residual(p: &DiscPair) -> f64 {
    let lhs = (1.0 - p.z.conj() * p.w).norm_sqr();
    let rhs = (1.0 - p.z.norm_sqr()) * (1.0 - p.w.norm_sqr()) + (p.z - p.w).norm_sqr();
    (lhs - rhs).abs()
}

/// Bounds on `b_𝔻/√2` in terms of `√((1 − |z|²)(1 − |w|²))`.
pub fn lemma4a_bounds(p: &DiscPair) -> BoundPair {
    let s = p.separation() / p.defect().sqrt();
    BoundPair {
        lower: s.ln_1p(),
        upper: (2.0 * s).ln_1p(),
    }
}

/// Bounds on `b_𝔻/√2` in terms of the boundary distances `d(·) = 1 − |·|`.
pub fn lemma4b_bounds(p: &DiscPair) -> BoundPair {
    let s = p.separation() / ((1.0 - p.z.norm()) * (1.0 - p.w.norm())).sqrt();
    BoundPair {
        lower: (0.5 * s).ln_1p(),
        upper: (SQRT_2 * s).ln_1p(),
    }
}

/// `R = (e^{b_𝔻/√2} − 1)·√((1 − |z|²)(1 − |w|²))/|z − w|`, which lies in `[1, 2]`.
pub fn sharpness_ratio_a(p: &DiscPair) -> Result<f64> {
    let sep = p.separation();
    if sep == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(kobayashi_disc(p).exp_m1() * p.defect().sqrt() / sep)
}

/// The analogue of [`sharpness_ratio_a`] with `d(·) = 1 − |·|`; lies in `[½, √2]`.
pub fn sharpness_ratio_b(p: &DiscPair) -> Result<f64> {
    let sep = p.separation();
    if sep == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let dd = (1.0 - p.z.norm()) * (1.0 - p.w.norm());
    Ok(kobayashi_disc(p).exp_m1() * dd.sqrt() / sep)
}

/// `Far` iff `dist² > dz·dw`; equality is `Near`.
pub fn prop1prime_classify(dist: f64, dz: f64, dw: f64) -> Prop1Case {
    if dist * dist > dz * dw {
        Prop1Case::Far
    } else {
        Prop1Case::Near
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn pair(z: f64, w: f64) -> DiscPair {
        DiscPair::new(Complex64::new(z, 0.0), Complex64::new(w, 0.0)).unwrap()
    }

    fn random_point(rng: &mut impl Rng) -> Complex64 {
        Complex64::from_polar(rng.gen::<f64>().sqrt() * 0.9999, rng.gen::<f64>() * 2.0 * PI)
    }

    #[test]
    fn pseudo_hyperbolic_examples() {
        assert_eq!(pseudo_hyperbolic(&pair(0.0, 0.5)), 0.5);
        assert!((pseudo_hyperbolic(&pair(0.5, -0.5)) - 0.8).abs() < 1e-15);
        assert_eq!(pseudo_hyperbolic(&pair(0.3, 0.3)), 0.0);
    }

    #[test]
    fn distance_examples() {
        assert!((kobayashi_disc(&pair(0.0, 0.5)) - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((kobayashi_disc(&pair(0.5, -0.5)) - 3f64.ln()).abs() < 1e-14);
        assert_eq!(kobayashi_disc(&pair(0.2, 0.2)), 0.0);
        // √2 · ½ log 3
        assert!((bergman_disc(&pair(0.0, 0.5)) - 0.7768362).abs() < 1e-7);
        let rotated = DiscPair::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5)).unwrap();
        assert!((bergman_disc(&rotated) - 0.7768362).abs() < 1e-7);
    }

    #[test]
    fn guard_matches_direct_formula_near_boundary() {
        // (−t, t): tanh⁻¹ of 2t/(1+t²) is log((1+t)/(1−t)) exactly
        for t in [0.9, 0.999, 0.999999, 1.0 - 1e-9] {
            let k = kobayashi_disc(&pair(-t, t));
            let expected = ((1.0 + t) / (1.0 - t)).ln();
            assert!((k - expected).abs() <= 1e-12 * expected, "t={t}: {k} vs {expected}");
        }
    }

    #[test]
    fn lemma4_examples() {
        let a = lemma4a_bounds(&pair(0.0, 0.5));
        assert!((a.lower - 0.4557464).abs() < 1e-7 && (a.upper - 0.7676518).abs() < 1e-7);
        let b = lemma4b_bounds(&pair(0.0, 0.5));
        assert!((b.lower - 0.3027333).abs() < 1e-7 && (b.upper - 0.6931472).abs() < 1e-7);
        for bounds in [lemma4a_bounds(&pair(0.4, 0.4)), lemma4b_bounds(&pair(0.4, 0.4))] {
            assert_eq!(bounds, BoundPair { lower: 0.0, upper: 0.0 });
        }
        let p = pair(0.9, -0.9);
        let k = kobayashi_disc(&p);
        assert!((k - 0.5 * 361f64.ln()).abs() < 1e-12);
        let a = lemma4a_bounds(&p);
        assert!((a.lower - 2.3488658).abs() < 1e-7 && (a.upper - 2.9930972).abs() < 1e-7);
        let b = lemma4b_bounds(&p);
        // log(1 + 9) and log(1 + 18√2)
        assert!((b.lower - 10f64.ln()).abs() < 1e-12 && (b.upper - 3.2754771).abs() < 1e-7);
        assert!(a.encloses(k, 0.0) && b.encloses(k, 0.0));
    }

    #[test]
    fn sharpness_examples() {
        let r = sharpness_ratio_a(&pair(0.0, 0.001)).unwrap();
        assert!((r - 1.0005).abs() < 1e-4);
        let r = sharpness_ratio_a(&pair(-0.999, 0.999)).unwrap();
        assert!((r - 1.999).abs() < 1e-9);
        let r = sharpness_ratio_a(&pair(0.0, 0.5)).unwrap();
        assert!((1.0..=2.0).contains(&r));
        assert_eq!(sharpness_ratio_a(&pair(0.1, 0.1)), Err(Error::CoincidentPoints));
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(prop1prime_classify(0.5, 0.1, 0.1), Prop1Case::Far);
        assert_eq!(prop1prime_classify(0.01, 0.5, 0.5), Prop1Case::Near);
        assert_eq!(prop1prime_classify(0.1, 0.1, 0.1), Prop1Case::Near);
    }

    #[test]
    fn metric_relation_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = DiscPair::new(random_point(&mut rng), random_point(&mut rng)).unwrap();
            let k = kobayashi_disc(&p);
            if k > 0.0 {
                assert!((bergman_disc(&p) / k - SQRT_2).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_points_outside() {
        assert!(DiscPair::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
    }

    proptest! {
        #[test]
        fn mobius_invariance(
            zr in 0.0..0.99f64, zt in 0.0..6.3f64,
            wr in 0.0..0.99f64, wt in 0.0..6.3f64,
            ar in 0.0..0.95f64, at in 0.0..6.3f64, rot in 0.0..6.3f64,
        ) {
            let (z, w) = (Complex64::from_polar(zr, zt), Complex64::from_polar(wr, wt));
            let a = Complex64::from_polar(ar, at);
            let g = |u: Complex64| Complex64::from_polar(1.0, rot) * (u - a) / (1.0 - a.conj() * u);
            let before = bergman_disc(&DiscPair::new(z, w).unwrap());
            let after = bergman_disc(&DiscPair::new(g(z), g(w)).unwrap());
            prop_assert!((before - after).abs() <= 1e-10 * before.max(1.0));
        }

        #[test]
        fn symmetric_and_sharpness_in_range(
            zr in 0.0..0.999f64, zt in 0.0..6.3f64,
            wr in 0.0..0.999f64, wt in 0.0..6.3f64,
        ) {
            let p = DiscPair::new(Complex64::from_polar(zr, zt), Complex64::from_polar(wr, wt)).unwrap();
            prop_assert!((kobayashi_disc(&p) - kobayashi_disc(&p.swapped())).abs() < 1e-12);
            if let Ok(r) = sharpness_ratio_a(&p) {
                prop_assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&r));
            }
            if let Ok(r) = sharpness_ratio_b(&p) {
                prop_assert!((0.5 - 1e-12..=SQRT_2 + 1e-12).contains(&r));
            }
        }
    }
}
