//! Geodesics of a rotationally symmetric density `μ(s)|dξ|` in the chart
//! `ξ = s + iθ`, found by shooting on the Clairaut constant `c = μ sin ψ`.
//!
//! Only profiles with an interior minimum (a core circle) are handled; such a
//! geodesic either runs monotonically in `s` or turns once at `μ(s) = c`
//! between its endpoints and the core.

use std::f64::consts::PI;

use super::curve::adaptive_gauss;
use crate::error::{Error, Result};

const PROFILE_SAMPLES: usize = 64;
const BISECTIONS: usize = 80;
const TOLERANCE: f64 = 1e-12;

pub(crate) struct RadialProfile<'a> {
    mu: &'a dyn Fn(f64) -> Result<f64>,
    core: f64,
    core_value: f64,
}

impl<'a> RadialProfile<'a> {
    /// `None` when the minimum of `μ` on `(lo, hi)` is not interior.
    pub(crate) fn new(mu: &'a dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<Option<Self>> {
        let at = |i: usize| lo + (hi - lo) * (i as f64 + 0.5) / PROFILE_SAMPLES as f64;
        let mut best = (0, f64::INFINITY);
        for i in 0..PROFILE_SAMPLES {
            let v = mu(at(i))?;
            if v < best.1 {
                best = (i, v);
            }
        }
        if best.0 == 0 || best.0 == PROFILE_SAMPLES - 1 {
            return Ok(None);
        }
        // golden-section search inside the neighbouring samples
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (at(best.0 - 1), at(best.0 + 1));
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (mu(x1)?, mu(x2)?);
        for _ in 0..100 {
            if b - a <= 1e-13 * (hi - lo) {
                break;
            }
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = mu(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = mu(x2)?;
            }
        }
        let core = 0.5 * (a + b);
        Ok(Some(Self {
            mu,
            core,
            core_value: mu(core)?,
        }))
    }

    /// `∫ₐᵇ c/√(μ² − c²) ds` (`length = false`) or `∫ₐᵇ μ²/√(μ² − c²) ds`,
    /// with `s = a + (b − a)(1 − cos πt)/2` absorbing square-root endpoint
    /// singularities.
    fn branch(&self, a: f64, b: f64, c: f64, length: bool) -> Result<f64> {
        if a == b || (!length && c == 0.0) {
            return Ok(0.0);
        }
        let f = |t: f64| -> Result<f64> {
            let s = a + (b - a) * 0.5 * (1.0 - (PI * t).cos());
            let jac = (b - a) * 0.5 * PI * (PI * t).sin();
            if jac == 0.0 {
                return Ok(0.0);
            }
            let m = (self.mu)(s)?;
            let gap = ((m - c) * (m + c)).max(f64::MIN_POSITIVE);
            let num = if length { m * m } else { c };
            Ok(num / gap.sqrt() * jac)
        };
        Ok(adaptive_gauss(&f, TOLERANCE)?.abs())
    }

    /// Splits `[a, b]` at the core so that the sharp peak near it sits at a
    /// clustered endpoint.
    fn monotone(&self, a: f64, b: f64, c: f64, length: bool) -> Result<f64> {
        if a < self.core && self.core < b {
            Ok(self.branch(self.core, a, c, length)? + self.branch(self.core, b, c, length)?)
        } else {
            self.branch(a, b, c, length)
        }
    }

    /// Length of the geodesic from `s1` to `s2` sweeping the angle `dtheta`.
    pub(crate) fn geodesic_length(&self, s1: f64, s2: f64, dtheta: f64) -> Result<f64> {
        let (a, b) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let dtheta = dtheta.abs();
        if dtheta == 0.0 {
            return self.monotone(a, b, 0.0, true);
        }
        let crosses = a < self.core && self.core < b;
        let near = if self.core <= a { a } else { b };
        let c_max = if crosses { self.core_value } else { (self.mu)(near)? };
        let reach = if crosses {
            f64::INFINITY
        } else {
            self.monotone(a, b, c_max, false)?
        };

        if dtheta <= reach {
            // Δθ is increasing in c on the monotone family.
            let (mut lo, mut hi) = (0.0, c_max);
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.monotone(a, b, mid, false)? < dtheta {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if crosses && hi >= c_max {
                return Err(Error::NoPath);
            }
            return self.monotone(a, b, 0.5 * (lo + hi), true);
        }

        // Turning family: the turning point moves from `near` towards the core.
        let turning = |st: f64, length: bool| -> Result<f64> {
            let c = (self.mu)(st)?;
            Ok(self.branch(st, a, c, length)? + self.branch(st, b, c, length)?)
        };
        let (mut outer, mut inner) = (near, self.core);
        let mut bracketed = false;
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (outer + inner);
            if mid == outer || mid == inner {
                break;
            }
            if turning(mid, false)? < dtheta {
                outer = mid;
            } else {
                inner = mid;
                bracketed = true;
            }
        }
        if !bracketed {
            return Err(Error::NoPath);
        }
        turning(0.5 * (outer + inner), true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hyperbolic strip profile `μ(s) = π/(2W sin(π(s − s₀)/W))`, the
    /// Kobayashi density of the annulus `A(e^{s₀}, 1)` in logarithmic charts.
    fn strip(s0: f64) -> impl Fn(f64) -> Result<f64> {
        let w = -s0;
        move |s: f64| Ok(PI / (2.0 * w * (PI * (s - s0) / w).sin()))
    }

    /// Kobayashi distance on the annulus from the half-plane model, summed over
    /// the deck orbit.
    fn strip_distance(s0: f64, s1: f64, s2: f64, dtheta: f64) -> f64 {
        let w = -s0;
        let x1 = PI * (s1 - s0) / w;
        let x2 = PI * (s2 - s0) / w;
        let dy = PI * dtheta / w;
        let num = (0.5 * dy).sinh().powi(2) + (0.5 * (x1 - x2)).sin().powi(2);
        let den = (0.5 * dy).sinh().powi(2) + (0.5 * (x1 + x2)).sin().powi(2);
        let m = (num / den).sqrt();
        m.atanh()
    }

    #[test]
    fn reproduces_hyperbolic_strip_distances() {
        let s0 = 0.25f64.ln();
        let mu = strip(s0);
        let profile = RadialProfile::new(&mu, s0, 0.0).unwrap().unwrap();
        // a quadratic minimum is located only to about √ε
        assert!((profile.core - 0.5 * s0).abs() < 1e-6);
        for (s1, s2, dt) in [
            (-0.2, -0.1, 0.0),
            (-0.2, -1.2, 0.7),
            (-0.1, -0.05, 3.0),
            (-0.3, -0.3, 1.0),
            (-1.3, -1.2, 2.5),
            (-0.01, -0.7, PI),
        ] {
            let got = profile.geodesic_length(s1, s2, dt).unwrap();
            let want = strip_distance(s0, s1, s2, dt);
            assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{s1} {s2} {dt}: {got} {want}");
        }
    }

    #[test]
    fn boundary_minimum_is_declined() {
        let mu = |s: f64| Ok(1.0 + s * s);
        assert!(RadialProfile::new(&mu, 0.5, 2.0).unwrap().is_none());
    }
}
