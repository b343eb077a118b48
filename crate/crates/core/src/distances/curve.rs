//! Sampled curves, disc geodesics and line integrals of metric densities.

use num_complex::Complex64;

use crate::disc::DiscPair;
use crate::error::{Error, Result};
use crate::geometry::ensure_finite;
use crate::kernel::quadrature::gauss_legendre;
use crate::kernel::MetricField;
use crate::ComplexPoint;

/// Ordered samples of a curve, parametrized uniformly over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    samples: Vec<ComplexPoint>,
}

impl Curve {
    pub fn new(samples: Vec<ComplexPoint>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidPlan("a curve needs at least two samples".into()));
        }
        for &z in &samples {
            ensure_finite(z, "curve sample")?;
        }
        Ok(Self { samples })
    }

    /// As [`Curve::new`], additionally rejecting chords longer than `max_step`.
    pub fn with_max_step(samples: Vec<ComplexPoint>, max_step: f64) -> Result<Self> {
        let curve = Self::new(samples)?;
        if curve.max_chord() > max_step {
            return Err(Error::InvalidPlan(format!(
                "curve chord {} exceeds the maximal step {max_step}",
                curve.max_chord()
            )));
        }
        Ok(curve)
    }

    /// Straight segment with `n` equally spaced samples.
    pub fn segment(a: ComplexPoint, b: ComplexPoint, n: usize) -> Result<Self> {
        let n = n.max(2);
        let mut samples: Vec<_> = (0..n).map(|k| a + (b - a) * (k as f64 / (n - 1) as f64)).collect();
        samples[n - 1] = b;
        Self::new(samples)
    }

    pub fn samples(&self) -> &[ComplexPoint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> ComplexPoint {
        self.samples[0]
    }

    pub fn end(&self) -> ComplexPoint {
        self.samples[self.samples.len() - 1]
    }

    pub fn max_chord(&self) -> f64 {
        self.samples.windows(2).map(|p| (p[1] - p[0]).norm()).fold(0.0, f64::max)
    }

    /// Euclidean length of the polygon.
    pub fn euclidean_length(&self) -> f64 {
        self.samples.windows(2).map(|p| (p[1] - p[0]).norm()).sum()
    }
}

/// Samples of the disc geodesic from `z` to `w`: the arc of the circle through
/// both points orthogonal to the unit circle, or the chord when `z`, `w` and
/// `0` are collinear.
pub fn disc_geodesic_curve(p: &DiscPair, n: usize) -> Result<Curve> {
    let (z, w) = (p.z(), p.w());
    if z == w {
        return Err(Error::CoincidentPoints);
    }
    if n < 2 {
        return Err(Error::InvalidPlan("a geodesic needs at least two samples".into()));
    }
    // centre c solves 2 Re(z̄c) = |z|² + 1 and 2 Re(w̄c) = |w|² + 1
    let det = z.re * w.im - z.im * w.re;
    let (bz, bw) = (0.5 * (z.norm_sqr() + 1.0), 0.5 * (w.norm_sqr() + 1.0));
    let scale = z.norm().max(w.norm()).max(1e-300);
    if det.abs() <= 1e-12 * scale * (z - w).norm() {
        return Curve::segment(z, w, n);
    }
    let c = Complex64::new((bz * w.im - bw * z.im) / det, (z.re * bw - w.re * bz) / det);
    let radius = (z - c).norm();
    if radius > 1e8 {
        return Curve::segment(z, w, n);
    }
    let a0 = (z - c).arg();
    let mut sweep = (w - c).arg() - a0;
    if sweep > std::f64::consts::PI {
        sweep -= 2.0 * std::f64::consts::PI;
    } else if sweep <= -std::f64::consts::PI {
        sweep += 2.0 * std::f64::consts::PI;
    }
    let mut samples: Vec<_> = (0..n)
        .map(|k| c + Complex64::from_polar(radius, a0 + sweep * k as f64 / (n - 1) as f64))
        .collect();
    samples[0] = z;
    samples[n - 1] = w;
    Curve::new(samples)
}

/// Midpoint rule `Σ β(midpointᵢ)·|chordᵢ|`.
pub fn integrate_metric(curve: &Curve, metric: &dyn MetricField) -> Result<f64> {
    let mut total = 0.0;
    for p in curve.samples().windows(2) {
        let chord = (p[1] - p[0]).norm();
        if chord == 0.0 {
            continue;
        }
        total += metric.density(0.5 * (p[0] + p[1]))? * chord;
    }
    Ok(total)
}

/// `∫₀¹ f(t) dt` by Gauss–Legendre rules of orders 8 and 16, bisecting until
/// the two agree to `tol` relative or the interval has been halved eight times
/// (numerically differentiated densities carry noise near `1e−8`).
const MAX_DEPTH: usize = 8;

pub(crate) fn adaptive_gauss(f: &dyn Fn(f64) -> Result<f64>, tol: f64) -> Result<f64> {
    thread_local! {
        static RULES: (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) = {
            let (x8, w8) = gauss_legendre(8);
            let (x16, w16) = gauss_legendre(16);
            (x8, w8, x16, w16)
        };
    }
    fn rule(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, x: &[f64], w: &[f64]) -> Result<f64> {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(mid + half * xi)?;
        }
        Ok(s * half)
    }
    fn recurse(
        f: &dyn Fn(f64) -> Result<f64>,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
        rules: &(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>),
    ) -> Result<f64> {
        let coarse = rule(f, a, b, &rules.0, &rules.1)?;
        let fine = rule(f, a, b, &rules.2, &rules.3)?;
        if (fine - coarse).abs() <= tol * fine.abs() || depth >= MAX_DEPTH {
            return Ok(fine);
        }
        let m = 0.5 * (a + b);
        Ok(recurse(f, a, m, tol, depth + 1, rules)? + recurse(f, m, b, tol, depth + 1, rules)?)
    }
    RULES.with(|rules| recurse(f, 0.0, 1.0, tol, 0, rules))
}
