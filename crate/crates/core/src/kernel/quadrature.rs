//! Gauss–Legendre × trapezoid quadrature on discs and annuli.

use std::f64::consts::PI;

use serde::Serialize;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Tensor polar rule on `{a ≤ ρ ≤ b}`: Gauss–Legendre in `ρ`, trapezoid in `θ`.
///
/// Weights include the area element `ρ dρ dθ`.
#[derive(Debug, Clone, Serialize)]
pub struct PolarQuadrature {
    pub inner: f64,
    pub outer: f64,
    pub radii: Vec<f64>,
    /// `w_i ρ_i` for the radial integral `∫ f ρ dρ`.
    pub radial_weights: Vec<f64>,
    pub angular: usize,
}

impl PolarQuadrature {
    pub fn new(inner: f64, outer: f64, radial: usize, angular: usize) -> Self {
        let (x, w) = gauss_legendre(radial);
        let half = 0.5 * (outer - inner);
        let mid = 0.5 * (outer + inner);
        let radii: Vec<f64> = x.iter().map(|&t| mid + half * t).collect();
        let radial_weights = w.iter().zip(&radii).map(|(&wi, &r)| wi * half * r).collect();
        Self {
            inner,
            outer,
            radii,
            radial_weights,
            angular,
        }
    }

    /// Same rule with Gauss–Legendre nodes in `log ρ`, suited to Laurent
    /// integrands on annuli whose negative powers vary over many decades.
    pub fn logarithmic(inner: f64, outer: f64, radial: usize, angular: usize) -> Self {
        assert!(inner > 0.0, "logarithmic rule needs a positive inner radius");
        let (x, w) = gauss_legendre(radial);
        let (a, b) = (inner.ln(), outer.ln());
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let radii: Vec<f64> = x.iter().map(|&t| (mid + half * t).exp()).collect();
        let radial_weights = w.iter().zip(&radii).map(|(&wi, &r)| wi * half * r * r).collect();
        Self {
            inner,
            outer,
            radii,
            radial_weights,
            angular,
        }
    }

    pub fn radial_order(&self) -> usize {
        self.radii.len()
    }

    pub fn angle(&self, p: usize) -> f64 {
        2.0 * PI * p as f64 / self.angular as f64
    }

    pub fn angular_weight(&self) -> f64 {
        2.0 * PI / self.angular as f64
    }

    /// `∫ |u|^{2n} dA` over the region (any integer `n`, `n ≠ −1` closed form below).
    pub fn integrate_power(&self, n: i32) -> f64 {
        2.0 * PI
            * self
                .radii
                .iter()
                .zip(&self.radial_weights)
                .map(|(&r, &w)| w * r.powi(2 * n))
                .sum::<f64>()
    }
}

/// Exact `∫_{a<|u|<b} |u|^{2n} dA`.
pub fn power_integral_exact(inner: f64, outer: f64, n: i32) -> f64 {
    if n == -1 {
        2.0 * PI * (outer / inner).ln()
    } else {
        let e = 2 * n + 2;
        2.0 * PI * (outer.powi(e) - inner.powi(e)) / e as f64
    }
}
