//! Kobayashi distances of the annulus and the punctured disc through their
//! universal coverings.
//!
//! The annulus `A(r, 1)` is covered by the strip `{0 < Re t < π}` through
//! `t = π(log z − log r)/W`, `W = log(1/r)`; deck transformations translate
//! `Im t` by `2π²/W`. The punctured disc is covered by the left half-plane
//! through `s = log z`, with deck translations `s ↦ s + 2πi`. Both models map
//! isometrically onto the disc, so each lifted pair has a pseudo-hyperbolic
//! distance in closed form and `k_D` is the minimum over the deck orbit.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default orbit half-width.
pub const DEFAULT_KMAX: usize = 8;

/// A lifted pair reduced to the data the orbit search needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum CoverModel {
    /// Strip coordinates `x₁, x₂ ∈ (0, π)`, `Δy`, and the deck period.
    Strip { x1: f64, x2: f64, dy: f64, period: f64 },
    /// Half-plane coordinates `x₁, x₂ < 0`, `Δy`; the deck period is `2π`.
    HalfPlane { x1: f64, x2: f64, dy: f64 },
}

/// Result of an orbit minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitMinimum {
    pub value: f64,
    /// Deck index attaining the minimum.
    pub translate: i64,
    /// Smallest distance among the `|k| = K_max` translates.
    pub boundary_value: f64,
}

/// `tanh⁻¹ m` given `m² = num/den` and `1 − m² = gap/den`, all positive.
fn atanh_from_parts(num: f64, gap: f64, den: f64) -> f64 {
    let m = (num / den).sqrt().min(1.0);
    m.ln_1p() - 0.5 * (gap.ln() - den.ln())
}

/// `ln(2 sinh²(y/2) + a)` for `a ≥ 0`, safe for huge `y`.
fn log_two_sinh_sq_plus(y: f64, a: f64) -> f64 {
    let y = y.abs();
    if y < 600.0 {
        let s = (0.5 * y).sinh();
        (2.0 * s * s + a).ln()
    } else {
        // 2 sinh²(y/2) = (cosh y − 1) ≈ e^y/2 for large y; a is bounded
        y - std::f64::consts::LN_2 + (a * 2.0 * (-y).exp()).ln_1p()
    }
}

impl CoverModel {
    fn distance_at(&self, k: i64) -> f64 {
        match *self {
            CoverModel::Strip { x1, x2, dy, period } => {
                let y = dy + k as f64 * period;
                let a_num = 2.0 * (0.5 * (x1 - x2)).sin().powi(2);
                let a_den = 2.0 * (0.5 * (x1 + x2)).sin().powi(2);
                let gap = 2.0 * x1.sin() * x2.sin();
                if y.abs() < 600.0 {
                    let s = 2.0 * (0.5 * y).sinh().powi(2);
                    let (num, den) = (s + a_num, s + a_den);
                    if num == 0.0 {
                        return 0.0;
                    }
                    atanh_from_parts(num, gap, den)
                } else {
                    let log_den = log_two_sinh_sq_plus(y, a_den);
                    std::f64::consts::LN_2 - 0.5 * (gap.ln() - log_den)
                }
            }
            CoverModel::HalfPlane { x1, x2, dy } => {
                let y = dy + k as f64 * 2.0 * PI;
                let num = (x1 - x2).powi(2) + y * y;
                if num == 0.0 {
                    return 0.0;
                }
                let den = (x1 + x2).powi(2) + y * y;
                atanh_from_parts(num, 4.0 * x1 * x2, den)
            }
        }
    }
}

/// Minimum of the lifted distance over deck translates `|k| ≤ kmax`.
///
/// The lifted distance grows monotonically in `|Δy|`, so the minimum is
/// certified once both `k = ±kmax` translates lie strictly above it.
pub(crate) fn orbit_minimum(model: CoverModel, kmax: usize) -> Result<OrbitMinimum> {
    let kmax = kmax as i64;
    let mut best = (f64::INFINITY, 0i64);
    for k in -kmax..=kmax {
        let v = model.distance_at(k);
        if v < best.0 {
            best = (v, k);
        }
    }
    let boundary_value = model.distance_at(-kmax).min(model.distance_at(kmax));
    if !(boundary_value > best.0) || best.1.abs() == kmax {
        return Err(Error::OrbitTruncationUnsafe { kmax: kmax as usize });
    }
    Ok(OrbitMinimum {
        value: best.0,
        translate: best.1,
        boundary_value,
    })
}

pub(crate) fn annulus_model(r: f64, z: num_complex::Complex64, w: num_complex::Complex64) -> CoverModel {
    let width = (1.0 / r).ln();
    let lift = |p: num_complex::Complex64| PI * (p.norm().ln() - r.ln()) / width;
    let mut dy = w.arg() - z.arg();
    if dy > PI {
        dy -= 2.0 * PI;
    } else if dy < -PI {
        dy += 2.0 * PI;
    }
    CoverModel::Strip {
        x1: lift(z),
        x2: lift(w),
        dy: PI * dy / width,
        period: 2.0 * PI * PI / width,
    }
}

pub(crate) fn punctured_model(z: num_complex::Complex64, w: num_complex::Complex64) -> CoverModel {
    let mut dy = w.arg() - z.arg();
    if dy > PI {
        dy -= 2.0 * PI;
    } else if dy < -PI {
        dy += 2.0 * PI;
    }
    CoverModel::HalfPlane {
        x1: z.norm().ln(),
        x2: w.norm().ln(),
        dy,
    }
}

/// Kobayashi density of the annulus, `π / (2W|z| sin(π(log|z| − log r)/W))`.
pub fn annulus_kobayashi_metric(r: f64, rho: f64) -> f64 {
    let width = (1.0 / r).ln();
    PI / (2.0 * width * rho * (PI * (rho.ln() - r.ln()) / width).sin())
}

/// Kobayashi density of the punctured disc, `1 / (2|z| log(1/|z|))`.
pub fn punctured_kobayashi_metric(rho: f64) -> f64 {
    1.0 / (2.0 * rho * (1.0 / rho).ln())
}
