//! Series for the Bergman kernel of the annulus `A(r, 1)` on the diagonal.
//!
//! With `x = |z|²` the Laurent monomials `zⁿ` are orthogonal and
//!
//! ```text
//! K_B(z, z) = Σ_{n≠−1} (n + 1) xⁿ / (π(1 − r^{2n+2})) + 1 / (2π x log(1/r)).
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ComplexPoint;

/// Largest accepted ratio of the tail bound to the partial sum.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// A truncated series value with a rigorous bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation: usize,
}

fn check_point(r: f64, z: ComplexPoint) -> Result<f64> {
    let m = z.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidDomain(format!("annulus radius {r} outside (0, 1)")));
    }
    if !(m > r && m < 1.0) {
        return Err(Error::PointOutsideDomain { z });
    }
    Ok(m)
}

/// `Σ_{n ≥ M} (n + 1) xⁿ`.
fn weighted_geometric_tail_from(x: f64, m: usize) -> f64 {
    let mf = m as f64;
    x.powi(m as i32) * (mf + 1.0 - mf * x) / ((1.0 - x) * (1.0 - x))
}

/// `Σ_{m ≥ M} m qᵐ`.
fn linear_geometric_tail_from(q: f64, m: usize) -> f64 {
    let mf = m as f64;
    q.powi(m as i32) * (mf - (mf - 1.0) * q) / ((1.0 - q) * (1.0 - q))
}

/// The classical series truncated at `|n| ≤ truncation`.
///
/// Fails with [`Error::TailTooLarge`] when the geometric tail bound exceeds
/// `1e−10` of the partial sum.
pub fn annulus_kernel_diag(r: f64, z: ComplexPoint, truncation: usize) -> Result<SeriesValue> {
    let m = check_point(r, z)?;
    let x = m * m;
    let r2 = r * r;
    let q = r2 / x;

    let mut sum = 0.0;
    let (mut xn, mut r2n) = (1.0, r2);
    for n in 0..=truncation {
        sum += (n as f64 + 1.0) * xn / (1.0 - r2n);
        xn *= x;
        r2n *= r2;
    }
    let (mut qm, mut r2m) = (q, r2);
    for k in 1..truncation {
        sum += k as f64 * qm / (x * (1.0 - r2m));
        qm *= q;
        r2m *= r2;
    }
    let partial = (sum + 0.5 / (x * (1.0 / r).ln())) / PI;

    let n = truncation;
    let positive = weighted_geometric_tail_from(x, n + 1) / (1.0 - r2.powi(n as i32 + 2));
    let negative = linear_geometric_tail_from(q, n.max(1)) / (x * (1.0 - r2.powi(n.max(1) as i32)));
    let tail_bound = (positive + negative) / PI;
    if tail_bound > TAIL_TOLERANCE * partial {
        return Err(Error::TailTooLarge {
            tail: tail_bound,
            partial,
        });
    }
    Ok(SeriesValue {
        value: partial,
        tail_bound,
        truncation,
    })
}

/// A truncation whose tail bound is below `1e−15` of the sum at `z`.
pub fn annulus_truncation_for(r: f64, z: ComplexPoint) -> Result<usize> {
    let m = check_point(r, z)?;
    let x = m * m;
    let q = r * r / x;
    // rough magnitude of the sum, refined by the tail test below
    let scale = 1.0 / ((1.0 - x) * (1.0 - x)) + q / (x * (1.0 - q) * (1.0 - q));
    let mut n = 8usize;
    loop {
        let tail = weighted_geometric_tail_from(x, n + 1) + linear_geometric_tail_from(q, n) / x;
        if tail <= 1e-15 * scale || n > 10_000_000 {
            return Ok(n);
        }
        n = n * 5 / 4 + 1;
    }
}

/// The same kernel with the dominant parts summed in closed form.
///
/// Splitting `1/(1 − r^{2n+2}) = 1 + r^{2n+2}/(1 − r^{2n+2})` leaves
/// `1/(1 − x)²` and `q/(1 − q)²` (`q = r²/x`) plus remainders decaying like
/// `(xr²)ⁿ` and `(r⁴/x)ᵐ`, so a few dozen terms reach full precision at any
/// depth.
pub fn annulus_kernel_diag_resummed(r: f64, z: ComplexPoint) -> Result<f64> {
    let m = check_point(r, z)?;
    Ok(resummed_radial(r, m))
}

pub(crate) fn resummed_radial(r: f64, m: f64) -> f64 {
    let x = m * m;
    let r2 = r * r;
    let one_minus_x = (1.0 - m) * (1.0 + m);
    let one_minus_q = (m - r) * (m + r) / x;
    let q = r2 / x;

    let mut main = 1.0 / (one_minus_x * one_minus_x) + q / (x * one_minus_q * one_minus_q);

    let mut rest = 0.0;
    let (mut xn, mut r2n) = (1.0, r2);
    for n in 0..10_000 {
        let term = (n as f64 + 1.0) * xn * r2n / (1.0 - r2n);
        rest += term;
        if term <= 1e-18 * (main + rest) {
            break;
        }
        xn *= x;
        r2n *= r2;
    }
    let (mut qm, mut r2m) = (q, r2);
    for k in 1..10_000 {
        let term = k as f64 * qm * r2m / (x * (1.0 - r2m));
        rest += term;
        if term <= 1e-18 * (main + rest) {
            break;
        }
        qm *= q;
        r2m *= r2;
    }
    main += rest;
    (main + 0.5 / (x * (1.0 / r).ln())) / PI
}

/// `∂∂̄ log K_B` at `|z| = m`, from the resummed series differentiated term by
/// term in `x = m²`: `β² = L′ + x L″` with `L = log K_B(x)`.
pub(crate) fn resummed_laplacian(r: f64, m: f64) -> f64 {
    let x = m * m;
    let r2 = r * r;
    let one_minus_x = (1.0 - m) * (1.0 + m);
    let x_minus_r2 = (m - r) * (m + r);

    // 1/(1 − x)² + r²/(x − r²)² and its first two x-derivatives
    let a = 1.0 / (one_minus_x * one_minus_x);
    let b = r2 / (x_minus_r2 * x_minus_r2);
    let mut k0 = a + b;
    let mut k1 = 2.0 * a / one_minus_x - 2.0 * b / x_minus_r2;
    let mut k2 = 6.0 * a / (one_minus_x * one_minus_x) + 6.0 * b / (x_minus_r2 * x_minus_r2);

    let (mut xn, mut r2n) = (1.0, r2);
    for n in 0..10_000 {
        let nf = n as f64;
        let c = r2n / (1.0 - r2n);
        let term = (nf + 1.0) * xn * c;
        k0 += term;
        if n >= 1 {
            k1 += (nf + 1.0) * nf * xn / x * c;
        }
        if n >= 2 {
            k2 += (nf + 1.0) * nf * (nf - 1.0) * xn / (x * x) * c;
        }
        if term <= 1e-18 * k0 && n >= 2 {
            break;
        }
        xn *= x;
        r2n *= r2;
    }
    let (mut xk, mut r2k) = (1.0 / (x * x), r2);
    let r4 = r2 * r2;
    for k in 1..10_000 {
        let kf = k as f64;
        xk *= r4;
        let term = kf * xk / (1.0 - r2k);
        k0 += term;
        k1 -= (kf + 1.0) * term / x;
        k2 += (kf + 1.0) * (kf + 2.0) * term / (x * x);
        if term <= 1e-18 * k0 {
            break;
        }
        xk /= x;
        r2k *= r2;
    }
    let c = 0.5 / (1.0 / r).ln();
    k0 += c / x;
    k1 -= c / (x * x);
    k2 += 2.0 * c / (x * x * x);

    let l1 = k1 / k0;
    let l2 = k2 / k0 - l1 * l1;
    l1 + x * l2
}
