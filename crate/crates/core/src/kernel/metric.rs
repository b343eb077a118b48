//! Bergman metric densities: closed forms, finite differences of `log K_B`
//! on Gram bases, and the annulus series.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use super::annulus::{resummed_laplacian, resummed_radial};
use super::basis::{monomial_relative_tail, OrthonormalBasis};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::geometry::{contains, dist_to_boundary, ensure_finite};
use crate::ComplexPoint;

/// Boundary-distance floor of the Gram route.
pub const GRAM_FLOOR: f64 = 1e-2;
/// Boundary-distance floor of the annulus series route.
pub const SERIES_FLOOR: f64 = 1e-4;
/// Finite-difference step relative to `d_D(z)`.
pub const STEP_FRACTION: f64 = 1e-4;

/// Degrees tried, in order, when a Gram basis is chosen for a query point.
const DEGREE_LADDER: [usize; 6] = [40, 80, 160, 320, 640, 1280];

/// A conformal metric density `z ↦ β(z; 1)` on a domain.
pub trait MetricField: Send + Sync {
    fn density(&self, z: ComplexPoint) -> Result<f64>;

    /// Smallest boundary distance at which [`Self::density`] is trusted.
    fn floor(&self) -> f64;

    fn name(&self) -> &'static str;

    /// `true` when the density depends on `|z|` only.
    fn is_radial(&self) -> bool {
        false
    }
}

/// Exact Bergman metric where a closed form is available: discs of any radius,
/// conformal images through the pushforward, and the punctured disc (equal to
/// the disc's).
#[derive(Debug, Clone)]
pub struct ExactBergmanMetric {
    domain: Domain,
}

impl ExactBergmanMetric {
    pub fn new(domain: &Domain) -> Result<Self> {
        if let Domain::Annulus(_) = domain {
            return Err(Error::UnsupportedDomain {
                operation: "closed-form Bergman metric",
                domain: domain.to_string(),
            });
        }
        Ok(Self {
            domain: domain.clone(),
        })
    }

    pub fn unit_disc() -> Self {
        Self {
            domain: Domain::unit_disc(),
        }
    }
}

impl MetricField for ExactBergmanMetric {
    fn density(&self, z: ComplexPoint) -> Result<f64> {
        ensure_finite(z, "metric point")?;
        if !contains(&self.domain, z) {
            return Err(Error::PointOutsideDomain { z });
        }
        match &self.domain {
            Domain::Disc(d) => {
                let r = d.radius();
                let m = z.norm();
                Ok(SQRT_2 * r / ((r - m) * (r + m)))
            }
            Domain::PuncturedDisc(_) => {
                let m = z.norm();
                Ok(SQRT_2 / ((1.0 - m) * (1.0 + m)))
            }
            Domain::Conformal(c) => c.pushforward_bergman_metric(z),
            Domain::Annulus(_) => unreachable!("rejected at construction"),
        }
    }

    fn floor(&self) -> f64 {
        0.0
    }

    fn name(&self) -> &'static str {
        "exact"
    }

    fn is_radial(&self) -> bool {
        !matches!(self.domain, Domain::Conformal(_))
    }
}

/// `β = √(¼ Δ log K_B)` from Gram-basis kernels, with the basis degree chosen
/// per point so the truncation error is invisible to the difference stencil.
#[derive(Debug, Clone)]
pub struct GramBergmanMetric {
    domain: Domain,
    /// Domain whose basis is used; the punctured disc borrows the disc's.
    basis_domain: Domain,
}

impl GramBergmanMetric {
    pub fn new(domain: &Domain) -> Result<Self> {
        let basis_domain = match domain {
            Domain::PuncturedDisc(_) => Domain::unit_disc(),
            Domain::Annulus(_) => {
                return Err(Error::UnsupportedDomain {
                    operation: "Gram-route Bergman metric",
                    domain: domain.to_string(),
                })
            }
            other => other.clone(),
        };
        Ok(Self {
            domain: domain.clone(),
            basis_domain,
        })
    }

    /// Cached basis adequate for differentiating `log K_B` near `z`.
    pub fn basis_for(&self, z: ComplexPoint) -> Result<Arc<OrthonormalBasis>> {
        let probe = cached_basis(&self.basis_domain, DEGREE_LADDER[0])?;
        let x = probe.coordinate(z)?.norm_sqr();
        let degree = DEGREE_LADDER
            .iter()
            .copied()
            .find(|&n| {
                let spread = 2.0 * n as f64 * (1.0 - x);
                monomial_relative_tail(x, n) * spread * spread <= 1e-8
            })
            .unwrap_or(DEGREE_LADDER[DEGREE_LADDER.len() - 1]);
        cached_basis(&self.basis_domain, degree)
    }

    /// Boundary distance that governs conditioning: the puncture is invisible
    /// to the kernel, so only the outer circle counts there.
    fn conditioning_distance(&self, z: ComplexPoint) -> Result<f64> {
        ensure_finite(z, "metric point")?;
        if !contains(&self.domain, z) {
            return Err(Error::PointOutsideDomain { z });
        }
        checked_distance(&self.basis_domain, z, GRAM_FLOOR)
    }

    /// `(K_B(z, z), β(z; 1))` from one basis.
    pub fn kernel_and_density(&self, z: ComplexPoint) -> Result<(f64, f64)> {
        let d = self.conditioning_distance(z)?;
        let basis = self.basis_for(z)?;
        let h = STEP_FRACTION * d;
        check_stencil(&self.basis_domain, z, h)?;
        let log_k = |p: ComplexPoint| basis.kernel_unchecked(p).map(f64::ln);
        let k0 = basis.kernel_unchecked(z)?;
        let beta2 = 0.25 * laplacian(log_k, z, k0.ln(), h)?;
        positive_sqrt(beta2).map(|b| (k0, b))
    }
}

impl MetricField for GramBergmanMetric {
    fn density(&self, z: ComplexPoint) -> Result<f64> {
        Ok(self.kernel_and_density(z)?.1)
    }

    fn floor(&self) -> f64 {
        GRAM_FLOOR
    }

    fn name(&self) -> &'static str {
        "gram"
    }
}

/// Radial Bergman metric of the annulus from the resummed kernel series.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusSeriesMetric {
    r: f64,
}

impl AnnulusSeriesMetric {
    pub fn new(r: f64) -> Result<Self> {
        crate::domains::AnnulusDomain::new(r)?;
        Ok(Self { r })
    }

    pub fn inner_radius(&self) -> f64 {
        self.r
    }

    pub fn kernel(&self, z: ComplexPoint) -> Result<f64> {
        let m = z.norm();
        if !(m > self.r && m < 1.0) {
            return Err(Error::PointOutsideDomain { z });
        }
        Ok(resummed_radial(self.r, m))
    }

    /// `β² = ¼ (g″ + g′/ρ)` with `g = log K_B` as a function of `ρ = |z|`.
    pub fn kernel_and_density(&self, z: ComplexPoint) -> Result<(f64, f64)> {
        ensure_finite(z, "metric point")?;
        let rho = z.norm();
        if !(rho > self.r && rho < 1.0) {
            return Err(Error::PointOutsideDomain { z });
        }
        let d = (1.0 - rho).min(rho - self.r);
        if d < SERIES_FLOOR {
            return Err(Error::PointsTooCloseToBoundary {
                z,
                distance: d,
                floor: SERIES_FLOOR,
            });
        }
        let h = STEP_FRACTION * d;
        let g = |t: f64| resummed_radial(self.r, t).ln();
        let (gm2, gm1, g0, gp1, gp2) = (g(rho - 2.0 * h), g(rho - h), g(rho), g(rho + h), g(rho + 2.0 * h));
        let d1 = (gm2 - 8.0 * gm1 + 8.0 * gp1 - gp2) / (12.0 * h);
        let d2 = (-gm2 + 16.0 * gm1 - 30.0 * g0 + 16.0 * gp1 - gp2) / (12.0 * h * h);
        let beta = positive_sqrt(0.25 * (d2 + d1 / rho))?;
        Ok((g0.exp(), beta))
    }
}

impl MetricField for AnnulusSeriesMetric {
    /// Closed-form derivatives of the series; agrees with the finite-difference
    /// route of [`Self::kernel_and_density`] to its truncation error.
    fn density(&self, z: ComplexPoint) -> Result<f64> {
        ensure_finite(z, "metric point")?;
        let rho = z.norm();
        if !(rho > self.r && rho < 1.0) {
            return Err(Error::PointOutsideDomain { z });
        }
        let d = (1.0 - rho).min(rho - self.r);
        if d < SERIES_FLOOR {
            return Err(Error::PointsTooCloseToBoundary {
                z,
                distance: d,
                floor: SERIES_FLOOR,
            });
        }
        positive_sqrt(resummed_laplacian(self.r, rho))
    }

    fn floor(&self) -> f64 {
        SERIES_FLOOR
    }

    fn name(&self) -> &'static str {
        "annulus_series"
    }

    fn is_radial(&self) -> bool {
        true
    }
}

/// Numerical Bergman metric `β_D(z; 1)`: Gram route on the disc, conformal
/// images and the punctured disc; series route on the annulus.
pub fn bergman_metric_numeric(domain: &Domain, z: ComplexPoint) -> Result<f64> {
    Ok(kernel_and_metric(domain, z)?.1)
}

/// `M_D(z; 1) = β_D(z; 1) · √K_B(z, z)`.
pub fn m_invariant(domain: &Domain, z: ComplexPoint) -> Result<f64> {
    let (k, beta) = kernel_and_metric(domain, z)?;
    Ok(beta * k.sqrt())
}

/// `K_B(z, z)` by the same route as [`bergman_metric_numeric`].
pub fn kernel_diag_numeric(domain: &Domain, z: ComplexPoint) -> Result<f64> {
    match domain {
        Domain::Annulus(a) => {
            ensure_finite(z, "kernel point")?;
            AnnulusSeriesMetric::new(a.inner_radius())?.kernel(z)
        }
        _ => {
            let metric = GramBergmanMetric::new(domain)?;
            metric.conditioning_distance(z)?;
            metric.basis_for(z)?.kernel_unchecked(z)
        }
    }
}

/// `M_D(z; 1)` computed directly as the supremum over the truncated space
/// (Gram route only).
pub fn extremal_m_invariant(domain: &Domain, z: ComplexPoint) -> Result<f64> {
    let metric = GramBergmanMetric::new(domain)?;
    metric.conditioning_distance(z)?;
    Ok(metric.basis_for(z)?.kernel_and_extremal(z)?.1)
}

/// `(K_B(z, z), β_D(z; 1))` by the domain's numerical route.
pub fn kernel_and_metric(domain: &Domain, z: ComplexPoint) -> Result<(f64, f64)> {
    match domain {
        Domain::Annulus(a) => AnnulusSeriesMetric::new(a.inner_radius())?.kernel_and_density(z),
        _ => GramBergmanMetric::new(domain)?.kernel_and_density(z),
    }
}

/// Shared read-only basis for `(domain, degree)`, built at most once.
pub fn cached_basis(domain: &Domain, degree: usize) -> Result<Arc<OrthonormalBasis>> {
    type Slot = Arc<OnceLock<Result<Arc<OrthonormalBasis>>>>;
    static CACHE: OnceLock<Mutex<HashMap<(String, usize), Slot>>> = OnceLock::new();
    let slot = {
        let mut map = CACHE
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        map.entry((domain.to_string(), degree)).or_default().clone()
    };
    slot.get_or_init(|| OrthonormalBasis::new(domain, degree).map(|b| Arc::new(b.with_floor(0.0))))
        .clone()
}

fn checked_distance(domain: &Domain, z: ComplexPoint, floor: f64) -> Result<f64> {
    ensure_finite(z, "metric point")?;
    if !contains(domain, z) {
        return Err(Error::PointOutsideDomain { z });
    }
    let distance = dist_to_boundary(domain, z)?;
    if distance < floor {
        return Err(Error::PointsTooCloseToBoundary { z, distance, floor });
    }
    Ok(distance)
}

fn check_stencil(domain: &Domain, z: ComplexPoint, h: f64) -> Result<()> {
    for offset in [Complex64::new(2.0 * h, 0.0), Complex64::new(0.0, 2.0 * h)] {
        if !contains(domain, z + offset) || !contains(domain, z - offset) {
            return Err(Error::StencilOutsideDomain { z, step: h });
        }
    }
    Ok(())
}

/// Fourth-order five-point Laplacian along both axes.
fn laplacian(f: impl Fn(ComplexPoint) -> Result<f64>, z: ComplexPoint, f0: f64, h: f64) -> Result<f64> {
    let mut total = 0.0;
    for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
        let fp1 = f(z + dir * h)?;
        let fm1 = f(z - dir * h)?;
        let fp2 = f(z + dir * (2.0 * h))?;
        let fm2 = f(z - dir * (2.0 * h))?;
        total += (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    }
    Ok(total)
}

fn positive_sqrt(beta2: f64) -> Result<f64> {
    if !beta2.is_finite() {
        Err(Error::NonFinite("metric density"))
    } else if beta2 > 0.0 {
        Ok(beta2.sqrt())
    } else {
        // a non-positive Laplacian of log K_B means the kernel values are noise
        Err(Error::IllConditioned {
            condition: f64::INFINITY,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::ConformalDomain;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_examples() {
        let d = Domain::unit_disc();
        assert!((bergman_metric_numeric(&d, c(0.0, 0.0)).unwrap() - 1.4142136).abs() < 1e-5);
        assert!((bergman_metric_numeric(&d, c(0.5, 0.0)).unwrap() - 1.8856181).abs() < 1e-4);
        assert!((m_invariant(&d, c(0.0, 0.0)).unwrap() - 0.7978846).abs() < 1e-5);
        // √(2/π) / 0.75²
        assert!((m_invariant(&d, c(0.5, 0.0)).unwrap() - 1.4184616).abs() < 1e-5);
    }

    #[test]
    fn annulus_remark_limit() {
        let a = Domain::annulus(0.25).unwrap();
        let beta = bergman_metric_numeric(&a, c(0.99, 0.0)).unwrap();
        assert!((0.01 * beta - 0.7071068).abs() < 0.01);
    }

    #[test]
    fn annulus_closed_form_density_matches_differences() {
        let a = Domain::annulus(0.25).unwrap();
        let series = AnnulusSeriesMetric::new(0.25).unwrap();
        for m in [0.26, 0.4, 0.5, 0.7, 0.95, 0.999] {
            let z = Complex64::from_polar(m, 1.1);
            let fd = bergman_metric_numeric(&a, z).unwrap();
            let cf = series.density(z).unwrap();
            assert!((fd - cf).abs() <= 1e-6 * cf, "{m}: {fd} {cf}");
        }
    }

    #[test]
    fn conformal_matches_pushforward() {
        let conf = ConformalDomain::showcase();
        let domain = Domain::Conformal(conf.clone());
        for zeta in [c(0.0, 0.0), c(0.4, 0.3), c(-0.6, 0.0), c(0.0, -0.7)] {
            let z = conf.evaluate_map(zeta).0;
            let numeric = bergman_metric_numeric(&domain, z).unwrap();
            let exact = conf.pushforward_bergman_metric(z).unwrap();
            assert!((numeric - exact).abs() <= 1e-4 * exact, "{zeta}: {numeric} vs {exact}");
        }
    }

    #[test]
    fn extremal_route_agrees_with_product() {
        let conf = ConformalDomain::showcase();
        let domain = Domain::Conformal(conf.clone());
        for zeta in [c(0.1, 0.2), c(-0.5, 0.3)] {
            let z = conf.evaluate_map(zeta).0;
            let a = m_invariant(&domain, z).unwrap();
            let b = extremal_m_invariant(&domain, z).unwrap();
            assert!((a - b).abs() <= 1e-5 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn punctured_disc_uses_disc_kernel() {
        let p = Domain::punctured_disc();
        let z = c(0.3, -0.2);
        let a = bergman_metric_numeric(&p, z).unwrap();
        let b = bergman_metric_numeric(&Domain::unit_disc(), z).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn floors_are_enforced() {
        let d = Domain::unit_disc();
        assert!(matches!(
            bergman_metric_numeric(&d, c(0.995, 0.0)),
            Err(Error::PointsTooCloseToBoundary { .. })
        ));
        let a = Domain::annulus(0.25).unwrap();
        assert!(matches!(
            bergman_metric_numeric(&a, c(0.99995, 0.0)),
            Err(Error::PointsTooCloseToBoundary { .. })
        ));
    }

    #[test]
    fn exact_metric_values() {
        let m = ExactBergmanMetric::new(&Domain::disc(2.0).unwrap()).unwrap();
        // √2 R / (R² − |z|²) at R = 2, z = 1
        assert!((m.density(c(1.0, 0.0)).unwrap() - 2.0 * SQRT_2 / 3.0).abs() < 1e-15);
        assert!(ExactBergmanMetric::new(&Domain::annulus(0.5).unwrap()).is_err());
    }
}
