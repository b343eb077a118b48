//! Orthonormalized polynomial and Laurent bases of the Bergman space.
//!
//! Every domain is handled in a uniformizing coordinate `u`: `u = z/R` on a
//! disc of radius `R`, `u = ϕ⁻¹(z)` on a conformal image, `u = z` on the
//! annulus. Candidate functions are `uᵃ`; their Gram matrix is assembled with
//! the Jacobian `J = |dz/du|²` on a polar grid in `u`, Jacobi-scaled and
//! factored by pivoted Cholesky.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::cholesky::PivotedCholesky;
use super::quadrature::PolarQuadrature;
use crate::domains::{ConformalDomain, Domain};
use crate::error::{Error, Result};
use crate::geometry::{contains, dist_to_boundary, ensure_finite};
use crate::ComplexPoint;

/// Default boundary-distance floor for kernel evaluation.
pub const KERNEL_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// `uⁿ`, `n = 0..=N`.
    Monomial,
    /// `uⁿ`, `n = −N..=N`.
    Laurent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelDiagnostics {
    pub degree: usize,
    pub radial_order: usize,
    pub angular_order: usize,
    pub condition: f64,
    pub truncation_error: f64,
}

#[derive(Debug, Clone)]
enum Chart {
    Disc { radius: f64 },
    Conformal(ConformalDomain),
    Annulus { r: f64 },
}

impl Chart {
    fn of(domain: &Domain) -> Self {
        match domain {
            Domain::Disc(d) => Chart::Disc { radius: d.radius() },
            Domain::PuncturedDisc(_) => Chart::Disc { radius: 1.0 },
            Domain::Conformal(c) => Chart::Conformal(c.clone()),
            Domain::Annulus(a) => Chart::Annulus {
                r: a.inner_radius(),
            },
        }
    }

    /// `u(z)` and `du/dz`.
    fn coordinate(&self, z: ComplexPoint) -> Result<(Complex64, Complex64)> {
        match self {
            Chart::Disc { radius } => Ok((z / radius, Complex64::new(1.0 / radius, 0.0))),
            Chart::Conformal(c) => {
                let u = c.inverse_map(z)?;
                let (_, d) = c.evaluate_map(u);
                Ok((u, d.inv()))
            }
            Chart::Annulus { .. } => Ok((z, Complex64::new(1.0, 0.0))),
        }
    }

    fn jacobian(&self, u: Complex64) -> f64 {
        match self {
            Chart::Disc { radius } => radius * radius,
            Chart::Conformal(c) => c.evaluate_map(u).1.norm_sqr(),
            Chart::Annulus { .. } => 1.0,
        }
    }

    /// Highest Fourier mode of the Jacobian on circles `|u| = ρ`.
    fn band(&self) -> usize {
        match self {
            Chart::Conformal(c) => c.degree() - 1,
            _ => 0,
        }
    }
}

/// A truncated orthonormal basis of `L²_h(D)`.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    domain: Domain,
    chart: Chart,
    kind: BasisKind,
    degree: usize,
    exponents: Vec<i32>,
    scales: Vec<f64>,
    factor: PivotedCholesky,
    radial_order: usize,
    angular_order: usize,
    floor: f64,
}

impl OrthonormalBasis {
    /// Monomials on simply connected domains (and the punctured disc, whose
    /// Bergman space is the disc's), Laurent monomials on the annulus.
    pub fn new(domain: &Domain, degree: usize) -> Result<Self> {
        let kind = match domain {
            Domain::Annulus(_) => BasisKind::Laurent,
            _ => BasisKind::Monomial,
        };
        Self::with_kind(domain, degree, kind)
    }

    pub fn with_kind(domain: &Domain, degree: usize, kind: BasisKind) -> Result<Self> {
        let chart = Chart::of(domain);
        if kind == BasisKind::Laurent && !matches!(chart, Chart::Annulus { .. }) {
            return Err(Error::UnsupportedDomain {
                operation: "Laurent basis",
                domain: domain.to_string(),
            });
        }
        let exponents: Vec<i32> = match kind {
            BasisKind::Monomial => (0..=degree as i32).collect(),
            BasisKind::Laurent => (-(degree as i32)..=degree as i32).collect(),
        };
        let band = chart.band();
        let angular_order = 4 * band + 8;
        let (quadrature, radial_order) = match chart {
            Chart::Annulus { r } => {
                // exponentials e^{λs} with |λ| ≤ 4N + 2 over a width log(1/r)
                let lambda = (4 * degree + 2) as f64;
                let m = (0.5 * lambda * (1.0 / r).ln()).ceil() as usize + 32;
                (PolarQuadrature::logarithmic(r, 1.0, m, angular_order), m)
            }
            _ => {
                let m = 2 * degree + 2 * band + 4;
                (PolarQuadrature::new(0.0, 1.0, m, angular_order), m)
            }
        };

        let gram = assemble_gram(&chart, &exponents, &quadrature, band);
        let n = exponents.len();
        let scales: Vec<f64> = (0..n).map(|j| 1.0 / gram[j * n + j].re.sqrt()).collect();
        let scaled: Vec<Complex64> = (0..n * n)
            .map(|idx| gram[idx] * (scales[idx / n] * scales[idx % n]))
            .collect();
        let factor = PivotedCholesky::factor(n, &scaled)?;

        Ok(Self {
            domain: domain.clone(),
            chart,
            kind,
            degree,
            exponents,
            scales,
            factor,
            radial_order,
            angular_order,
            floor: KERNEL_FLOOR,
        })
    }

    /// Replaces the boundary-distance floor enforced by [`Self::kernel_diag`].
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn condition(&self) -> f64 {
        self.factor.condition()
    }

    pub fn radial_order(&self) -> usize {
        self.radial_order
    }

    pub fn angular_order(&self) -> usize {
        self.angular_order
    }

    /// `K_B(z, z) = Σⱼ |φⱼ(z)|²`.
    pub fn kernel_diag(&self, z: ComplexPoint) -> Result<f64> {
        self.check_point(z)?;
        self.kernel_unchecked(z)
    }

    /// `K_B(z, z)` and the extremal quantity
    /// `M_D(z; 1) = sup{|f′(z)| : ‖f‖ ≤ 1, f(z) = 0}` over the truncated space.
    pub fn kernel_and_extremal(&self, z: ComplexPoint) -> Result<(f64, f64)> {
        self.check_point(z)?;
        let (u, du) = self.chart.coordinate(z)?;
        let (values, derivs) = self.evaluate(u, du);
        let y = self.factor.forward_solve(&values);
        let yd = self.factor.forward_solve(&derivs);
        let k: f64 = y.iter().map(|c| c.norm_sqr()).sum();
        let kd: f64 = yd.iter().map(|c| c.norm_sqr()).sum();
        let cross: Complex64 = yd.iter().zip(&y).map(|(a, b)| a * b.conj()).sum();
        let m2 = (kd - cross.norm_sqr() / k).max(0.0);
        Ok((k, m2.sqrt()))
    }

    pub fn diagnostics(&self, z: ComplexPoint) -> Result<KernelDiagnostics> {
        let (u, _) = self.chart.coordinate(z)?;
        Ok(KernelDiagnostics {
            degree: self.degree,
            radial_order: self.radial_order,
            angular_order: self.angular_order,
            condition: self.factor.condition(),
            truncation_error: self.truncation_estimate(u),
        })
    }

    /// Model relative truncation error at `u`, taken from the exactly known
    /// disc and annulus series in the uniformizing coordinate.
    pub fn truncation_estimate(&self, u: Complex64) -> f64 {
        let estimate = match self.chart {
            Chart::Annulus { r } => laurent_relative_tail(r, u.norm_sqr(), self.degree),
            _ => monomial_relative_tail(u.norm_sqr(), self.degree),
        };
        estimate.max(f64::EPSILON)
    }

    pub(crate) fn check_point(&self, z: ComplexPoint) -> Result<()> {
        ensure_finite(z, "kernel point")?;
        if !contains(&self.domain, z) {
            return Err(Error::PointOutsideDomain { z });
        }
        let distance = dist_to_boundary(&self.domain, z)?;
        if distance < self.floor {
            return Err(Error::PointsTooCloseToBoundary {
                z,
                distance,
                floor: self.floor,
            });
        }
        Ok(())
    }

    /// Kernel value without membership or floor checks.
    pub(crate) fn kernel_unchecked(&self, z: ComplexPoint) -> Result<f64> {
        let (u, _) = self.chart.coordinate(z)?;
        let values = self.values(u);
        let y = self.factor.forward_solve(&values);
        Ok(y.iter().map(|c| c.norm_sqr()).sum())
    }

    pub(crate) fn coordinate(&self, z: ComplexPoint) -> Result<Complex64> {
        Ok(self.chart.coordinate(z)?.0)
    }

    fn values(&self, u: Complex64) -> Vec<Complex64> {
        let powers = self.powers(u);
        powers.iter().zip(&self.scales).map(|(p, s)| p * s).collect()
    }

    fn evaluate(&self, u: Complex64, du: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let powers = self.powers(u);
        let values = powers.iter().zip(&self.scales).map(|(p, s)| p * s).collect();
        // d/dz uᵃ = a u^{a−1} du/dz, with u^{a−1} taken from the previous slot
        let first = self.exponents[0];
        let mut below = if first <= 0 {
            u.inv().powi(1 - first)
        } else {
            u.powi(first - 1)
        };
        let derivs = powers
            .iter()
            .zip(&self.scales)
            .zip(&self.exponents)
            .map(|((p, s), &a)| {
                let d = if a == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    below * (a as f64 * s) * du
                };
                below = *p;
                d
            })
            .collect();
        (values, derivs)
    }

    fn powers(&self, u: Complex64) -> Vec<Complex64> {
        let first = self.exponents[0];
        let mut p = if first < 0 { u.inv().powi(-first) } else { Complex64::new(1.0, 0.0) };
        let mut out = Vec::with_capacity(self.exponents.len());
        for _ in &self.exponents {
            out.push(p);
            p *= u;
        }
        out
    }
}

/// `G_jk = ∫ u^{a_j} conj(u^{a_k}) J dA(u)`, with only the Fourier modes
/// `|a_j − a_k| ≤ band` of the Jacobian contributing.
fn assemble_gram(chart: &Chart, exponents: &[i32], q: &PolarQuadrature, band: usize) -> Vec<Complex64> {
    let n = exponents.len();
    let p = q.angular;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(p);
    let weight = 2.0 * PI / p as f64;
    let band = band as i32;

    // modes[i][m + band] = (2π/P) Σ_p J(ρ_i e^{iθ_p}) e^{imθ_p}
    let modes: Vec<Vec<Complex64>> = q
        .radii
        .iter()
        .map(|&rho| {
            let mut buf: Vec<Complex64> = (0..p)
                .map(|k| Complex64::new(chart.jacobian(Complex64::from_polar(rho, q.angle(k))), 0.0))
                .collect();
            fft.process(&mut buf);
            (-band..=band)
                .map(|m| buf[(-m).rem_euclid(p as i32) as usize] * weight)
                .collect()
        })
        .collect();

    let emin = 2 * exponents[0];
    let emax = 2 * exponents[n - 1];
    let powers: Vec<Vec<f64>> = q
        .radii
        .iter()
        .zip(&q.radial_weights)
        .map(|(&rho, &w)| (emin..=emax).map(|e| w * rho.powi(e)).collect())
        .collect();

    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in j..n.min(j + band as usize + 1) {
            let m = exponents[j] - exponents[k];
            let e = (exponents[j] + exponents[k] - emin) as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for (pw, md) in powers.iter().zip(&modes) {
                acc += md[(m + band) as usize] * pw[e];
            }
            gram[j * n + k] = acc;
            gram[k * n + j] = acc.conj();
        }
        gram[j * n + j].im = 0.0;
    }
    gram
}

/// Omitted fraction of `Σ (n+1) xⁿ = 1/(1−x)²` beyond `n = N`.
pub(crate) fn monomial_relative_tail(x: f64, degree: usize) -> f64 {
    let n = degree as f64;
    x.powi(degree as i32 + 1) * (n + 2.0 - (n + 1.0) * x)
}

fn laurent_relative_tail(r: f64, x: f64, degree: usize) -> f64 {
    let q = r * r / x;
    let positive = monomial_relative_tail(x, degree) / ((1.0 - x) * (1.0 - x));
    let n = degree as f64;
    let negative = q.powi(degree as i32) * (n - (n - 1.0) * q) / ((1.0 - q) * (1.0 - q) * x);
    let total = 1.0 / ((1.0 - x) * (1.0 - x)) + q / (x * (1.0 - q) * (1.0 - q));
    (positive + negative) / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::annulus::annulus_kernel_diag;

    fn disc_kernel(z: Complex64) -> f64 {
        let t = 1.0 - z.norm_sqr();
        1.0 / (PI * t * t)
    }

    #[test]
    fn disc_examples() {
        let basis = OrthonormalBasis::new(&Domain::unit_disc(), 40).unwrap();
        let k0 = basis.kernel_diag(Complex64::new(0.0, 0.0)).unwrap();
        assert!((k0 - 0.3183099).abs() < 1e-7);
        let k5 = basis.kernel_diag(Complex64::new(0.5, 0.0)).unwrap();
        assert!((k5 - 0.5658843).abs() < 1e-7);
    }

    #[test]
    fn disc_closed_form_inside_half_disc() {
        let basis = OrthonormalBasis::new(&Domain::unit_disc(), 40).unwrap();
        for k in 0..50 {
            let z = Complex64::from_polar(0.5 * (k as f64 / 49.0).sqrt(), 0.37 * k as f64);
            let exact = disc_kernel(z);
            assert!((basis.kernel_diag(z).unwrap() - exact).abs() <= 1e-8 * exact);
        }
    }

    #[test]
    fn scaled_disc_at_centre() {
        for rho in [0.3, 0.8, 2.5] {
            let basis = OrthonormalBasis::new(&Domain::disc(rho).unwrap(), 10).unwrap();
            let k = basis.kernel_diag(Complex64::new(0.0, 0.0)).unwrap();
            let exact = 1.0 / (PI * rho * rho);
            assert!((k - exact).abs() <= 1e-8 * exact);
        }
    }

    #[test]
    fn laurent_basis_matches_series() {
        let domain = Domain::annulus(0.5).unwrap();
        let basis = OrthonormalBasis::new(&domain, 60).unwrap();
        for m in [0.6, 0.7, 0.8] {
            let z = Complex64::from_polar(m, 1.1);
            let gram = basis.kernel_diag(z).unwrap();
            let series = annulus_kernel_diag(0.5, z, 200).unwrap().value;
            assert!((gram - series).abs() <= 1e-6 * series, "|z|={m}: {gram} vs {series}");
        }
    }

    #[test]
    fn conformal_kernel_matches_transport() {
        // K_D(z) = K_𝔻(ζ) |ψ′(z)|² with ζ = ψ(z)
        let c = ConformalDomain::showcase();
        let domain = Domain::Conformal(c.clone());
        let basis = OrthonormalBasis::new(&domain, 80).unwrap();
        for zeta in [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.4), Complex64::new(-0.5, 0.1)] {
            let (z, d) = c.evaluate_map(zeta);
            let exact = disc_kernel(zeta) / d.norm_sqr();
            let k = basis.kernel_diag(z).unwrap();
            assert!((k - exact).abs() <= 1e-9 * exact, "{zeta}: {k} vs {exact}");
        }
    }

    #[test]
    fn kernel_grows_with_degree() {
        let domain = Domain::Conformal(ConformalDomain::showcase());
        let z = Complex64::new(0.6, 0.3);
        let mut previous = 0.0;
        for n in [5, 10, 20, 40] {
            let k = OrthonormalBasis::new(&domain, n).unwrap().kernel_diag(z).unwrap();
            assert!(k >= previous - 1e-12 * k);
            previous = k;
        }
    }

    #[test]
    fn extremal_invariant_on_disc() {
        // M_𝔻(z; 1) = √(2/π) / (1 − |z|²)²
        let basis = OrthonormalBasis::new(&Domain::unit_disc(), 60).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.1, -0.3)] {
            let (_, m) = basis.kernel_and_extremal(z).unwrap();
            let t = 1.0 - z.norm_sqr();
            let exact = (2.0 / PI).sqrt() / (t * t);
            assert!((m - exact).abs() <= 1e-8 * exact, "{z}: {m} vs {exact}");
        }
    }

    #[test]
    fn floor_and_membership() {
        let basis = OrthonormalBasis::new(&Domain::unit_disc(), 10).unwrap();
        assert!(matches!(
            basis.kernel_diag(Complex64::new(0.9995, 0.0)),
            Err(Error::PointsTooCloseToBoundary { .. })
        ));
        assert!(matches!(
            basis.kernel_diag(Complex64::new(1.5, 0.0)),
            Err(Error::PointOutsideDomain { .. })
        ));
    }

    #[test]
    fn diagnostics_are_positive() {
        let basis = OrthonormalBasis::new(&Domain::annulus(0.5).unwrap(), 20).unwrap();
        let d = basis.diagnostics(Complex64::new(0.7, 0.0)).unwrap();
        assert!(d.condition >= 1.0 && d.truncation_error > 0.0);
        assert!(d.radial_order > 0 && d.angular_order > 0);
    }
}
