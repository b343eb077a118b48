//! Numerical Bergman kernels `K_B(z, z)`, metrics `β_D(z; 1)` and the
//! invariant `M_D(z; 1)`.

pub mod annulus;
pub mod basis;
pub mod cholesky;
pub mod metric;
pub mod quadrature;

pub use annulus::{annulus_kernel_diag, annulus_kernel_diag_resummed, SeriesValue};
pub use basis::{BasisKind, KernelDiagnostics, OrthonormalBasis, KERNEL_FLOOR};
pub use metric::{
    bergman_metric_numeric, cached_basis, extremal_m_invariant, kernel_and_metric, kernel_diag_numeric,
    m_invariant, AnnulusSeriesMetric, ExactBergmanMetric, GramBergmanMetric, MetricField, GRAM_FLOOR,
    SERIES_FLOOR,
};

use crate::{ComplexPoint, Result};

/// `K_B(z, z)` over the basis; `z` must keep the basis's boundary floor.
pub fn kernel_diag(basis: &OrthonormalBasis, z: ComplexPoint) -> Result<f64> {
    basis.kernel_diag(z)
}
