use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {z} lies outside the domain")]
    PointOutsideDomain { z: Complex64 },

    #[error("point {z} is within {distance:e} of the boundary")]
    DegenerateQuery { z: Complex64, distance: f64 },

    #[error("boundary discretization with {n} points per component is too coarse (need at least 8)")]
    TooCoarse { n: usize },

    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("inverse map did not converge for {z} after {iterations} iterations")]
    NoConvergence { z: Complex64, iterations: usize },

    #[error("Gram matrix is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("series tail {tail:e} exceeds tolerance relative to partial sum {partial:e}")]
    TailTooLarge { tail: f64, partial: f64 },

    #[error("finite-difference stencil of step {step:e} around {z} leaves the domain")]
    StencilOutsideDomain { z: Complex64, step: f64 },

    #[error("point {z} has boundary distance {distance:e} below the engine floor {floor:e}")]
    PointsTooCloseToBoundary {
        z: Complex64,
        distance: f64,
        floor: f64,
    },

    #[error("points coincide")]
    CoincidentPoints,

    #[error("no path between the endpoints on the geodesic grid")]
    NoPath,

    #[error("deck-orbit truncation at K_max = {kmax} is not certified")]
    OrbitTruncationUnsafe { kmax: usize },

    #[error("{operation} is not supported on {domain}")]
    UnsupportedDomain {
        operation: &'static str,
        domain: String,
    },

    #[error("inner domain is not contained in outer domain (witness {witness})")]
    NotNested { witness: Complex64 },

    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),
}
