//! Invariant distances and metrics of bounded planar domains.
//!
//! The crate computes Carathéodory, Kobayashi and Bergman distances on a small
//! family of planar domains (discs, conformal images of the disc, the annulus
//! and the punctured disc), evaluates Bergman kernels and metrics numerically
//! from orthonormalized bases, and checks two-sided distance estimates and
//! boundary limits on seeded samples.
//!
//! Module map:
//!
//! | module        | contents                                                     |
//! |---------------|--------------------------------------------------------------|
//! | [`geometry`]  | boundary polylines, membership, boundary distance `d_D`      |
//! | [`disc`]      | closed forms on the unit disc and their two-sided bounds     |
//! | [`domains`]   | domain models, Riemann-map transport                         |
//! | [`kernel`]    | Bergman kernels `K_B(z,z)`, metrics `β_D`, invariants `M_D`  |
//! | [`distances`] | distance engines: closed form, pullback, geodesic, covering  |
//! | [`verify`]    | certificates for the two-sided estimates and limit laws      |

pub mod disc;
pub mod distances;
pub mod domains;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod verify;

/// A point of the complex plane.
pub type ComplexPoint = num_complex::Complex64;

pub use domains::{Domain, DomainSpec};
pub use error::{Error, Result};
