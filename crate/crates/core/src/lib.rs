//! Complex singularity exponents and Bergman-kernel boundary laws for the
//! model domains `Ω_F = {(z, w) : Im w > |F(z)|²}`.
//!
//! The pipeline:
//!
//! - [`polyparse`] reads polynomial maps, recenters them at a boundary point
//!   and carries the planar real series used in `--real` mode;
//! - [`newton`] builds the Newton polyhedron in exact arithmetic, enumerates
//!   its compact faces, intersects the weighted diagonals and checks
//!   nondegeneracy;
//! - [`charts`] evaluates the monomial-chart model integrals of a resolution
//!   and their pole bookkeeping, an independent route to the same exponents;
//! - [`exponents`] turns either route into singularity exponents, log orders
//!   and the kernel / metric / curvature / volume laws;
//! - [`mc_verify`] checks the predicted laws by Monte Carlo and closed forms.

pub mod charts;
pub mod exponents;
pub mod fit;
pub mod mc_verify;
pub mod newton;
pub mod polyparse;
pub mod rational;
pub mod scalar;

pub use rational::Rational;

/// Toolkit version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
