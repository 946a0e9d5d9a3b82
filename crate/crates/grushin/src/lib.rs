//! Curvature-dimension analysis of α-Grushin half-space geometries.
//!
//! The objects of study are warped-product metrics `g = dx⊗dx + f(x)⁻² dy⊗dy`
//! on a half-space `{x > 0} × ℝ` (or a quarter-sphere band), carrying a weighted
//! measure `m = e^{-V} vol_g`. Four profile families are supported — power-law
//! (`f = x^α`), trigonometric (`f = sin^α x / cos x`), hyperbolic
//! (`f = sinh^α x / cosh x`), and the flat-to-all-orders profile `f = e^{-1/x}`.
//!
//! The crate computes, exactly where closed forms exist and numerically
//! elsewhere:
//!
//! - profile data, weights, and metric lengths ([`model`]);
//! - the weighted (Bakry–Émery) N-Ricci tensor in the orthonormal frame, by
//!   closed form, by a structural lemma, and by finite differences
//!   ([`curvature`]);
//! - exact feasibility regions for the curvature-dimension condition CD(K, N):
//!   the largest admissible K and the admissible β-intervals per family
//!   ([`regions`]);
//! - Hamiltonian geodesics, two-point distances by shooting, and the boundary
//!   scaling exponent that detects the metric dimension ([`geodesics`]);
//! - distortion coefficients and one-dimensional optimal-transport checks of
//!   the defining CD inequality on slices ([`transport`]).

pub mod curvature;
pub mod geodesics;
pub mod model;
mod numerics;
pub mod regions;
pub mod transport;

/// Errors shared by every module of the crate.
///
/// Construction-time and precondition failures are separated from numerical
/// failures (integration, quadrature, root finding) so callers can map them to
/// distinct exit statuses.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Model parameters violate a family constraint (e.g. β < α, γ ≤ 0).
    #[error("invalid model parameters: {0}")]
    Construction(String),
    /// A coordinate left the admissible open domain of the family.
    #[error("coordinate out of domain: {0}")]
    Domain(String),
    /// An effective dimension outside (−∞,0) ∪ [2,∞] (or 2 with a nontrivial
    /// weight), or one a specific operation cannot accept.
    #[error("invalid effective dimension: {0}")]
    Dim(String),
    /// An operation precondition was violated (grids, tolerances, ranges).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// The adaptive ODE integrator failed (step size underflow, non-finite
    /// state).
    #[error("integration failed: {0}")]
    Integration(String),
    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    /// A shooting / root-finding solve exhausted its restarts without
    /// converging.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A slice measure has inadmissible support or fails to normalize.
    #[error("invalid slice measure: {0}")]
    Support(String),
    /// A structural statement's hypotheses are violated, or its asserted
    /// content failed verification.
    #[error("statement hypothesis failed: {0}")]
    Statement(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
