//! Numeric tolerances used across the crate.
//!
//! All comparisons in the library go through one of these constants (or a
//! caller-supplied override where an operation documents one). Keeping them
//! in one place makes the accepted slack auditable.

/// Default tolerance for hypothesis checks, integrality snapping and
/// cut-value comparisons. CLI flag `--tolerance` overrides it per run.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Residual capacities below this are treated as zero by the flow engine,
/// so augmentation terminates cleanly on real-valued capacities.
pub const RESIDUAL_ZERO: f64 = 1e-12;

/// Tolerance for exact discrete identities (curl/divergence transfer,
/// Stokes sums, reconstruction edge equalities). These identities are sums
/// of a few dozen f64 terms, so 1e-12 is generous but not permissive.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Snap a value to the nearest integer if it is within `tol`, else `None`.
pub fn snap_integer(y: f64, tol: f64) -> Option<i64> {
    let r = y.round();
    if (y - r).abs() <= tol && r.abs() < 9e15 {
        Some(r as i64)
    } else {
        None
    }
}
