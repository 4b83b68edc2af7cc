//! Centralized tolerances used across the crate.
//!
//! Values chosen to match the double-precision budget of the determinant
//! identities at N <= 5; see the acceptance suite for where each one bites.

/// Relative threshold below which a matrix counts as numerically singular:
/// smallest singular value < `SINGULAR_REL` x largest.
pub const SINGULAR_REL: f64 = 1e-10;

/// Relative proximity at which two nodes trigger a conditioning warning
/// (strict equality is the hard error).
pub const NODE_PROXIMITY_WARN: f64 = 1e-14;

/// Residual bound for interpolation conditions of a constructed basis solution.
pub const IP_RESIDUAL: f64 = 1e-9;

/// Minimum pairwise root separation (relative to the largest root) for the
/// "simple roots" precondition of the inverse interpolation problem.
pub const SIMPLE_ROOT_SEP: f64 = 1e-7;

/// Bisection tolerance for locating singularity-line roots in x.
pub const LINE_LOC: f64 = 1e-10;

/// Grid-level singularity detection: |det| below this times the row-scaled
/// magnitude marks a singular sample.
pub const SINGULAR_FIELD: f64 = 1e-8;

/// Agreement required between the two ratio routes at a root of D(lambda).
pub const RATIO_AGREE: f64 = 1e-8;

/// Absolute tolerance against values printed in the worked numerical examples
/// (their inputs are rounded to 5-7 digits).
pub const PRINTED_DATA_ABS: f64 = 1e-3;
