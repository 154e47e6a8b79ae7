//! Decision thresholds used across the crate.
//!
//! All 2x2 and 4x4 arithmetic here runs at machine precision, so these
//! constants sit several orders of magnitude above accumulated f64 rounding
//! while staying far below any physical parameter scale. They are decision
//! thresholds (is this Hermitian? is this rank 2?), not accuracy targets.

/// Hermiticity check on input operators, relative to the operator scale.
pub const HERM: f64 = 1e-10;

/// Axis normalization check (full convention |v| = 1, half convention |v| = 1/2).
pub const NORM: f64 = 1e-10;

/// Collinearity threshold on the cross product of two Pauli vectors,
/// relative to the product of their norms.
pub const COLLINEAR: f64 = 1e-9;

/// Rank decisions on stacked Pauli coefficient matrices: singular values
/// below `CLOSURE` times the largest one count as zero.
pub const CLOSURE: f64 = 1e-9;

/// Positive-semidefiniteness slack for dissipator coefficient matrices,
/// relative to their trace.
pub const PSD: f64 = 1e-9;

/// Degenerate in-plane dephasing rates: the residual dephasing channel is
/// dropped when `g1 - g2 <= DEGENERATE * g1`.
pub const DEGENERATE: f64 = 1e-10;

/// Exceptional-point classification threshold, in gamma = 1 units.
pub const EP: f64 = 1e-8;

/// Residual gate for a successful decomposition round trip (CLI exit code).
pub const ROUNDTRIP: f64 = 1e-8;
