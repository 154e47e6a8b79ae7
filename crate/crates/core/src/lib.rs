//! Two-level GKLS master equations in physical form.
//!
//! Any generator `dρ/dt = -i[H, ρ] + Σ γ_i D[L_i](ρ)` with two jump
//! operators whose span is closed under the adjoint can be rewritten, up to
//! the usual representation freedom, as free evolution plus the exchange of
//! a generalized charge `N` with a bath at rates `γp`, `γm`, plus pure
//! dephasing along an orthogonal axis `D`:
//!
//! ```text
//!   dρ/dt = -i[H, ρ] - (γp+γm)(ρ - I/2) + (γp-γm) N
//!           + (γp+γm) [N,[N,ρ]]/2 - Γ [D,[D,ρ]]/2
//! ```
//!
//! [`decompose()`](crate::decompose::decompose) performs that reduction
//! exactly; [`gkls`] holds the system
//! model, its 4x4 Liouvillian and affine Bloch representations, and the
//! form-preserving transforms; [`dynamics`] propagates, solves for
//! stationary states and maps the exceptional points of the tilted-charge
//! family; [`thermo`] fits generalized Gibbs exponents, including the
//! non-commutation potential.
//!
//! The `parallel` feature (on by default) runs grid sweeps and batch
//! verification on rayon; without it everything falls back to sequential
//! iteration with identical results.

pub mod algebra;
pub mod cli;
pub mod decompose;
pub mod dynamics;
pub mod gkls;
pub mod io;
pub mod numerics;
mod par;
pub mod sample;
pub mod thermo;
pub mod tol;

pub use algebra::{HermitianAxis, Norm, Operator2, PauliCoeffs, C64};
pub use decompose::{decompose, DecomposeError, PhysicalForm};
pub use gkls::{
    classify_input, liouvillian_matrix, Classification, GklsSystem, JumpTerm, Liouvillian4,
};
