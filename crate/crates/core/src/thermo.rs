//! Stationary-state thermodynamics: fitting the generalized Gibbs form
//!
//! ```text
//!   ρ_st = exp(-β H + μ N + iλ [H, N]) / Z
//! ```
//!
//! and the closed-form stationary coefficients of the three case studies.
//!
//! On a two-level system the matrix logarithm of a strictly mixed state is
//! a *positive scalar multiple* of its traceless part: for
//! `ρ = c0 I + W` with `W² = w² I`, `log ρ = ½ln(c0² - w²) I + s W` where
//! `s = artanh(w/c0)/w`. The fitted potentials are therefore the Bloch
//! coefficients of the state rescaled by `s` and expressed in the
//! (generally non-orthogonal) frame `{-H, N, i[H, N]}`.

use nalgebra::Vector3;
use thiserror::Error;

use crate::algebra::Operator2;
use crate::dynamics::CaseKind;
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum ThermoError {
    #[error("state is not a density matrix: {0}")]
    NotDensity(&'static str),
    #[error("state is pure within tolerance; the logarithm diverges")]
    PureState,
    #[error("basis operator is not traceless Hermitian")]
    BadBasisOperator,
    #[error("state lies outside the span of the fit basis (residual {0:.3e})")]
    RankDeficientBasis(f64),
    #[error("stationary formula denominator vanishes")]
    DegenerateDenominator,
}

/// Result of a generalized-Gibbs fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsFit {
    /// Inverse effective temperature (coefficient of `-H`).
    pub beta: f64,
    /// Charge potential (coefficient of `N`).
    pub mu: f64,
    /// Non-commutation potential (coefficient of `i[H, N]`).
    pub lam: f64,
    pub log_z: f64,
    /// Hilbert-Schmidt norm of the part of `log ρ` the basis cannot carry.
    pub residual: f64,
}

fn traceless_hermitian_vec(op: &Operator2) -> Result<Vector3<f64>, ThermoError> {
    let scale = op.max_abs().max(1.0);
    if op.max_abs_diff(&op.dagger()) > tol::HERM * scale || op.trace().norm() > tol::HERM * scale {
        return Err(ThermoError::BadBasisOperator);
    }
    Ok(op.pauli().re3())
}

/// Fit `ρ_st = exp(-β h + μ n + iλ [h, n] - ln Z)`.
///
/// The principal logarithm is taken through the eigendecomposition of the
/// Hermitian state; its traceless part is then projected onto the real
/// span of `{-h, n, i[h, n]}`. Vectors that are dependent on earlier ones
/// are dropped in that order, so when `[h, n] = 0` the fit has `λ = 0`,
/// and when additionally `h ∝ n` everything is attributed to `β` (`μ = 0`).
pub fn gibbs_fit(
    rho_st: &Operator2,
    h: &Operator2,
    n: &Operator2,
) -> Result<GibbsFit, ThermoError> {
    let scale = rho_st.max_abs().max(1.0);
    if rho_st.max_abs_diff(&rho_st.dagger()) > tol::HERM * scale {
        return Err(ThermoError::NotDensity("not Hermitian"));
    }
    if (rho_st.trace() - num_complex::Complex64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(ThermoError::NotDensity("trace is not 1"));
    }

    let w_vec = rho_st.pauli().re3();
    let w = w_vec.norm();
    let c0 = 0.5;
    if c0 - w <= 1e-12 {
        return Err(ThermoError::PureState);
    }

    // log ρ = g0 I + s W, exactly on two levels
    let g0 = 0.5 * ((c0 + w) * (c0 - w)).ln();
    let s = if w < 1e-7 {
        // artanh(w/c0)/w -> 1/c0 + w²/(3 c0³) + ...
        (1.0 + (w * w) / (3.0 * c0 * c0)) / c0
    } else {
        ((w / c0).atanh()) / w
    };
    let target = w_vec * s;

    let hv = traceless_hermitian_vec(h)?;
    let nv = traceless_hermitian_vec(n)?;
    // i[H, N] has Pauli vector -2 (h × n)
    let cv = hv.cross(&nv) * -2.0;
    let columns = [-hv, nv, cv];

    // greedy independent subset in fixed order
    let col_scale = columns
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut kept: Vec<usize> = Vec::new();
    let mut ortho: Vec<Vector3<f64>> = Vec::new();
    for (i, c) in columns.iter().enumerate() {
        let mut r = *c;
        for u in &ortho {
            r -= u * r.dot(u);
        }
        if r.norm() > 1e-10 * col_scale {
            ortho.push(r / r.norm());
            kept.push(i);
        }
    }

    // least squares on the kept columns via the normal equations
    let k = kept.len();
    let mut coeffs = [0.0f64; 3];
    let mut fitted = Vector3::zeros();
    if k > 0 {
        let mut gram = nalgebra::DMatrix::<f64>::zeros(k, k);
        let mut rhs = nalgebra::DVector::<f64>::zeros(k);
        for (a, &ia) in kept.iter().enumerate() {
            for (b, &ib) in kept.iter().enumerate() {
                gram[(a, b)] = columns[ia].dot(&columns[ib]);
            }
            rhs[a] = columns[ia].dot(&target);
        }
        let sol = gram
            .lu()
            .solve(&rhs)
            .ok_or(ThermoError::RankDeficientBasis(f64::NAN))?;
        for (a, &ia) in kept.iter().enumerate() {
            coeffs[ia] = sol[a];
            fitted += columns[ia] * sol[a];
        }
    }
    let residual = (target - fitted).norm();
    if k < 3 && residual > 1e-8 * target.norm().max(1.0) {
        return Err(ThermoError::RankDeficientBasis(residual));
    }

    Ok(GibbsFit {
        beta: coeffs[0],
        mu: coeffs[1],
        lam: coeffs[2],
        log_z: -g0,
        residual,
    })
}

/// Printed stationary coefficients `(β, α, λ)` of the case studies.
///
/// Case 3 follows from its characteristic matrix:
/// with `γ = γp + γm` and `denom = 4E² + γ² + 2ε²`,
///
/// ```text
///   β = (γp-γm)/γ · (4E² + γ²)/denom
///   α = (γp-γm)/γ · 4εE/denom
///   λ = (γp-γm) · 2ε/denom
/// ```
///
/// At `ε = 0` this reduces bitwise to the case-1 Gibbs result.
pub fn analytic_stationary(
    kind: CaseKind,
    params: &crate::dynamics::CaseParams,
) -> Result<Vector3<f64>, ThermoError> {
    let gp = params.gamma_p;
    let gm = params.gamma_m;
    let g = gp + gm;
    match kind {
        CaseKind::Case1 => {
            if g == 0.0 {
                return Err(ThermoError::DegenerateDenominator);
            }
            Ok(Vector3::new((gp - gm) / g, 0.0, 0.0))
        }
        CaseKind::Case2 => {
            let den = g + 0.5 * params.big_gamma;
            if den == 0.0 {
                return Err(ThermoError::DegenerateDenominator);
            }
            Ok(Vector3::new((gp - gm) / den, 0.0, 0.0))
        }
        CaseKind::Case3 => {
            let e = params.e;
            let eps = params.eps;
            let a = 4.0 * e * e + g * g;
            let denom = a + 2.0 * eps * eps;
            if g == 0.0 || denom == 0.0 {
                return Err(ThermoError::DegenerateDenominator);
            }
            let beta = ((gp - gm) / g) * (a / denom);
            let alpha = ((gp - gm) / g) * (4.0 * eps * e / denom);
            let lam = (gp - gm) * (2.0 * eps / denom);
            Ok(Vector3::new(beta, alpha, lam))
        }
    }
}
