//! Reduction of a two-jump GKLS system to its canonical physical form:
//! free evolution, a fermionic exchange channel, and residual pure
//! dephasing.
//!
//! The pipeline is
//!
//! 1. make the jump operators traceless (identity-shift transform) and the
//!    Hamiltonian traceless (energy shift);
//! 2. build an orthonormal Hermitian basis `A1, A2` of the plane spanned by
//!    the jump operators, completed by `A3 = (1/2i)[A1, A2]`;
//! 3. expand each `L_i = a_i A1 + b_i A2` and collect the quadratic
//!    coefficients: the symmetric matrix `[[m11, m12], [m12, m22]]` and the
//!    antisymmetric weight `d = Σ γ_i Im(a_i* b_i)`, which collapses to a
//!    constant drive `2 d A3`;
//! 4. rotate `A1, A2` to diagonalize the symmetric matrix (eigenvalues
//!    `g1 >= g2`);
//! 5. split off the exchange channel. With half-normalized `N = A3/2` and
//!    `D = A1/2` the generator equals
//!
//!    ```text
//!    -i[H,ρ] - (γp+γm)(ρ - I/2) + (γp-γm)N + (γp+γm)[N,[N,ρ]]/2 - Γ[D,[D,ρ]]/2
//!    ```
//!
//!    with `γp + γm = 4 g2`, `γp - γm = 2 γ3 = 4 d` and `Γ = 4 (g1 - g2)`.
//!    (`γ3` is signed; a drive against `+N` simply means `γm > γp`.)
//!
//! Both rates are non-negative exactly when `|d| <= min(g1, g2)`. That holds
//! for anything produced by a physical exchange-plus-dephasing process, but
//! not for every completely positive generator: the coefficient matrix only
//! constrains `d² <= g1 g2`. The gap is reported as [`DecomposeError::NegativeRate`].

use nalgebra::{Matrix2, Matrix4, Vector3};
use thiserror::Error;

use crate::algebra::{complete_basis, hs_inner, AlgebraError, HermitianAxis, Norm, Operator2, C64};
use crate::gkls::{
    classify_input, kron2, liouvillian_matrix, to_matrix2, transform_energy_shift,
    transform_identity_shift, Classification, GklsError, GklsSystem, Liouvillian4,
};
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum DecomposeError {
    #[error("system is not an exchange candidate: {}", .0.name())]
    NotExchangeCandidate(Classification),
    #[error("jump operators span less than a plane of Hermitian directions")]
    CollinearSpan,
    #[error("jump operator leaves the basis plane (residual {0:.3e})")]
    NotInSpan(f64),
    #[error("coefficient matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error(
        "exchange rates would be negative (gamma_p = {gamma_p:.6e}, gamma_m = {gamma_m:.6e}); \
         the drive exceeds the symmetric dephasing level"
    )]
    NegativeRate { gamma_p: f64, gamma_m: f64 },
    #[error(transparent)]
    Gkls(#[from] GklsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Orthonormal traceless Hermitian triple with `a3 = (1/2i)[a1, a2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeBasis {
    pub a1: HermitianAxis,
    pub a2: HermitianAxis,
    pub a3: HermitianAxis,
}

impl ExchangeBasis {
    pub fn from_pair(a1: HermitianAxis, a2: HermitianAxis) -> Result<Self, DecomposeError> {
        let a3 = complete_basis(&a1, &a2)?;
        Ok(ExchangeBasis { a1, a2, a3 })
    }

    /// Rotate the in-plane pair by `theta`; `a3` is untouched.
    fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let v1 = self.a1.vector() * c + self.a2.vector() * s;
        let v2 = self.a2.vector() * c - self.a1.vector() * s;
        ExchangeBasis {
            a1: HermitianAxis::new(v1, Norm::Full).expect("rotation preserves norm"),
            a2: HermitianAxis::new(v2, Norm::Full).expect("rotation preserves norm"),
            a3: self.a3,
        }
    }
}

/// Quadratic coefficients of the dissipator in an exchange basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorCoefficients {
    pub m11: f64,
    pub m22: f64,
    pub m12: f64,
    /// Antisymmetric weight; the imaginary cross terms collapse to the
    /// constant drive `2 d A3`.
    pub d: f64,
}

impl DissipatorCoefficients {
    fn validate(&self) -> Result<(), DecomposeError> {
        let trace = self.m11 + self.m22;
        let det = self.m11 * self.m22 - self.m12 * self.m12;
        let min_eig = 0.5 * (trace - (trace * trace - 4.0 * det).max(0.0).sqrt());
        if min_eig < -tol::PSD * trace.abs().max(1.0) {
            return Err(DecomposeError::NotPositive(min_eig));
        }
        Ok(())
    }
}

/// Adjoint pair with `sp² = sm² = 0` and `{sp, sm} = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionicPair {
    pub sp: Operator2,
    pub sm: Operator2,
}

/// The canonical physical form: free evolution + exchange + dephasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalForm {
    /// Traceless Hermitian free-evolution Hamiltonian.
    pub h_eff: Operator2,
    /// Generalized charge, half-normalized.
    pub n: HermitianAxis,
    /// Residual dephasing axis, half-normalized and orthogonal to `n`;
    /// absent exactly when `big_gamma` is zero.
    pub dphase: Option<HermitianAxis>,
    pub gamma_p: f64,
    pub gamma_m: f64,
    pub big_gamma: f64,
}

/// Shift every jump operator to its traceless part and fold the
/// compensation into the Hamiltonian, which is then made traceless too.
/// The Liouvillian is unchanged.
pub fn reduce_traceless(sys: &GklsSystem) -> GklsSystem {
    let alphas: Vec<C64> = sys.terms().iter().map(|t| t.op.trace() * 0.5).collect();
    let shifted = transform_identity_shift(sys, &alphas);
    let e0 = shifted.hamiltonian().trace().re * 0.5;
    transform_energy_shift(&shifted, e0)
}

/// Orthonormal basis of the two-dimensional real space of Hermitian
/// operators inside the complex span of the (traceless) jump operators.
///
/// For an adjoint-closed span this space is spanned by the real and
/// imaginary Pauli vectors of the jump operators. Gram-Schmidt runs over
/// those four vectors in order, and each accepted axis is sign-normalized
/// (largest-magnitude component positive), which makes the basis, and
/// hence the orientation of `a3`, independent of the term order and of
/// overall phases of the jump operators.
pub fn build_exchange_basis(sys: &GklsSystem) -> Result<ExchangeBasis, DecomposeError> {
    // the complex span itself must be a plane; the real/imaginary
    // expansion below would overcount for a single non-Hermitian direction
    let mut complex_dirs: Vec<Vector3<C64>> = Vec::new();
    let mut candidates: Vec<Vector3<f64>> = Vec::with_capacity(4);
    for t in sys.terms() {
        if t.rate <= 0.0 {
            continue;
        }
        let p = t.op.traceless_part().pauli();
        let cvec = Vector3::new(p.cx, p.cy, p.cz);
        let mut rem = cvec;
        for u in &complex_dirs {
            let coeff = u.dotc(&rem);
            rem -= u.map(|z| z * coeff);
        }
        if rem.norm() > tol::CLOSURE * cvec.norm().max(1e-300) {
            complex_dirs.push(rem / C64::new(rem.norm(), 0.0));
        }
        candidates.push(p.re3());
        candidates.push(p.im3());
    }
    if complex_dirs.len() < 2 {
        return Err(DecomposeError::CollinearSpan);
    }
    let scale = candidates.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(DecomposeError::CollinearSpan);
    }

    let mut axes: Vec<Vector3<f64>> = Vec::with_capacity(2);
    for v in &candidates {
        let mut w = *v;
        for a in &axes {
            w -= a * w.dot(a);
        }
        if w.norm() > tol::COLLINEAR * scale {
            axes.push(canonical_sign(w / w.norm()));
            if axes.len() == 2 {
                break;
            }
        }
    }
    if axes.len() < 2 {
        return Err(DecomposeError::CollinearSpan);
    }
    ExchangeBasis::from_pair(
        HermitianAxis::new(axes[0], Norm::Full).expect("unit vector"),
        HermitianAxis::new(axes[1], Norm::Full).expect("unit vector"),
    )
}

fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}

/// Expand each jump operator as `L = a A1 + b A2` and accumulate the
/// rate-weighted quadratic coefficients.
pub fn dissipator_coefficients(
    sys: &GklsSystem,
    basis: &ExchangeBasis,
) -> Result<DissipatorCoefficients, DecomposeError> {
    let a1 = basis.a1.operator();
    let a2 = basis.a2.operator();
    let mut out = DissipatorCoefficients {
        m11: 0.0,
        m22: 0.0,
        m12: 0.0,
        d: 0.0,
    };
    for t in sys.terms() {
        let l = t.op.traceless_part();
        let a = hs_inner(&a1, &l);
        let b = hs_inner(&a2, &l);
        let residual = (l - a1 * a - a2 * b).max_abs();
        if residual > tol::CLOSURE * l.max_abs().max(1e-300) {
            return Err(DecomposeError::NotInSpan(residual));
        }
        let cross = a.conj() * b;
        out.m11 += t.rate * a.norm_sqr();
        out.m22 += t.rate * b.norm_sqr();
        out.m12 += t.rate * cross.re;
        out.d += t.rate * cross.im;
    }
    out.validate()?;
    Ok(out)
}

/// Rotate the in-plane basis to diagonalize the symmetric coefficient
/// matrix. Returns the rotated basis, the eigenvalues `g1 >= g2` (the
/// dephasing rates along the new `a1`, `a2`), and the drive coefficient
/// `g3 = 2 d` of `A3`.
pub fn diagonalize_inplane(
    coeffs: &DissipatorCoefficients,
    basis: &ExchangeBasis,
) -> (ExchangeBasis, f64, f64, f64) {
    let theta = 0.5 * (2.0 * coeffs.m12).atan2(coeffs.m11 - coeffs.m22);
    let mean = 0.5 * (coeffs.m11 + coeffs.m22);
    let radius = (0.25 * (coeffs.m11 - coeffs.m22).powi(2) + coeffs.m12.powi(2)).sqrt();
    let rotated = if theta == 0.0 {
        *basis
    } else {
        basis.rotated(theta)
    };
    (
        rotated,
        mean + radius,
        (mean - radius).max(0.0),
        2.0 * coeffs.d,
    )
}

/// The exchange pair in a given basis: `σ± = (A1 ± i A2)/2`.
pub fn fermionic_pair(basis: &ExchangeBasis) -> FermionicPair {
    let a1 = basis.a1.operator();
    let a2 = basis.a2.operator();
    FermionicPair {
        sp: (a1 + a2 * crate::algebra::C_I) * 0.5,
        sm: (a1 - a2 * crate::algebra::C_I) * 0.5,
    }
}

/// Match the diagonal form against the exchange-plus-dephasing template:
/// `gamma_p + gamma_m = 4 g2`, `gamma_p - gamma_m = 2 g3`, and
/// `big_gamma = 4 (g1 - g2)` on the axis that carries the excess dephasing.
pub fn extract_physical(
    sys: &GklsSystem,
    basis: &ExchangeBasis,
    g1: f64,
    g2: f64,
    g3: f64,
) -> Result<PhysicalForm, DecomposeError> {
    debug_assert!(g1 >= g2);
    let gamma_p = 2.0 * g2 + g3;
    let gamma_m = 2.0 * g2 - g3;
    let scale = (4.0 * g2).max(g3.abs()).max(1e-300);
    if gamma_p.min(gamma_m) < -1e-12 * scale {
        return Err(DecomposeError::NegativeRate { gamma_p, gamma_m });
    }

    let excess = g1 - g2;
    let (dphase, big_gamma) = if excess <= tol::DEGENERATE * g1.abs() {
        (None, 0.0)
    } else {
        (Some(basis.a1.with_norm(Norm::Half)), 4.0 * excess)
    };

    Ok(PhysicalForm {
        h_eff: sys.hamiltonian().traceless_part(),
        n: basis.a3.with_norm(Norm::Half),
        dphase,
        gamma_p: gamma_p.max(0.0),
        gamma_m: gamma_m.max(0.0),
        big_gamma,
    })
}

/// Build the generator directly from the physical form's five terms.
///
/// Constants like `(Tr ρ) I/2` enter through the trace row, so the matrix
/// is linear and agrees with the jump-operator Liouvillian on all of C^4,
/// not just on unit-trace states.
pub fn reassemble(pf: &PhysicalForm) -> Liouvillian4 {
    let id = Matrix2::<C64>::identity();
    let minus_i = C64::new(0.0, -1.0);

    // trace functional (vec I)ᵀ and the constant-injection column vec(X)
    let trace_row = [1.0, 0.0, 0.0, 1.0];
    let inject = |x: &Operator2| -> Matrix4<C64> {
        let v = crate::gkls::vec_density(x);
        Matrix4::from_fn(|i, j| v[i] * trace_row[j])
    };
    let double_commutator = |a: &Operator2| -> Matrix4<C64> {
        let am = to_matrix2(a);
        let a2 = am * am;
        kron2(&id, &a2) + kron2(&a2.transpose(), &id)
            - kron2(&am.transpose(), &am) * C64::new(2.0, 0.0)
    };

    let h = to_matrix2(&pf.h_eff);
    let gamma = pf.gamma_p + pf.gamma_m;
    let n_op = pf.n.operator();

    let mut mat = (kron2(&id, &h) - kron2(&h.transpose(), &id)) * minus_i;
    // -(γp+γm)(ρ - Tr(ρ) I/2)
    mat += (Matrix4::identity() - inject(&(Operator2::IDENTITY * 0.5))) * C64::new(-gamma, 0.0);
    // +(γp-γm) Tr(ρ) N
    mat += inject(&n_op) * C64::new(pf.gamma_p - pf.gamma_m, 0.0);
    // +(γp+γm) [N,[N,ρ]]/2
    mat += double_commutator(&n_op) * C64::new(0.5 * gamma, 0.0);
    // -Γ [D,[D,ρ]]/2
    if let Some(d) = &pf.dphase {
        mat += double_commutator(&d.operator()) * C64::new(-0.5 * pf.big_gamma, 0.0);
    }
    Liouvillian4::from_matrix(mat)
}

/// Full pipeline: classify, reduce, build the basis, diagonalize, extract.
pub fn decompose(sys: &GklsSystem) -> Result<PhysicalForm, DecomposeError> {
    decompose_full(sys).map(|(pf, _)| pf)
}

/// Like [`decompose`], additionally returning the rotated exchange basis
/// (`a3` along the charge, `a1` along the dephasing axis).
pub fn decompose_full(sys: &GklsSystem) -> Result<(PhysicalForm, ExchangeBasis), DecomposeError> {
    let class = classify_input(sys)?;
    if class != Classification::ExchangeCandidate {
        return Err(DecomposeError::NotExchangeCandidate(class));
    }
    let reduced = reduce_traceless(sys);
    let basis = build_exchange_basis(&reduced)?;
    let coeffs = dissipator_coefficients(&reduced, &basis)?;
    let (rotated, g1, g2, g3) = diagonalize_inplane(&coeffs, &basis);
    let pf = extract_physical(&reduced, &rotated, g1, g2, g3)?;
    Ok((pf, rotated))
}

/// Max-abs entry difference between the reassembled generator and the
/// original system's Liouvillian.
pub fn roundtrip_residual(sys: &GklsSystem, pf: &PhysicalForm) -> f64 {
    reassemble(pf).max_abs_diff(&liouvillian_matrix(sys))
}
