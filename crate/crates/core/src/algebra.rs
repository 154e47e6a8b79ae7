//! Exact algebra for 2x2 complex operators.
//!
//! Everything downstream works in the Pauli picture: an operator
//! `M = c0 I + cx σx + cy σy + cz σz` is a complex 4-vector, a traceless
//! Hermitian operator is a real 3-vector, and the Hilbert-Schmidt inner
//! product `<X, Y> = Tr(X†Y)/2` makes those 3-vectors an isometric model
//! (so `<σx, σx> = 1`). For traceless `M` the square collapses to a scalar,
//! `M² = (cx² + cy² + cz²) I`, which is what makes the whole construction
//! closed-form.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

pub type C64 = Complex64;

pub(crate) const C_ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const C_ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const C_I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    /// Gram-Schmidt inputs span less than a plane.
    #[error("collinear input: |v1 x v2| = {0:.3e} relative to |v1||v2|")]
    CollinearInput(f64),
    #[error("invalid basis: {0}")]
    InvalidBasis(&'static str),
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not traceless (|tr| = {0:.3e})")]
    NotTraceless(f64),
    #[error("axis norm {found} does not match the {expected} convention")]
    NormMismatch { expected: &'static str, found: f64 },
}

/// 2x2 complex operator stored as explicit entries, row major.
///
/// Serialized form (shared by every file format in this crate):
/// `[[ [re, im], [re, im] ], [ [re, im], [re, im] ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    e: [[C64; 2]; 2],
}

impl Operator2 {
    pub const ZERO: Operator2 = Operator2::new([[C_ZERO, C_ZERO], [C_ZERO, C_ZERO]]);
    pub const IDENTITY: Operator2 = Operator2::new([[C_ONE, C_ZERO], [C_ZERO, C_ONE]]);
    pub const SIGMA_X: Operator2 = Operator2::new([[C_ZERO, C_ONE], [C_ONE, C_ZERO]]);
    pub const SIGMA_Y: Operator2 = Operator2::new([[C_ZERO, C64::new(0.0, -1.0)], [C_I, C_ZERO]]);
    pub const SIGMA_Z: Operator2 = Operator2::new([[C_ONE, C_ZERO], [C_ZERO, C64::new(-1.0, 0.0)]]);
    /// Raising operator `σ+ = (σx + iσy)/2 = |0><1|`.
    pub const SIGMA_PLUS: Operator2 = Operator2::new([[C_ZERO, C_ONE], [C_ZERO, C_ZERO]]);
    /// Lowering operator `σ- = (σx - iσy)/2 = |1><0|`.
    pub const SIGMA_MINUS: Operator2 = Operator2::new([[C_ZERO, C_ZERO], [C_ONE, C_ZERO]]);

    pub const fn new(entries: [[C64; 2]; 2]) -> Self {
        Operator2 { e: entries }
    }

    pub fn from_real(entries: [[f64; 2]; 2]) -> Self {
        Operator2::new([
            [C64::new(entries[0][0], 0.0), C64::new(entries[0][1], 0.0)],
            [C64::new(entries[1][0], 0.0), C64::new(entries[1][1], 0.0)],
        ])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Operator2::new([[a, C_ZERO], [C_ZERO, b]])
    }

    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.e
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.e[i][j]
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        Operator2::new([
            [self.e[0][0].conj(), self.e[1][0].conj()],
            [self.e[0][1].conj(), self.e[1][1].conj()],
        ])
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Operator2::new([
            [self.e[0][0].conj(), self.e[0][1].conj()],
            [self.e[1][0].conj(), self.e[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> Self {
        Operator2::new([[self.e[0][0], self.e[1][0]], [self.e[0][1], self.e[1][1]]])
    }

    pub fn trace(&self) -> C64 {
        self.e[0][0] + self.e[1][1]
    }

    /// `M - Tr(M)/2 * I`.
    pub fn traceless_part(&self) -> Self {
        *self - Operator2::IDENTITY * (self.trace() * 0.5)
    }

    pub fn scale(&self, c: C64) -> Self {
        *self * c
    }

    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol * self.max_abs().max(1.0)
    }

    /// Expand in the Pauli basis: `M = c0 I + cx σx + cy σy + cz σz`.
    pub fn pauli(&self) -> PauliCoeffs {
        let half = C64::new(0.5, 0.0);
        PauliCoeffs {
            c0: (self.e[0][0] + self.e[1][1]) * half,
            cx: (self.e[0][1] + self.e[1][0]) * half,
            cy: (self.e[0][1] - self.e[1][0]) * half * C_I,
            cz: (self.e[0][0] - self.e[1][1]) * half,
        }
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let p = self.pauli();
        let c0 = p.c0.re;
        let w = (p.cx.norm_sqr() + p.cy.norm_sqr() + p.cz.norm_sqr()).sqrt();
        [c0 - w, c0 + w]
    }
}

impl Add for Operator2 {
    type Output = Operator2;
    fn add(self, rhs: Operator2) -> Operator2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }
}

impl Sub for Operator2 {
    type Output = Operator2;
    fn sub(self, rhs: Operator2) -> Operator2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }
}

impl Neg for Operator2 {
    type Output = Operator2;
    fn neg(self) -> Operator2 {
        self * C64::new(-1.0, 0.0)
    }
}

impl Mul for Operator2 {
    type Output = Operator2;
    fn mul(self, rhs: Operator2) -> Operator2 {
        let a = &self.e;
        let b = &rhs.e;
        Operator2::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<C64> for Operator2 {
    type Output = Operator2;
    fn mul(self, rhs: C64) -> Operator2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] *= rhs;
            }
        }
        out
    }
}

impl Mul<f64> for Operator2 {
    type Output = Operator2;
    fn mul(self, rhs: f64) -> Operator2 {
        self * C64::new(rhs, 0.0)
    }
}

/// Pauli expansion coefficients of a 2x2 operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoeffs {
    pub c0: C64,
    pub cx: C64,
    pub cy: C64,
    pub cz: C64,
}

impl PauliCoeffs {
    pub fn to_operator(&self) -> Operator2 {
        Operator2::IDENTITY * self.c0
            + Operator2::SIGMA_X * self.cx
            + Operator2::SIGMA_Y * self.cy
            + Operator2::SIGMA_Z * self.cz
    }

    /// The (x, y, z) part as a complex 3-vector.
    pub fn vec3(&self) -> [C64; 3] {
        [self.cx, self.cy, self.cz]
    }

    /// Real part of the 3-vector (Pauli vector of the Hermitian part).
    pub fn re3(&self) -> Vector3<f64> {
        Vector3::new(self.cx.re, self.cy.re, self.cz.re)
    }

    /// Imaginary part of the 3-vector.
    pub fn im3(&self) -> Vector3<f64> {
        Vector3::new(self.cx.im, self.cy.im, self.cz.im)
    }
}

/// Free-function form of [`Operator2::pauli`].
pub fn pauli_decompose(m: &Operator2) -> PauliCoeffs {
    m.pauli()
}

/// Hilbert-Schmidt inner product `<X, Y> = Tr(X† Y) / 2`.
///
/// The factor 1/2 makes full-normalized axes unit vectors: `<σx, σx> = 1`,
/// `<σ+, σ+> = 1/2`.
pub fn hs_inner(x: &Operator2, y: &Operator2) -> C64 {
    (x.dagger() * *y).trace() * 0.5
}

pub fn commutator(x: &Operator2, y: &Operator2) -> Operator2 {
    *x * *y - *y * *x
}

pub fn anticommutator(x: &Operator2, y: &Operator2) -> Operator2 {
    *x * *y + *y * *x
}

/// Normalization convention for a traceless Hermitian axis.
///
/// `Full` means `|v| = 1`, so the operator squares to the identity.
/// `Half` means `|v| = 1/2`, the convention in which the double commutator
/// acts as the identity on orthogonal axes: `[D,[D,N]] = N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Full,
    Half,
}

impl Norm {
    pub fn target(self) -> f64 {
        match self {
            Norm::Full => 1.0,
            Norm::Half => 0.5,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Norm::Full => "full",
            Norm::Half => "half",
        }
    }
}

/// A traceless Hermitian operator tagged with its normalization convention.
///
/// Mixing conventions without an explicit [`HermitianAxis::with_norm`]
/// conversion is a contract violation; every consumer states which one it
/// expects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianAxis {
    v: Vector3<f64>,
    norm: Norm,
}

impl HermitianAxis {
    pub fn new(v: Vector3<f64>, norm: Norm) -> Result<Self, AlgebraError> {
        let n = v.norm();
        if (n - norm.target()).abs() > tol::NORM {
            return Err(AlgebraError::NormMismatch {
                expected: norm.name(),
                found: n,
            });
        }
        Ok(HermitianAxis { v, norm })
    }

    /// Build from a unit direction, exactly scaled to the convention.
    pub fn from_direction(dir: Vector3<f64>, norm: Norm) -> Result<Self, AlgebraError> {
        let n = dir.norm();
        if n < tol::NORM {
            return Err(AlgebraError::InvalidBasis("zero direction"));
        }
        Ok(HermitianAxis {
            v: dir * (norm.target() / n),
            norm,
        })
    }

    pub fn from_operator(op: &Operator2, norm: Norm) -> Result<Self, AlgebraError> {
        let scale = op.max_abs().max(1.0);
        let herm = op.max_abs_diff(&op.dagger());
        if herm > tol::HERM * scale {
            return Err(AlgebraError::NotHermitian(herm));
        }
        let tr = op.trace().norm();
        if tr > tol::HERM * scale {
            return Err(AlgebraError::NotTraceless(tr));
        }
        HermitianAxis::new(op.pauli().re3(), norm)
    }

    /// Pauli vector, including the normalization.
    pub fn vector(&self) -> Vector3<f64> {
        self.v
    }

    /// Unit direction.
    pub fn direction(&self) -> Vector3<f64> {
        self.v / self.v.norm()
    }

    pub fn convention(&self) -> Norm {
        self.norm
    }

    pub fn operator(&self) -> Operator2 {
        Operator2::SIGMA_X * self.v.x
            + Operator2::SIGMA_Y * self.v.y
            + Operator2::SIGMA_Z * self.v.z
    }

    /// Exact conversion between conventions.
    pub fn with_norm(&self, norm: Norm) -> Self {
        HermitianAxis {
            v: self.v * (norm.target() / self.norm.target()),
            norm,
        }
    }

    pub fn flipped(&self) -> Self {
        HermitianAxis {
            v: -self.v,
            norm: self.norm,
        }
    }

    pub fn dot(&self, other: &HermitianAxis) -> f64 {
        self.v.dot(&other.v)
    }
}

/// Orthonormalize two traceless Hermitian operators into full-normalized
/// axes, Gram-Schmidt style with `A1` aligned to the first input.
pub fn orthonormal_pair(
    b1: &Operator2,
    b2: &Operator2,
) -> Result<(HermitianAxis, HermitianAxis), AlgebraError> {
    let v1 = hermitian_vector(b1)?;
    let v2 = hermitian_vector(b2)?;
    let cross = v1.cross(&v2).norm();
    let scale = v1.norm() * v2.norm();
    if cross < tol::COLLINEAR * scale {
        return Err(AlgebraError::CollinearInput(
            cross / scale.max(f64::MIN_POSITIVE),
        ));
    }
    let a1 = v1 / v1.norm();
    let w = v2 - a1 * v2.dot(&a1);
    let a2 = w / w.norm();
    Ok((
        HermitianAxis {
            v: a1,
            norm: Norm::Full,
        },
        HermitianAxis {
            v: a2,
            norm: Norm::Full,
        },
    ))
}

/// Complete an orthonormal pair to a right-handed triple,
/// `A3 = (1/2i)[A1, A2]`, which in Pauli vectors is the cross product.
pub fn complete_basis(
    a1: &HermitianAxis,
    a2: &HermitianAxis,
) -> Result<HermitianAxis, AlgebraError> {
    if a1.norm != Norm::Full || a2.norm != Norm::Full {
        return Err(AlgebraError::InvalidBasis("expected full-normalized axes"));
    }
    if a1.v.dot(&a2.v).abs() > tol::NORM {
        return Err(AlgebraError::InvalidBasis("axes are not orthogonal"));
    }
    let v3 = a1.v.cross(&a2.v);
    HermitianAxis::new(v3, Norm::Full)
}

fn hermitian_vector(op: &Operator2) -> Result<Vector3<f64>, AlgebraError> {
    let scale = op.max_abs().max(1.0);
    let herm = op.max_abs_diff(&op.dagger());
    if herm > tol::HERM * scale {
        return Err(AlgebraError::NotHermitian(herm));
    }
    let tr = op.trace().norm();
    if tr > tol::HERM * scale {
        return Err(AlgebraError::NotTraceless(tr));
    }
    Ok(op.pauli().re3())
}
