//! The GKLS system model and its exact matrix representations.
//!
//! A system is a Hermitian Hamiltonian `H` plus jump terms `(γ_i, L_i)`
//! generating
//!
//! ```text
//!   dρ/dt = -i[H, ρ] + Σ_i γ_i (L_i ρ L_i† - ½{L_i†L_i, ρ})
//! ```
//!
//! Two equivalent matrix forms are provided: the 4x4 Liouvillian acting on
//! the column-stacked density matrix, and the real affine 3x3 generator
//! acting on Bloch components in a chosen traceless Hermitian basis. The
//! form-preserving transforms (energy shift, rescaling, identity shift,
//! unitary mixing) all leave the Liouvillian invariant entrywise and are the
//! degeneracy this crate's decomposition quotients out.

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, Vector3};
use thiserror::Error;

use crate::algebra::{commutator, hs_inner, pauli_decompose, HermitianAxis, Operator2, C64};
use crate::numerics::{complex_eigenvalues4, solve_complex};
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum GklsError {
    #[error("jump rate {0} is negative")]
    NegativeInputRate(f64),
    #[error("hamiltonian is not Hermitian (deviation {0:.3e})")]
    NonHermitianHamiltonian(f64),
    #[error("classification supports 1 or 2 jump terms, got {0}")]
    UnsupportedTermCount(usize),
    #[error("mixing matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("rescaling by zero is not invertible")]
    ZeroScale,
    #[error("invalid Bloch basis: {0}")]
    InvalidBasis(&'static str),
    #[error("stationary state is not unique (residual {0:.3e})")]
    DegenerateStationaryState(f64),
}

/// One dissipative channel: a non-negative rate and a jump operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpTerm {
    pub rate: f64,
    pub op: Operator2,
}

impl JumpTerm {
    pub fn new(rate: f64, op: Operator2) -> Result<Self, GklsError> {
        if rate < 0.0 {
            return Err(GklsError::NegativeInputRate(rate));
        }
        Ok(JumpTerm { rate, op })
    }
}

/// A two-level GKLS system: Hamiltonian plus jump terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GklsSystem {
    hamiltonian: Operator2,
    terms: Vec<JumpTerm>,
}

impl GklsSystem {
    pub fn new(hamiltonian: Operator2, terms: Vec<JumpTerm>) -> Result<Self, GklsError> {
        let herm = hamiltonian.max_abs_diff(&hamiltonian.dagger());
        if herm > tol::HERM * hamiltonian.max_abs().max(1.0) {
            return Err(GklsError::NonHermitianHamiltonian(herm));
        }
        for t in &terms {
            if t.rate < 0.0 {
                return Err(GklsError::NegativeInputRate(t.rate));
            }
        }
        Ok(GklsSystem { hamiltonian, terms })
    }

    pub fn hamiltonian(&self) -> &Operator2 {
        &self.hamiltonian
    }

    pub fn terms(&self) -> &[JumpTerm] {
        &self.terms
    }

    /// Apply the generator to an arbitrary operator:
    /// `-i[H, X] + Σ γ_i D[L_i](X)`.
    pub fn apply(&self, x: &Operator2) -> Operator2 {
        let mut out = commutator(&self.hamiltonian, x) * C64::new(0.0, -1.0);
        for t in &self.terms {
            out = out + dissipator_apply(&t.op, x) * t.rate;
        }
        out
    }
}

/// `D[L](ρ) = L ρ L† - ½{L†L, ρ}`.
pub fn dissipator_apply(l: &Operator2, rho: &Operator2) -> Operator2 {
    let ldag = l.dagger();
    let ldl = ldag * *l;
    *l * *rho * ldag - (ldl * *rho + *rho * ldl) * 0.5
}

/// The generator as a 4x4 complex matrix acting on the column-stacked
/// density matrix, `vec(ρ) = (ρ00, ρ10, ρ01, ρ11)`.
///
/// With that stacking, `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`, so
///
/// ```text
///   L = -i (I⊗H - Hᵀ⊗I) + Σ γ [ L̄⊗L - ½ I⊗(L†L) - ½ (L†L)ᵀ⊗I ]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian4 {
    mat: Matrix4<C64>,
}

pub fn vec_density(rho: &Operator2) -> [C64; 4] {
    [
        rho.entry(0, 0),
        rho.entry(1, 0),
        rho.entry(0, 1),
        rho.entry(1, 1),
    ]
}

pub fn unvec_density(v: &[C64; 4]) -> Operator2 {
    Operator2::new([[v[0], v[2]], [v[1], v[3]]])
}

pub(crate) fn to_matrix2(op: &Operator2) -> Matrix2<C64> {
    Matrix2::new(
        op.entry(0, 0),
        op.entry(0, 1),
        op.entry(1, 0),
        op.entry(1, 1),
    )
}

impl Liouvillian4 {
    pub fn from_matrix(mat: Matrix4<C64>) -> Self {
        Liouvillian4 { mat }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.mat
    }

    pub fn apply(&self, rho: &Operator2) -> Operator2 {
        let v = vec_density(rho);
        let mut out = [C64::new(0.0, 0.0); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += self.mat[(i, j)] * vj;
            }
        }
        unvec_density(&out)
    }

    pub fn max_abs_diff(&self, other: &Liouvillian4) -> f64 {
        (self.mat - other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Left action of `vec(I)†`: exact zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        (0..4)
            .map(|j| (self.mat[(0, j)] + self.mat[(3, j)]).norm())
            .fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> [C64; 4] {
        complex_eigenvalues4(&self.mat)
    }

    /// Unit-trace stationary state from the null space, by least squares on
    /// the stacked system `[L; vec(I)†] ρ = (0, 1)`.
    ///
    /// This is the brute-force route; `dynamics::stationary_state` solves
    /// the same problem through the affine Bloch generator.
    pub fn stationary_state(&self) -> Result<Operator2, GklsError> {
        let t = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        // normal equations: (L†L + t t†) x = t
        let mut a = vec![vec![C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = t[i] * t[j].conj();
                for k in 0..4 {
                    acc += self.mat[(k, i)].conj() * self.mat[(k, j)];
                }
                a[i][j] = acc;
            }
        }
        let x = solve_complex(&a, &t).ok_or(GklsError::DegenerateStationaryState(f64::NAN))?;
        let rho = unvec_density(&[x[0], x[1], x[2], x[3]]);
        let residual = self.apply(&rho).max_abs();
        let scale = self.max_abs().max(1.0);
        if residual > 1e-8 * scale {
            return Err(GklsError::DegenerateStationaryState(residual));
        }
        Ok(rho)
    }
}

pub(crate) fn kron2(p: &Matrix2<C64>, q: &Matrix2<C64>) -> Matrix4<C64> {
    p.kronecker(q)
}

/// Exact 4x4 matrix of the generator of `sys`.
pub fn liouvillian_matrix(sys: &GklsSystem) -> Liouvillian4 {
    let id = Matrix2::identity();
    let h = to_matrix2(sys.hamiltonian());
    let minus_i = C64::new(0.0, -1.0);
    let mut mat = (kron2(&id, &h) - kron2(&h.transpose(), &id)) * minus_i;
    for t in sys.terms() {
        let l = to_matrix2(&t.op);
        let ldl = l.adjoint() * l;
        let gamma = C64::new(t.rate, 0.0);
        mat += (kron2(&l.conjugate(), &l)
            - (kron2(&id, &ldl) + kron2(&ldl.transpose(), &id)) * C64::new(0.5, 0.0))
            * gamma;
    }
    Liouvillian4::from_matrix(mat)
}

/// Real affine generator of the Bloch components: `dr/dt = m r + drive`,
/// where `ρ = I/2 + Σ r_i A_i` in the stored basis (and its convention).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBlochGenerator {
    pub m: Matrix3<f64>,
    pub drive: Vector3<f64>,
    pub basis: [HermitianAxis; 3],
}

impl AffineBlochGenerator {
    /// Bloch components of an operator's traceless part in this basis.
    pub fn components(&self, rho: &Operator2) -> Vector3<f64> {
        let mut r = Vector3::zeros();
        for (i, axis) in self.basis.iter().enumerate() {
            let norm_sq = axis.convention().target().powi(2);
            r[i] = hs_inner(&axis.operator(), &rho.traceless_part()).re / norm_sq;
        }
        r
    }

    /// Reconstruct `ρ = I/2 + Σ r_i A_i`.
    pub fn state(&self, r: &Vector3<f64>) -> Operator2 {
        let mut rho = Operator2::IDENTITY * 0.5;
        for (i, axis) in self.basis.iter().enumerate() {
            rho = rho + axis.operator() * r[i];
        }
        rho
    }
}

/// Project the generator of `sys` onto an orthogonal basis of traceless
/// Hermitian axes (all three in the same convention, either full or half).
pub fn bloch_generator(
    sys: &GklsSystem,
    basis: &[HermitianAxis; 3],
) -> Result<AffineBlochGenerator, GklsError> {
    let conv = basis[0].convention();
    if basis.iter().any(|a| a.convention() != conv) {
        return Err(GklsError::InvalidBasis("mixed normalization conventions"));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if basis[i].direction().dot(&basis[j].direction()).abs() > tol::NORM {
                return Err(GklsError::InvalidBasis("axes are not orthogonal"));
            }
        }
    }
    let norm_sq = conv.target().powi(2);
    let ops: Vec<Operator2> = basis.iter().map(|a| a.operator()).collect();

    let mut m = Matrix3::zeros();
    for (j, aj) in ops.iter().enumerate() {
        let image = sys.apply(aj);
        for (i, ai) in ops.iter().enumerate() {
            m[(i, j)] = hs_inner(ai, &image).re / norm_sq;
        }
    }
    let center = sys.apply(&(Operator2::IDENTITY * 0.5));
    let mut drive = Vector3::zeros();
    for (i, ai) in ops.iter().enumerate() {
        drive[i] = hs_inner(ai, &center).re / norm_sq;
    }
    Ok(AffineBlochGenerator {
        m,
        drive,
        basis: *basis,
    })
}

/// `H → H - E0 I`; a shift of the energy zero, invisible to the dynamics.
pub fn transform_energy_shift(sys: &GklsSystem, e0: f64) -> GklsSystem {
    GklsSystem {
        hamiltonian: *sys.hamiltonian() - Operator2::IDENTITY * e0,
        terms: sys.terms().to_vec(),
    }
}

/// `L_i → α L_i`, `γ_i → γ_i / |α|²` for the term at `index`.
pub fn transform_rescale(
    sys: &GklsSystem,
    index: usize,
    alpha: C64,
) -> Result<GklsSystem, GklsError> {
    if alpha.norm_sqr() == 0.0 {
        return Err(GklsError::ZeroScale);
    }
    let mut terms = sys.terms().to_vec();
    let t = &mut terms[index];
    t.op = t.op * alpha;
    t.rate /= alpha.norm_sqr();
    Ok(GklsSystem {
        hamiltonian: *sys.hamiltonian(),
        terms,
    })
}

/// `L_i → L_i - α_i I` with the compensating Hamiltonian correction
/// `H → H + Σ_i (iγ_i/2)(α_i* L_i - α_i L_i†)`.
///
/// The correction is Hermitian (the bracket is anti-Hermitian) and comes
/// out identical whether evaluated with the original or shifted operators;
/// the sign is fixed by requiring entrywise Liouvillian equality.
pub fn transform_identity_shift(sys: &GklsSystem, alphas: &[C64]) -> GklsSystem {
    assert_eq!(alphas.len(), sys.terms().len(), "one shift per jump term");
    let mut h = *sys.hamiltonian();
    let mut terms = sys.terms().to_vec();
    for (t, &alpha) in terms.iter_mut().zip(alphas) {
        let bracket = t.op * alpha.conj() - t.op.dagger() * alpha;
        h = h + bracket * C64::new(0.0, 0.5 * t.rate);
        t.op = t.op - Operator2::IDENTITY * alpha;
    }
    GklsSystem {
        hamiltonian: h,
        terms,
    }
}

/// Unitary mixing of the jump operators. Rates are first absorbed into the
/// operators (`L_i → √γ_i L_i`), mixed by `u`, and re-emitted with unit
/// rates, so the output terms all carry `rate = 1`.
pub fn transform_unitary_mix(sys: &GklsSystem, u: &DMatrix<C64>) -> Result<GklsSystem, GklsError> {
    let k = sys.terms().len();
    assert_eq!(
        (u.nrows(), u.ncols()),
        (k, k),
        "mixing matrix must be k x k"
    );
    let gram = u.adjoint() * u;
    let defect = (gram - DMatrix::<C64>::identity(k, k))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > tol::HERM {
        return Err(GklsError::NotUnitary(defect));
    }
    let absorbed: Vec<Operator2> = sys.terms().iter().map(|t| t.op * t.rate.sqrt()).collect();
    let terms = (0..k)
        .map(|i| {
            let mut op = Operator2::ZERO;
            for (j, l) in absorbed.iter().enumerate() {
                op = op + *l * u[(i, j)];
            }
            JumpTerm { rate: 1.0, op }
        })
        .collect();
    Ok(GklsSystem {
        hamiltonian: *sys.hamiltonian(),
        terms,
    })
}

/// What kind of dissipative structure the jump terms describe.
///
/// The tests look at the traceless parts only (identity components are
/// removable by the identity-shift transform) and ignore zero-rate terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Every effective jump operator is Hermitian up to a phase.
    PureDephasing,
    /// Two independent jump operators whose complex span is closed under
    /// the adjoint; the decomposition pipeline accepts exactly these.
    ExchangeCandidate,
    /// The span is not adjoint-closed: some process has no reverse process.
    AdjointNotClosed,
    /// Two jump operators spanning a single non-Hermitian direction.
    Collinear,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::PureDephasing => "PureDephasing",
            Classification::ExchangeCandidate => "ExchangeCandidate",
            Classification::AdjointNotClosed => "AdjointNotClosed",
            Classification::Collinear => "Collinear",
        }
    }
}

type CVec3 = Vector3<C64>;

fn pauli_cvec(op: &Operator2) -> CVec3 {
    let p = pauli_decompose(op);
    Vector3::new(p.cx, p.cy, p.cz)
}

fn hermitian_up_to_phase(l: &CVec3) -> bool {
    let norm = l.norm();
    if norm == 0.0 {
        return true;
    }
    let k = (0..3)
        .max_by(|&i, &j| l[i].norm().partial_cmp(&l[j].norm()).unwrap())
        .unwrap();
    let phase = l[k] / l[k].norm();
    let rotated = l.map(|z| z / phase);
    let im = (rotated.x.im.powi(2) + rotated.y.im.powi(2) + rotated.z.im.powi(2)).sqrt();
    im <= tol::CLOSURE * norm
}

/// Residual of `v` against the orthonormalized complex span of `basis`.
fn span_residual(v: &CVec3, basis: &[CVec3]) -> f64 {
    let mut r = *v;
    for u in basis {
        let coeff = u.dotc(&r);
        r -= u.map(|z| z * coeff);
    }
    r.norm()
}

/// Classify 1- or 2-term systems by the structure of their jump-operator
/// span. See [`Classification`].
pub fn classify_input(sys: &GklsSystem) -> Result<Classification, GklsError> {
    let n = sys.terms().len();
    if n == 0 || n > 2 {
        return Err(GklsError::UnsupportedTermCount(n));
    }
    let scale = sys
        .terms()
        .iter()
        .map(|t| t.op.max_abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let effective: Vec<CVec3> = sys
        .terms()
        .iter()
        .filter(|t| t.rate > 0.0)
        .map(|t| pauli_cvec(&t.op))
        .filter(|l| l.norm() > tol::CLOSURE * scale)
        .collect();

    match effective.len() {
        0 => Ok(Classification::PureDephasing),
        1 => {
            if hermitian_up_to_phase(&effective[0]) {
                Ok(Classification::PureDephasing)
            } else {
                Ok(Classification::AdjointNotClosed)
            }
        }
        _ => {
            let l1 = effective[0];
            let l2 = effective[1];
            let u1 = l1 / C64::new(l1.norm(), 0.0);
            if span_residual(&l2, &[u1]) <= tol::CLOSURE * l2.norm() {
                // one-dimensional span
                return if hermitian_up_to_phase(&l1) && hermitian_up_to_phase(&l2) {
                    Ok(Classification::PureDephasing)
                } else {
                    Ok(Classification::Collinear)
                };
            }
            let mut u2 = l2 - u1.map(|z| z * u1.dotc(&l2));
            u2 /= C64::new(u2.norm(), 0.0);
            let span = [u1, u2];
            let closed = [l1, l2].iter().all(|l| {
                let conj = l.map(|z| z.conj());
                span_residual(&conj, &span) <= tol::CLOSURE * l.norm()
            });
            if closed {
                Ok(Classification::ExchangeCandidate)
            } else {
                Ok(Classification::AdjointNotClosed)
            }
        }
    }
}
