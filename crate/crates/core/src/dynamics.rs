//! Time evolution, stationary states, and the spectral structure of the
//! two-level exchange dynamics, including exceptional points.
//!
//! The three case studies share the half-normalized frame
//! `(N, D, T = i[N, D])` with `N = σz/2`, `D = σx/2`, `T = -σy/2` and the
//! component ordering `(β, α, λ)`, i.e. `ρ = I/2 + βN + αD + λT`. Their
//! characteristic matrices are
//!
//! ```text
//!   M0 = [-γ    0    0 ]   M1 = [-γ-Γ/2  0     0    ]   M2 = [-γ    0   -ε  ]
//!        [ 0  -γ/2   E ]        [ 0    -γ/2    E    ]        [ 0  -γ/2   E  ]
//!        [ 0   -E  -γ/2]        [ 0     -E  -(γ+Γ)/2]        [ ε   -E  -γ/2 ]
//! ```
//!
//! with drive `(γp - γm, 0, 0)` and `γ = γp + γm`.
//!
//! In `γ = 1` units the eigenvalues of `M2` solve
//! `λ³ + 2λ² + (5/4 + ε² + E²)λ + (1/4 + ε²/2 + E²) = 0`; with
//! `X = -1/4 + 3ε² + 3E²`, `Y = -1/4 + 9ε²/2 - 9E²`, `Z = √(Y² + 4X³)`
//! the discriminant sign separates purely decaying dynamics (`Y² + 4X³ < 0`,
//! three real eigenvalues) from underdamped ones (complex pair), the curve
//! `Y² + 4X³ = 0` carries second-order exceptional points, and `X = Y = 0`
//! marks the four third-order cusps at `E = ±1/(6√3)`, `ε = ±√2/(3√3)`.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use thiserror::Error;

use crate::algebra::{HermitianAxis, Norm, Operator2, C64};
use crate::gkls::{AffineBlochGenerator, GklsSystem, JumpTerm};
use crate::numerics::expm4;
use crate::par::map_indexed;
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("generator matrix is singular; no unique stationary state")]
    SingularGenerator,
}

/// Uniformly sampled Bloch trajectory in the generator's basis.
#[derive(Debug, Clone)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector3<f64>>,
    pub basis: [HermitianAxis; 3],
}

/// Propagate `dr/dt = m r + drive` exactly: the affine system is embedded
/// as the 4x4 matrix `[[m, drive], [0, 0]]` acting on `(r, 1)`, and one
/// matrix exponential per step size covers every sample. No inversion is
/// involved, so a singular `m` (pure precession) needs no special casing.
pub fn evolve(
    gen: &AffineBlochGenerator,
    r0: Vector3<f64>,
    t_final: f64,
    n_steps: usize,
) -> BlochTrajectory {
    assert!(n_steps >= 1, "need at least one step");
    assert!(t_final > 0.0, "need a positive horizon");
    let dt = t_final / n_steps as f64;

    let mut aug = Matrix4::<f64>::zeros();
    aug.fixed_view_mut::<3, 3>(0, 0).copy_from(&gen.m);
    aug.fixed_view_mut::<3, 1>(0, 3).copy_from(&gen.drive);
    let phi = expm4(&(aug * dt));

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut state = Vector4::new(r0.x, r0.y, r0.z, 1.0);
    times.push(0.0);
    states.push(r0);
    for k in 1..=n_steps {
        state = phi * state;
        times.push(dt * k as f64);
        states.push(Vector3::new(state.x, state.y, state.z));
    }
    BlochTrajectory {
        times,
        states,
        basis: gen.basis,
    }
}

/// Fixed point `r* = -m⁻¹ drive` of the affine generator.
pub fn stationary_state(gen: &AffineBlochGenerator) -> Result<Vector3<f64>, DynamicsError> {
    let r = gen
        .m
        .lu()
        .solve(&(-gen.drive))
        .ok_or(DynamicsError::SingularGenerator)?;
    let residual = (gen.m * r + gen.drive).norm();
    if residual > 1e-8 * (1.0 + gen.drive.norm()) {
        return Err(DynamicsError::SingularGenerator);
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// Resonant exchange: charge equals the Hamiltonian direction.
    Case1,
    /// Case 1 plus extra dephasing orthogonal to the charge.
    Case2,
    /// Hamiltonian tilted off the charge by `ε`, no extra dephasing.
    Case3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseParams {
    pub e: f64,
    pub eps: f64,
    pub gamma_p: f64,
    pub gamma_m: f64,
    pub big_gamma: f64,
}

/// The shared `(N, D, i[N, D])` frame, half-normalized.
pub fn case_basis() -> [HermitianAxis; 3] {
    [
        HermitianAxis::new(Vector3::new(0.0, 0.0, 0.5), Norm::Half).unwrap(),
        HermitianAxis::new(Vector3::new(0.5, 0.0, 0.0), Norm::Half).unwrap(),
        HermitianAxis::new(Vector3::new(0.0, -0.5, 0.0), Norm::Half).unwrap(),
    ]
}

/// Characteristic matrix and drive of a case study, exactly as printed in
/// the module docs.
pub fn case_generator(kind: CaseKind, p: &CaseParams) -> AffineBlochGenerator {
    let g = p.gamma_p + p.gamma_m;
    #[rustfmt::skip]
    let m = match kind {
        CaseKind::Case1 => Matrix3::new(
            -g, 0.0, 0.0,
            0.0, -0.5 * g, p.e,
            0.0, -p.e, -0.5 * g,
        ),
        CaseKind::Case2 => Matrix3::new(
            -g - 0.5 * p.big_gamma, 0.0, 0.0,
            0.0, -0.5 * g, p.e,
            0.0, -p.e, -0.5 * (g + p.big_gamma),
        ),
        CaseKind::Case3 => Matrix3::new(
            -g, 0.0, -p.eps,
            0.0, -0.5 * g, p.e,
            p.eps, -p.e, -0.5 * g,
        ),
    };
    AffineBlochGenerator {
        m,
        drive: Vector3::new(p.gamma_p - p.gamma_m, 0.0, 0.0),
        basis: case_basis(),
    }
}

/// Jump-operator realization of a case study, for cross-checks against the
/// 4x4 Liouvillian. Case 2 carries its dephasing as a third jump term
/// `σx` at rate `Γ/4`.
pub fn case_system(kind: CaseKind, p: &CaseParams) -> GklsSystem {
    let h = match kind {
        CaseKind::Case3 => Operator2::SIGMA_Z * (0.5 * p.e) + Operator2::SIGMA_X * (0.5 * p.eps),
        _ => Operator2::SIGMA_Z * (0.5 * p.e),
    };
    let mut terms = vec![
        JumpTerm::new(p.gamma_p, Operator2::SIGMA_PLUS).unwrap(),
        JumpTerm::new(p.gamma_m, Operator2::SIGMA_MINUS).unwrap(),
    ];
    if kind == CaseKind::Case2 && p.big_gamma > 0.0 {
        terms.push(JumpTerm::new(0.25 * p.big_gamma, Operator2::SIGMA_X).unwrap());
    }
    GklsSystem::new(h, terms).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpClass {
    None,
    Ep2,
    Ep3,
}

/// Closed-form spectrum of `M2` at one `(E/γ, ε/γ)` point.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumResult {
    pub eigenvalues: [C64; 3],
    pub ep: EpClass,
    /// `Y² + 4X³`; negative means three real eigenvalues.
    pub discriminant: f64,
    pub x: f64,
    pub y: f64,
    pub z: C64,
}

/// Cardano solution of the characteristic cubic in `γ = 1` units.
///
/// The real branch of `Z` is taken with the sign of `Y` so that `Y + Z`
/// never cancels; `|Y + Z| >= 2|X|^{3/2}` then keeps the back-substituted
/// cofactor bounded all the way up to the exceptional curves.
pub fn cubic_eigenvalues(e_over_gamma: f64, eps_over_gamma: f64) -> SpectrumResult {
    let e2 = e_over_gamma * e_over_gamma;
    let eps2 = eps_over_gamma * eps_over_gamma;
    let x = -0.25 + 3.0 * eps2 + 3.0 * e2;
    let y = -0.25 + 4.5 * eps2 - 9.0 * e2;
    let disc = y * y + 4.0 * x * x * x;

    let z = if disc >= 0.0 {
        C64::new(if y < 0.0 { -disc.sqrt() } else { disc.sqrt() }, 0.0)
    } else {
        C64::new(0.0, (-disc).sqrt())
    };
    let w = (C64::new(y, 0.0) + z) / 54.0;

    let third = 1.0 / 3.0;
    let eigenvalues = if w.norm() == 0.0 {
        [C64::new(-2.0 * third, 0.0); 3]
    } else {
        let u = w.cbrt();
        let v = -C64::new(x / 9.0, 0.0) / u;
        let omega = C64::new(-0.5, 0.75f64.sqrt());
        let omega2 = omega.conj();
        let shift = C64::new(-2.0 * third, 0.0);
        [
            shift + u + v,
            shift + omega * u + omega2 * v,
            shift + omega2 * u + omega * v,
        ]
    };

    let mut out = SpectrumResult {
        eigenvalues,
        ep: EpClass::None,
        discriminant: disc,
        x,
        y,
        z,
    };
    out.ep = classify_ep(&out, tol::EP);
    out
}

/// Point classification of exceptional points: third order needs
/// `X = Y = 0`, second order sits on the discriminant-zero curve. The
/// discriminant test is cubed and scale-matched to `tol_ep`, so it only
/// fires essentially on the curve; curve *location* goes through the
/// sign-change bisection in [`ep_map`].
pub fn classify_ep(spectrum: &SpectrumResult, tol_ep: f64) -> EpClass {
    if spectrum.x.abs() < tol_ep && spectrum.y.abs() < tol_ep {
        EpClass::Ep3
    } else {
        let scale = 1.0 + spectrum.y * spectrum.y + 4.0 * spectrum.x.abs().powi(3);
        if spectrum.discriminant.abs() < tol_ep.powi(3) * scale {
            EpClass::Ep2
        } else {
            EpClass::None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Three real eigenvalues: pure decay.
    Real,
    /// One real eigenvalue and a complex pair: underdamped.
    Complex,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::Real => "real",
            Region::Complex => "complex",
        }
    }
}

/// A located third-order exceptional point.
#[derive(Debug, Clone, Copy)]
pub struct Cusp {
    pub e: f64,
    pub eps: f64,
    /// `max(|X|, |Y|)` at the located point.
    pub residual: f64,
}

/// Discriminant-sign map over an `(E/γ, ε/γ)` grid.
///
/// `discriminant` and `region` are stored row-major, `index = ie * n_eps + ieps`.
#[derive(Debug, Clone)]
pub struct EpMap {
    pub e_axis: Vec<f64>,
    pub eps_axis: Vec<f64>,
    pub discriminant: Vec<f64>,
    pub region: Vec<Region>,
    /// Point classification at each node (almost always `None`; exceptional
    /// points are codimension >= 1, so curve location goes through
    /// `boundary` and `cusps`).
    pub ep: Vec<EpClass>,
    /// Second-order points on grid edges, bisected to `|Δparam| < 1e-8`.
    pub boundary: Vec<[f64; 2]>,
    /// Third-order cusps, one per sign quadrant that contains one.
    pub cusps: Vec<Cusp>,
}

impl EpMap {
    pub fn disc(&self, ie: usize, ieps: usize) -> f64 {
        self.discriminant[ie * self.eps_axis.len() + ieps]
    }
}

fn grid_axis(min: f64, max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && max > min);
    let step = (max - min) / (n - 1) as f64;
    let mut axis: Vec<f64> = (0..n).map(|k| min + step * k as f64).collect();
    axis[n - 1] = max;
    // mirror-symmetric ranges get bitwise mirror-symmetric nodes
    if min == -max {
        for k in 0..n / 2 {
            axis[n - 1 - k] = -axis[k];
        }
        if n % 2 == 1 {
            axis[n / 2] = 0.0;
        }
    }
    axis
}

fn discriminant_at(e: f64, eps: f64) -> f64 {
    let x = -0.25 + 3.0 * eps * eps + 3.0 * e * e;
    let y = -0.25 + 4.5 * eps * eps - 9.0 * e * e;
    y * y + 4.0 * x * x * x
}

fn bisect_edge<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm >= 0.0) == (flo >= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton iteration on `(X, Y)(E, ε)`; the system is linear in `(E², ε²)`,
/// so convergence from any same-quadrant seed is quadratic.
fn refine_cusp(mut e: f64, mut eps: f64) -> Option<Cusp> {
    for _ in 0..60 {
        let x = -0.25 + 3.0 * eps * eps + 3.0 * e * e;
        let y = -0.25 + 4.5 * eps * eps - 9.0 * e * e;
        let residual = x.abs().max(y.abs());
        if residual < 1e-14 {
            return Some(Cusp { e, eps, residual });
        }
        let det = 162.0 * e * eps;
        if det.abs() < 1e-30 {
            return None;
        }
        // J = [[6E, 6ε], [-18E, 9ε]]
        let de = (9.0 * eps * x - 6.0 * eps * y) / det;
        let deps = (18.0 * e * x + 6.0 * e * y) / det;
        e -= de;
        eps -= deps;
    }
    let x = -0.25 + 3.0 * eps * eps + 3.0 * e * e;
    let y = -0.25 + 4.5 * eps * eps - 9.0 * e * e;
    let residual = x.abs().max(y.abs());
    (residual < 1e-10).then_some(Cusp { e, eps, residual })
}

/// Evaluate the discriminant map, refine the second-order boundary along
/// grid edges, and locate the third-order cusps quadrant by quadrant.
pub fn ep_map(e_range: (f64, f64), eps_range: (f64, f64), n_e: usize, n_eps: usize) -> EpMap {
    assert!(n_e >= 2 && n_eps >= 2);
    let e_axis = grid_axis(e_range.0, e_range.1, n_e);
    let eps_axis = grid_axis(eps_range.0, eps_range.1, n_eps);

    let discriminant = map_indexed(n_e * n_eps, |idx| {
        discriminant_at(e_axis[idx / n_eps], eps_axis[idx % n_eps])
    });
    let region = discriminant
        .iter()
        .map(|&d| {
            if d > 0.0 {
                Region::Complex
            } else {
                Region::Real
            }
        })
        .collect();
    let ep = map_indexed(n_e * n_eps, |idx| {
        cubic_eigenvalues(e_axis[idx / n_eps], eps_axis[idx % n_eps]).ep
    });

    // sign changes along eps-edges, then along e-edges, in grid order
    let mut boundary = Vec::new();
    let eps_edges = map_indexed(n_e * (n_eps - 1), |idx| {
        let (ie, ieps) = (idx / (n_eps - 1), idx % (n_eps - 1));
        let (d0, d1) = (
            discriminant[ie * n_eps + ieps],
            discriminant[ie * n_eps + ieps + 1],
        );
        if (d0 >= 0.0) != (d1 >= 0.0) {
            let e = e_axis[ie];
            let root = bisect_edge(
                |eps| discriminant_at(e, eps),
                eps_axis[ieps],
                eps_axis[ieps + 1],
            );
            Some([e, root])
        } else {
            None
        }
    });
    let e_edges = map_indexed((n_e - 1) * n_eps, |idx| {
        let (ie, ieps) = (idx / n_eps, idx % n_eps);
        let (d0, d1) = (
            discriminant[ie * n_eps + ieps],
            discriminant[(ie + 1) * n_eps + ieps],
        );
        if (d0 >= 0.0) != (d1 >= 0.0) {
            let eps = eps_axis[ieps];
            let root = bisect_edge(|e| discriminant_at(e, eps), e_axis[ie], e_axis[ie + 1]);
            Some([root, eps])
        } else {
            None
        }
    });
    boundary.extend(eps_edges.into_iter().flatten());
    boundary.extend(e_edges.into_iter().flatten());

    // one Newton seed per sign quadrant: the grid point minimizing |X| + |Y|
    let mut cusps = Vec::new();
    for (se, seps) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let mut best: Option<(f64, f64, f64)> = None;
        for &e in &e_axis {
            if e * se <= 0.0 {
                continue;
            }
            for &eps in &eps_axis {
                if eps * seps <= 0.0 {
                    continue;
                }
                let x = -0.25 + 3.0 * eps * eps + 3.0 * e * e;
                let y = -0.25 + 4.5 * eps * eps - 9.0 * e * e;
                let score = x.abs() + y.abs();
                if best.is_none_or(|(s, _, _)| score < s) {
                    best = Some((score, e, eps));
                }
            }
        }
        let Some((_, e0, eps0)) = best else { continue };
        if let Some(c) = refine_cusp(e0, eps0) {
            let pad_e = 1e-9 * (1.0 + e_range.1.abs().max(e_range.0.abs()));
            let pad_eps = 1e-9 * (1.0 + eps_range.1.abs().max(eps_range.0.abs()));
            let inside = c.e >= e_range.0 - pad_e
                && c.e <= e_range.1 + pad_e
                && c.eps >= eps_range.0 - pad_eps
                && c.eps <= eps_range.1 + pad_eps;
            let same_quadrant = c.e * se > 0.0 && c.eps * seps > 0.0;
            if inside && same_quadrant {
                cusps.push(c);
            }
        }
    }

    EpMap {
        e_axis,
        eps_axis,
        discriminant,
        region,
        ep,
        boundary,
        cusps,
    }
}
