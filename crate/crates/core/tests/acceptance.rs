//! Acceptance suite: ten numbered criteria, one test each, every tolerance
//! pinned in code. Run with `cargo test --test acceptance -- --nocapture`
//! to see the per-criterion PASS/FAIL lines.

use std::time::Instant;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lindblad2::algebra::{commutator, HermitianAxis, Norm, Operator2, C64};
use lindblad2::decompose::{decompose_full, fermionic_pair, reassemble};
use lindblad2::dynamics::{
    case_generator, case_system, cubic_eigenvalues, ep_map, evolve, stationary_state, CaseKind,
    CaseParams,
};
use lindblad2::gkls::{
    bloch_generator, liouvillian_matrix, transform_energy_shift, transform_identity_shift,
    transform_rescale, transform_unitary_mix, GklsSystem,
};
use lindblad2::numerics::{multiset_max_distance, rk45_affine};
use lindblad2::sample;
use lindblad2::thermo::{analytic_stationary, gibbs_fit};

fn report(criterion: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "[acceptance] criterion {criterion:2} ({name}): {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
}

/// The seeded population shared by criteria 1 and 2.
fn seeded_systems(count: usize, seed: u64) -> Vec<GklsSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let base = sample::random_decomposable_sample(&mut rng).system;
            sample::random_dressing(&mut rng, &base)
        })
        .collect()
}

#[test]
fn criterion_01_roundtrip_decomposition() {
    let start = Instant::now();
    let systems = seeded_systems(1000, 0xC0FFEE);
    let mut worst: f64 = 0.0;
    for sys in &systems {
        let (pf, _) = decompose_full(sys).expect("seeded systems decompose");
        let residual = reassemble(&pf).max_abs_diff(&liouvillian_matrix(sys));
        worst = worst.max(residual);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst < 1e-10 && elapsed < 10.0;
    report(
        1,
        "roundtrip decomposition",
        ok,
        &format!("1000 systems, max residual {worst:.3e}, {elapsed:.2} s"),
    );
}

#[test]
fn criterion_02_fermionic_algebra() {
    let systems = seeded_systems(1000, 0xC0FFEE);
    let mut worst: f64 = 0.0;
    for sys in &systems {
        let (_, basis) = decompose_full(sys).expect("seeded systems decompose");
        let pair = fermionic_pair(&basis);
        worst = worst.max((pair.sp * pair.sp).max_abs());
        worst = worst.max((pair.sm * pair.sm).max_abs());
        worst =
            worst.max((pair.sp * pair.sm + pair.sm * pair.sp).max_abs_diff(&Operator2::IDENTITY));
        worst = worst.max(commutator(&pair.sp, &pair.sm).max_abs_diff(&basis.a3.operator()));
    }
    let ok = worst < 1e-12;
    report(
        2,
        "fermionic algebra",
        ok,
        &format!("1000 decompositions, max deviation {worst:.3e}"),
    );
}

#[test]
fn criterion_03_transform_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let sys = sample::random_decomposable_system(&mut rng);
        let l0 = liouvillian_matrix(&sys);

        let shifted = transform_energy_shift(&sys, rng.random_range(-5.0..5.0));
        worst = worst.max(liouvillian_matrix(&shifted).max_abs_diff(&l0));

        let mut rescaled = sys.clone();
        for i in 0..rescaled.terms().len() {
            let alpha = C64::new(rng.random_range(0.3..1.5), rng.random_range(-1.0..1.0));
            rescaled = transform_rescale(&rescaled, i, alpha).unwrap();
        }
        worst = worst.max(liouvillian_matrix(&rescaled).max_abs_diff(&l0));

        let alphas: Vec<C64> = (0..sys.terms().len())
            .map(|_| sample::random_complex(&mut rng))
            .collect();
        let idshift = transform_identity_shift(&sys, &alphas);
        worst = worst.max(liouvillian_matrix(&idshift).max_abs_diff(&l0));

        let mixed = transform_unitary_mix(&sys, &sample::random_unitary2(&mut rng)).unwrap();
        worst = worst.max(liouvillian_matrix(&mixed).max_abs_diff(&l0));
    }
    let ok = worst < 1e-12;
    report(
        3,
        "transform invariance",
        ok,
        &format!("200 cases x 4 transforms, max deviation {worst:.3e}"),
    );
}

/// The charge component of a state: `<N, ρ> / <N, N>`.
fn beta_of(rho: &Operator2, n: &HermitianAxis) -> f64 {
    lindblad2::algebra::hs_inner(&n.operator(), rho).re / n.convention().target().powi(2)
}

#[test]
fn criterion_04_case1_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF1);
    let mut worst: f64 = 0.0;
    let n_axis = HermitianAxis::new(Vector3::new(0.0, 0.0, 0.5), Norm::Half).unwrap();
    for _ in 0..50 {
        let p = CaseParams {
            e: rng.random_range(0.1..3.0),
            eps: 0.0,
            gamma_p: rng.random_range(0.05..3.0),
            gamma_m: rng.random_range(0.05..3.0),
            big_gamma: 0.0,
        };
        let beta = (p.gamma_p - p.gamma_m) / (p.gamma_p + p.gamma_m);

        let fixed = stationary_state(&case_generator(CaseKind::Case1, &p)).unwrap();
        worst = worst.max((fixed - Vector3::new(beta, 0.0, 0.0)).norm());

        let rho = liouvillian_matrix(&case_system(CaseKind::Case1, &p))
            .stationary_state()
            .unwrap();
        worst = worst.max((beta_of(&rho, &n_axis) - beta).abs());
    }
    let ok = worst < 1e-10;
    report(
        4,
        "case-1 stationary state",
        ok,
        &format!("50 draws, max deviation {worst:.3e}"),
    );
}

#[test]
fn criterion_05_case2_stationary_and_ep() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF2);
    let mut worst: f64 = 0.0;
    let n_axis = HermitianAxis::new(Vector3::new(0.0, 0.0, 0.5), Norm::Half).unwrap();
    for _ in 0..50 {
        let p = CaseParams {
            e: rng.random_range(0.1..3.0),
            eps: 0.0,
            gamma_p: rng.random_range(0.05..3.0),
            gamma_m: rng.random_range(0.05..3.0),
            big_gamma: rng.random_range(0.0..3.0),
        };
        let beta = (p.gamma_p - p.gamma_m) / (p.gamma_p + p.gamma_m + 0.5 * p.big_gamma);

        let fixed = stationary_state(&case_generator(CaseKind::Case2, &p)).unwrap();
        worst = worst.max((fixed - Vector3::new(beta, 0.0, 0.0)).norm());

        let rho = liouvillian_matrix(&case_system(CaseKind::Case2, &p))
            .stationary_state()
            .unwrap();
        worst = worst.max((beta_of(&rho, &n_axis) - beta).abs());
    }

    // At Γ = 4E the spectrum is λ1 = -γ-Γ/2 with a defective double pair
    // λ2 = λ3 = -γ/2-Γ/4. A backward-stable eigensolve can only certify a
    // defective pair to ~sqrt(eps), so the 1e-10 check evaluates the
    // characteristic polynomial of the matrix itself: p(λ1) = 0, and the
    // double root has p(λ2) = p'(λ2) = 0.
    let mut worst_ep: f64 = 0.0;
    for _ in 0..50 {
        let g: f64 = rng.random_range(0.1..3.0);
        let e: f64 = rng.random_range(0.1..2.0);
        let big = 4.0 * e;
        let lam1 = -g - 0.5 * big;
        let lam2 = -0.5 * g - 0.25 * big;

        let p = CaseParams {
            e,
            eps: 0.0,
            gamma_p: 0.5 * g,
            gamma_m: 0.5 * g,
            big_gamma: big,
        };
        let m = case_generator(CaseKind::Case2, &p).m;
        let charpoly = |lam: f64| (m - Matrix3::identity() * lam).determinant();
        let scale = (g + big).powi(3).max(1.0);
        worst_ep = worst_ep.max(charpoly(lam1).abs() / scale);
        worst_ep = worst_ep.max(charpoly(lam2).abs() / scale);
        // double root: the central difference of p at λ2 is O(h²)
        let h = 3e-6;
        let dp = (charpoly(lam2 + h) - charpoly(lam2 - h)) / (2.0 * h);
        worst_ep = worst_ep.max(dp.abs() / scale);

        // sanity: a numerical eigensolve sees the same spectrum coarsely
        let num: Vec<C64> = m
            .complex_eigenvalues()
            .iter()
            .map(|z| C64::new(z.re, z.im))
            .collect();
        let expected = [
            C64::new(lam1, 0.0),
            C64::new(lam2, 0.0),
            C64::new(lam2, 0.0),
        ];
        assert!(multiset_max_distance(&num, &expected) < 1e-6);
    }
    let ok = worst < 1e-10 && worst_ep < 1e-10;
    report(
        5,
        "case-2 stationary state and Γ=4E point",
        ok,
        &format!("max stationary deviation {worst:.3e}, max EP identity residual {worst_ep:.3e}"),
    );
}

#[test]
fn criterion_06_case3_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = CaseParams {
            e: rng.random_range(0.1..2.0),
            eps: rng.random_range(-1.5..1.5),
            gamma_p: rng.random_range(0.05..2.0),
            gamma_m: rng.random_range(0.05..2.0),
            big_gamma: 0.0,
        };
        let analytic = analytic_stationary(CaseKind::Case3, &p).unwrap();

        let gen = case_generator(CaseKind::Case3, &p);
        let fixed = stationary_state(&gen).unwrap();
        worst = worst.max((analytic - fixed).norm());

        let rho = liouvillian_matrix(&case_system(CaseKind::Case3, &p))
            .stationary_state()
            .unwrap();
        worst = worst.max((analytic - gen.components(&rho)).norm());
    }

    // ε = 0 reduces to the case-1 formula exactly (bitwise)
    let mut exact = true;
    for _ in 0..50 {
        let p = CaseParams {
            e: rng.random_range(0.1..2.0),
            eps: 0.0,
            gamma_p: rng.random_range(0.05..2.0),
            gamma_m: rng.random_range(0.05..2.0),
            big_gamma: 0.0,
        };
        let r3 = analytic_stationary(CaseKind::Case3, &p).unwrap();
        let r1 = analytic_stationary(CaseKind::Case1, &p).unwrap();
        exact &= r3 == r1;
    }
    let ok = worst < 1e-10 && exact;
    report(
        6,
        "case-3 stationary state",
        ok,
        &format!("50 draws, max oracle deviation {worst:.3e}, ε=0 limit exact: {exact}"),
    );
}

fn companion_eigenvalues(e: f64, eps: f64) -> Vec<C64> {
    let q = 1.25 + eps * eps + e * e;
    let r = 0.25 + 0.5 * eps * eps + e * e;
    let companion = Matrix3::new(0.0, 0.0, -r, 1.0, 0.0, -q, 0.0, 1.0, -2.0);
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| C64::new(z.re, z.im))
        .collect()
}

#[test]
fn criterion_07_cubic_closed_form() {
    let mut worst: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut check = |e: f64, eps: f64| {
        let s = cubic_eigenvalues(e, eps);
        let oracle = companion_eigenvalues(e, eps);
        worst = worst.max(multiset_max_distance(&s.eigenvalues, &oracle));
        let sum: C64 = s.eigenvalues.iter().sum();
        worst_trace = worst_trace.max((sum - C64::new(-2.0, 0.0)).norm());
    };

    for ie in 0..50 {
        for ieps in 0..50 {
            check(
                -0.3 + 0.6 * ie as f64 / 49.0,
                -0.5 + 1.0 * ieps as f64 / 49.0,
            );
        }
    }

    // Points at normal distance 1e-4 from the exceptional curve, located by
    // bisection on a coarse map and offset along the discriminant gradient.
    // Where the curve meets itself (the origin tangency, the cusps) the
    // gradient vanishes and an offset point can still sit on a near-double
    // root; there the companion-matrix oracle itself saturates at ~sqrt(eps),
    // so such points are not 1e-4 away from the curve and are skipped via a
    // discriminant floor.
    let dgrad = |e: f64, eps: f64| {
        let x = -0.25 + 3.0 * eps * eps + 3.0 * e * e;
        let y = -0.25 + 4.5 * eps * eps - 9.0 * e * e;
        Vector3::new(
            e * (-36.0 * y + 72.0 * x * x),
            eps * (18.0 * y + 72.0 * x * x),
            0.0,
        )
    };
    let disc_at = |e: f64, eps: f64| {
        let x = -0.25 + 3.0 * eps * eps + 3.0 * e * e;
        let y = -0.25 + 4.5 * eps * eps - 9.0 * e * e;
        y * y + 4.0 * x * x * x
    };
    let map = ep_map((-0.3, 0.3), (-0.5, 0.5), 41, 41);
    assert!(map.boundary.len() >= 20);
    let mut near_points = 0;
    for b in &map.boundary {
        let g = dgrad(b[0], b[1]);
        if g.norm() < 1e-12 {
            continue;
        }
        let n = g / g.norm();
        for s in [1e-4, -1e-4] {
            let (e, eps) = (b[0] + s * n.x, b[1] + s * n.y);
            if disc_at(e, eps).abs() < 1e-10 {
                continue;
            }
            check(e, eps);
            near_points += 1;
        }
    }
    assert!(near_points >= 100);

    let ok = worst < 1e-9 && worst_trace < 1e-12;
    report(
        7,
        "closed-form cubic vs companion matrix",
        ok,
        &format!(
            "2500 grid + {near_points} near-curve points, max eigenvalue deviation {worst:.3e}, max trace defect {worst_trace:.3e}"
        ),
    );
}

#[test]
fn criterion_08_ep_map_cusps() {
    let start = Instant::now();
    let map = ep_map((-0.3, 0.3), (-0.5, 0.5), 201, 201);
    let elapsed = start.elapsed().as_secs_f64();

    let e_star = 1.0 / (6.0 * 3f64.sqrt());
    let eps_star = 2f64.sqrt() / (3.0 * 3f64.sqrt());
    let mut worst: f64 = f64::INFINITY;
    let four = map.cusps.len() == 4;
    if four {
        worst = 0.0;
        for c in &map.cusps {
            worst = worst.max((c.e.abs() - e_star).abs());
            worst = worst.max((c.eps.abs() - eps_star).abs());
        }
    }

    let n = 201;
    let mut even = true;
    for ie in 0..n {
        for ieps in 0..n {
            let d = map.disc(ie, ieps);
            even &= d == map.disc(n - 1 - ie, ieps) && d == map.disc(ie, n - 1 - ieps);
        }
    }

    let ok = four && worst < 1e-6 && even && elapsed < 30.0;
    report(
        8,
        "exceptional-point map",
        ok,
        &format!(
            "{} cusps, max coordinate error {worst:.3e}, even: {even}, {elapsed:.2} s at 201x201",
            map.cusps.len()
        ),
    );
}

#[test]
fn criterion_09_generalized_gibbs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF9);
    let mut ok = true;
    let mut detail = String::new();

    // case 3 with γp ≠ γm, ε ≠ 0: the non-commutation potential is real
    let mut min_ratio = f64::INFINITY;
    for _ in 0..50 {
        let p = CaseParams {
            e: rng.random_range(0.2..2.0),
            eps: rng.random_range(0.1..1.2)
                * if rng.random_range(0.0..1.0) < 0.5 {
                    -1.0
                } else {
                    1.0
                },
            gamma_p: rng.random_range(0.4..2.0),
            gamma_m: rng.random_range(0.05..0.3),
            big_gamma: 0.0,
        };
        let gen = case_generator(CaseKind::Case3, &p);
        let rho = gen.state(&stationary_state(&gen).unwrap());
        let h = Operator2::SIGMA_Z * (0.5 * p.e) + Operator2::SIGMA_X * (0.5 * p.eps);
        let fit = gibbs_fit(&rho, &h, &(Operator2::SIGMA_Z * 0.5)).unwrap();
        ok &= fit.residual < 1e-8;
        min_ratio = min_ratio.min(fit.lam.abs() / fit.residual.max(1e-300));
        ok &= fit.lam.abs() > 10.0 * fit.residual;
    }
    detail.push_str(&format!("min |λ|/residual {min_ratio:.1e}; "));

    // ε = 0: λ vanishes identically
    let mut worst_lam: f64 = 0.0;
    for _ in 0..50 {
        let p = CaseParams {
            e: rng.random_range(0.2..2.0),
            eps: 0.0,
            gamma_p: rng.random_range(0.4..2.0),
            gamma_m: rng.random_range(0.05..0.3),
            big_gamma: 0.0,
        };
        let gen = case_generator(CaseKind::Case3, &p);
        let rho = gen.state(&stationary_state(&gen).unwrap());
        let h = Operator2::SIGMA_Z * (0.5 * p.e);
        let fit = gibbs_fit(&rho, &h, &(Operator2::SIGMA_Z * 0.5)).unwrap();
        worst_lam = worst_lam.max(fit.lam.abs());
    }
    ok &= worst_lam < 1e-12;
    detail.push_str(&format!("max |λ| at ε=0: {worst_lam:.1e}; "));

    // case 1 with γp = 1, γm = 3, E = 1: β = ln 3
    let p = CaseParams {
        e: 1.0,
        eps: 0.0,
        gamma_p: 1.0,
        gamma_m: 3.0,
        big_gamma: 0.0,
    };
    let gen = case_generator(CaseKind::Case1, &p);
    let rho = gen.state(&stationary_state(&gen).unwrap());
    let h = Operator2::SIGMA_Z * 0.5;
    let fit = gibbs_fit(&rho, &h, &h).unwrap();
    let beta_err = (fit.beta - 3f64.ln()).abs();
    ok &= beta_err < 1e-10;
    detail.push_str(&format!("|β - ln 3| = {beta_err:.3e}"));

    report(9, "generalized Gibbs fit", ok, &detail);
}

#[test]
fn criterion_10_propagation_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEFA);
    let basis = [
        HermitianAxis::new(Vector3::x(), Norm::Full).unwrap(),
        HermitianAxis::new(Vector3::y(), Norm::Full).unwrap(),
        HermitianAxis::new(Vector3::z(), Norm::Full).unwrap(),
    ];
    let mut worst_rk: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut min_eig: f64 = f64::INFINITY;
    for _ in 0..100 {
        let sys = sample::random_decomposable_system(&mut rng);
        let gen = bloch_generator(&sys, &basis).unwrap();
        let dir = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let r0 = if dir.norm() > 1e-6 {
            dir / dir.norm() * rng.random_range(0.0..0.49)
        } else {
            Vector3::zeros()
        };
        let traj = evolve(&gen, r0, 6.0, 1000);
        let mut y = r0;
        for k in 1..traj.times.len() {
            y = rk45_affine(
                &gen.m,
                &gen.drive,
                y,
                traj.times[k - 1],
                traj.times[k],
                1e-12,
                1e-14,
            );
            worst_rk = worst_rk.max((y - traj.states[k]).norm());
        }
        for r in &traj.states {
            let rho = gen.state(r);
            worst_trace = worst_trace.max((rho.trace() - C64::new(1.0, 0.0)).norm());
            min_eig = min_eig.min(rho.hermitian_eigenvalues()[0]);
        }
    }
    let ok = worst_rk < 1e-8 && worst_trace < 1e-12 && min_eig >= -1e-9;
    report(
        10,
        "propagation fidelity",
        ok,
        &format!(
            "100 systems x 1000 steps, max RK deviation {worst_rk:.3e}, max trace defect {worst_trace:.3e}, min eigenvalue {min_eig:.3e}"
        ),
    );
}
