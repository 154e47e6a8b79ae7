//! Seeded random inputs for the verification command and the test suites.
//!
//! Decomposable two-jump systems are drawn from the image of the physical
//! form: pick an orthonormal operator frame, a coefficient matrix
//! `[[g1, -i d], [i d, g2]]` with `g1 >= g2 >= |d|` (the exchange channel
//! keeps both rates non-negative exactly when `|d| <= min(g1, g2)`), and
//! emit its two eigenchannels as jump operators. Random form-preserving
//! transforms then disguise the representation without touching the
//! dynamics.

use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{HermitianAxis, Norm, Operator2, C64};
use crate::gkls::{
    transform_energy_shift, transform_identity_shift, transform_rescale, transform_unitary_mix,
    GklsSystem, JumpTerm,
};

fn random_unit3(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n < 1.0 {
            return v / n;
        }
    }
}

/// Random right-handed orthonormal triple of full-normalized axes.
pub fn random_orthonormal_basis(rng: &mut ChaCha8Rng) -> [HermitianAxis; 3] {
    let a1 = random_unit3(rng);
    let a2 = loop {
        let w = random_unit3(rng);
        let p = w - a1 * w.dot(&a1);
        if p.norm() > 0.1 {
            break p / p.norm();
        }
    };
    let a3 = a1.cross(&a2);
    [
        HermitianAxis::new(a1, Norm::Full).unwrap(),
        HermitianAxis::new(a2, Norm::Full).unwrap(),
        HermitianAxis::new(a3, Norm::Full).unwrap(),
    ]
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random 2x2 complex operator with entries in the unit square.
pub fn random_operator(rng: &mut ChaCha8Rng) -> Operator2 {
    Operator2::new([
        [random_complex(rng), random_complex(rng)],
        [random_complex(rng), random_complex(rng)],
    ])
}

pub fn random_hermitian(rng: &mut ChaCha8Rng) -> Operator2 {
    let v = random_unit3(rng) * rng.random_range(0.2..1.5);
    Operator2::IDENTITY * rng.random_range(-1.0..1.0)
        + Operator2::SIGMA_X * v.x
        + Operator2::SIGMA_Y * v.y
        + Operator2::SIGMA_Z * v.z
}

/// Random density matrix `I/2 + r·σ/2` with `|r| < 1`.
pub fn random_state(rng: &mut ChaCha8Rng) -> Operator2 {
    let r = random_unit3(rng) * rng.random_range(0.0..0.98);
    Operator2::IDENTITY * 0.5
        + (Operator2::SIGMA_X * r.x + Operator2::SIGMA_Y * r.y + Operator2::SIGMA_Z * r.z) * 0.5
}

/// Random rank-one projector (pure state).
pub fn random_pure_state(rng: &mut ChaCha8Rng) -> Operator2 {
    let r = random_unit3(rng);
    Operator2::IDENTITY * 0.5
        + (Operator2::SIGMA_X * r.x + Operator2::SIGMA_Y * r.y + Operator2::SIGMA_Z * r.z) * 0.5
}

/// Haar-ish random 2x2 unitary (Gram-Schmidt of a random complex matrix).
pub fn random_unitary2(rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    loop {
        let c1 = Vector3::new(random_complex(rng), random_complex(rng), C64::new(0.0, 0.0));
        let c2 = Vector3::new(random_complex(rng), random_complex(rng), C64::new(0.0, 0.0));
        let n1 = (c1.x.norm_sqr() + c1.y.norm_sqr()).sqrt();
        if n1 < 0.1 {
            continue;
        }
        let u1 = [c1.x / n1, c1.y / n1];
        let overlap = u1[0].conj() * c2.x + u1[1].conj() * c2.y;
        let w = [c2.x - overlap * u1[0], c2.y - overlap * u1[1]];
        let n2 = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        if n2 < 0.1 {
            continue;
        }
        return DMatrix::from_row_slice(2, 2, &[u1[0], u1[1], w[0] / n2, w[1] / n2]);
    }
}

/// A generated system together with the exchange parameters it was built
/// from. A correct decomposition recovers `{gamma_p, gamma_m}` as an
/// unordered pair (the labels follow the orientation of the charge axis,
/// which the pipeline chooses by its own convention) and `big_gamma`
/// exactly. `gamma_p >= gamma_m` here.
#[derive(Debug, Clone)]
pub struct DecomposableSample {
    pub system: GklsSystem,
    pub gamma_p: f64,
    pub gamma_m: f64,
    pub big_gamma: f64,
}

/// Draw a decomposable two-jump system; see the module docs for the scheme.
pub fn random_decomposable_sample(rng: &mut ChaCha8Rng) -> DecomposableSample {
    let basis = random_orthonormal_basis(rng);
    let g2: f64 = rng.random_range(0.05..1.5);
    let excess = if rng.random_range(0.0..1.0) < 0.25 {
        0.0
    } else {
        rng.random_range(0.0..1.5)
    };
    let g1 = g2 + excess;
    let d = if rng.random_range(0.0..1.0) < 0.15 {
        0.0
    } else {
        rng.random_range(-0.95..0.95) * g2
    };

    // eigenchannels of the coefficient matrix [[g1, -i d], [i d, g2]]
    let mean = 0.5 * (g1 + g2);
    let delta = 0.5 * (g1 - g2);
    let radius = (delta * delta + d * d).sqrt();
    let (mu1, mu2) = (mean + radius, mean - radius);
    let b = C64::new(0.0, d); // the (2,1) entry
    let (w1, w2) = if radius < 1e-14 {
        (
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        )
    } else {
        // eigenvector for mu: (mu - g2, b), normalized; orthogonal partner
        let v = [C64::new(mu1 - g2, 0.0), b];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n < 1e-14 {
            (
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            )
        } else {
            let w1 = [v[0] / n, v[1] / n];
            let w2 = [-w1[1].conj(), w1[0].conj()];
            (w1, w2)
        }
    };

    let a1 = basis[0].operator();
    let a2 = basis[1].operator();
    let terms = vec![
        JumpTerm::new(mu1, a1 * w1[0] + a2 * w1[1]).unwrap(),
        JumpTerm::new(mu2.max(0.0), a1 * w2[0] + a2 * w2[1]).unwrap(),
    ];
    let system = GklsSystem::new(random_hermitian(rng), terms).unwrap();

    DecomposableSample {
        system,
        gamma_p: 2.0 * (g2 + d.abs()),
        gamma_m: 2.0 * (g2 - d.abs()),
        big_gamma: 4.0 * (g1 - g2),
    }
}

pub fn random_decomposable_system(rng: &mut ChaCha8Rng) -> GklsSystem {
    random_decomposable_sample(rng).system
}

/// Apply a random pile of form-preserving transforms.
pub fn random_dressing(rng: &mut ChaCha8Rng, sys: &GklsSystem) -> GklsSystem {
    let mut out = sys.clone();
    if rng.random_range(0.0..1.0) < 0.8 {
        out = transform_energy_shift(&out, rng.random_range(-3.0..3.0));
    }
    if rng.random_range(0.0..1.0) < 0.8 {
        let alphas: Vec<C64> = (0..out.terms().len())
            .map(|_| random_complex(rng))
            .collect();
        out = transform_identity_shift(&out, &alphas);
    }
    if rng.random_range(0.0..1.0) < 0.8 {
        for i in 0..out.terms().len() {
            let alpha = loop {
                let a = random_complex(rng);
                if a.norm() > 0.2 {
                    break a;
                }
            };
            out = transform_rescale(&out, i, alpha).unwrap();
        }
    }
    if out.terms().len() == 2 && rng.random_range(0.0..1.0) < 0.8 {
        let u = random_unitary2(rng);
        out = transform_unitary_mix(&out, &u).unwrap();
    }
    out
}
