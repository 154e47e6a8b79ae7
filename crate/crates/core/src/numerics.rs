//! Small dense numerical kernels: matrix exponential, eigenvalues of 4x4
//! complex matrices, an adaptive Runge-Kutta integrator used for
//! cross-checking, and a pivoted complex solve.

use nalgebra::{Matrix3, Matrix4, SMatrix, Vector3};

use crate::algebra::C64;

/// Matrix exponential of a real 4x4 matrix by scaling and squaring with a
/// degree-13 Pade approximant (Higham 2005, fixed order). The scaling power
/// is `s = max(0, ceil(log2(|A|_1 / 5.371920351148152)))`.
pub fn expm4(a: &Matrix4<f64>) -> Matrix4<f64> {
    const THETA_13: f64 = 5.371920351148152;
    #[rustfmt::skip]
    const B: [f64; 14] = [
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ];

    let norm1 = one_norm4(a);
    let s = if norm1 > THETA_13 {
        (norm1 / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(s);

    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a2 * a4;
    let id = Matrix4::identity();

    let u = a
        * (a6 * (a6 * B[13] + a4 * B[11] + a2 * B[9])
            + a6 * B[7]
            + a4 * B[5]
            + a2 * B[3]
            + id * B[1]);
    let v =
        a6 * (a6 * B[12] + a4 * B[10] + a2 * B[8]) + a6 * B[6] + a4 * B[4] + a2 * B[2] + id * B[0];

    let mut r = (v - u)
        .lu()
        .solve(&(v + u))
        .expect("Pade denominator is singular");
    for _ in 0..s {
        r = r * r;
    }
    r
}

fn one_norm4(a: &Matrix4<f64>) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a complex 4x4 matrix whose spectrum is closed under
/// complex conjugation (true for any generator that maps Hermitian
/// operators to Hermitian operators).
///
/// The matrix `M = A + iB` is embedded as the real 8x8 block matrix
/// `[[A, -B], [B, A]]`, whose spectrum is that of `M` together with its
/// conjugate; under the closure assumption every eigenvalue appears twice
/// and the doubling is semisimple, so a real Schur solve stays accurate
/// even at degenerate eigenvalues. Pairs are collapsed to their midpoints.
pub fn complex_eigenvalues4(m: &Matrix4<C64>) -> [C64; 4] {
    let mut big = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            big[(i, j)] = m[(i, j)].re;
            big[(i, j + 4)] = -m[(i, j)].im;
            big[(i + 4, j)] = m[(i, j)].im;
            big[(i + 4, j + 4)] = m[(i, j)].re;
        }
    }
    let ev = big.complex_eigenvalues();
    let mut vals: Vec<C64> = ev.iter().map(|z| C64::new(z.re, z.im)).collect();
    vals.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());

    let mut out = [C64::new(0.0, 0.0); 4];
    let mut used = [false; 8];
    let mut k = 0;
    for i in 0..8 {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, u) in used.iter().enumerate().skip(i + 1) {
            if !u {
                let d = (vals[i] - vals[j]).norm();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        used[best] = true;
        out[k] = (vals[i] + vals[best]) * 0.5;
        k += 1;
    }
    out
}

/// Greedy multiset distance: the largest gap after matching each element of
/// `a` with its nearest unused element of `b`. Panics on length mismatch.
pub fn multiset_max_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, y) in b.iter().enumerate() {
            if !used[j] {
                let d = (x - y).norm();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        used[best] = true;
        worst = worst.max(best_d);
    }
    worst
}

/// One adaptive Dormand-Prince 5(4) integration of the affine system
/// `dr/dt = m r + drive` from `t0` to `t1`.
///
/// This is deliberately a different algorithm from the exact propagator in
/// `dynamics::evolve`, so the two can cross-check each other.
pub fn rk45_affine(
    m: &Matrix3<f64>,
    drive: &Vector3<f64>,
    r0: Vector3<f64>,
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Vector3<f64> {
    #[rustfmt::skip]
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let f = |r: &Vector3<f64>| m * r + drive;

    let span = t1 - t0;
    if span == 0.0 {
        return r0;
    }
    let mut t = t0;
    let mut y = r0;
    let mut h = span / 16.0;
    let h_min = span.abs() * 1e-14;

    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        let k1 = f(&y);
        let k2 = f(&(y + k1 * (A[0][0] * h)));
        let k3 = f(&(y + (k1 * A[1][0] + k2 * A[1][1]) * h));
        let k4 = f(&(y + (k1 * A[2][0] + k2 * A[2][1] + k3 * A[2][2]) * h));
        let k5 = f(&(y + (k1 * A[3][0] + k2 * A[3][1] + k3 * A[3][2] + k4 * A[3][3]) * h));
        let k6 =
            f(&(y
                + (k1 * A[4][0] + k2 * A[4][1] + k3 * A[4][2] + k4 * A[4][3] + k5 * A[4][4]) * h));
        let y5 = y + (k1 * A[5][0] + k3 * A[5][2] + k4 * A[5][3] + k5 * A[5][4] + k6 * A[5][5]) * h;
        let k7 = f(&y5);

        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err4 = Vector3::zeros();
        for (i, k) in ks.iter().enumerate() {
            err4 += k * ((B5[i] - B4[i]) * h);
        }

        let mut err: f64 = 0.0;
        for i in 0..3 {
            let scale = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max((err4[i] / scale).abs());
        }

        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).max(h_min);
    }
    y
}

/// Solve `A x = b` for complex `A` (n x n, row major) by Gaussian
/// elimination with partial pivoting. Returns `None` on a vanishing pivot.
pub fn solve_complex(a: &[Vec<C64>], b: &[C64]) -> Option<Vec<C64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    let mut m: Vec<Vec<C64>> = a.to_vec();
    let mut rhs = b.to_vec();

    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())?;
        if m[pivot][col].norm() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            let (pivot_rows, rest) = m.split_at_mut(row);
            let pivot_row = &pivot_rows[col];
            for (k, entry) in rest[0].iter_mut().enumerate().skip(col) {
                *entry -= factor * pivot_row[k];
            }
            let sub = factor * rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn expm_of_zero_is_identity() {
        let e = expm4(&Matrix4::zeros());
        assert!((e - Matrix4::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn expm_matches_diagonal_exponential() {
        let a = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 0.5, 0.0, 2.0));
        let e = expm4(&a);
        for (i, lam) in [-1.0f64, 0.5, 0.0, 2.0].iter().enumerate() {
            assert_abs_diff_eq!(e[(i, i)], lam.exp(), epsilon = 1e-13);
        }
    }

    #[test]
    fn expm_rotation_block() {
        // exp of a rotation generator: [[0, -w], [w, 0]] -> cos/sin block
        let w = 3.7;
        let mut a = Matrix4::zeros();
        a[(0, 1)] = -w;
        a[(1, 0)] = w;
        let e = expm4(&a);
        assert_abs_diff_eq!(e[(0, 0)], w.cos(), epsilon = 1e-13);
        assert_abs_diff_eq!(e[(1, 0)], w.sin(), epsilon = 1e-13);
        assert_abs_diff_eq!(e[(2, 2)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        let a = Matrix4::from_diagonal(&nalgebra::Vector4::new(-40.0, -20.0, 10.0, 0.0));
        let e = expm4(&a);
        assert_abs_diff_eq!(e[(2, 2)], 10f64.exp(), epsilon = 1e-9 * 10f64.exp());
        assert!(e[(0, 0)] > 0.0 && e[(0, 0)] < 1e-15);
    }

    #[test]
    fn eigenvalues_of_complex_diagonal() {
        let mut m = Matrix4::<C64>::zeros();
        let expected = [
            C64::new(0.0, 0.0),
            C64::new(-0.5, 0.0),
            C64::new(-0.5, 1.0),
            C64::new(-0.5, -1.0),
        ];
        for (i, v) in expected.iter().enumerate() {
            m[(i, i)] = *v;
        }
        let got = complex_eigenvalues4(&m);
        assert!(multiset_max_distance(&got, &expected) < 1e-12);
    }

    #[test]
    fn eigenvalues_semisimple_double_pair_stay_accurate() {
        // non-diagonal matrix with conjugation-closed spectrum {0, -1, -1/2, -1/2}
        let z = C64::new(0.0, 0.0);
        #[rustfmt::skip]
        let m = Matrix4::<C64>::from_row_slice(&[
            C64::new(-1.0, 0.0), z, z, z,
            z, C64::new(-0.5, 0.0), z, z,
            z, z, C64::new(-0.5, 0.0), z,
            C64::new(1.0, 0.0), z, z, z,
        ]);
        let got = complex_eigenvalues4(&m);
        let expected = [
            C64::new(0.0, 0.0),
            C64::new(-0.5, 0.0),
            C64::new(-0.5, 0.0),
            C64::new(-1.0, 0.0),
        ];
        assert!(multiset_max_distance(&got, &expected) < 1e-12);
    }

    #[test]
    fn rk45_matches_scalar_decay() {
        let m = Matrix3::from_diagonal(&Vector3::new(-2.0, -2.0, -2.0));
        let drive = Vector3::zeros();
        let r0 = Vector3::new(1.0, -0.5, 0.25);
        let r = rk45_affine(&m, &drive, r0, 0.0, 1.5, 1e-12, 1e-14);
        let expected = r0 * (-3.0f64).exp();
        assert!((r - expected).norm() < 1e-10);
    }

    #[test]
    fn solve_complex_roundtrip() {
        let a = vec![
            vec![C64::new(2.0, 1.0), C64::new(0.0, -1.0)],
            vec![C64::new(1.0, 0.0), C64::new(3.0, 0.5)],
        ];
        let x_true = [C64::new(1.0, -2.0), C64::new(0.5, 0.25)];
        let b: Vec<C64> = (0..2)
            .map(|i| a[i][0] * x_true[0] + a[i][1] * x_true[1])
            .collect();
        let x = solve_complex(&a, &b).unwrap();
        assert!((x[0] - x_true[0]).norm() < 1e-13);
        assert!((x[1] - x_true[1]).norm() < 1e-13);
    }
}
