//! Dense complex linear algebra for small matrices: vectorization, the
//! Hermitian eigensolver, and the PSD square root.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, the carrier for all operators and states.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;

/// Maximum number of cyclic Jacobi sweeps before giving up.
const MAX_JACOBI_SWEEPS: usize = 60;

/// Stacks the columns of `m` into a vector (column-major vec operation).
///
/// Linear and invertible; [`devectorize`] is its inverse.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`]: rebuilds the d x d matrix from a d^2 vector.
pub fn devectorize(v: &CVec) -> Result<CMat> {
    let n = v.len();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: n,
        });
    }
    Ok(CMat::from_column_slice(d, d, v.as_slice()))
}

/// (X + X^H)/2, the Hermitian part of `X`.
pub fn hermitize(x: &CMat) -> CMat {
    (x + x.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Frobenius norm of the anti-Hermitian part, i.e. ||X - X^H||_F.
pub fn hermiticity_residual(x: &CMat) -> f64 {
    (x - x.adjoint()).norm()
}

/// Checks that `m` is square with finite entries; returns its dimension.
pub fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns eigenvalues in ascending order with matching eigenvector
/// columns: `m * v = v * diag(vals)` with residual below 1e-10 for
/// d <= 16. The input is Hermitized first so that callers may pass
/// matrices with floating-point Hermiticity drift.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let d = check_square(m)?;
    let mut a = hermitize(m);
    let mut v = CMat::identity(d, d);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = off_diagonal_norm(&a);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate_pair(&mut a, &mut v, p, q, scale);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol.max(1e-14 * scale) {
        return Err(Error::EigenNoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    let vals: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap().then(i.cmp(&j)));

    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = CMat::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vecs.set_column(dst, &v.column(src));
    }
    Ok((sorted_vals, sorted_vecs))
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let d = a.nrows();
    let mut s = 0.0f64;
    for p in 0..d {
        for q in 0..d {
            if p != q {
                s += a[(p, q)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing the (p, q) entry of the Hermitian `a`,
/// accumulating the rotation into `v`.
///
/// For the 2x2 block [[a_pp, g e^{i phi}], [g e^{-i phi}, a_qq]] the
/// annihilating unitary is [[c, -s w], [s conj(w), c]] with w = e^{i phi}
/// and tan(2 theta) = 2g/(a_pp - a_qq), taking the smaller angle for
/// guaranteed sweep convergence.
fn rotate_pair(a: &mut CMat, v: &mut CMat, p: usize, q: usize, scale: f64) {
    let z = a[(p, q)];
    let g = z.norm();
    if g <= 1e-18 * scale {
        a[(p, q)] = Complex64::ZERO;
        a[(q, p)] = Complex64::ZERO;
        return;
    }
    let w = z / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (app - aqq) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let d = a.nrows();
    // A <- G^H A G, touching only rows/columns p and q.
    for k in 0..d {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * s * w.conj();
        a[(k, q)] = -akp * s * w + akq * c;
        a[(p, k)] = a[(k, p)].conj();
        a[(q, k)] = a[(k, q)].conj();
    }
    let new_pp = app * c * c + 2.0 * c * s * g + aqq * s * s;
    let new_qq = app * s * s - 2.0 * c * s * g + aqq * c * c;
    a[(p, p)] = Complex64::new(new_pp, 0.0);
    a[(q, q)] = Complex64::new(new_qq, 0.0);
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;

    // V <- V G.
    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * s * w.conj();
        v[(k, q)] = -vkp * s * w + vkq * c;
    }
}

/// Unique PSD square root of a Hermitian PSD matrix.
///
/// Eigenvalues in [-1e-9, 0) are clipped to zero; anything below -1e-9 is
/// rejected. Satisfies `psd_sqrt(M)^2 = M` within 1e-8 Frobenius.
pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    const EIG_TOL: f64 = 1e-9;
    let d = check_square(m)?;
    let residual = hermiticity_residual(m);
    if residual > 1e-10 {
        return Err(Error::NotHermitian {
            residual,
            tol: 1e-10,
        });
    }
    let (vals, vecs) = eigh(m)?;
    let mut sq = CMat::zeros(d, d);
    for (i, &lam) in vals.iter().enumerate() {
        if lam < -EIG_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: lam,
                tol: EIG_TOL,
            });
        }
        let root = lam.max(0.0).sqrt();
        sq[(i, i)] = Complex64::new(root, 0.0);
    }
    Ok(&vecs * sq * vecs.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
        let raw = CMat::from_fn(d, d, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        hermitize(&raw)
    }

    #[test]
    fn vectorize_stacks_columns() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let v = vectorize(&m);
        // [[a,b],[c,d]] -> (a, c, b, d)
        assert_eq!(v[0], c(1.0, 0.0));
        assert_eq!(v[1], c(2.0, 0.0));
        assert_eq!(v[2], c(3.0, 0.0));
        assert_eq!(v[3], c(4.0, 0.0));
    }

    #[test]
    fn vectorize_identity() {
        let v = vectorize(&CMat::identity(2, 2));
        assert_eq!(
            v.as_slice(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn vectorize_initial_state() {
        let r = 3.0_f64.sqrt() / 4.0;
        let m = CMat::from_row_slice(
            2,
            2,
            &[c(0.75, 0.0), c(-r, 0.0), c(-r, 0.0), c(0.25, 0.0)],
        );
        let v = vectorize(&m);
        assert_eq!(v[0], c(0.75, 0.0));
        assert_eq!(v[1], c(-r, 0.0));
        assert_eq!(v[2], c(-r, 0.0));
        assert_eq!(v[3], c(0.25, 0.0));
    }

    #[test]
    fn devectorize_inverts_vectorize() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [2usize, 3, 4, 8] {
            let m = CMat::from_fn(d, d, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let back = devectorize(&vectorize(&m)).unwrap();
            assert!((m - back).norm() == 0.0);
        }
    }

    #[test]
    fn devectorize_rejects_non_square_length() {
        let v = CVec::from_element(5, Complex64::ZERO);
        assert!(devectorize(&v).is_err());
    }

    #[test]
    fn eigh_diagonal_matrix() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0)]));
        let (vals, _) = eigh(&m).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_known_2x2_complex() {
        // [[0, -i], [i, 0]] = sigma_y, eigenvalues -1 and 1.
        let m = CMat::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        );
        let (vals, vecs) = eigh(&m).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
        let lam = CMat::from_fn(2, 2, |i, j| {
            if i == j {
                c(vals[i], 0.0)
            } else {
                Complex64::ZERO
            }
        });
        assert!((m * &vecs - &vecs * lam).norm() < 1e-12);
    }

    #[test]
    fn eigh_residual_contract_up_to_d16() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for d in [2usize, 3, 4, 5, 8, 12, 16] {
            for _ in 0..5 {
                let m = random_hermitian(&mut rng, d);
                let (vals, vecs) = eigh(&m).unwrap();
                let lam = CMat::from_fn(d, d, |i, j| {
                    if i == j {
                        c(vals[i], 0.0)
                    } else {
                        Complex64::ZERO
                    }
                });
                let residual = (&m * &vecs - &vecs * lam).norm();
                assert!(
                    residual <= 1e-10,
                    "d={d}: residual {residual:.3e} exceeds 1e-10"
                );
                let ortho = (vecs.adjoint() * &vecs - CMat::identity(d, d)).norm();
                assert!(ortho <= 1e-12, "d={d}: eigenvectors not unitary: {ortho:.3e}");
                for w in vals.windows(2) {
                    assert!(w[0] <= w[1], "eigenvalues not sorted ascending");
                }
            }
        }
    }

    #[test]
    fn eigh_trace_and_norm_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(&mut rng, 6);
        let (vals, _) = eigh(&m).unwrap();
        let trace: f64 = m.diagonal().iter().map(|z| z.re).sum();
        assert_abs_diff_eq!(vals.iter().sum::<f64>(), trace, epsilon = 1e-12);
        let sumsq: f64 = vals.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(sumsq, m.norm_squared(), epsilon = 1e-10);
    }

    #[test]
    fn psd_sqrt_identity() {
        let i = CMat::identity(3, 3);
        assert!((psd_sqrt(&i).unwrap() - CMat::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_diagonal() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(9.0, 0.0)],
        );
        let s = psd_sqrt(&m).unwrap();
        assert_abs_diff_eq!(s[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[(1, 1)].re, 3.0, epsilon = 1e-12);
        assert!(s[(0, 1)].norm() < 1e-13);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let r = 3.0_f64.sqrt() / 4.0;
        let rho = CMat::from_row_slice(
            2,
            2,
            &[c(0.75, 0.0), c(-r, 0.0), c(-r, 0.0), c(0.25, 0.0)],
        );
        let s = psd_sqrt(&rho).unwrap();
        assert!((&s * &s - rho).norm() < 1e-10);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
        );
        assert!(matches!(psd_sqrt(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn check_square_rejects_non_finite() {
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(check_square(&m), Err(Error::NonFinite)));
    }
}
