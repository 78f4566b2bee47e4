//! Pauli matrices and the generalized Gell-Mann operator basis used to
//! parameterize Hermitian matrices by real coordinates.

use num_complex::Complex64;

use crate::linalg::CMat;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2x2 identity.
pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Pauli X.
pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

/// Pauli Y.
pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

/// Pauli Z.
pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Orthonormal traceless Hermitian basis of the d x d matrices
/// (generalized Gell-Mann construction), d^2 - 1 elements with
/// Tr(B_i B_j) = delta_ij.
///
/// Together with I/sqrt(d) this is an orthonormal basis of the Hermitian
/// matrices, so any unit-trace Hermitian rho decomposes uniquely as
/// rho = I/d + sum_k theta_k B_k with theta_k = Tr(B_k rho).
pub fn gell_mann_basis(d: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(d * d - 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMat::zeros(d, d);
            sym[(j, k)] = c(inv_sqrt2, 0.0);
            sym[(k, j)] = c(inv_sqrt2, 0.0);
            basis.push(sym);

            let mut asym = CMat::zeros(d, d);
            asym[(j, k)] = c(0.0, -inv_sqrt2);
            asym[(k, j)] = c(0.0, inv_sqrt2);
            basis.push(asym);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = CMat::zeros(d, d);
        for i in 0..l {
            diag[(i, i)] = c(norm, 0.0);
        }
        diag[(l, l)] = c(-(l as f64) * norm, 0.0);
        basis.push(diag);
    }
    basis
}
