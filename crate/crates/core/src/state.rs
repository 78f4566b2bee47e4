//! Density matrices and the quantum-specific primitives: expectations,
//! fidelity, Bloch coordinates, and projection onto the physical state set.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{check_square, eigh, hermiticity_residual, hermitize, psd_sqrt, CMat};

/// Tolerance for Hermiticity of a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance for |Tr(rho) - 1|.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues are allowed to dip this far below zero.
pub const PSD_TOL: f64 = 1e-9;

/// Hermitian, PSD, unit-trace complex matrix: the system state rho(t).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validates all three state invariants and wraps the matrix.
    pub fn new(mat: CMat) -> Result<Self> {
        let dm = DensityMatrix { mat };
        dm.validate()?;
        Ok(dm)
    }

    /// Wraps without validation; for internal construction where the
    /// invariants hold structurally (e.g. after projection).
    pub(crate) fn new_unchecked(mat: CMat) -> Self {
        DensityMatrix { mat }
    }

    /// Re-checks the invariants: Hermitian (1e-10), unit trace (1e-10),
    /// min eigenvalue >= -1e-9.
    pub fn validate(&self) -> Result<()> {
        check_square(&self.mat)?;
        let residual = hermiticity_residual(&self.mat);
        if residual > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                residual,
                tol: HERMITICITY_TOL,
            });
        }
        let tr: Complex64 = self.mat.diagonal().iter().sum();
        let deviation = (tr - Complex64::ONE).norm();
        if deviation > TRACE_TOL {
            return Err(Error::InvalidTrace {
                deviation,
                tol: TRACE_TOL,
            });
        }
        let (vals, _) = eigh(&self.mat)?;
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                tol: PSD_TOL,
            });
        }
        Ok(())
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// The maximally mixed state I/d.
    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix::new_unchecked(CMat::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0))
    }
}

/// Qubit state in (x, y, z) coordinates; rho = (I + x sx + y sy + z sz)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Tr(M rho) for Hermitian M; the imaginary part of the raw trace must be
/// below 1e-10 and is discarded.
pub fn expectation(m: &CMat, rho: &DensityMatrix) -> Result<f64> {
    let d = check_square(m)?;
    if d != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: d,
        });
    }
    let tr: Complex64 = (m * rho.mat()).diagonal().iter().sum();
    if tr.im.abs() > 1e-10 {
        return Err(Error::ComplexExpectation { imag: tr.im });
    }
    Ok(tr.re)
}

/// Fidelity f = Tr sqrt(rho_hat^{1/2} rho rho_hat^{1/2}), clamped to [0, 1].
///
/// Symmetric in its arguments up to numerical error.
pub fn fidelity(rho_hat: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if rho_hat.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_hat.dim(),
            found: rho.dim(),
        });
    }
    let s = psd_sqrt(rho_hat.mat())?;
    let w = &s * rho.mat() * &s;
    let (vals, _) = eigh(&w)?;
    let mut f = 0.0;
    for lam in vals {
        if lam < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: lam,
                tol: PSD_TOL,
            });
        }
        f += lam.max(0.0).sqrt();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// (x, y, z) = (Tr(sx rho), Tr(sy rho), Tr(sz rho)); qubits only.
pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            supported: 2,
            found: rho.dim(),
        });
    }
    let m = rho.mat();
    // Traces written out against the Pauli matrices.
    let x = (m[(0, 1)] + m[(1, 0)]).re;
    let y = (Complex64::i() * (m[(0, 1)] - m[(1, 0)])).re;
    let z = (m[(0, 0)] - m[(1, 1)]).re;
    Ok(BlochVector { x, y, z })
}

/// rho = (I + x sx + y sy + z sz)/2; requires |r| <= 1 + 1e-9.
pub fn density_from_bloch(b: &BlochVector) -> Result<DensityMatrix> {
    let n = b.norm();
    if n * n > 1.0 + 1e-9 {
        return Err(Error::NotPsd {
            min_eigenvalue: (1.0 - n) / 2.0,
            tol: PSD_TOL,
        });
    }
    let h = |re: f64, im: f64| Complex64::new(re, im);
    let mat = CMat::from_row_slice(
        2,
        2,
        &[
            h((1.0 + b.z) / 2.0, 0.0),
            h(b.x / 2.0, -b.y / 2.0),
            h(b.x / 2.0, b.y / 2.0),
            h((1.0 - b.z) / 2.0, 0.0),
        ],
    );
    Ok(DensityMatrix::new_unchecked(mat))
}

/// Euclidean projection of a real vector onto the probability simplex
/// by sort-and-threshold.
pub fn simplex_project(vals: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = vals.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    vals.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Frobenius-nearest density matrix to the Hermitian part of `X`:
/// Hermitize, eigendecompose, project the spectrum onto the probability
/// simplex, reassemble with the same eigenvectors.
pub fn project_to_density(x: &CMat) -> Result<DensityMatrix> {
    check_square(x)?;
    let h = hermitize(x);
    let (vals, vecs) = eigh(&h)?;
    let projected = simplex_project(&vals);
    let d = h.nrows();
    let mut diag = CMat::zeros(d, d);
    for (i, &lam) in projected.iter().enumerate() {
        diag[(i, i)] = Complex64::new(lam, 0.0);
    }
    let mat = hermitize(&(&vecs * diag * vecs.adjoint()));
    Ok(DensityMatrix::new_unchecked(mat))
}
