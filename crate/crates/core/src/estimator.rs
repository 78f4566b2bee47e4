//! Online state estimation: the sliding window of (operator, record)
//! pairs, the sampling system, and the constrained least-squares estimate.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::gell_mann_basis;
use crate::error::{Error, Result};
use crate::linalg::{vectorize, CMat, CVec};
use crate::state::{project_to_density, DensityMatrix, PSD_TOL};

/// One (operator snapshot, measured value) pair at a known step.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub step: u64,
    pub t: f64,
    pub operator: CMat,
    pub value: f64,
}

/// FIFO buffer of records, most recent last, bounded by its capacity.
#[derive(Debug, Clone)]
pub struct MeasurementWindow {
    capacity: usize,
    entries: VecDeque<MeasurementRecord>,
}

impl MeasurementWindow {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity < 1 {
            return Err(Error::Config {
                key: "window".into(),
                message: format!("must be >= 1, got {capacity}"),
            });
        }
        Ok(MeasurementWindow {
            capacity,
            entries: VecDeque::with_capacity(capacity + 1),
        })
    }

    /// Appends a record, evicting the oldest entry when over capacity.
    /// Steps must be strictly increasing.
    pub fn push_record(&mut self, r: MeasurementRecord) -> Result<()> {
        if let Some(last) = self.entries.back() {
            if r.step <= last.step {
                return Err(Error::Config {
                    key: "record.step".into(),
                    message: format!(
                        "steps must be strictly increasing, got {} after {}",
                        r.step, last.step
                    ),
                });
            }
        }
        self.entries.push_back(r);
        if self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &MeasurementRecord> {
        self.entries.iter()
    }
}

/// The linear system of one window: row l of `a` is vec(M_l^T)^T, so that
/// a * vec(rho) stacks the expectations Tr(M_l rho).
#[derive(Debug, Clone)]
pub struct SamplingSystem {
    pub a: CMat,
    pub y: DVector<f64>,
    /// Number of all-zero operator rows dropped before solving.
    pub dropped_zero_rows: usize,
    pub dim: usize,
}

/// Builds the sampling matrix and record vector from a window, dropping
/// rows whose operator has decayed to zero.
pub fn assemble_system(w: &MeasurementWindow) -> Result<SamplingSystem> {
    if w.is_empty() {
        return Err(Error::Config {
            key: "window".into(),
            message: "cannot assemble an empty window".into(),
        });
    }
    let dim = w.iter().next().unwrap().operator.nrows();
    let mut rows: Vec<CVec> = Vec::with_capacity(w.len());
    let mut values: Vec<f64> = Vec::with_capacity(w.len());
    let mut dropped = 0usize;
    for r in w.iter() {
        if r.operator.nrows() != dim || r.operator.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.operator.nrows(),
            });
        }
        if r.operator.norm() <= 1e-14 {
            dropped += 1;
            continue;
        }
        rows.push(vectorize(&r.operator.transpose()));
        values.push(r.value);
    }
    if rows.is_empty() {
        return Err(Error::Config {
            key: "window".into(),
            message: "all operator rows are zero".into(),
        });
    }
    let a = CMat::from_fn(rows.len(), dim * dim, |i, j| rows[i][j]);
    Ok(SamplingSystem {
        a,
        y: DVector::from_vec(values),
        dropped_zero_rows: dropped,
        dim,
    })
}

/// The real reduction of `a`/`y` over the Hermitian unit-trace affine
/// space: rho(theta) = I/d + sum_k theta_k B_k turns each row into
/// Tr(M rho) = Tr(M)/d + sum_k theta_k Tr(M B_k), all real.
struct ThetaSystem {
    g: DMatrix<f64>,
    b: DVector<f64>,
    basis: Vec<CMat>,
    dim: usize,
}

fn theta_system(a: &CMat, y: &DVector<f64>, dim: usize) -> ThetaSystem {
    let basis = gell_mann_basis(dim);
    let n = a.nrows();
    let k = basis.len();
    let basis_vecs: Vec<CVec> = basis.iter().map(vectorize).collect();
    let id_vec = vectorize(&CMat::identity(dim, dim));
    let mut g = DMatrix::zeros(n, k);
    let mut b = DVector::zeros(n);
    for i in 0..n {
        let row = a.row(i);
        for (j, bv) in basis_vecs.iter().enumerate() {
            // Row dot without conjugation: sum_l a[i][l] * vec(B_j)[l]
            // equals Tr(M_i B_j), real for Hermitian inputs.
            let dot: Complex64 = row.iter().zip(bv.iter()).map(|(x, y)| x * y).sum();
            g[(i, j)] = dot.re;
        }
        let tr: Complex64 = row.iter().zip(id_vec.iter()).map(|(x, y)| x * y).sum();
        b[i] = y[i] - tr.re / dim as f64;
    }
    ThetaSystem {
        g,
        b,
        basis,
        dim,
    }
}

impl ThetaSystem {
    fn rho_of(&self, theta: &DVector<f64>) -> CMat {
        let d = self.dim;
        let mut rho = CMat::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
        for (k, bk) in self.basis.iter().enumerate() {
            rho += bk * Complex64::new(theta[k], 0.0);
        }
        rho
    }

    fn theta_of(&self, rho: &CMat) -> DVector<f64> {
        DVector::from_fn(self.basis.len(), |k, _| {
            let tr: Complex64 = (&self.basis[k] * rho).diagonal().iter().sum();
            tr.re
        })
    }
}

/// Minimum-norm least-squares solution of the window system over the
/// Hermitian unit-trace affine space, returned as vec(rho); the PSD
/// constraint is not applied here.
pub fn ls_solve(a: &CMat, y: &DVector<f64>) -> Result<CVec> {
    let n2 = a.ncols();
    let dim = (n2 as f64).sqrt().round() as usize;
    if dim * dim != n2 || dim < 2 {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: n2,
        });
    }
    if a.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: y.len(),
        });
    }
    let ts = theta_system(a, y, dim);
    let theta = min_norm_solve(&ts.g, &ts.b);
    Ok(vectorize(&ts.rho_of(&theta)))
}

/// Min-norm LS via SVD with a conventional rank cutoff.
fn min_norm_solve(g: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = g.ncols();
    let svd = g.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return DVector::zeros(k);
    }
    let tol = f64::EPSILON * g.nrows().max(k) as f64 * smax;
    svd.solve(b, tol).expect("svd solve with u/v computed")
}

/// Maximum FISTA iterations for the constrained polish.
const MAX_POLISH_ITERS: usize = 400;

/// Constrained least-squares estimate over a window: minimizes
/// ||A vec(rho) - y||_2 over density matrices.
///
/// Pipeline: minimum-norm solve over the Hermitian unit-trace affine
/// space; if that minimizer is already PSD it is returned (projection is
/// then the identity). Otherwise a projected-gradient (FISTA) polish
/// iterates toward the constrained minimizer, and the result is projected
/// onto the state set. Deterministic; invariant under row reordering and
/// under common positive rescaling of (A, y).
pub fn estimate(w: &MeasurementWindow) -> Result<DensityMatrix> {
    let sys = assemble_system(w)?;
    estimate_from_system(&sys)
}

/// [`estimate`] on an already-assembled system.
pub fn estimate_from_system(sys: &SamplingSystem) -> Result<DensityMatrix> {
    let ts = theta_system(&sys.a, &sys.y, sys.dim);
    let svd = ts.g.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let theta_ls = if smax == 0.0 {
        DVector::zeros(ts.g.ncols())
    } else {
        let tol = f64::EPSILON * ts.g.nrows().max(ts.g.ncols()) as f64 * smax;
        svd.solve(&ts.b, tol).expect("svd solve with u/v computed")
    };

    let rho_ls = ts.rho_of(&theta_ls);
    let affine_feasible = crate::linalg::eigh(&rho_ls)
        .map(|(vals, _)| vals.first().copied().unwrap_or(0.0) >= -PSD_TOL)
        .unwrap_or(false);
    if affine_feasible || smax == 0.0 {
        return project_to_density(&rho_ls);
    }

    // FISTA over the density set; the coordinate projection is exact
    // because the basis is Frobenius-orthonormal.
    let lip = smax * smax;
    let project_theta = |theta: &DVector<f64>| -> Result<DVector<f64>> {
        let rho = project_to_density(&ts.rho_of(theta))?;
        Ok(ts.theta_of(rho.mat()))
    };
    let mut theta = project_theta(&theta_ls)?;
    let mut momentum = theta.clone();
    let mut t_k = 1.0f64;
    for _ in 0..MAX_POLISH_ITERS {
        let grad = ts.g.transpose() * (&ts.g * &momentum - &ts.b);
        let theta_next = project_theta(&(&momentum - grad / lip))?;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_k * t_k).sqrt());
        let delta = &theta_next - &theta;
        momentum = &theta_next + &delta * ((t_k - 1.0) / t_next);
        let done = delta.norm() <= 1e-13 * (1.0 + theta_next.norm());
        theta = theta_next;
        t_k = t_next;
        if done {
            break;
        }
    }
    project_to_density(&ts.rho_of(&theta))
}
