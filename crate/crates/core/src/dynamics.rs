//! Weak-measurement evolution: Kraus operator construction, stochastic
//! noise injection, the coupled state/operator single-step updates, and
//! the trajectory simulator.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::basis::{sigma_x, sigma_y, sigma_z};
use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::linalg::{check_square, hermitize, CMat};
use crate::state::{expectation, DensityMatrix};

/// Lindblad operator choice: a scaled Pauli axis or an explicit matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum LindbladBase {
    PauliX,
    PauliY,
    PauliZ,
    Custom(CMat),
}

impl LindbladBase {
    pub fn axis_name(&self) -> &'static str {
        match self {
            LindbladBase::PauliX => "x",
            LindbladBase::PauliY => "y",
            LindbladBase::PauliZ => "z",
            LindbladBase::Custom(_) => "custom",
        }
    }
}

/// L = xi * base.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    pub base: LindbladBase,
    pub xi: f64,
}

impl LindbladSpec {
    pub fn matrix(&self) -> CMat {
        let base = match &self.base {
            LindbladBase::PauliX => sigma_x(),
            LindbladBase::PauliY => sigma_y(),
            LindbladBase::PauliZ => sigma_z(),
            LindbladBase::Custom(m) => m.clone(),
        };
        base * Complex64::new(self.xi, 0.0)
    }
}

/// H = -(omega0/2) sigma_z - ux sigma_x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub omega0: f64,
    pub ux: f64,
}

/// Builds the qubit Hamiltonian from its spec.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> CMat {
    sigma_z() * Complex64::new(-spec.omega0 / 2.0, 0.0)
        + sigma_x() * Complex64::new(-spec.ux, 0.0)
}

/// Deterministic weak-measurement operator pair.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    pub m0: CMat,
    pub m1: CMat,
    pub dt: f64,
}

/// Noise-perturbed operator pair; both elements share one noise draw.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyPair {
    pub a0: CMat,
    pub a1: CMat,
}

/// M0 = I - (L^H L/2 + iH) dt, M1 = L sqrt(dt).
///
/// Completeness holds to second order:
/// ||M0^H M0 + M1^H M1 - I||_F <= ||L^H L/2 + iH||_F^2 dt^2.
pub fn build_weak_ops(h: &CMat, l: &CMat, dt: f64) -> Result<KrausPair> {
    let d = check_square(h)?;
    if check_square(l)? != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: l.nrows(),
        });
    }
    let k = l.adjoint() * l * Complex64::new(0.5, 0.0) + h * Complex64::i();
    let norm = k.norm() * dt;
    if norm >= 1.0 || norm.is_nan() {
        return Err(Error::StepTooLarge { norm });
    }
    let m0 = CMat::identity(d, d) - k * Complex64::new(dt, 0.0);
    let m1 = l * Complex64::new(dt.sqrt(), 0.0);
    Ok(KrausPair { m0, m1, dt })
}

impl KrausPair {
    pub fn dim(&self) -> usize {
        self.m0.nrows()
    }

    /// ||M0^H M0 + M1^H M1 - I||_F, the completeness defect.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        (self.m0.adjoint() * &self.m0 + self.m1.adjoint() * &self.m1 - CMat::identity(d, d))
            .norm()
    }

    /// Per-step trace growth factor c = Tr(M0^H M0 + M1^H M1)/d.
    ///
    /// The pair is complete only to O(dt^2); applying the channel scales
    /// Tr(rho) by exactly c whenever M0^H M0 + M1^H M1 is a multiple of
    /// the identity (true for a qubit with a Pauli Lindblad operator),
    /// and by approximately c otherwise.
    pub fn trace_growth(&self) -> f64 {
        let s = self.m0.adjoint() * &self.m0 + self.m1.adjoint() * &self.m1;
        let tr: Complex64 = s.diagonal().iter().sum();
        tr.re / self.dim() as f64
    }

    /// The channel X -> M0 X M0^H + M1 X M1^H as a d^2 x d^2 matrix acting
    /// on column-major vectorizations: conj(M0) (x) M0 + conj(M1) (x) M1.
    pub fn channel_superoperator(&self) -> CMat {
        self.m0.conjugate().kronecker(&self.m0) + self.m1.conjugate().kronecker(&self.m1)
    }
}

/// How the per-step noise increment is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// One Normal(0, dt) scalar per step; sigma is not used.
    ScalarWiener,
    /// d x d matrix of independent Normal(0, sigma^2) entries per step.
    MatrixRandn,
}

impl NoiseMode {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseMode::ScalarWiener => "scalar-wiener",
            NoiseMode::MatrixRandn => "matrix-randn",
        }
    }
}

/// Noise configuration: mode, amplitude sigma, measurement efficiency eta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub mode: NoiseMode,
    pub sigma: f64,
    pub eta: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if self.sigma < 0.0 {
            return Err(Error::Config {
                key: "sigma".into(),
                message: format!("must be >= 0, got {}", self.sigma),
            });
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config {
                key: "eta".into(),
                message: format!("must be in (0, 1], got {}", self.eta),
            });
        }
        Ok(())
    }
}

/// One noise increment: a scalar Wiener step or a matrix of Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseDraw {
    Scalar(f64),
    Matrix(DMatrix<f64>),
}

/// Draws one noise increment. Identical seeds yield identical sequences.
pub fn sample_noise<R: Rng>(rng: &mut R, model: &NoiseModel, dt: f64, d: usize) -> NoiseDraw {
    match model.mode {
        NoiseMode::ScalarWiener => {
            let g: f64 = rng.sample(StandardNormal);
            NoiseDraw::Scalar(g * dt.sqrt())
        }
        NoiseMode::MatrixRandn => {
            let m = DMatrix::from_fn(d, d, |_, _| {
                let g: f64 = rng.sample(StandardNormal);
                model.sigma * g
            });
            NoiseDraw::Matrix(m)
        }
    }
}

/// A_i = M_i + sqrt(eta) L dW, the same draw applied to both elements.
/// Matrix draws enter through the matrix product L * dW.
pub fn noisy_ops(kp: &KrausPair, l: &CMat, eta: f64, dw: &NoiseDraw) -> NoisyPair {
    let perturbation = match dw {
        NoiseDraw::Scalar(w) => l * Complex64::new(eta.sqrt() * w, 0.0),
        NoiseDraw::Matrix(m) => {
            let mc = m.map(|v| Complex64::new(v, 0.0));
            (l * mc) * Complex64::new(eta.sqrt(), 0.0)
        }
    };
    NoisyPair {
        a0: &kp.m0 + &perturbation,
        a1: &kp.m1 + &perturbation,
    }
}

/// rho' = A0 rho A0^H + A1 rho A1^H, renormalized to unit trace.
///
/// PSD is structural (each term is X rho X^H); Hermiticity is repaired to
/// machine precision.
pub fn step_state(rho: &DensityMatrix, np: &NoisyPair) -> Result<DensityMatrix> {
    let next = &np.a0 * rho.mat() * np.a0.adjoint() + &np.a1 * rho.mat() * np.a1.adjoint();
    let tr: Complex64 = next.diagonal().iter().sum();
    if tr.re <= 1e-12 {
        return Err(Error::DegenerateStep { trace: tr.re });
    }
    let normalized = hermitize(&(next * Complex64::new(1.0 / tr.re, 0.0)));
    Ok(DensityMatrix::new_unchecked(normalized))
}

/// Deterministic Heisenberg-picture update with the noise-free pair:
/// M' = M0^H M M0 + M1^H M M1, Hermitized against floating drift.
pub fn step_measurement_op(m: &CMat, kp: &KrausPair) -> CMat {
    hermitize(&(kp.m0.adjoint() * m * &kp.m0 + kp.m1.adjoint() * m * &kp.m1))
}

/// One recorded instant of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub step: u64,
    pub t: f64,
    /// The (possibly noisy) system state rho(t).
    pub rho: DensityMatrix,
    /// Estimation operator snapshot: the Heisenberg-evolved initial
    /// observable, trace-renormalized by the channel growth factor so that
    /// Tr(operator * rho(0)) equals the recorded value for noise-free
    /// evolution.
    pub operator: CMat,
    /// Measurement record: the expectation of the fixed initial observable
    /// on the current state, Tr(M(0) rho(t)), plus optional readout noise.
    pub y: f64,
}

/// Full simulation output: N + 1 points, step 0 through N.
pub type Trajectory = Vec<TrajectoryPoint>;

/// Runs the stochastic weak-measurement recursion.
///
/// Per step: record y(t) before evolving, then advance the operator
/// deterministically and the state with a fresh noise draw. The record
/// pairs with the state and operator snapshot of the same instant.
pub fn simulate(config: &SimulationConfig) -> Result<Trajectory> {
    config.validate()?;
    let h = build_hamiltonian(&config.hamiltonian());
    let l = config.lindblad().matrix();
    let kp = build_weak_ops(&h, &l, config.dt)?;
    let growth = kp.trace_growth();
    let noise = config.noise_model();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rho = config.rho0.clone();
    let m_init = config.initial_op.clone();
    let mut op = m_init.clone();
    let d = rho.dim();

    let mut trajectory = Vec::with_capacity(config.steps as usize + 1);
    for step in 0..=config.steps {
        let mut y = expectation(&m_init, &rho).map_err(|e| e.at_step(step))?;
        if config.readout_sigma > 0.0 {
            let g: f64 = rng.sample(StandardNormal);
            y += config.readout_sigma * g;
        }
        trajectory.push(TrajectoryPoint {
            step,
            t: step as f64 * config.dt,
            rho: rho.clone(),
            operator: op.clone(),
            y,
        });
        if step < config.steps {
            op = step_measurement_op(&op, &kp) * Complex64::new(1.0 / growth, 0.0);
            let dw = sample_noise(&mut rng, &noise, config.dt, d);
            let np = noisy_ops(&kp, &l, config.eta, &dw);
            rho = step_state(&rho, &np).map_err(|e| e.at_step(step + 1))?;
        }
    }
    Ok(trajectory)
}
