//! Experiment orchestration: runs a configured case end to end (simulate,
//! estimate online, score), and sweeps noise levels over seed ensembles.

use crate::config::SimulationConfig;
use crate::dynamics::{build_hamiltonian, build_weak_ops, simulate};
use crate::error::{Error, Result};
use crate::estimator::{assemble_system, estimate_from_system, MeasurementRecord, MeasurementWindow};
use crate::linalg::{devectorize, vectorize, CMat};
use crate::state::{bloch_from_density, fidelity, project_to_density};

/// First step included in the steady-state summary statistics; earlier
/// steps are the reported transient.
pub const SUMMARY_FROM_STEP: u64 = 3;

/// One output row: the measurement record, the tracking fidelity, and the
/// true/estimated Bloch components at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub step: u64,
    pub t: f64,
    pub y: f64,
    pub fidelity: f64,
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub ex: f64,
    pub ey: f64,
    pub ez: f64,
}

/// Aggregate statistics of one run. Steady-state figures cover steps at
/// or after [`SUMMARY_FROM_STEP`]; the transient mean covers the steps
/// before that. Runs shorter than the cutoff fall back to all rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub summary_from_step: u64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub transient_mean_fidelity: f64,
    /// Zero-operator rows dropped when assembling the final window.
    pub dropped_zero_rows: usize,
}

/// Full result of one case run: the echoed configuration, one row per
/// step (N + 1 rows), and summary statistics.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: SimulationConfig,
    pub rows: Vec<RunRow>,
    pub summary: RunSummary,
}

/// One line of a noise sweep: ensemble mean and population standard
/// deviation of the per-run mean fidelity at one noise amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
}

/// Runs one configured case: simulates the trajectory, estimates the
/// state online from the sliding window at every step, and scores each
/// estimate against the true state.
///
/// The window fit recovers the reference state the records are affine in
/// (the initial state, since each stored operator is the renormalized
/// Heisenberg image of the initial one); the estimate at step l is that
/// fit pushed forward l steps through the deterministic channel and
/// projected back onto the state set. Deterministic given the seed.
pub fn run_case(config: &SimulationConfig) -> Result<RunResult> {
    config.validate()?;
    if config.dim != 2 {
        return Err(Error::Config {
            key: "dim".into(),
            message: format!("case runs report Bloch components and require dim = 2, got {}", config.dim),
        });
    }

    let trajectory = simulate(config)?;
    let h = build_hamiltonian(&config.hamiltonian());
    let kp = build_weak_ops(&h, &config.lindblad().matrix(), config.dt)?;
    // Per-step forward map of the normalized state: vec(rho') = (S/c) vec(rho).
    let step_map = kp.channel_superoperator() / num_complex::Complex64::new(kp.trace_growth(), 0.0);
    let d2 = config.dim * config.dim;
    let mut forward = CMat::identity(d2, d2);

    let mut window = MeasurementWindow::new(config.window)?;
    let mut rows = Vec::with_capacity(trajectory.len());
    let mut dropped_zero_rows = 0usize;
    for point in &trajectory {
        window.push_record(MeasurementRecord {
            step: point.step,
            t: point.t,
            operator: point.operator.clone(),
            value: point.y,
        })?;
        let sys = assemble_system(&window).map_err(|e| e.at_step(point.step))?;
        dropped_zero_rows = sys.dropped_zero_rows;
        let reference = estimate_from_system(&sys).map_err(|e| e.at_step(point.step))?;
        let pushed = devectorize(&(&forward * vectorize(reference.mat())))?;
        let rho_hat = project_to_density(&pushed).map_err(|e| e.at_step(point.step))?;

        let f = fidelity(&rho_hat, &point.rho).map_err(|e| e.at_step(point.step))?;
        let tb = bloch_from_density(&point.rho)?;
        let eb = bloch_from_density(&rho_hat)?;
        rows.push(RunRow {
            step: point.step,
            t: point.t,
            y: point.y,
            fidelity: f,
            tx: tb.x,
            ty: tb.y,
            tz: tb.z,
            ex: eb.x,
            ey: eb.y,
            ez: eb.z,
        });
        forward = &step_map * forward;
    }

    let summary = summarize(&rows, config.seed, dropped_zero_rows);
    Ok(RunResult {
        config: config.clone(),
        rows,
        summary,
    })
}

fn summarize(rows: &[RunRow], seed: u64, dropped_zero_rows: usize) -> RunSummary {
    let steady: Vec<f64> = rows
        .iter()
        .filter(|r| r.step >= SUMMARY_FROM_STEP)
        .map(|r| r.fidelity)
        .collect();
    let all: Vec<f64> = rows.iter().map(|r| r.fidelity).collect();
    let pool = if steady.is_empty() { &all } else { &steady };
    let mean = pool.iter().sum::<f64>() / pool.len() as f64;
    let min = pool.iter().cloned().fold(f64::INFINITY, f64::min);
    let transient: Vec<f64> = rows
        .iter()
        .filter(|r| r.step < SUMMARY_FROM_STEP)
        .map(|r| r.fidelity)
        .collect();
    let transient_mean = if transient.is_empty() {
        mean
    } else {
        transient.iter().sum::<f64>() / transient.len() as f64
    };
    RunSummary {
        seed,
        summary_from_step: SUMMARY_FROM_STEP,
        mean_fidelity: mean,
        min_fidelity: min,
        transient_mean_fidelity: transient_mean,
        dropped_zero_rows,
    }
}

/// Runs `base` once per (sigma, seed) pair and aggregates the per-run
/// mean fidelity at each noise amplitude: ensemble mean and population
/// standard deviation.
pub fn noise_sweep(
    base: &SimulationConfig,
    sigmas: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    if sigmas.is_empty() {
        return Err(Error::Config {
            key: "sigmas".into(),
            message: "noise sweep needs at least one sigma".into(),
        });
    }
    if seeds.is_empty() {
        return Err(Error::Config {
            key: "seeds".into(),
            message: "noise sweep needs at least one seed".into(),
        });
    }
    let mut out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let mut means = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let mut cfg = base.clone();
            cfg.sigma = sigma;
            cfg.seed = seed;
            means.push(run_case(&cfg)?.summary.mean_fidelity);
        }
        let mean = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / means.len() as f64;
        out.push(SweepRow {
            sigma,
            mean_fidelity: mean,
            std_fidelity: var.sqrt(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{density_from_bloch, BlochVector, DensityMatrix};

    fn short_case2(steps: u64, sigma: f64, seed: u64) -> SimulationConfig {
        let mut cfg = SimulationConfig::case2();
        cfg.steps = steps;
        cfg.sigma = sigma;
        cfg.seed = seed;
        cfg
    }

    #[test]
    fn zero_step_run_has_one_row() {
        let cfg = short_case2(0, 0.0, 1);
        let result = run_case(&cfg).unwrap();
        assert_eq!(result.rows.len(), 1);
        let f = result.rows[0].fidelity;
        assert!((0.0..=1.0).contains(&f));
        // No steady-state rows exist, so the summary falls back to all rows.
        assert_eq!(result.summary.mean_fidelity, f);
    }

    #[test]
    fn row_count_is_steps_plus_one() {
        let cfg = short_case2(40, 0.02, 7);
        let result = run_case(&cfg).unwrap();
        assert_eq!(result.rows.len(), 41);
        for r in &result.rows {
            assert!((0.0..=1.0).contains(&r.fidelity), "step {}", r.step);
        }
    }

    #[test]
    fn noise_free_tracking_is_exact_after_transient() {
        let cfg = short_case2(60, 0.0, 3);
        let result = run_case(&cfg).unwrap();
        for r in result.rows.iter().filter(|r| r.step >= 4) {
            assert!(r.fidelity >= 0.999, "step {} fidelity {}", r.step, r.fidelity);
        }
    }

    #[test]
    fn reruns_are_bit_identical() {
        let cfg = short_case2(30, 0.02, 11);
        let a = run_case(&cfg).unwrap();
        let b = run_case(&cfg).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (ra, rb) in a.rows.iter().zip(b.rows.iter()) {
            assert_eq!(ra.fidelity.to_bits(), rb.fidelity.to_bits());
            assert_eq!(ra.y.to_bits(), rb.y.to_bits());
            assert_eq!(ra.ez.to_bits(), rb.ez.to_bits());
        }
    }

    #[test]
    fn seeds_change_noisy_output() {
        let a = run_case(&short_case2(30, 0.02, 1)).unwrap();
        let b = run_case(&short_case2(30, 0.02, 2)).unwrap();
        assert!(a.rows.iter().zip(b.rows.iter()).any(|(x, y)| x.y != y.y));
    }

    #[test]
    fn fidelity_column_matches_bloch_reconstruction() {
        let cfg = short_case2(25, 0.02, 5);
        let result = run_case(&cfg).unwrap();
        for r in &result.rows {
            let rt = density_from_bloch(&BlochVector { x: r.tx, y: r.ty, z: r.tz }).unwrap();
            let re = density_from_bloch(&BlochVector { x: r.ex, y: r.ey, z: r.ez }).unwrap();
            let f = crate::state::fidelity(
                &DensityMatrix::new(re.mat().clone()).unwrap(),
                &DensityMatrix::new(rt.mat().clone()).unwrap(),
            )
            .unwrap();
            assert!((f - r.fidelity).abs() < 1e-6, "step {}", r.step);
        }
    }

    #[test]
    fn rejects_non_qubit_dimension() {
        let mut cfg = SimulationConfig::case2();
        cfg.dim = 3;
        cfg.rho0 = DensityMatrix::maximally_mixed(3);
        cfg.initial_op = crate::basis::identity(3);
        assert!(matches!(run_case(&cfg), Err(Error::Config { .. })));
    }

    #[test]
    fn sweep_single_cell_matches_run_case() {
        let base = short_case2(30, 0.02, 0);
        let rows = noise_sweep(&base, &[0.02], &[9]).unwrap();
        let mut cfg = base.clone();
        cfg.seed = 9;
        let direct = run_case(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_fidelity, direct.summary.mean_fidelity);
        assert_eq!(rows[0].std_fidelity, 0.0);
    }

    #[test]
    fn sweep_noise_free_has_zero_std() {
        let base = short_case2(20, 0.0, 0);
        let rows = noise_sweep(&base, &[0.0], &[1, 2, 3, 4]).unwrap();
        assert_eq!(rows[0].std_fidelity, 0.0);
    }

    #[test]
    fn sweep_rejects_empty_inputs() {
        let base = short_case2(10, 0.0, 0);
        assert!(noise_sweep(&base, &[], &[1]).is_err());
        assert!(noise_sweep(&base, &[0.0], &[]).is_err());
    }
}
