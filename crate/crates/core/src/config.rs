//! Experiment configuration: defaults, the two preset cases, range
//! validation, and the flat key=value config-file format.

use num_complex::Complex64;

use crate::basis::sigma_z;
use crate::dynamics::{HamiltonianSpec, LindbladBase, LindbladSpec, NoiseMode, NoiseModel};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::state::DensityMatrix;

/// All parameters of one simulation/estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Hilbert space dimension.
    pub dim: usize,
    /// Time step (arbitrary units).
    pub dt: f64,
    /// Number of evolution steps N; the trajectory has N + 1 points.
    pub steps: u64,
    /// Lindblad coupling strength xi1.
    pub xi: f64,
    /// Measurement efficiency eta in (0, 1].
    pub eta: f64,
    /// Noise mode (matrix-randn or scalar-wiener).
    pub noise_mode: NoiseMode,
    /// Noise amplitude sigma (matrix mode); >= 0.
    pub sigma: f64,
    /// Control amplitude u_x >= 0.
    pub ux: f64,
    /// Free Hamiltonian eigenfrequency omega0.
    pub omega0: f64,
    /// Lindblad operator base axis.
    pub lindblad: LindbladBase,
    /// Initial state rho(0).
    pub rho0: DensityMatrix,
    /// Initial measurement operator M(0).
    pub initial_op: CMat,
    /// Estimation window capacity m >= 1.
    pub window: usize,
    /// RNG seed.
    pub seed: u64,
    /// Optional additive Gaussian readout noise on the record (std dev);
    /// 0 disables it.
    pub readout_sigma: f64,
    /// Which case preset produced this config (1 or 2), echoed in output.
    pub case: u8,
}

/// The experiment's initial state [[3/4, -sqrt(3)/4], [-sqrt(3)/4, 1/4]].
pub fn default_rho0() -> DensityMatrix {
    let r = 3.0_f64.sqrt() / 4.0;
    let c = |re: f64| Complex64::new(re, 0.0);
    DensityMatrix::new(CMat::from_row_slice(
        2,
        2,
        &[c(0.75), c(-r), c(-r), c(0.25)],
    ))
    .expect("default initial state is a valid density matrix")
}

impl SimulationConfig {
    /// Case 1: free evolution (u_x = 0) with L = xi1 sigma_x.
    pub fn case1() -> Self {
        SimulationConfig {
            ux: 0.0,
            lindblad: LindbladBase::PauliX,
            case: 1,
            ..Self::case2()
        }
    }

    /// Case 2: controlled evolution, u_x = 2, L = xi1 sigma_z. These are
    /// the experiment defaults.
    pub fn case2() -> Self {
        SimulationConfig {
            dim: 2,
            dt: 0.1,
            steps: 200,
            xi: 0.3,
            eta: 0.5,
            noise_mode: NoiseMode::MatrixRandn,
            sigma: 0.02,
            ux: 2.0,
            omega0: 1.0,
            lindblad: LindbladBase::PauliZ,
            rho0: default_rho0(),
            initial_op: sigma_z(),
            window: 200,
            seed: 0,
            readout_sigma: 0.0,
            case: 2,
        }
    }

    pub fn for_case(case: u8) -> Result<Self> {
        match case {
            1 => Ok(Self::case1()),
            2 => Ok(Self::case2()),
            other => Err(Error::Config {
                key: "case".into(),
                message: format!("must be 1 or 2, got {other}"),
            }),
        }
    }

    pub fn hamiltonian(&self) -> HamiltonianSpec {
        HamiltonianSpec {
            omega0: self.omega0,
            ux: self.ux,
        }
    }

    pub fn lindblad(&self) -> LindbladSpec {
        LindbladSpec {
            base: self.lindblad.clone(),
            xi: self.xi,
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel {
            mode: self.noise_mode,
            sigma: self.sigma,
            eta: self.eta,
        }
    }

    /// Checks every numeric range and the initial state/operator shapes.
    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, message: String| -> Result<()> {
            Err(Error::Config {
                key: key.into(),
                message,
            })
        };
        if self.dim < 2 {
            return fail("dim", format!("must be >= 2, got {}", self.dim));
        }
        if self.dt <= 0.0 || self.dt.is_nan() {
            return fail("dt", format!("must be > 0, got {}", self.dt));
        }
        if self.xi <= 0.0 || self.xi.is_nan() {
            return fail("xi", format!("must be > 0, got {}", self.xi));
        }
        if self.ux < 0.0 {
            return fail("ux", format!("must be >= 0, got {}", self.ux));
        }
        if self.window < 1 {
            return fail("window", format!("must be >= 1, got {}", self.window));
        }
        if self.readout_sigma < 0.0 {
            return fail(
                "readout_sigma",
                format!("must be >= 0, got {}", self.readout_sigma),
            );
        }
        self.noise_model().validate()?;
        self.rho0.validate()?;
        if self.rho0.dim() != self.dim {
            return fail(
                "rho0",
                format!("dimension {} != dim {}", self.rho0.dim(), self.dim),
            );
        }
        if self.initial_op.nrows() != self.dim || self.initial_op.ncols() != self.dim {
            return fail(
                "initial_op",
                format!(
                    "shape {}x{} != dim {}",
                    self.initial_op.nrows(),
                    self.initial_op.ncols(),
                    self.dim
                ),
            );
        }
        Ok(())
    }
}

/// Optional overrides parsed from a config file or CLI flags; `None`
/// leaves the preset default in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub case: Option<u8>,
    pub seed: Option<u64>,
    pub steps: Option<u64>,
    pub sigma: Option<f64>,
    pub eta: Option<f64>,
    pub ux: Option<f64>,
    pub xi: Option<f64>,
    pub lindblad: Option<LindbladBase>,
    pub window: Option<usize>,
    pub out: Option<String>,
    pub format: Option<String>,
}

impl ConfigOverrides {
    /// Later (CLI) overrides win over earlier (file) ones.
    pub fn merged_under(mut self, over: ConfigOverrides) -> ConfigOverrides {
        macro_rules! take {
            ($field:ident) => {
                if over.$field.is_some() {
                    self.$field = over.$field;
                }
            };
        }
        take!(case);
        take!(seed);
        take!(steps);
        take!(sigma);
        take!(eta);
        take!(ux);
        take!(xi);
        take!(lindblad);
        take!(window);
        take!(out);
        take!(format);
        self
    }

    /// Builds the full config: case preset plus overrides, validated.
    pub fn into_config(self) -> Result<SimulationConfig> {
        let case = self.case.ok_or_else(|| Error::Config {
            key: "case".into(),
            message: "missing; pass --case 1 or --case 2 (or set case= in the config file)"
                .into(),
        })?;
        let mut cfg = SimulationConfig::for_case(case)?;
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.ux {
            cfg.ux = v;
        }
        if let Some(v) = self.xi {
            cfg.xi = v;
        }
        if let Some(v) = self.lindblad {
            cfg.lindblad = v;
        }
        if let Some(v) = self.window {
            cfg.window = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses a Lindblad axis name.
pub fn parse_lindblad_axis(s: &str) -> Result<LindbladBase> {
    match s {
        "x" => Ok(LindbladBase::PauliX),
        "y" => Ok(LindbladBase::PauliY),
        "z" => Ok(LindbladBase::PauliZ),
        other => Err(Error::Config {
            key: "lindblad".into(),
            message: format!("must be one of x, y, z; got `{other}`"),
        }),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| Error::Config {
        key: key.into(),
        message: format!("cannot parse `{value}`"),
    })
}

/// Parses the flat key=value config-file format. Keys mirror the CLI
/// flags; `#` starts a comment; unknown keys are errors.
pub fn parse_config_file(text: &str) -> Result<ConfigOverrides> {
    let mut over = ConfigOverrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            key: format!("line {}", lineno + 1),
            message: format!("expected key=value, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "case" => over.case = Some(parse_value(key, value)?),
            "seed" => over.seed = Some(parse_value(key, value)?),
            "steps" => over.steps = Some(parse_value(key, value)?),
            "sigma" => over.sigma = Some(parse_value(key, value)?),
            "eta" => over.eta = Some(parse_value(key, value)?),
            "ux" => over.ux = Some(parse_value(key, value)?),
            "xi" => over.xi = Some(parse_value(key, value)?),
            "lindblad" => over.lindblad = Some(parse_lindblad_axis(value)?),
            "window" => over.window = Some(parse_value(key, value)?),
            "out" => over.out = Some(value.to_string()),
            "format" => over.format = Some(value.to_string()),
            other => {
                return Err(Error::Config {
                    key: other.into(),
                    message: "unknown key".into(),
                })
            }
        }
    }
    Ok(over)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_presets() {
        let c1 = SimulationConfig::case1();
        assert_eq!(c1.ux, 0.0);
        assert_eq!(c1.lindblad, LindbladBase::PauliX);
        let c2 = SimulationConfig::case2();
        assert_eq!(c2.ux, 2.0);
        assert_eq!(c2.lindblad, LindbladBase::PauliZ);
        assert_eq!(c2.sigma, 0.02);
        assert_eq!(c2.eta, 0.5);
        assert_eq!(c2.dt, 0.1);
        assert_eq!(c2.steps, 200);
        assert_eq!(c2.window, 200);
        c1.validate().unwrap();
        c2.validate().unwrap();
    }

    #[test]
    fn range_errors_name_key_and_bound() {
        let mut cfg = SimulationConfig::case2();
        cfg.sigma = -1.0;
        let err = cfg.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sigma") && msg.contains(">= 0"), "{msg}");

        let mut cfg = SimulationConfig::case2();
        cfg.eta = 0.0;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("eta") && msg.contains("(0, 1]"), "{msg}");
    }

    #[test]
    fn file_parsing_and_merge() {
        let over = parse_config_file(
            "# comment\ncase = 2\nseed= 7\nsigma =0.04\nlindblad = x\nwindow=40\n",
        )
        .unwrap();
        assert_eq!(over.case, Some(2));
        assert_eq!(over.seed, Some(7));
        assert_eq!(over.sigma, Some(0.04));
        assert_eq!(over.lindblad, Some(LindbladBase::PauliX));

        let cli = ConfigOverrides {
            sigma: Some(0.0),
            ..Default::default()
        };
        let cfg = over.merged_under(cli).into_config().unwrap();
        assert_eq!(cfg.sigma, 0.0);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.window, 40);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config_file("speed=3\n").unwrap_err();
        assert!(err.to_string().contains("speed"));
        assert!(err.is_config());
    }

    #[test]
    fn missing_case_rejected() {
        let err = ConfigOverrides::default().into_config().unwrap_err();
        assert!(err.to_string().contains("case"));
    }

    #[test]
    fn override_ranges_checked_on_build() {
        let over = parse_config_file("case=2\nsigma=-0.5\n").unwrap();
        let err = over.into_config().unwrap_err();
        assert!(err.to_string().contains("sigma"));
    }
}
