//! Output serialization: CSV and JSON renderings of run results and
//! noise-sweep tables, plus file writing.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::harness::{RunResult, RunRow, RunSummary, SweepRow};
use crate::linalg::CMat;

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config {
                key: "format".into(),
                message: format!("must be csv or json, got `{other}`"),
            }),
        }
    }
}

/// Fixed column order of the run CSV.
pub const CSV_HEADER: &str = "step,t,y,fidelity,tx,ty,tz,ex,ey,ez";

/// Serializes a float with 12 significant digits.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Renders the per-step rows as CSV with the fixed header.
pub fn render_csv(result: &RunResult) -> String {
    let mut out = String::with_capacity(64 * (result.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.step,
            fmt12(r.t),
            fmt12(r.y),
            fmt12(r.fidelity),
            fmt12(r.tx),
            fmt12(r.ty),
            fmt12(r.tz),
            fmt12(r.ex),
            fmt12(r.ey),
            fmt12(r.ez),
        );
    }
    out
}

/// Renders a noise-sweep table as CSV.
pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("sigma,mean_fidelity,std_fidelity\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt12(r.sigma),
            fmt12(r.mean_fidelity),
            fmt12(r.std_fidelity)
        );
    }
    out
}

fn json_complex_matrix(m: &CMat) -> String {
    let entry = |z: &Complex64| format!("[{},{}]", fmt12(z.re), fmt12(z.im));
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cols: Vec<String> = (0..m.ncols()).map(|j| entry(&m[(i, j)])).collect();
            format!("[{}]", cols.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn json_config(cfg: &SimulationConfig) -> String {
    format!(
        concat!(
            "{{\"case\":{},\"dim\":{},\"dt\":{},\"steps\":{},\"xi\":{},\"eta\":{},",
            "\"noise_mode\":\"{}\",\"sigma\":{},\"ux\":{},\"omega0\":{},",
            "\"lindblad\":\"{}\",\"window\":{},\"seed\":{},\"readout_sigma\":{},",
            "\"rho0\":{},\"initial_op\":{}}}"
        ),
        cfg.case,
        cfg.dim,
        fmt12(cfg.dt),
        cfg.steps,
        fmt12(cfg.xi),
        fmt12(cfg.eta),
        cfg.noise_mode.name(),
        fmt12(cfg.sigma),
        fmt12(cfg.ux),
        fmt12(cfg.omega0),
        cfg.lindblad.axis_name(),
        cfg.window,
        cfg.seed,
        fmt12(cfg.readout_sigma),
        json_complex_matrix(cfg.rho0.mat()),
        json_complex_matrix(&cfg.initial_op),
    )
}

fn json_row(r: &RunRow) -> String {
    format!(
        concat!(
            "{{\"step\":{},\"t\":{},\"y\":{},\"fidelity\":{},",
            "\"tx\":{},\"ty\":{},\"tz\":{},\"ex\":{},\"ey\":{},\"ez\":{}}}"
        ),
        r.step,
        fmt12(r.t),
        fmt12(r.y),
        fmt12(r.fidelity),
        fmt12(r.tx),
        fmt12(r.ty),
        fmt12(r.tz),
        fmt12(r.ex),
        fmt12(r.ey),
        fmt12(r.ez),
    )
}

fn json_summary(s: &RunSummary) -> String {
    format!(
        concat!(
            "{{\"seed\":{},\"summary_from_step\":{},\"mean_fidelity\":{},",
            "\"min_fidelity\":{},\"transient_mean_fidelity\":{},\"dropped_zero_rows\":{}}}"
        ),
        s.seed,
        s.summary_from_step,
        fmt12(s.mean_fidelity),
        fmt12(s.min_fidelity),
        fmt12(s.transient_mean_fidelity),
        s.dropped_zero_rows,
    )
}

/// Renders the full result as JSON with fields `config`, `rows`, `summary`.
pub fn render_json(result: &RunResult) -> String {
    let rows: Vec<String> = result.rows.iter().map(json_row).collect();
    format!(
        "{{\"config\":{},\"rows\":[{}],\"summary\":{}}}\n",
        json_config(&result.config),
        rows.join(","),
        json_summary(&result.summary),
    )
}

/// Renders a result in the requested format.
pub fn render(result: &RunResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(result),
        OutputFormat::Json => render_json(result),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a run result to `path` in the requested format.
pub fn emit(result: &RunResult, format: OutputFormat, path: &Path) -> Result<()> {
    write_file(path, &render(result, format))
}

/// Writes a noise-sweep table to `path` as CSV.
pub fn emit_sweep(rows: &[SweepRow], path: &Path) -> Result<()> {
    write_file(path, &render_sweep_csv(rows))
}
