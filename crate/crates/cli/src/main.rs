//! Command-line driver: single case runs, noise sweeps, and the two
//! figure-reproduction presets.
//!
//! Exit codes: 0 on success, 1 for configuration/usage errors, 2 for
//! numerical or i/o failures at run time.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weakmeas::config::{
    parse_config_file, parse_lindblad_axis, ConfigOverrides, SimulationConfig,
};
use weakmeas::emit::{emit, emit_sweep, render, render_sweep_csv, OutputFormat};
use weakmeas::error::{Error, Result};
use weakmeas::harness::{noise_sweep, run_case};

#[derive(Parser)]
#[command(
    name = "weakmeas",
    version,
    about = "Continuous weak-measurement simulator with online quantum state estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and emit per-step rows (CSV or JSON)
    Run(RunArgs),
    /// Sweep noise amplitudes over a seed ensemble
    Sweep(SweepArgs),
    /// Emit the state-trajectory data files for both cases
    Figure3(FigureArgs),
    /// Emit the fidelity-curve data files and the noise-sweep table
    Figure4(Figure4Args),
}

#[derive(Args)]
struct RunArgs {
    /// Case preset: 1 (free evolution) or 2 (controlled evolution)
    #[arg(long)]
    case: Option<u8>,
    /// Config file with flat key=value lines; CLI flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Number of evolution steps N (the output has N + 1 rows)
    #[arg(long)]
    steps: Option<u64>,
    /// Noise amplitude
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Measurement efficiency in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Control amplitude u_x
    #[arg(long, allow_negative_numbers = true)]
    ux: Option<f64>,
    /// Lindblad coupling strength xi1
    #[arg(long, allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Lindblad axis: x, y, or z
    #[arg(long)]
    lindblad: Option<String>,
    /// Estimation window capacity m
    #[arg(long)]
    window: Option<usize>,
    /// Output path; writes to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Base case preset for every run of the sweep
    #[arg(long, default_value_t = 2)]
    case: u8,
    /// Comma-separated noise amplitudes
    #[arg(long, default_value = "0,0.02,0.04")]
    sigmas: String,
    /// Seeds: inclusive range `1..20` or comma-separated list
    #[arg(long, default_value = "1..20")]
    seeds: String,
    /// Steps per run (defaults to the case preset)
    #[arg(long)]
    steps: Option<u64>,
    /// Window capacity per run (defaults to the case preset)
    #[arg(long)]
    window: Option<usize>,
    /// Output path; writes to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    /// RNG seed for the runs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Steps per run (defaults to the case preset)
    #[arg(long)]
    steps: Option<u64>,
    /// Directory for the emitted files
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Figure4Args {
    /// RNG seed for the per-step fidelity runs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Steps per run (defaults to the case preset)
    #[arg(long)]
    steps: Option<u64>,
    /// Comma-separated noise amplitudes for the sweep panel
    #[arg(long, default_value = "0,0.02,0.04")]
    sigmas: String,
    /// Sweep seeds: inclusive range `1..20` or comma-separated list
    #[arg(long, default_value = "1..20")]
    seeds: String,
    /// Directory for the emitted files
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Figure3(args) => cmd_figure3(args),
        Command::Figure4(args) => cmd_figure4(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}

fn read_config_file(path: &Path) -> Result<ConfigOverrides> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_file(&text)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let file_overrides = match &args.config {
        Some(path) => read_config_file(path)?,
        None => ConfigOverrides::default(),
    };
    let cli_overrides = ConfigOverrides {
        case: args.case,
        seed: args.seed,
        steps: args.steps,
        sigma: args.sigma,
        eta: args.eta,
        ux: args.ux,
        xi: args.xi,
        lindblad: args
            .lindblad
            .as_deref()
            .map(parse_lindblad_axis)
            .transpose()?,
        window: args.window,
        out: args.out.as_ref().map(|p| p.display().to_string()),
        format: args.format.clone(),
    };
    let merged = file_overrides.merged_under(cli_overrides);
    let out = merged.out.clone();
    let format = OutputFormat::parse(merged.format.as_deref().unwrap_or("csv"))?;
    let cfg = merged.into_config()?;
    let result = run_case(&cfg)?;
    match out {
        Some(path) => emit(&result, format, Path::new(&path)),
        None => {
            print!("{}", render(&result, format));
            Ok(())
        }
    }
}

fn parse_sigmas(text: &str) -> Result<Vec<f64>> {
    let sigmas: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| Error::Config {
                key: "sigmas".into(),
                message: format!("cannot parse `{s}` as a number"),
            })
        })
        .collect::<Result<_>>()?;
    if sigmas.is_empty() {
        return Err(Error::Config {
            key: "sigmas".into(),
            message: "need at least one value".into(),
        });
    }
    Ok(sigmas)
}

/// Seeds come as an inclusive range `a..b` or a comma-separated list.
fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |message: String| Error::Config {
        key: "seeds".into(),
        message,
    };
    if let Some((a, b)) = text.split_once("..") {
        let lo: u64 = a
            .trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse `{a}`")))?;
        let hi: u64 = b
            .trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse `{b}`")))?;
        if hi < lo {
            return Err(bad(format!("range {lo}..{hi} is empty")));
        }
        return Ok((lo..=hi).collect());
    }
    let seeds: Vec<u64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| bad(format!("cannot parse `{s}`")))
        })
        .collect::<Result<_>>()?;
    if seeds.is_empty() {
        return Err(bad("need at least one seed".into()));
    }
    Ok(seeds)
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let sigmas = parse_sigmas(&args.sigmas)?;
    let seeds = parse_seeds(&args.seeds)?;
    let mut base = SimulationConfig::for_case(args.case)?;
    if let Some(steps) = args.steps {
        base.steps = steps;
    }
    if let Some(window) = args.window {
        base.window = window;
    }
    base.validate()?;
    let table = noise_sweep(&base, &sigmas, &seeds)?;
    match args.out {
        Some(path) => emit_sweep(&table, &path),
        None => {
            print!("{}", render_sweep_csv(&table));
            Ok(())
        }
    }
}

fn figure_config(case: u8, seed: u64, steps: Option<u64>) -> Result<SimulationConfig> {
    let mut cfg = SimulationConfig::for_case(case)?;
    cfg.seed = seed;
    if let Some(steps) = steps {
        cfg.steps = steps;
    }
    Ok(cfg)
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn emit_run_csv(cfg: &SimulationConfig, path: &Path) -> Result<()> {
    let result = run_case(cfg)?;
    emit(&result, OutputFormat::Csv, path)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// State-trajectory data: case 1 (free evolution) and case 2 (controlled).
fn cmd_figure3(args: FigureArgs) -> Result<()> {
    ensure_out_dir(&args.out_dir)?;
    emit_run_csv(
        &figure_config(1, args.seed, args.steps)?,
        &args.out_dir.join("figure3a.csv"),
    )?;
    emit_run_csv(
        &figure_config(2, args.seed, args.steps)?,
        &args.out_dir.join("figure3b.csv"),
    )
}

/// Fidelity data: per-step curves for both cases plus the noise sweep.
fn cmd_figure4(args: Figure4Args) -> Result<()> {
    ensure_out_dir(&args.out_dir)?;
    emit_run_csv(
        &figure_config(1, args.seed, args.steps)?,
        &args.out_dir.join("figure4a_case1.csv"),
    )?;
    emit_run_csv(
        &figure_config(2, args.seed, args.steps)?,
        &args.out_dir.join("figure4a_case2.csv"),
    )?;
    let sigmas = parse_sigmas(&args.sigmas)?;
    let seeds = parse_seeds(&args.seeds)?;
    let mut base = SimulationConfig::case2();
    if let Some(steps) = args.steps {
        base.steps = steps;
    }
    let table = noise_sweep(&base, &sigmas, &seeds)?;
    let path = args.out_dir.join("figure4b.csv");
    emit_sweep(&table, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
