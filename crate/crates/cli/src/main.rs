use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use renyite_cli::config::{preset, unit_name, ConfigMap, SweepConfig};
use renyite_cli::output::{emit_trajectory, read_csv};
use renyite_cli::sweep::run_sweep_resuming;
use renyite_cli::validate::{run_validation, ValidateConfig};
use renyite_cli::{emit_csv, emit_plot, CliError, SweepResult};
use renyite_core::dynamics::{integrate_coupled, RosslerParams};

#[derive(Parser)]
#[command(name = "renyite", version, about = "Renyi transfer entropy sweeps over coupled Rossler oscillators")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Configuration file (`key = value` lines); overrides the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed for surrogates and the validation data.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Built-in configuration: `desk` or `paper`.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Integrate one coupled trajectory and write `trajectory.csv`.
    Simulate,
    /// Run the coupling sweep into `sweep.csv`, resuming a partial file.
    Sweep,
    /// Render one SVG per quantity and direction from a sweep CSV.
    Plot {
        /// Sweep CSV to plot (defaults to `<out>/sweep.csv`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Check the Granger-causality correspondences and print pass/fail lines.
    Validate,
}

enum Outcome {
    Done,
    CellFailures,
}

fn load_config(cli: &Cli) -> Result<ConfigMap, CliError> {
    let mut map = match &cli.preset {
        Some(name) => {
            let text =
                preset(name).ok_or_else(|| CliError::Config(format!("unknown preset `{name}` (desk, paper)")))?;
            ConfigMap::parse(text, &format!("preset {name}"))?
        }
        None => ConfigMap::default(),
    };
    if let Some(path) = &cli.config {
        map = map.merge(ConfigMap::load(path)?);
    }
    if let Some(seed) = cli.seed {
        map.set("surrogate.seed", seed.to_string());
        map.set("validate.seed", seed.to_string());
    }
    Ok(map)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn simulate(cfg: &SweepConfig, out: &Path) -> Result<Outcome, CliError> {
    ensure_dir(out)?;
    let params = RosslerParams { ..cfg.rossler };
    let traj = integrate_coupled(&params, cfg.t_transient, cfg.t_window(), cfg.dt)?;
    let path = out.join("trajectory.csv");
    emit_trajectory(&traj, &path)?;
    eprintln!("wrote {} samples (epsilon = {}) to {}", traj.len(), params.epsilon, path.display());
    Ok(Outcome::Done)
}

fn sweep(cfg: &SweepConfig, out: &Path) -> Result<Outcome, CliError> {
    ensure_dir(out)?;
    let path = out.join("sweep.csv");
    let existing = if path.exists() { read_csv(&path)? } else { SweepResult::default() };
    if !existing.rows.is_empty() {
        eprintln!("resuming from {} ({} rows)", path.display(), existing.rows.len());
    }
    let total = cfg.epsilon_grid.len();
    let mut seen = 0;
    let mut write_error = None;
    let result = run_sweep_resuming(cfg, existing, |p| {
        seen += 1;
        for e in p.errors {
            eprintln!("cell failure: {e}");
        }
        eprintln!("[{seen}/{total}] epsilon = {}", p.epsilon);
        if write_error.is_none() {
            write_error = emit_csv(p.result, &path).err();
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }
    emit_csv(&result, &path)?;
    let failures = result.failures();
    eprintln!("wrote {} rows to {}", result.rows.len(), path.display());
    if failures > 0 {
        eprintln!("{failures} cell(s) failed");
        return Ok(Outcome::CellFailures);
    }
    Ok(Outcome::Done)
}

fn file_stem(quantity: &str, direction: &str) -> String {
    format!("{quantity}_{direction}").replace("->", "_to_").replace(['+', '.'], "_")
}

fn plot(unit: &str, input: &Path, out: &Path) -> Result<Outcome, CliError> {
    ensure_dir(out)?;
    let result = read_csv(input)?;
    if result.rows.is_empty() {
        return Err(CliError::Config(format!("{} holds no rows", input.display())));
    }
    for quantity in result.quantities() {
        for direction in result.directions(&quantity) {
            let path = out.join(format!("{}.svg", file_stem(&quantity, &direction)));
            emit_plot(&result.select(&quantity, &direction), &quantity, unit, &path)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(Outcome::Done)
}

fn validate(map: &ConfigMap, cfg: &SweepConfig) -> Result<Outcome, CliError> {
    let defaults = ValidateConfig::default();
    let parse = |key: &str, default: u64| -> Result<u64, CliError> {
        map.get(key)
            .map_or(Ok(default), |v| v.parse().map_err(|_| CliError::Config(format!("`{key}`: bad value `{v}`"))))
    };
    let vcfg = ValidateConfig {
        length: parse("validate.length", defaults.length as u64)? as usize,
        seed: parse("validate.seed", defaults.seed)?,
        estimator: cfg.estimator,
        ..defaults
    };
    let checks = run_validation(&vcfg);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed > 0 { Outcome::CellFailures } else { Outcome::Done })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let map = load_config(cli)?;
    let cfg = SweepConfig::from_map(&map)?;
    match &cli.verb {
        Verb::Simulate => simulate(&cfg, &cli.out),
        Verb::Sweep => sweep(&cfg, &cli.out),
        Verb::Plot { input } => {
            let input = input.clone().unwrap_or_else(|| cli.out.join("sweep.csv"));
            plot(&unit_name(cfg.estimator.log_base), &input, &cli.out)
        }
        Verb::Validate => validate(&map, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::CellFailures) => ExitCode::from(2),
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
