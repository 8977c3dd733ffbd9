//! `medfault` command line: run scenario files or built-in presets, write
//! CSV telemetry and SVG plots.

mod plot;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use medfault::scenario::{
    batch_files, csv_text, list_presets, load_config, preset, preset_source, run_batch, run_config, ScenarioConfig,
    ScenarioError, Telemetry,
};

#[derive(Parser)]
#[command(name = "medfault", version, about = "Attitude simulation with momentum exchange device faults")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file or built-in preset.
    Run {
        /// Path to a TOML scenario, or a preset name.
        config: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        no_plots: bool,
    },
    /// Run every `*.toml` scenario in a directory in parallel.
    Batch {
        dir: PathBuf,
        /// Defaults to `<dir>/out`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_plots: bool,
    },
    /// List the built-in presets.
    ListPresets,
    /// Print a preset's TOML source.
    ShowPreset { name: String },
    /// Check a scenario file without running it.
    Validate { config: String },
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Self { code: e.exit_code() as u8, message: e.to_string() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self { code: 1, message: format!("{e:#}") }
    }
}

fn load(arg: &str) -> Result<ScenarioConfig, ScenarioError> {
    let path = Path::new(arg);
    if path.is_file() || arg.ends_with(".toml") {
        load_config(path)
    } else {
        preset(arg)
    }
}

/// Writes the CSV and, when requested, the plots of one finished run.
fn write_outputs(cfg: &ScenarioConfig, tel: &Telemetry, out: &Path, plots: bool) -> Result<Vec<PathBuf>, Failure> {
    let io = |p: &Path, e: std::io::Error| Failure { code: 1, message: format!("{}: {e}", p.display()) };
    fs::create_dir_all(out).map_err(|e| io(out, e))?;
    let csv = out.join(cfg.csv_name());
    fs::write(&csv, csv_text(cfg, tel)?).map_err(|e| io(&csv, e))?;
    let mut written = vec![csv];
    if plots && cfg.output.plots {
        written.extend(plot::write_panels(tel, out, &cfg.name)?);
    }
    Ok(written)
}

fn run(arg: &str, out: &Path, no_plots: bool) -> Result<(), Failure> {
    let cfg = load(arg)?;
    let (tel, _) = run_config(&cfg)?;
    for path in write_outputs(&cfg, &tel, out, !no_plots)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn batch(dir: &Path, out: Option<PathBuf>, no_plots: bool) -> Result<(), Failure> {
    let out = out.unwrap_or_else(|| dir.join("out"));
    let files = batch_files(dir)?;
    if files.is_empty() {
        return Err(Failure { code: 2, message: format!("no .toml scenarios in {}", dir.display()) });
    }
    let mut worst = 0u8;
    let mut csv_names = HashSet::new();
    let (mut ok, total) = (0, files.len());
    for item in run_batch(&files) {
        let outcome = item.result.map_err(Failure::from).and_then(|(cfg, tel)| {
            if !csv_names.insert(cfg.csv_name()) {
                return Err(Failure {
                    code: 2,
                    message: format!("output {} already written by another file", cfg.csv_name()),
                });
            }
            write_outputs(&cfg, &tel, &out, !no_plots)
        });
        match outcome {
            Ok(paths) => {
                ok += 1;
                println!("ok    {} -> {}", item.source.display(), paths[0].display());
            }
            Err(f) => {
                worst = worst.max(f.code);
                eprintln!("error {}: {}", item.source.display(), f.message);
            }
        }
    }
    println!("{ok}/{total} scenarios succeeded");
    if worst == 0 {
        Ok(())
    } else {
        Err(Failure { code: worst, message: format!("{} of {total} scenarios failed", total - ok) })
    }
}

fn validate(arg: &str) -> Result<(), Failure> {
    let cfg = load(arg)?;
    let sc = cfg.to_scenario()?;
    println!(
        "ok: {} ({}, {} faults, {} steps of {} s)",
        cfg.name,
        cfg.actuator.type_name(),
        cfg.faults.len(),
        sc.steps(),
        sc.dt
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, no_plots } => run(&config, &out, no_plots),
        Command::Batch { dir, out, no_plots } => batch(&dir, out, no_plots),
        Command::ListPresets => {
            for name in list_presets() {
                let description = preset(name).map(|c| c.description).unwrap_or_default();
                println!("{name:<22} {description}");
            }
            Ok(())
        }
        Command::ShowPreset { name } => match preset_source(&name) {
            Some(src) => {
                print!("{src}");
                Ok(())
            }
            None => Err(Failure { code: 2, message: format!("unknown preset {name:?}") }),
        },
        Command::Validate { config } => validate(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
