use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bendlattice::{run_experiment, Error, ExperimentConfig, Stages};
use clap::{Parser, ValueEnum};

#[derive(Parser)]
#[command(name = "bendlattice", version, about = "State transfer through bent waveguide lattices")]
struct Cli {
    verb: Verb,
    /// JSON experiment configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bend angles in units of π/32, comma separated. An empty value runs no angles.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    angles: Option<Vec<String>>,
    /// Skip the corner-detuning optimization.
    #[arg(long)]
    no_optimize: bool,
    /// Write output-plane intensity maps.
    #[arg(long)]
    emit_intensity: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verb {
    /// Fundamental mode of the configured waveguide.
    Modes,
    /// Coupling against separation and angle, with exponential fits.
    CouplingScan,
    /// Engineered layouts and coupling maps.
    Engineer,
    /// Transfer, corner-power traces and optional intensity maps.
    Propagate,
    /// Optimal corner detuning and its fabrication mapping.
    OptimizeDefect,
    /// Supermode spectra.
    Spectrum,
    /// Every stage.
    ReproducePaper,
}

fn stages(verb: Verb, config: &ExperimentConfig) -> Stages {
    let none = Stages::default();
    match verb {
        Verb::Modes => Stages { modes: true, ..none },
        Verb::CouplingScan => Stages { coupling_scan: true, ..none },
        Verb::Engineer => Stages { layout: true, ..none },
        Verb::Propagate => Stages {
            transfer: true,
            trace: true,
            intensity: config.emit_intensity,
            optimize: config.optimize,
            ..none
        },
        Verb::OptimizeDefect => Stages { transfer: true, optimize: config.optimize, ..none },
        Verb::Spectrum => Stages { spectrum: true, optimize: config.optimize, ..none },
        Verb::ReproducePaper => Stages::all(config),
    }
}

fn parse_angles(raw: &[String]) -> Result<Vec<f64>, Error> {
    raw.iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>().map_err(|_| Error::Config {
                field: format!("angles[{i}]"),
                message: format!("not a number: {s:?}"),
            })
        })
        .collect()
}

fn configure(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(raw) = &cli.angles {
        config.angles_pi32 = parse_angles(raw)?;
    }
    if cli.no_optimize {
        config.optimize = false;
    }
    if cli.emit_intensity {
        config.emit_intensity = true;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match configure(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").to_path_buf());

    match run_experiment(&config, &out, stages(cli.verb, &config)) {
        Ok(summary) => {
            for failure in &summary.manifest.failures {
                eprintln!("angle {}π/32 failed: {}", failure.pi32, failure.error);
            }
            println!(
                "wrote {} files to {}",
                summary.manifest.files.len() + 1,
                out.display()
            );
            if summary.has_failures() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
