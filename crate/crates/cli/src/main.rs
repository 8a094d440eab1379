use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbsim_cli::config::{parse_config, parse_number};
use qbsim_cli::{output, preset, sweep, CliError};

#[derive(Parser)]
#[command(name = "qbsim", version, about = "Collective quantum-battery charging simulator")]
struct Cli {
    /// Worker threads for sweep execution (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Escalate run warnings to errors and stop sweeps at the first failure.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration and emit its trajectory CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides [run] out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named figure preset.
    Preset {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one dotted parameter over a comma-separated value list.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// e.g. bath.gamma, system.t_e, drive.omega, drive.3.amplitude
        #[arg(long)]
        param: String,
        /// Values; `pi` suffixes allowed (0.7pi,0.8pi,...).
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the spectral density J and rate R over a frequency grid.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long, default_value_t = 501)]
        points: usize,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> Result<qbsim_cli::config::RunConfig, CliError> {
    let text =
        fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(parse_config(&text)?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = load_config(&config)?;
            let out_dir = out.unwrap_or_else(|| cfg.out_dir.clone());
            fs::create_dir_all(&out_dir)
                .map_err(|source| CliError::Io { path: out_dir.clone(), source })?;
            let traj = sweep::run_single(&cfg)?;
            output::emit_trajectory(&traj, &out_dir.join("trajectory.csv"))?;
            let mut meta = cfg.provenance.clone();
            meta.push(format!("max raw trace drift {:.3e}", traj.max_raw_trace_drift));
            meta.push(format!("worst min eigenvalue {:.3e}", traj.worst_min_eigenvalue));
            meta.extend(traj.warnings.iter().map(|w| format!("warning: {w}")));
            output::write_metadata(&meta, &out_dir.join("metadata.txt"))?;
            for line in &traj.warnings {
                eprintln!("warning: {line}");
            }
            if cli.strict && !traj.warnings.is_empty() {
                return Err(CliError::StrictWarnings(traj.warnings.join("; ")));
            }
            println!(
                "simulate: {} records -> {}",
                traj.records.len(),
                out_dir.join("trajectory.csv").display()
            );
        }
        Command::Preset { name, out } => {
            preset::run(&name, &out, cli.workers, cli.strict)?;
            println!("preset {name} -> {}", out.display());
        }
        Command::Sweep { config, param, values, out } => {
            let cfg = load_config(&config)?;
            let parsed: Result<Vec<f64>, CliError> = values
                .iter()
                .map(|raw| {
                    parse_number(raw).ok_or_else(|| {
                        qbsim_cli::sweep::SweepError::BadParameter {
                            path: format!("{param} value '{raw}'"),
                        }
                        .into()
                    })
                })
                .collect();
            let spec = sweep::SweepSpec::with_labels(&param, parsed?, values);
            let outcome = sweep::run_sweep(&cfg, &spec, &out, cli.workers, cli.strict)?;
            println!(
                "sweep {param}: {} runs -> {}",
                outcome.summary.len(),
                out.join("summary.csv").display()
            );
        }
        Command::Spectrum { config, omega_min, omega_max, points, out } => {
            let cfg = load_config(&config)?;
            let lo = omega_min.unwrap_or(0.0);
            let grid = match omega_max {
                Some(hi) => preset::linspace(lo, hi, points),
                None if omega_min.is_none() => preset::default_spectrum_grid(&cfg, points),
                None => {
                    let hi = (5.0 * cfg.bath.omega0).max(2.0 * cfg.omega_ref);
                    preset::linspace(lo, hi, points)
                }
            };
            let rows = qbsim_core::rate_surface(&cfg.bath, &grid);
            output::write_spectrum_csv(&rows, &out)?;
            println!("spectrum: {} rows -> {}", rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
