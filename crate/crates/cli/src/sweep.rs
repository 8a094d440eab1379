//! Parameter sweeps: one independent trajectory per value of a dotted
//! parameter path, emitted as `<param>=<label>.csv` plus a summary table
//! with the plateau-time metric.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qbsim_core::{enumerate_channels, evolve, model, DriveWaveform, Trajectory};

use crate::config::RunConfig;
use crate::output::{self, SummaryRow};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("sweep parameter '{path}' does not resolve to a sweepable scalar")]
    BadParameter { path: String },
    #[error("sweep needs at least one value")]
    Empty,
    #[error("invalid swept config for {path} = {value}: {reason}")]
    InvalidPoint { path: String, value: f64, reason: String },
}

/// A parameter path with the values to visit. Labels name output files; they
/// default to the plain value text.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
    pub labels: Vec<String>,
}

impl SweepSpec {
    pub fn new(param: &str, values: Vec<f64>) -> Self {
        let labels = values.iter().map(|v| format!("{v}")).collect();
        Self { param: param.into(), values, labels }
    }

    pub fn with_labels(param: &str, values: Vec<f64>, labels: Vec<String>) -> Self {
        assert_eq!(values.len(), labels.len(), "one label per value");
        Self { param: param.into(), values, labels }
    }
}

fn set_drive_field(wave: &mut DriveWaveform, field: &str, value: f64) -> bool {
    match (wave, field) {
        (DriveWaveform::Sine { amplitude, .. }, "amplitude")
        | (DriveWaveform::OneMinusCosine { amplitude, .. }, "amplitude")
        | (DriveWaveform::Constant { amplitude, .. }, "amplitude") => {
            *amplitude = value;
            true
        }
        (DriveWaveform::Sine { omega, .. }, "omega")
        | (DriveWaveform::OneMinusCosine { omega, .. }, "omega") => {
            *omega = value;
            true
        }
        _ => false,
    }
}

/// Clone `cfg` with one scalar replaced. Supported paths: system.delta_e,
/// system.epsilon_base, system.t_e, bath.gamma, bath.omega0, bath.T,
/// bath.omega_ref, drive.omega, drive.amplitude (all channels), and
/// drive.<j>.omega / drive.<j>.amplitude for one channel.
pub fn apply_parameter(cfg: &RunConfig, path: &str, value: f64) -> Result<RunConfig, SweepError> {
    let mut out = cfg.clone();
    let bad = || SweepError::BadParameter { path: path.into() };
    match path {
        "system.delta_e" => out.system.delta_e = value,
        "system.epsilon_base" => out.system.epsilon_base = value,
        "system.t_e" => out.system.tunneling = value,
        "bath.gamma" => out.bath.gamma = value,
        "bath.omega0" => out.bath.omega0 = value,
        "bath.T" => out.bath.temperature = value,
        "bath.omega_ref" => out.omega_ref = value,
        "drive.omega" | "drive.amplitude" => {
            let field = path.rsplit('.').next().unwrap();
            let mut touched = false;
            for wave in out.system.drives.values_mut() {
                touched |= set_drive_field(wave, field, value);
            }
            if !touched {
                return Err(bad());
            }
        }
        other => {
            let mut pieces = other.split('.');
            match (pieces.next(), pieces.next(), pieces.next(), pieces.next()) {
                (Some("drive"), Some(j), Some(field), None) => {
                    let j: usize = j.parse().map_err(|_| bad())?;
                    let wave = out.system.drives.get_mut(&j).ok_or_else(bad)?;
                    if !set_drive_field(wave, field, value) {
                        return Err(bad());
                    }
                }
                _ => return Err(bad()),
            }
        }
    }
    out.system.validate().map_err(|e| SweepError::InvalidPoint {
        path: path.into(),
        value,
        reason: e.to_string(),
    })?;
    out.bath.validate().map_err(|e| SweepError::InvalidPoint {
        path: path.into(),
        value,
        reason: e.to_string(),
    })?;
    Ok(out)
}

/// Run one configuration to a trajectory.
pub fn run_single(cfg: &RunConfig) -> Result<Trajectory, CliError> {
    let channels = enumerate_channels(&cfg.system, &cfg.bath);
    let rho0 = model::initial_state(&cfg.system, &cfg.initial_state, &cfg.bath.consts)?;
    Ok(evolve(
        &rho0,
        &cfg.system,
        &channels,
        &cfg.bath.consts,
        &cfg.integrator,
        cfg.energy_reference,
    )?)
}

/// First time after which the ergotropy stays inside a 5% band (of the peak)
/// around its end-of-run value.
pub fn stable_time(traj: &Trajectory) -> f64 {
    let erg: Vec<f64> = traj.records.iter().map(|r| r.ergotropy).collect();
    let end = *erg.last().unwrap_or(&0.0);
    let peak = erg.iter().fold(0.0f64, |m, &v| m.max(v));
    let band = 0.05 * peak;
    let mut stable_from = 0usize;
    for (k, &value) in erg.iter().enumerate().rev() {
        if (value - end).abs() > band {
            stable_from = k + 1;
            break;
        }
    }
    traj.times[stable_from.min(traj.times.len() - 1)]
}

pub fn summarize(label: &str, value: f64, traj: &Trajectory) -> SummaryRow {
    let (t_peak, peak) = traj
        .records
        .iter()
        .map(|r| (r.t, r.ergotropy))
        .fold((0.0, f64::MIN), |best, (t, e)| if e > best.1 { (t, e) } else { best });
    SummaryRow {
        label: label.to_string(),
        value,
        peak_ergotropy: peak,
        t_peak,
        t_stable: stable_time(traj),
        final_ergotropy: traj.final_record().ergotropy,
        status: if traj.positivity_flag { "warned".into() } else { "ok".into() },
    }
}

pub struct SweepOutcome {
    pub summary: Vec<SummaryRow>,
    pub trajectory_files: Vec<(String, PathBuf)>,
}

/// Execute a sweep into `out_dir`: per-value trajectory CSVs, summary CSV,
/// gnuplot script. Per-value failures are recorded in the summary and the
/// sweep continues unless `strict`.
pub fn run_sweep(
    cfg: &RunConfig,
    sweep: &SweepSpec,
    out_dir: &Path,
    workers: usize,
    strict: bool,
) -> Result<SweepOutcome, CliError> {
    if sweep.values.is_empty() {
        return Err(SweepError::Empty.into());
    }
    fs::create_dir_all(out_dir)
        .map_err(|source| CliError::Io { path: out_dir.to_path_buf(), source })?;

    let points: Vec<(usize, f64, String)> = sweep
        .values
        .iter()
        .zip(sweep.labels.iter())
        .enumerate()
        .map(|(k, (&v, l))| (k, v, l.clone()))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool");

    let results: Vec<(String, f64, Result<Trajectory, CliError>)> = pool.install(|| {
        points
            .par_iter()
            .map(|(_, value, label)| {
                let run = apply_parameter(cfg, &sweep.param, *value)
                    .map_err(CliError::from)
                    .and_then(|point_cfg| run_single(&point_cfg));
                (label.clone(), *value, run)
            })
            .collect()
    });

    let mut summary = Vec::new();
    let mut files = Vec::new();
    for (label, value, result) in results {
        match result {
            Ok(traj) => {
                let path = out_dir.join(format!("{}={}.csv", sweep.param, label));
                output::emit_trajectory(&traj, &path)?;
                if strict && !traj.warnings.is_empty() {
                    return Err(CliError::StrictWarnings(traj.warnings.join("; ")));
                }
                summary.push(summarize(&label, value, &traj));
                files.push((label, path));
            }
            Err(err) => {
                if strict {
                    return Err(err);
                }
                summary.push(SummaryRow {
                    label: label.clone(),
                    value,
                    peak_ergotropy: f64::NAN,
                    t_peak: f64::NAN,
                    t_stable: f64::NAN,
                    final_ergotropy: f64::NAN,
                    status: format!("failed: {}", err.to_string().replace(',', ";")),
                });
            }
        }
    }

    output::write_summary_csv(&sweep.param, &summary, &out_dir.join("summary.csv"))?;
    output::write_plot_script(&sweep.param, &files, &out_dir.join("plot.gp"))?;
    Ok(SweepOutcome { summary, trajectory_files: files })
}
