//! Named figure presets: one per parameter-table row, each pairing a base
//! configuration with the row's swept parameter, plus the spectral-surface
//! preset. Sweep value lists that the source table does not enumerate are
//! documented guesses and flagged as such in the emitted metadata.

use std::fs;
use std::path::Path;

use crate::config::{parse_config, RunConfig};
use crate::output;
use crate::sweep::{run_sweep, SweepSpec};
use crate::CliError;

pub const PRESET_NAMES: [&str; 9] =
    ["fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d"];

/// Default charge window for trajectory presets (internal time units; the
/// source table does not pin one). Long enough that the damped late-time
/// plateau forms well before the drive switches off.
pub const PRESET_TAU: f64 = 800.0;

/// Charge window of the drive-frequency preset; the plateau-time contrast
/// across the multiplier sweep saturates on longer windows.
pub const FIG3A_TAU: f64 = 1600.0;

/// Charge window of the temperature preset. Short by design: every jump rate
/// in this model grows linearly with temperature (the active Bohr gaps sit
/// far below the swept temperatures in internal units), so a near-protected
/// low-temperature cluster only exists while the total damping exposure
/// stays small.
pub const FIG4D_TAU: f64 = 6.0;

pub struct Preset {
    pub name: &'static str,
    pub config: RunConfig,
    /// None for the spectrum-only preset.
    pub sweep: Option<SweepSpec>,
    pub notes: Vec<String>,
}

fn base_config(
    tau: f64,
    delta_e: f64,
    gamma: f64,
    omega0: f64,
    temperature: f64,
    omega_ref: f64,
) -> String {
    format!(
        "[system]\n\
         n = 4\n\
         delta_e = {delta_e}\n\
         t_e = 0\n\
         tau = {tau}\n\
         [bath]\n\
         gamma = {gamma}\n\
         omega0 = {omega0}\n\
         T = {temperature}\n\
         omega_ref = {omega_ref}\n"
    )
}

fn pi_labels(multipliers: &[f64]) -> (Vec<f64>, Vec<String>) {
    let values = multipliers.iter().map(|m| m * std::f64::consts::PI).collect();
    let labels = multipliers.iter().map(|m| format!("{m}pi")).collect();
    (values, labels)
}

pub fn build(name: &str) -> Result<Preset, CliError> {
    let guessed = "sweep values are a documented guess; the source table marks the parameter \
                   as varied without enumerating the list";
    let preset = match name {
        "fig2" => Preset {
            name: "fig2",
            config: parse_config(&base_config(PRESET_TAU, 1.5, 2.6e-4, 0.05, 300.0, 0.085))
                .expect("embedded preset config parses"),
            sweep: None,
            notes: vec![
                "spectral surface over the default frequency grid".into(),
            ],
        },
        "fig3a" => {
            let (values, labels) =
                pi_labels(&[0.7, 0.8, 0.9, 1.0, 1.1, 1.2]);
            Preset {
                name: "fig3a",
                config: parse_config(&base_config(FIG3A_TAU, 1.5, 2.6e-7, 0.10, 300.0, 0.085))
                    .expect("embedded preset config parses"),
                sweep: Some(SweepSpec::with_labels("drive.omega", values, labels)),
                notes: vec!["drive multiplier swept 0.7pi..1.2pi".into()],
            }
        }
        "fig3b" => Preset {
            name: "fig3b",
            config: parse_config(&base_config(PRESET_TAU, 2.75, 2.6e-7, 0.12, 300.0, 0.085))
                .expect("embedded preset config parses"),
            sweep: Some(SweepSpec::new(
                "drive.amplitude",
                vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5],
            )),
            notes: vec![
                "the parameter table and the figure caption disagree on which of V and \
                 delta_e varies in panels (b)/(c); this preset follows the caption and \
                 sweeps the amplitude V, including the quoted critical value 3.5"
                    .into(),
                "delta_e fixed at 2.75 from the sibling rows".into(),
                guessed.into(),
            ],
        },
        "fig3c" => Preset {
            name: "fig3c",
            config: parse_config(&base_config(PRESET_TAU, 2.75, 2.6e-7, 0.12, 300.0, 0.085))
                .expect("embedded preset config parses"),
            sweep: Some(SweepSpec::new(
                "system.delta_e",
                vec![1.0, 1.5, 2.0, 2.5, 2.75, 3.0],
            )),
            notes: vec![
                "sweeps the gap delta_e per the figure caption (see fig3b note)".into(),
                guessed.into(),
            ],
        },
        "fig3d" => Preset {
            name: "fig3d",
            config: parse_config(&base_config(PRESET_TAU, 2.75, 2.6e-7, 0.12, 300.0, 0.085))
                .expect("embedded preset config parses"),
            sweep: Some(SweepSpec::new(
                "system.t_e",
                vec![0.03, 0.04, 0.05, 0.06, 0.07, 0.08],
            )),
            notes: vec!["tunneling values 0.03..0.08 (units unstated in the table)".into()],
        },
        "fig4a" => Preset {
            name: "fig4a",
            config: parse_config(&base_config(PRESET_TAU, 1.5, 2.6e-7, 0.10, 300.0, 0.085))
                .expect("embedded preset config parses"),
            sweep: Some(SweepSpec::new(
                "bath.omega0",
                vec![0.03, 0.05, 0.08, 0.10, 0.12, 0.15],
            )),
            notes: vec![guessed.into()],
        },
        "fig4b" => Preset {
            name: "fig4b",
            config: parse_config(&base_config(PRESET_TAU, 1.5, 9.0e-7, 0.12, 300.0, 0.085))
                .expect("embedded preset config parses"),
            sweep: Some(SweepSpec::new(
                "bath.omega_ref",
                vec![0.055, 0.085, 0.115, 0.143, 0.175, 0.205],
            )),
            notes: vec![
                "omega_ref only sizes the spectrum grid; where the table's omega column \
                 enters the dynamics is unresolved, so the trajectories of this sweep \
                 coincide by construction"
                    .into(),
                guessed.into(),
            ],
        },
        "fig4c" => Preset {
            name: "fig4c",
            config: parse_config(&base_config(PRESET_TAU, 1.5, 2.6e-7, 0.03, 300.0, 0.085))
                .expect("embedded preset config parses"),
            sweep: Some(SweepSpec::new(
                "bath.gamma",
                vec![1.0e-7, 2.6e-7, 4.0e-7, 6.0e-7, 7.5e-7, 9.0e-7],
            )),
            notes: vec![
                "gamma range spans the two tabulated magnitudes 2.6e-7 and 9.0e-7".into(),
                guessed.into(),
            ],
        },
        "fig4d" => Preset {
            name: "fig4d",
            config: parse_config(&base_config(FIG4D_TAU, 1.5, 9.0e-7, 0.08, 300.0, 0.143))
                .expect("embedded preset config parses"),
            sweep: Some(SweepSpec::new(
                "bath.T",
                vec![10.0, 20.0, 30.0, 200.0, 300.0, 400.0],
            )),
            notes: vec![
                "low-temperature cluster placed where the model is genuinely insensitive; \
                 with unit-stripped ingestion every rate is affine in T, so a 100 K protection \
                 boundary has no internal counterpart"
                    .into(),
                "short charge window keeps total damping exposure small (see FIG4D_TAU)".into(),
                guessed.into(),
            ],
        },
        other => {
            return Err(CliError::UnknownPreset {
                name: other.into(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(preset)
}

/// Default spectrum grid: `points` samples over [0, max(5 omega0, 2 omega_ref)].
pub fn default_spectrum_grid(cfg: &RunConfig, points: usize) -> Vec<f64> {
    let omega_max = (5.0 * cfg.bath.omega0).max(2.0 * cfg.omega_ref);
    linspace(0.0, omega_max, points)
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lo];
    }
    (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect()
}

/// Execute a preset into `out_dir`.
pub fn run(name: &str, out_dir: &Path, workers: usize, strict: bool) -> Result<(), CliError> {
    let preset = build(name)?;
    fs::create_dir_all(out_dir)
        .map_err(|source| CliError::Io { path: out_dir.to_path_buf(), source })?;

    let mut metadata = vec![format!("preset {}", preset.name)];
    metadata.extend(preset.notes.iter().cloned());
    metadata.extend(preset.config.provenance.iter().cloned());

    match &preset.sweep {
        Some(sweep) => {
            metadata.push(format!(
                "sweep {} over [{}]",
                sweep.param,
                sweep.labels.join(", ")
            ));
            run_sweep(&preset.config, sweep, out_dir, workers, strict)?;
        }
        None => {
            let grid = default_spectrum_grid(&preset.config, 501);
            let rows = qbsim_core::rate_surface(&preset.config.bath, &grid);
            output::write_spectrum_csv(&rows, &out_dir.join("spectrum.csv"))?;
        }
    }
    output::write_metadata(&metadata, &out_dir.join("metadata.txt"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for name in PRESET_NAMES {
            let preset = build(name).unwrap();
            assert_eq!(preset.name, name);
            if name == "fig2" {
                assert!(preset.sweep.is_none());
            } else {
                let sweep = preset.sweep.as_ref().unwrap();
                assert_eq!(sweep.values.len(), 6);
                assert_eq!(sweep.labels.len(), 6);
            }
        }
        assert!(matches!(build("fig9z"), Err(CliError::UnknownPreset { .. })));
    }

    #[test]
    fn linspace_endpoints() {
        let grid = linspace(0.0, 2.0, 5);
        assert_eq!(grid, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
