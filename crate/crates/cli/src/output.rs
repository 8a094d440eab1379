//! CSV emission: trajectories, sweep summaries, spectral surfaces, and a
//! gnuplot companion script per sweep. All numbers carry 12 significant
//! digits after the point so a round-trip through text stays below 1e-9.

use std::fs;
use std::path::{Path, PathBuf};

use qbsim_core::bath::RatePoint;
use qbsim_core::{Trajectory, TrajectoryRecord};

use crate::CliError;

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Write one trajectory: header, one row per recorded step, and any warning
/// flags as trailing `#` comment lines.
pub fn emit_trajectory(traj: &Trajectory, path: &Path) -> Result<(), CliError> {
    let n = traj
        .records
        .first()
        .map(|r| r.populations.len())
        .unwrap_or(0);
    let mut text = String::from("t,E,ergotropy,trace_err,purity,min_eig,coh_l1");
    for k in 1..=n {
        text.push_str(&format!(",p{k}"));
    }
    text.push('\n');
    for rec in &traj.records {
        let mut row = vec![
            fmt(rec.t),
            fmt(rec.energy),
            fmt(rec.ergotropy),
            fmt(rec.trace_error),
            fmt(rec.purity),
            fmt(rec.min_eigenvalue),
            fmt(rec.coherence_l1),
        ];
        row.extend(rec.populations.iter().map(|&p| fmt(p)));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    for warning in &traj.warnings {
        text.push_str(&format!("# warning: {warning}\n"));
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Parse a trajectory CSV back into records plus any warning comments.
pub fn read_trajectory_csv(path: &Path) -> Result<(Vec<TrajectoryRecord>, Vec<String>), CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        if let Some(w) = line.strip_prefix("# warning: ") {
            warnings.push(w.to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("line {}: {e}", idx + 1),
                ),
            })?;
        records.push(TrajectoryRecord {
            t: fields[0],
            energy: fields[1],
            ergotropy: fields[2],
            trace_error: fields[3],
            purity: fields[4],
            min_eigenvalue: fields[5],
            coherence_l1: fields[6],
            populations: fields[7..].to_vec(),
        });
    }
    Ok((records, warnings))
}

/// `omega,J,R` rows for the spectrum command.
pub fn write_spectrum_csv(rows: &[RatePoint], path: &Path) -> Result<(), CliError> {
    let mut text = String::from("omega,J,R\n");
    for row in rows {
        text.push_str(&format!(
            "{},{},{}\n",
            fmt(row.omega),
            fmt(row.spectral_density),
            fmt(row.rate)
        ));
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Per-value summary of a sweep.
pub struct SummaryRow {
    pub label: String,
    pub value: f64,
    pub peak_ergotropy: f64,
    pub t_peak: f64,
    pub t_stable: f64,
    pub final_ergotropy: f64,
    pub status: String,
}

pub fn write_summary_csv(param: &str, rows: &[SummaryRow], path: &Path) -> Result<(), CliError> {
    let mut text =
        format!("{param},peak_ergotropy,t_peak,t_stable,final_ergotropy,status\n");
    for row in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.label,
            fmt(row.peak_ergotropy),
            fmt(row.t_peak),
            fmt(row.t_stable),
            fmt(row.final_ergotropy),
            row.status
        ));
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Emit a gnuplot script plotting ergotropy against time for every
/// trajectory file of a sweep.
pub fn write_plot_script(
    param: &str,
    files: &[(String, PathBuf)],
    path: &Path,
) -> Result<(), CliError> {
    let mut script = String::new();
    script.push_str("set datafile separator ','\n");
    script.push_str("set xlabel 't'\n");
    script.push_str("set ylabel 'ergotropy'\n");
    script.push_str(&format!("set title 'ergotropy vs t across {param}'\n"));
    script.push_str("plot \\\n");
    let lines: Vec<String> = files
        .iter()
        .map(|(label, file)| {
            let name = file.file_name().and_then(|s| s.to_str()).unwrap_or("trajectory.csv");
            format!("  '{name}' using 1:3 with lines title '{label}'")
        })
        .collect();
    script.push_str(&lines.join(", \\\n"));
    script.push('\n');
    fs::write(path, script).map_err(io_err(path))
}

/// Free-form metadata lines (provenance, preset notes) kept out of the CSVs.
pub fn write_metadata(lines: &[String], path: &Path) -> Result<(), CliError> {
    let mut text = String::new();
    for line in lines {
        text.push_str(line);
        text.push('\n');
    }
    fs::write(path, text).map_err(io_err(path))
}
