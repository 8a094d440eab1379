//! Line-oriented `key = value` configuration under `[section]` headers.
//!
//! Sections: `[system]`, `[drive.<j>]` (one per ground label), `[bath]`,
//! `[integrator]`, `[run]`. `#` starts a comment. Values are decimal numbers,
//! `pi`-suffixed multipliers (`1.0pi`), booleans, or enumerated keywords.
//! Unknown and duplicate keys are rejected; every applied default is echoed
//! into the provenance log.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use qbsim_core::{
    BathSpec, Constants, DriveWaveform, EnergyReference, InitialState, IntegratorConfig,
    LindbladConvention, SpectralKind, SystemSpec,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key '{key}' in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: duplicate key '{key}' in section [{section}]")]
    DuplicateKey { line: usize, section: String, key: String },
    #[error("line {line}: key '{section}.{key}' expects {expected}, got '{got}'")]
    TypeMismatch { line: usize, section: String, key: String, expected: &'static str, got: String },
    #[error("missing required keys: {}", keys.join(", "))]
    MissingKeys { keys: Vec<String> },
    #[error("invalid value for {field}: {reason}")]
    InvalidValue { field: String, reason: String },
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub bath: BathSpec,
    pub integrator: IntegratorConfig,
    pub initial_state: InitialState,
    pub energy_reference: EnergyReference,
    /// The parameter table's spectral evaluation frequency. It sizes the
    /// default grid of the `spectrum` command and is otherwise inert; where
    /// it would enter the dynamics is an open modelling question.
    pub omega_ref: f64,
    pub out_dir: PathBuf,
    /// One line per applied default.
    pub provenance: Vec<String>,
}

/// Default charge window when the config does not pin one.
pub const DEFAULT_TAU: f64 = 400.0;
const DEFAULT_EPSILON_BASE: f64 = 0.25;
const DEFAULT_AMPLITUDE: f64 = 1.5;
const DEFAULT_OMEGA_REF: f64 = 0.085;
const DEFAULT_STRIDE: usize = 20;

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Extractor {
    entries: BTreeMap<(String, String), Entry>,
    provenance: Vec<String>,
    missing: Vec<String>,
}

impl Extractor {
    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(&(section.to_string(), key.to_string())).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn has_section(&self, section: &str) -> bool {
        self.entries.keys().any(|(s, _)| s == section)
    }

    fn note_default(&mut self, section: &str, key: &str, value: impl std::fmt::Display) {
        self.provenance.push(format!("applied default {section}.{key} = {value}"));
    }

    fn f64_required(&mut self, section: &str, key: &str) -> Result<f64, ConfigError> {
        match self.take(section, key) {
            Some((raw, line)) => parse_number(&raw).ok_or_else(|| ConfigError::TypeMismatch {
                line,
                section: section.into(),
                key: key.into(),
                expected: "a number",
                got: raw,
            }),
            None => {
                self.missing.push(format!("{section}.{key}"));
                Ok(f64::NAN)
            }
        }
    }

    fn f64_or(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.take(section, key) {
            Some((raw, line)) => parse_number(&raw).ok_or_else(|| ConfigError::TypeMismatch {
                line,
                section: section.into(),
                key: key.into(),
                expected: "a number",
                got: raw,
            }),
            None => {
                self.note_default(section, key, default);
                Ok(default)
            }
        }
    }

    fn usize_required(&mut self, section: &str, key: &str) -> Result<usize, ConfigError> {
        match self.take(section, key) {
            Some((raw, line)) => raw.parse().map_err(|_| ConfigError::TypeMismatch {
                line,
                section: section.into(),
                key: key.into(),
                expected: "a positive integer",
                got: raw,
            }),
            None => {
                self.missing.push(format!("{section}.{key}"));
                Ok(0)
            }
        }
    }

    fn usize_or(&mut self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(section, key) {
            Some((raw, line)) => raw.parse().map_err(|_| ConfigError::TypeMismatch {
                line,
                section: section.into(),
                key: key.into(),
                expected: "a positive integer",
                got: raw,
            }),
            None => {
                self.note_default(section, key, default);
                Ok(default)
            }
        }
    }

    fn bool_or(&mut self, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.take(section, key) {
            Some((raw, line)) => match raw.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(ConfigError::TypeMismatch {
                    line,
                    section: section.into(),
                    key: key.into(),
                    expected: "true or false",
                    got: raw,
                }),
            },
            None => {
                self.note_default(section, key, default);
                Ok(default)
            }
        }
    }

    fn keyword_or(
        &mut self,
        section: &str,
        key: &str,
        allowed: &'static [&'static str],
        default: &str,
    ) -> Result<(String, Option<usize>), ConfigError> {
        match self.take(section, key) {
            Some((raw, line)) => {
                if allowed.contains(&raw.as_str()) {
                    Ok((raw, Some(line)))
                } else {
                    Err(ConfigError::TypeMismatch {
                        line,
                        section: section.into(),
                        key: key.into(),
                        expected: "one of the documented keywords",
                        got: raw,
                    })
                }
            }
            None => {
                self.note_default(section, key, default);
                Ok((default.to_string(), None))
            }
        }
    }

    fn first_unused(&self) -> Option<ConfigError> {
        self.entries
            .iter()
            .filter(|(_, e)| !e.used)
            .min_by_key(|(_, e)| e.line)
            .map(|((section, key), e)| ConfigError::UnknownKey {
                line: e.line,
                section: section.clone(),
                key: key.clone(),
            })
    }
}

/// Parse a number, honoring a trailing `pi` multiplier (`1.0pi`, `pi`).
pub fn parse_number(raw: &str) -> Option<f64> {
    let t = raw.trim();
    if let Some(prefix) = t.strip_suffix("pi") {
        let p = prefix.trim();
        let base = if p.is_empty() { 1.0 } else { p.parse::<f64>().ok()? };
        return Some(base * PI);
    }
    t.parse().ok()
}

fn tokenize(text: &str) -> Result<BTreeMap<(String, String), Entry>, ConfigError> {
    let mut entries: BTreeMap<(String, String), Entry> = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                reason: format!("unterminated section header '{content}'"),
            })?;
            let name = name.trim();
            let valid = matches!(name, "system" | "bath" | "integrator" | "run")
                || name
                    .strip_prefix("drive.")
                    .map(|j| j.parse::<usize>().is_ok())
                    .unwrap_or(false);
            if !valid {
                return Err(ConfigError::UnknownSection { line, section: name.into() });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            reason: format!("expected 'key = value', got '{content}'"),
        })?;
        let section = section.clone().ok_or_else(|| ConfigError::Syntax {
            line,
            reason: "key before any [section] header".into(),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line, reason: "empty key".into() });
        }
        if let Some(existing) = entries.get(&(section.clone(), key.clone())) {
            let _ = existing;
            return Err(ConfigError::DuplicateKey { line, section, key });
        }
        entries.insert((section, key), Entry { value, line, used: false });
    }
    Ok(entries)
}

fn parse_drive(
    ex: &mut Extractor,
    j: usize,
    amplitude_default: f64,
    omega_default: f64,
    tau: f64,
) -> Result<DriveWaveform, ConfigError> {
    let section = format!("drive.{j}");
    let parity_kind = if j % 2 == 0 { "sine" } else { "one-minus-cosine" };
    let (kind, _) = ex.keyword_or(
        &section,
        "kind",
        &["sine", "one-minus-cosine", "constant", "tabulated"],
        parity_kind,
    )?;
    let amplitude = ex.f64_or(&section, "amplitude", amplitude_default)?;
    match kind.as_str() {
        "tabulated" => {
            let (raw, line) = ex.take(&section, "points").ok_or_else(|| {
                ConfigError::MissingKeys { keys: vec![format!("{section}.points")] }
            })?;
            let mut times = Vec::new();
            let mut values = Vec::new();
            for piece in raw.split(',') {
                let (t, v) = piece.split_once(':').ok_or_else(|| ConfigError::TypeMismatch {
                    line,
                    section: section.clone(),
                    key: "points".into(),
                    expected: "t:value pairs separated by commas",
                    got: raw.clone(),
                })?;
                let parse = |s: &str| {
                    parse_number(s).ok_or_else(|| ConfigError::TypeMismatch {
                        line,
                        section: section.clone(),
                        key: "points".into(),
                        expected: "numeric t:value pairs",
                        got: piece.to_string(),
                    })
                };
                times.push(parse(t)?);
                values.push(parse(v)?);
            }
            Ok(DriveWaveform::Tabulated { times, values })
        }
        "constant" => {
            // omega is meaningless for a constant drive; reject if present
            if let Some((_, line)) = ex.take(&section, "omega") {
                return Err(ConfigError::InvalidValue {
                    field: format!("{section}.omega (line {line})"),
                    reason: "a constant drive has no frequency multiplier".into(),
                });
            }
            Ok(DriveWaveform::Constant { amplitude, tau })
        }
        kind => {
            let omega = ex.f64_or(&section, "omega", omega_default)?;
            if kind == "sine" {
                Ok(DriveWaveform::Sine { amplitude, omega, tau })
            } else {
                Ok(DriveWaveform::OneMinusCosine { amplitude, omega, tau })
            }
        }
    }
}

fn parse_initial_state(raw: &str) -> Option<InitialState> {
    if raw == "uniform-ground" {
        return Some(InitialState::UniformGround);
    }
    if let Some(inner) = raw.strip_prefix("pure-level(").and_then(|s| s.strip_suffix(')')) {
        return inner.trim().parse().ok().map(InitialState::PureLevel);
    }
    if let Some(inner) = raw.strip_prefix("gibbs(").and_then(|s| s.strip_suffix(')')) {
        return parse_number(inner).map(InitialState::Gibbs);
    }
    None
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let entries = tokenize(text)?;
    let mut ex = Extractor { entries, provenance: Vec::new(), missing: Vec::new() };

    // [system]
    let n = ex.usize_required("system", "n")?;
    let epsilon_base = ex.f64_or("system", "epsilon_base", DEFAULT_EPSILON_BASE)?;
    let delta_e = ex.f64_required("system", "delta_e")?;
    let t_e = ex.f64_or("system", "t_e", 0.0)?;
    let tau = ex.f64_or("system", "tau", DEFAULT_TAU)?;

    // [bath]
    let (bath_kind, _) = ex.keyword_or(
        "bath",
        "kind",
        &["debye-lorentzian", "debye-exponential"],
        "debye-lorentzian",
    )?;
    let gamma = ex.f64_required("bath", "gamma")?;
    let omega0 = ex.f64_required("bath", "omega0")?;
    let temperature = ex.f64_required("bath", "T")?;
    let hbar = ex.f64_or("bath", "hbar", 1.0)?;
    let k_b = ex.f64_or("bath", "k_b", 1.0)?;
    let omega_ref = ex.f64_or("bath", "omega_ref", DEFAULT_OMEGA_REF)?;

    if !ex.missing.is_empty() {
        return Err(ConfigError::MissingKeys { keys: std::mem::take(&mut ex.missing) });
    }

    // [drive.j]
    let mut drives = BTreeMap::new();
    for j in 2..=n {
        let section = format!("drive.{j}");
        let had_section = ex.has_section(&section);
        let wave = parse_drive(&mut ex, j, DEFAULT_AMPLITUDE, PI, tau)?;
        if !had_section {
            // collapse the per-key default notes into one line per channel
            ex.provenance.retain(|p| !p.starts_with(&format!("applied default {section}.")));
            ex.provenance.push(format!(
                "applied default drive.{j}: {} amplitude {} omega pi tau {}",
                if j % 2 == 0 { "sine" } else { "one-minus-cosine" },
                DEFAULT_AMPLITUDE,
                tau
            ));
        }
        drives.insert(j, wave);
    }

    // [integrator]
    let dt = ex.f64_or("integrator", "dt", tau / 20_000.0)?;
    let t_end = ex.f64_or("integrator", "t_end", tau)?;
    let hermitize = ex.bool_or("integrator", "hermitize", true)?;
    let renormalize_trace = ex.bool_or("integrator", "renormalize_trace", true)?;
    let positivity_tol = ex.f64_or("integrator", "positivity_tol", 1e-7)?;
    let (convention, _) =
        ex.keyword_or("integrator", "lindblad_convention", &["double", "half"], "double")?;

    // [run]
    let initial_raw = ex.take("run", "initial_state");
    let initial_state = match &initial_raw {
        Some((raw, line)) => parse_initial_state(raw).ok_or_else(|| ConfigError::TypeMismatch {
            line: *line,
            section: "run".into(),
            key: "initial_state".into(),
            expected: "uniform-ground, pure-level(j) or gibbs(T)",
            got: raw.clone(),
        })?,
        None => {
            ex.note_default("run", "initial_state", "uniform-ground");
            InitialState::UniformGround
        }
    };
    let (energy_ref, _) =
        ex.keyword_or("run", "energy_reference", &["bare", "instantaneous"], "bare")?;
    let out_dir = match ex.take("run", "out_dir") {
        Some((raw, _)) => PathBuf::from(raw),
        None => {
            ex.note_default("run", "out_dir", "out");
            PathBuf::from("out")
        }
    };
    let stride = ex.usize_or("run", "stride", DEFAULT_STRIDE)?;

    for (section, _) in ex.entries.keys() {
        if let Some(level) = section.strip_prefix("drive.") {
            let level: usize = level.parse().unwrap_or(0);
            if !(2..=n).contains(&level) {
                return Err(ConfigError::InvalidValue {
                    field: format!("[{section}]"),
                    reason: format!("drive sections must name a ground level in 2..={n}"),
                });
            }
        }
    }
    if let Some(err) = ex.first_unused() {
        return Err(err);
    }

    let system = SystemSpec { n, epsilon_base, delta_e, tunneling: t_e, drives };
    system
        .validate()
        .map_err(|e| ConfigError::InvalidValue { field: "system".into(), reason: e.to_string() })?;

    let bath = BathSpec {
        kind: match bath_kind.as_str() {
            "debye-exponential" => SpectralKind::DebyeExponential,
            _ => SpectralKind::DebyeLorentzian,
        },
        gamma,
        omega0,
        temperature,
        consts: Constants { hbar, k_b },
    };
    bath.validate()
        .map_err(|e| ConfigError::InvalidValue { field: "bath".into(), reason: e.to_string() })?;

    let integrator = IntegratorConfig {
        dt,
        t_end,
        hermitize,
        renormalize_trace,
        positivity_tol,
        record_every: stride,
        convention: match convention.as_str() {
            "half" => LindbladConvention::Half,
            _ => LindbladConvention::Doubled,
        },
    };
    integrator.validate().map_err(|e| ConfigError::InvalidValue {
        field: "integrator".into(),
        reason: e.to_string(),
    })?;
    if t_end > tau * (1.0 + 1e-12) {
        return Err(ConfigError::InvalidValue {
            field: "integrator.t_end".into(),
            reason: format!("t_end = {t_end} exceeds the charge window tau = {tau}"),
        });
    }

    if !(omega_ref.is_finite() && omega_ref >= 0.0) {
        return Err(ConfigError::InvalidValue {
            field: "bath.omega_ref".into(),
            reason: format!("must be a nonnegative number, got {omega_ref}"),
        });
    }

    Ok(RunConfig {
        system,
        bath,
        integrator,
        initial_state,
        energy_reference: match energy_ref.as_str() {
            "instantaneous" => EnergyReference::Instantaneous,
            _ => EnergyReference::Bare,
        },
        omega_ref,
        out_dir,
        provenance: ex.provenance,
    })
}
