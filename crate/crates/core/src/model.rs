//! The collective battery model: one shared excited level |1> over n-1
//! individual ground levels |2>..|n>, charged through time-dependent fields
//! on the 1-j transitions and coupled along the ground chain by a constant
//! tunneling amplitude.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dynamics::{DensityMatrix, StateError};
use crate::linalg::ComplexMatrix;
use crate::Constants;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("time {t} outside the charging window [0, {tau}]")]
    TimeOutOfRange { t: f64, tau: f64 },
    #[error("invalid drive waveform: {reason}")]
    InvalidWaveform { reason: String },
    #[error("invalid system spec: {reason}")]
    InvalidSpec { reason: String },
    #[error("level index {level} outside 1..={n}")]
    LevelOutOfRange { level: usize, n: usize },
    #[error("gibbs initial state needs a positive temperature, got {temperature}")]
    NonPositiveTemperature { temperature: f64 },
    #[error("custom initial state rejected: {0}")]
    InvalidCustomState(#[from] StateError),
}

/// Charging field applied to one |1>-|j> transition.
///
/// The closed forms follow the three-qubit charging functions: a sine ramp
/// V sin(Omega t / tau) and the one-minus-cosine ramp V [1 - cos(Omega t / tau)],
/// with Omega carrying any pi multiple. `Constant` holds the field at V and
/// `Tabulated` linearly interpolates caller-supplied samples.
#[derive(Debug, Clone, PartialEq)]
pub enum DriveWaveform {
    Sine { amplitude: f64, omega: f64, tau: f64 },
    OneMinusCosine { amplitude: f64, omega: f64, tau: f64 },
    Constant { amplitude: f64, tau: f64 },
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl DriveWaveform {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: String| Err(ModelError::InvalidWaveform { reason });
        match self {
            Self::Sine { amplitude, omega, tau }
            | Self::OneMinusCosine { amplitude, omega, tau } => {
                if !(*tau > 0.0) {
                    return bad(format!("tau must be positive, got {tau}"));
                }
                if !(*amplitude >= 0.0 && amplitude.is_finite()) {
                    return bad(format!("amplitude must be nonnegative, got {amplitude}"));
                }
                if !omega.is_finite() {
                    return bad(format!("omega must be finite, got {omega}"));
                }
            }
            Self::Constant { amplitude, tau } => {
                if !(*tau > 0.0) {
                    return bad(format!("tau must be positive, got {tau}"));
                }
                if !(*amplitude >= 0.0 && amplitude.is_finite()) {
                    return bad(format!("amplitude must be nonnegative, got {amplitude}"));
                }
            }
            Self::Tabulated { times, values } => {
                if times.len() < 2 || times.len() != values.len() {
                    return bad(format!(
                        "tabulated drive needs >= 2 aligned samples, got {} times / {} values",
                        times.len(),
                        values.len()
                    ));
                }
                if times[0] != 0.0 {
                    return bad(format!("tabulated drive must start at t = 0, got {}", times[0]));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("tabulated times must be strictly increasing".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("tabulated values must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Total charge time tau (the drive's time domain is [0, tau]).
    pub fn tau(&self) -> f64 {
        match self {
            Self::Sine { tau, .. } | Self::OneMinusCosine { tau, .. } | Self::Constant { tau, .. } => *tau,
            Self::Tabulated { times, .. } => *times.last().unwrap_or(&0.0),
        }
    }

    /// Amplitude V; the waveform value is bounded by 2V in magnitude.
    pub fn amplitude(&self) -> f64 {
        match self {
            Self::Sine { amplitude, .. }
            | Self::OneMinusCosine { amplitude, .. }
            | Self::Constant { amplitude, .. } => *amplitude,
            Self::Tabulated { values, .. } => values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    /// Field value at time t in [0, tau]. Slightly out-of-window times from
    /// accumulated integrator roundoff are clamped; anything further is an error.
    pub fn value(&self, t: f64) -> Result<f64, ModelError> {
        let tau = self.tau();
        let slack = 1e-9 * tau.max(1.0);
        if t < -slack || t > tau + slack {
            return Err(ModelError::TimeOutOfRange { t, tau });
        }
        let t = t.clamp(0.0, tau);
        Ok(match self {
            Self::Sine { amplitude, omega, tau } => amplitude * (omega * t / tau).sin(),
            Self::OneMinusCosine { amplitude, omega, tau } => {
                amplitude * (1.0 - (omega * t / tau).cos())
            }
            Self::Constant { amplitude, .. } => *amplitude,
            Self::Tabulated { times, values } => {
                let idx = times.partition_point(|&x| x <= t).min(times.len() - 1);
                if idx == 0 {
                    values[0]
                } else {
                    let (t0, t1) = (times[idx - 1], times[idx]);
                    let (v0, v1) = (values[idx - 1], values[idx]);
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        })
    }
}

/// Level structure and drive assignment for the n-level collective battery.
///
/// Levels carry 1-based physical labels: |1> is the shared excited level at
/// epsilon_base + delta_e, levels |2>..|n> sit at epsilon_base. `drives` maps
/// each ground label j to the waveform on the 1-j transition.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub n: usize,
    pub epsilon_base: f64,
    pub delta_e: f64,
    pub tunneling: f64,
    pub drives: BTreeMap<usize, DriveWaveform>,
}

impl SystemSpec {
    /// Spec with the default drive assignment: even ground labels get the
    /// sine ramp, odd labels the one-minus-cosine ramp, all sharing one
    /// amplitude, multiplier and charge time. For n = 4 this reproduces the
    /// three-qubit pattern (sine, one-minus-cosine, sine).
    pub fn with_default_drives(
        n: usize,
        epsilon_base: f64,
        delta_e: f64,
        tunneling: f64,
        amplitude: f64,
        omega: f64,
        tau: f64,
    ) -> Result<Self, ModelError> {
        let mut drives = BTreeMap::new();
        for j in 2..=n {
            let wave = if j % 2 == 0 {
                DriveWaveform::Sine { amplitude, omega, tau }
            } else {
                DriveWaveform::OneMinusCosine { amplitude, omega, tau }
            };
            drives.insert(j, wave);
        }
        let spec = Self { n, epsilon_base, delta_e, tunneling, drives };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 3 {
            return Err(ModelError::InvalidSpec {
                reason: format!("need n >= 3 levels, got {}", self.n),
            });
        }
        for v in [self.epsilon_base, self.delta_e, self.tunneling] {
            if !v.is_finite() {
                return Err(ModelError::InvalidSpec {
                    reason: format!("non-finite system parameter {v}"),
                });
            }
        }
        for j in 2..=self.n {
            match self.drives.get(&j) {
                Some(w) => w.validate()?,
                None => {
                    return Err(ModelError::InvalidSpec {
                        reason: format!("missing drive entry for ground level {j}"),
                    })
                }
            }
        }
        if let Some(&j) = self.drives.keys().find(|&&j| j < 2 || j > self.n) {
            return Err(ModelError::InvalidSpec {
                reason: format!("drive entry for label {j} outside 2..={}", self.n),
            });
        }
        let tau = self.charge_time();
        if self
            .drives
            .values()
            .any(|w| (w.tau() - tau).abs() > 1e-12 * tau.max(1.0))
        {
            return Err(ModelError::InvalidSpec {
                reason: "all drive channels must share one charge time".into(),
            });
        }
        Ok(())
    }

    /// Shared charge time tau of the drive channels.
    pub fn charge_time(&self) -> f64 {
        self.drives.values().next().map(|w| w.tau()).unwrap_or(0.0)
    }

    /// Bare level energies [eps_1, eps_base, ..., eps_base].
    pub fn bare_energies(&self) -> Vec<f64> {
        let mut e = vec![self.epsilon_base; self.n];
        e[0] += self.delta_e;
        e
    }

    /// Drive-free, tunneling-free diagonal Hamiltonian; the default energy
    /// and ergotropy reference H0.
    pub fn bare_hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::real_diag(&self.bare_energies())
    }

    /// Full system Hamiltonian at time t: diagonal bare energies, drive
    /// values on the first row/column, tunneling on the ground-chain
    /// off-diagonal. Real symmetric by construction.
    pub fn hamiltonian(&self, t: f64) -> Result<ComplexMatrix, ModelError> {
        let n = self.n;
        let mut h = self.bare_hamiltonian();
        for j in 2..=n {
            let value = self.drives[&j].value(t)?;
            h[(0, j - 1)] = Complex64::new(value, 0.0);
            h[(j - 1, 0)] = Complex64::new(value, 0.0);
        }
        for j in 2..n {
            // ground chain |j> -- |j+1>, 0-based rows j-1 and j
            h[(j - 1, j)] = Complex64::new(self.tunneling, 0.0);
            h[(j, j - 1)] = Complex64::new(self.tunneling, 0.0);
        }
        Ok(h)
    }
}

/// Initial-state selector for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Equal classical mixture of the ground levels: the discharged battery.
    UniformGround,
    /// Projector onto one level (1-based label).
    PureLevel(usize),
    /// Thermal state of the bare Hamiltonian at the given temperature.
    Gibbs(f64),
    /// Caller-supplied matrix, validated against the density-matrix invariants.
    Custom(ComplexMatrix),
}

pub fn initial_state(
    spec: &SystemSpec,
    kind: &InitialState,
    consts: &Constants,
) -> Result<DensityMatrix, ModelError> {
    let n = spec.n;
    match kind {
        InitialState::UniformGround => {
            let weight = 1.0 / (n as f64 - 1.0);
            let mut diag = vec![weight; n];
            diag[0] = 0.0;
            Ok(DensityMatrix::new(ComplexMatrix::real_diag(&diag))?)
        }
        InitialState::PureLevel(level) => {
            if *level < 1 || *level > n {
                return Err(ModelError::LevelOutOfRange { level: *level, n });
            }
            let mut diag = vec![0.0; n];
            diag[*level - 1] = 1.0;
            Ok(DensityMatrix::new(ComplexMatrix::real_diag(&diag))?)
        }
        InitialState::Gibbs(temperature) => {
            if !(*temperature > 0.0) {
                return Err(ModelError::NonPositiveTemperature { temperature: *temperature });
            }
            let energies = spec.bare_energies();
            let e_min = energies.iter().fold(f64::INFINITY, |m, &e| m.min(e));
            let beta = 1.0 / (consts.k_b * temperature);
            let weights: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
            let z: f64 = weights.iter().sum();
            let diag: Vec<f64> = weights.iter().map(|w| w / z).collect();
            Ok(DensityMatrix::new(ComplexMatrix::real_diag(&diag))?)
        }
        InitialState::Custom(matrix) => Ok(DensityMatrix::new(matrix.clone())?),
    }
}
