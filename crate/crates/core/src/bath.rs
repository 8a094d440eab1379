//! Structured environment: Debye-form spectral densities, the thermal rate
//! factor, and the jump channels they induce between bare levels.
//!
//! The rate function is
//!
//! ```text
//! R(omega) = J(omega) [coth(hbar omega / 2 kB T) + 1]
//! ```
//!
//! with J odd-extended to negative frequencies, so R(omega) >= 0 everywhere
//! and R(omega) / R(-omega) = exp(hbar omega / kB T) (detailed balance).

use crate::model::SystemSpec;
use crate::Constants;

/// Channels with rates below this are dropped during enumeration.
pub const RATE_FLOOR: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BathError {
    #[error("invalid bath spec: {reason}")]
    InvalidSpec { reason: String },
}

/// Spectral-density shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    /// J(omega) = gamma omega / (omega0^2 + omega^2)
    DebyeLorentzian,
    /// J(omega) = gamma (omega / omega0) exp(-omega / omega0), odd-extended
    DebyeExponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    pub kind: SpectralKind,
    pub gamma: f64,
    pub omega0: f64,
    pub temperature: f64,
    pub consts: Constants,
}

impl BathSpec {
    pub fn validate(&self) -> Result<(), BathError> {
        let bad = |reason: String| Err(BathError::InvalidSpec { reason });
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be nonnegative, got {}", self.gamma));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return bad(format!("omega0 must be positive, got {}", self.omega0));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature must be positive, got {}", self.temperature));
        }
        self.consts.validate().map_err(|reason| BathError::InvalidSpec { reason })?;
        Ok(())
    }

    /// Spectral density J(omega). Odd in omega; J(0) = 0 exactly.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        if omega == 0.0 {
            return 0.0;
        }
        match self.kind {
            SpectralKind::DebyeLorentzian => {
                self.gamma * omega / (self.omega0 * self.omega0 + omega * omega)
            }
            SpectralKind::DebyeExponential => {
                let a = omega.abs();
                let magnitude = self.gamma * (a / self.omega0) * (-a / self.omega0).exp();
                magnitude.copysign(omega)
            }
        }
    }

    /// Slope of J at omega = 0, used for the small-frequency rate limit.
    fn zero_slope(&self) -> f64 {
        match self.kind {
            SpectralKind::DebyeLorentzian => self.gamma / (self.omega0 * self.omega0),
            SpectralKind::DebyeExponential => self.gamma / self.omega0,
        }
    }

    /// Crossover below which the rate switches to its analytic omega -> 0 limit.
    pub fn omega_small(&self) -> f64 {
        let thermal = self.consts.k_b * self.temperature / self.consts.hbar;
        1e-8 * self.omega0.max(thermal)
    }

    /// Thermal jump rate R(omega) = J(omega) [coth(hbar omega / 2 kB T) + 1].
    ///
    /// For |omega| below the crossover the 0 * inf product is replaced by the
    /// analytic limit 2 J'(0) kB T / hbar, carrying the exp(hbar omega / 2 kB T)
    /// factor so detailed balance stays exact through the branch switch. At
    /// omega = 0 this is the plain limit.
    pub fn redfield_rate(&self, omega: f64) -> f64 {
        let x = self.consts.hbar * omega / (2.0 * self.consts.k_b * self.temperature);
        if omega.abs() <= self.omega_small() {
            let limit =
                2.0 * self.zero_slope() * self.consts.k_b * self.temperature / self.consts.hbar;
            return limit * x.exp();
        }
        let rate = self.spectral_density(omega) * (1.0 / x.tanh() + 1.0);
        // guard roundoff in the deep negative-frequency tail
        rate.max(0.0)
    }
}

/// One dissipative transition |from> -> |to> with its bare Bohr frequency and
/// thermal rate. Indices are 1-based level labels.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChannel {
    pub from: usize,
    pub to: usize,
    pub bohr_frequency: f64,
    pub rate: f64,
}

/// All ordered level pairs (to, from) with rates evaluated at the bare Bohr
/// frequency (eps_from - eps_to) / hbar. Channels below [`RATE_FLOOR`] are
/// pruned.
pub fn enumerate_channels(spec: &SystemSpec, bath: &BathSpec) -> Vec<JumpChannel> {
    let energies = spec.bare_energies();
    let mut channels = Vec::with_capacity(spec.n * (spec.n - 1));
    for to in 1..=spec.n {
        for from in 1..=spec.n {
            if to == from {
                continue;
            }
            let bohr = (energies[from - 1] - energies[to - 1]) / bath.consts.hbar;
            let rate = bath.redfield_rate(bohr);
            if rate < RATE_FLOOR {
                continue;
            }
            channels.push(JumpChannel { from, to, bohr_frequency: bohr, rate });
        }
    }
    channels
}

/// One row of the tabulated spectral surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub omega: f64,
    pub spectral_density: f64,
    pub rate: f64,
}

/// Tabulate (omega, J, R) over a frequency grid.
pub fn rate_surface(bath: &BathSpec, omega_grid: &[f64]) -> Vec<RatePoint> {
    omega_grid
        .iter()
        .map(|&omega| RatePoint {
            omega,
            spectral_density: bath.spectral_density(omega),
            rate: bath.redfield_rate(omega),
        })
        .collect()
}
