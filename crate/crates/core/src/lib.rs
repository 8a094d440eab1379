//! Simulation core for collective multi-level quantum batteries: a Λ-type
//! n-level system driven by time-dependent charging fields, damped by a
//! structured bosonic environment through frequency-resolved jump rates, and
//! scored by internal energy and ergotropy along the trajectory.

pub mod bath;
pub mod dynamics;
pub mod energetics;
pub mod linalg;
pub mod model;

pub use num_complex::Complex64;

pub use bath::{enumerate_channels, rate_surface, BathSpec, JumpChannel, SpectralKind};
pub use dynamics::{
    dissipator, evolve, rhs, DensityMatrix, IntegratorConfig, LindbladConvention, Trajectory,
    TrajectoryRecord,
};
pub use energetics::{
    diagnostics, ergotropy, internal_energy, passive_state, EnergyRecord, EnergyReference,
    StateDiagnostics,
};
pub use linalg::{eig_hermitian, propagator, trace_product, ComplexMatrix, EigenDecomposition};
pub use model::{DriveWaveform, InitialState, SystemSpec};

/// Physical constants threaded through the model and bath.
///
/// Parameter tables are ingested numerically into a single internal unit
/// system, so both constants default to 1. Override them to work in a
/// dimensional unit system instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub k_b: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { hbar: 1.0, k_b: 1.0 }
    }
}

impl Constants {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(format!("hbar must be positive and finite, got {}", self.hbar));
        }
        if !(self.k_b > 0.0 && self.k_b.is_finite()) {
            return Err(format!("k_b must be positive and finite, got {}", self.k_b));
        }
        Ok(())
    }
}
