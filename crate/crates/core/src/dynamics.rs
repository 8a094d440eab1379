//! Master-equation integration.
//!
//! The equation of motion is
//!
//! ```text
//! d rho / dt = -(i/hbar) [H(t), rho] + sum_ij R_ij (2 L_ij rho L_ij'
//!              - {L_ij' L_ij, rho})
//! ```
//!
//! with L_ij = |i><j| and an explicit factor 2 on the sandwich term, so a
//! single channel with rate R empties its source population as exp(-2 R t).
//! `LindbladConvention::Half` rescales the whole dissipator by 1/2 for
//! comparison against the standard convention.
//!
//! Integration is fixed-step classic RK4 with the Hamiltonian evaluated at
//! t, t + dt/2 and t + dt. After every step the state is re-Hermitized and
//! trace-renormalized (both optional, both on by default); positivity is
//! monitored at record strides and violations are reported, never repaired.

use num_complex::Complex64;

use crate::bath::JumpChannel;
use crate::energetics::{self, EnergyReference};
use crate::linalg::ComplexMatrix;
use crate::model::{ModelError, SystemSpec};
use crate::Constants;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("violated invariant hermiticity: defect {defect:.3e} exceeds 1e-12")]
    NotHermitian { defect: f64 },
    #[error("violated invariant unit trace: trace = {trace} differs from 1 by more than 1e-9")]
    TraceNotOne { trace: f64 },
    #[error("violated invariant positivity: min eigenvalue {min_eigenvalue:.3e} below -{tolerance:.1e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },
    #[error("violated invariant finiteness: non-finite entry present")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid integrator config: {reason}")]
    InvalidConfig { reason: String },
    #[error("non-finite state at step {step} (t = {t})")]
    NonFiniteState { step: usize, t: f64 },
    #[error("record diagnostics failed: {0}")]
    Diagnostics(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Validated density matrix: Hermitian, unit trace, positive within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    trace: f64,
}

/// Positivity slack granted to validated states.
pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-7;

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self, StateError> {
        if !mat.all_finite() {
            return Err(StateError::NonFinite);
        }
        let defect = mat.hermitian_defect();
        if defect > 1e-12 {
            return Err(StateError::NotHermitian { defect });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(StateError::TraceNotOne { trace: trace.re });
        }
        let eig = crate::linalg::eig_hermitian(&mat).map_err(|_| StateError::NonFinite)?;
        let min_eigenvalue = eig.values[0];
        if min_eigenvalue < -DEFAULT_POSITIVITY_TOL {
            return Err(StateError::NotPositive {
                min_eigenvalue,
                tolerance: DEFAULT_POSITIVITY_TOL,
            });
        }
        Ok(Self { trace: trace.re, mat })
    }

    /// Wrap a matrix the integrator has already enforced, skipping validation.
    pub(crate) fn from_enforced(mat: ComplexMatrix) -> Self {
        let trace = mat.trace().re;
        Self { mat, trace }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.mat[(a, a)].re).collect()
    }
}

/// Fixed-step integrator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub hermitize: bool,
    pub renormalize_trace: bool,
    pub positivity_tol: f64,
    pub record_every: usize,
    pub convention: LindbladConvention,
}

impl IntegratorConfig {
    /// Defaults for a charge window of length tau: dt = tau / 20000,
    /// t_end = tau, enforcement on, records every 20 steps.
    pub fn defaults_for(tau: f64) -> Self {
        Self {
            dt: tau / 20_000.0,
            t_end: tau,
            hermitize: true,
            renormalize_trace: true,
            positivity_tol: DEFAULT_POSITIVITY_TOL,
            record_every: 20,
            convention: LindbladConvention::Doubled,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |reason: String| Err(DynamicsError::InvalidConfig { reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return bad(format!("t_end must be at least dt, got {}", self.t_end));
        }
        if self.record_every == 0 {
            return bad("record_every must be >= 1".into());
        }
        if !(self.positivity_tol > 0.0) {
            return bad(format!("positivity_tol must be positive, got {}", self.positivity_tol));
        }
        Ok(())
    }
}

/// Prefactor convention for the dissipator sandwich term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LindbladConvention {
    /// Factor 2 on the sandwich term: decay at 2R.
    #[default]
    Doubled,
    /// Standard GKSL normalization: decay at R.
    Half,
}

impl LindbladConvention {
    fn prefactor(self) -> f64 {
        match self {
            Self::Doubled => 1.0,
            Self::Half => 0.5,
        }
    }
}

/// Per-record diagnostics along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub energy: f64,
    pub ergotropy: f64,
    pub trace_error: f64,
    pub purity: f64,
    pub min_eigenvalue: f64,
    pub coherence_l1: f64,
    pub populations: Vec<f64>,
}

/// Recorded evolution of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub records: Vec<TrajectoryRecord>,
    /// Largest |Tr rho_raw - Tr rho_prev| over raw RK4 steps, before enforcement.
    pub max_raw_trace_drift: f64,
    /// Largest entrywise Hermitization correction applied.
    pub max_hermitize_correction: f64,
    pub worst_min_eigenvalue: f64,
    pub positivity_flag: bool,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_record(&self) -> &TrajectoryRecord {
        self.records.last().expect("trajectory holds at least the initial record")
    }
}

/// Dissipator sum over jump channels, evaluated in closed form.
///
/// For L = |i><j|: L rho L' = rho_jj |i><i| and {L'L, rho} only touches row
/// and column j, so each channel costs O(n) instead of three matrix products.
pub fn dissipator(
    rho: &DensityMatrix,
    channels: &[JumpChannel],
    convention: LindbladConvention,
) -> ComplexMatrix {
    dissipator_matrix(rho.matrix(), channels, convention)
}

fn dissipator_matrix(
    rho: &ComplexMatrix,
    channels: &[JumpChannel],
    convention: LindbladConvention,
) -> ComplexMatrix {
    let n = rho.dim();
    let kappa = convention.prefactor();
    let mut d = ComplexMatrix::zeros(n);
    for ch in channels {
        let i = ch.to - 1;
        let j = ch.from - 1;
        let r = kappa * ch.rate;
        d[(i, i)] += 2.0 * r * rho[(j, j)];
        for b in 0..n {
            let loss = r * rho[(j, b)];
            d[(j, b)] -= loss;
        }
        for a in 0..n {
            let loss = r * rho[(a, j)];
            d[(a, j)] -= loss;
        }
    }
    d
}

/// Full right-hand side -(i/hbar)[H(t), rho] + dissipator.
pub fn rhs(
    rho: &DensityMatrix,
    t: f64,
    spec: &SystemSpec,
    channels: &[JumpChannel],
    consts: &Constants,
    convention: LindbladConvention,
) -> Result<ComplexMatrix, DynamicsError> {
    let h = spec.hamiltonian(t)?;
    Ok(rhs_with_hamiltonian(&h, rho.matrix(), channels, consts, convention))
}

fn rhs_with_hamiltonian(
    h: &ComplexMatrix,
    rho: &ComplexMatrix,
    channels: &[JumpChannel],
    consts: &Constants,
    convention: LindbladConvention,
) -> ComplexMatrix {
    let commutator = h.matmul(rho).sub(&rho.matmul(h));
    let mut out = commutator.scaled(Complex64::new(0.0, -1.0 / consts.hbar));
    let d = dissipator_matrix(rho, channels, convention);
    out.add_scaled_assign(1.0, &d);
    out
}

/// Integrate the master equation from `rho0` to `cfg.t_end`.
pub fn evolve(
    rho0: &DensityMatrix,
    spec: &SystemSpec,
    channels: &[JumpChannel],
    consts: &Constants,
    cfg: &IntegratorConfig,
    energy_ref: EnergyReference,
) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    spec.validate()?;
    if rho0.dim() != spec.n {
        return Err(DynamicsError::InvalidConfig {
            reason: format!("state dimension {} does not match n = {}", rho0.dim(), spec.n),
        });
    }
    if let Some(ch) = channels.iter().find(|c| {
        c.from < 1 || c.from > spec.n || c.to < 1 || c.to > spec.n || c.from == c.to
    }) {
        return Err(DynamicsError::InvalidConfig {
            reason: format!("channel |{}><{}| outside 1..={}", ch.to, ch.from, spec.n),
        });
    }

    let n_full = ((cfg.t_end / cfg.dt) * (1.0 + 1e-12)).floor() as usize;
    let rem = cfg.t_end - n_full as f64 * cfg.dt;
    let has_partial = rem > 1e-9 * cfg.dt;
    let total_steps = n_full + usize::from(has_partial);

    let h_bare = spec.bare_hamiltonian();
    let h_ref_at = |t: f64| -> Result<ComplexMatrix, DynamicsError> {
        Ok(match energy_ref {
            EnergyReference::Bare => h_bare.clone(),
            EnergyReference::Instantaneous => spec.hamiltonian(t)?,
        })
    };

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        records: Vec::new(),
        max_raw_trace_drift: 0.0,
        max_hermitize_correction: 0.0,
        worst_min_eigenvalue: f64::INFINITY,
        positivity_flag: false,
        warnings: Vec::new(),
    };
    let mut positivity_violations = 0usize;

    let mut record =
        |traj: &mut Trajectory, t: f64, rho: &ComplexMatrix| -> Result<(), DynamicsError> {
            let state = DensityMatrix::from_enforced(rho.clone());
            let h_ref = h_ref_at(t)?;
            let energy = energetics::internal_energy(&state, rho0, &h_ref)
                .map_err(|e| DynamicsError::Diagnostics(e.to_string()))?;
            let erg = energetics::ergotropy(&state, &h_ref)
                .map_err(|e| DynamicsError::Diagnostics(e.to_string()))?;
            let diag = energetics::diagnostics(&state)
                .map_err(|e| DynamicsError::Diagnostics(e.to_string()))?;
            if diag.min_eigenvalue < traj.worst_min_eigenvalue {
                traj.worst_min_eigenvalue = diag.min_eigenvalue;
            }
            if diag.min_eigenvalue < -cfg.positivity_tol {
                positivity_violations += 1;
                if diag.min_eigenvalue < -1e3 * cfg.positivity_tol && !traj.positivity_flag {
                    traj.positivity_flag = true;
                    traj.warnings.push(format!(
                        "positivity violation beyond 1e3 * tolerance at t = {t}: min eigenvalue {:.3e}",
                        diag.min_eigenvalue
                    ));
                }
            }
            traj.records.push(TrajectoryRecord {
                t,
                energy,
                ergotropy: erg,
                trace_error: (state.trace() - 1.0).abs(),
                purity: diag.purity,
                min_eigenvalue: diag.min_eigenvalue,
                coherence_l1: diag.coherence_l1,
                populations: diag.populations,
            });
            traj.times.push(t);
            traj.states.push(state);
            Ok(())
        };

    let mut rho = rho0.matrix().clone();
    record(&mut traj, 0.0, &rho)?;

    for step in 0..total_steps {
        let t = step as f64 * cfg.dt;
        let h = if step < n_full { cfg.dt } else { rem };
        let t_next = if step + 1 == total_steps { cfg.t_end } else { (step + 1) as f64 * cfg.dt };

        let h_t = spec.hamiltonian(t)?;
        let h_mid = spec.hamiltonian(t + 0.5 * h)?;
        let h_end = spec.hamiltonian(t_next)?;

        let k1 = rhs_with_hamiltonian(&h_t, &rho, channels, consts, cfg.convention);
        let mut stage = rho.clone();
        stage.add_scaled_assign(0.5 * h, &k1);
        let k2 = rhs_with_hamiltonian(&h_mid, &stage, channels, consts, cfg.convention);
        stage = rho.clone();
        stage.add_scaled_assign(0.5 * h, &k2);
        let k3 = rhs_with_hamiltonian(&h_mid, &stage, channels, consts, cfg.convention);
        stage = rho.clone();
        stage.add_scaled_assign(h, &k3);
        let k4 = rhs_with_hamiltonian(&h_end, &stage, channels, consts, cfg.convention);

        let trace_before = rho.trace();
        rho.add_scaled_assign(h / 6.0, &k1);
        rho.add_scaled_assign(h / 3.0, &k2);
        rho.add_scaled_assign(h / 3.0, &k3);
        rho.add_scaled_assign(h / 6.0, &k4);

        if !rho.all_finite() {
            return Err(DynamicsError::NonFiniteState { step, t });
        }

        let drift = (rho.trace() - trace_before).norm();
        if drift > traj.max_raw_trace_drift {
            traj.max_raw_trace_drift = drift;
        }

        if cfg.hermitize {
            let sym = rho.hermitized();
            let correction = sym.max_abs_diff(&rho);
            if correction > traj.max_hermitize_correction {
                traj.max_hermitize_correction = correction;
            }
            rho = sym;
        }
        if cfg.renormalize_trace {
            let tr = rho.trace().re;
            rho = rho.scaled(Complex64::new(1.0 / tr, 0.0));
        }

        let is_last = step + 1 == total_steps;
        if (step + 1) % cfg.record_every == 0 && !is_last {
            record(&mut traj, t_next, &rho)?;
        } else if is_last {
            record(&mut traj, cfg.t_end, &rho)?;
        }
    }

    if positivity_violations > 0 {
        traj.warnings.push(format!(
            "{} recorded steps below -positivity_tol (worst min eigenvalue {:.3e})",
            positivity_violations, traj.worst_min_eigenvalue
        ));
    }
    if traj.max_hermitize_correction > 0.0 {
        traj.warnings.push(format!(
            "max hermitization correction {:.3e}, max raw trace drift {:.3e}",
            traj.max_hermitize_correction, traj.max_raw_trace_drift
        ));
    }

    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriveWaveform, InitialState};
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn undriven_spec(n: usize, delta_e: f64, tau: f64) -> SystemSpec {
        let mut drives = BTreeMap::new();
        for j in 2..=n {
            drives.insert(j, DriveWaveform::Constant { amplitude: 0.0, tau });
        }
        SystemSpec { n, epsilon_base: 0.25, delta_e, tunneling: 0.0, drives }
    }

    fn channel(from: usize, to: usize, rate: f64) -> JumpChannel {
        JumpChannel { from, to, bohr_frequency: 0.0, rate }
    }

    #[test]
    fn density_matrix_validation_names_violations() {
        let mut skew = ComplexMatrix::real_diag(&[0.5, 0.5]);
        skew[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(skew), Err(StateError::NotHermitian { .. })));

        let off_trace = ComplexMatrix::real_diag(&[0.7, 0.7]);
        assert!(matches!(DensityMatrix::new(off_trace), Err(StateError::TraceNotOne { .. })));

        let negative = ComplexMatrix::real_diag(&[1.2, -0.2]);
        assert!(matches!(DensityMatrix::new(negative), Err(StateError::NotPositive { .. })));

        let fine = ComplexMatrix::real_diag(&[0.5, 0.5]);
        assert!(DensityMatrix::new(fine).is_ok());
    }

    #[test]
    fn dissipator_single_channel_projector() {
        // L = |2><1| at rate R on rho = |1><1|: population leaves at 2R.
        let rho = DensityMatrix::new(ComplexMatrix::real_diag(&[1.0, 0.0])).unwrap();
        let r = 0.37;
        let d = dissipator(&rho, &[channel(1, 2, r)], LindbladConvention::Doubled);
        assert!((d[(0, 0)].re + 2.0 * r).abs() < 1e-15);
        assert!((d[(1, 1)].re - 2.0 * r).abs() < 1e-15);
        assert!(d[(0, 1)].norm() < 1e-15 && d[(1, 0)].norm() < 1e-15);

        let d_half = dissipator(&rho, &[channel(1, 2, r)], LindbladConvention::Half);
        assert!((d_half[(0, 0)].re + r).abs() < 1e-15);
    }

    #[test]
    fn dissipator_fixed_point_of_symmetric_hopping() {
        let rho = DensityMatrix::new(ComplexMatrix::real_diag(&[0.25; 4])).unwrap();
        let mut channels = Vec::new();
        for a in 1..=4 {
            for b in 1..=4 {
                if a != b {
                    channels.push(channel(a, b, 0.8));
                }
            }
        }
        let d = dissipator(&rho, &channels, LindbladConvention::Doubled);
        assert!(d.max_abs() < 1e-15);
    }

    #[test]
    fn dissipator_is_traceless_and_hermitian() {
        let mut m = ComplexMatrix::real_diag(&[0.4, 0.35, 0.25]);
        m[(0, 1)] = c(0.1, 0.05);
        m[(1, 0)] = c(0.1, -0.05);
        m[(0, 2)] = c(-0.02, 0.03);
        m[(2, 0)] = c(-0.02, -0.03);
        let rho = DensityMatrix::new(m).unwrap();
        let channels =
            [channel(1, 2, 0.3), channel(2, 1, 0.1), channel(3, 1, 0.05), channel(2, 3, 0.2)];
        let d = dissipator(&rho, &channels, LindbladConvention::Doubled);
        assert!(d.trace().norm() < 1e-12);
        assert!(d.hermitian_defect() < 1e-14);
    }

    #[test]
    fn rhs_commuting_diagonal_pieces_vanish() {
        let spec = undriven_spec(3, 1.0, 1.0);
        let third = 1.0 / 3.0;
        let rho = DensityMatrix::new(ComplexMatrix::real_diag(&[third; 3])).unwrap();
        let out = rhs(&rho, 0.5, &spec, &[], &Constants::default(), LindbladConvention::Doubled)
            .unwrap();
        assert!(out.max_abs() < 1e-15);
    }

    #[test]
    fn rhs_two_level_commutator_by_hand() {
        // H = Pauli-X, rho = |1><1|: d rho = -i [H, rho] has
        // entries (0,1) = i, (1,0) = -i on the computational labels used here.
        let mut drives = BTreeMap::new();
        drives.insert(2, DriveWaveform::Constant { amplitude: 1.0, tau: 1.0 });
        drives.insert(3, DriveWaveform::Constant { amplitude: 0.0, tau: 1.0 });
        let spec = SystemSpec { n: 3, epsilon_base: 0.0, delta_e: 0.0, tunneling: 0.0, drives };
        let rho = DensityMatrix::new(ComplexMatrix::real_diag(&[1.0, 0.0, 0.0])).unwrap();
        let out = rhs(&rho, 0.3, &spec, &[], &Constants::default(), LindbladConvention::Doubled)
            .unwrap();
        assert!((out[(0, 1)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((out[(1, 0)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(out[(0, 0)].norm() < 1e-15 && out[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn rhs_reduces_to_dissipator_when_commutator_vanishes() {
        let spec = undriven_spec(4, 1.5, 1.0);
        let rho = crate::model::initial_state(
            &spec,
            &InitialState::UniformGround,
            &Constants::default(),
        )
        .unwrap();
        let channels = [channel(1, 2, 0.11), channel(2, 3, 0.07)];
        let consts = Constants::default();
        let full =
            rhs(&rho, 0.0, &spec, &channels, &consts, LindbladConvention::Doubled).unwrap();
        let dis = dissipator(&rho, &channels, LindbladConvention::Doubled);
        assert!(full.max_abs_diff(&dis) < 1e-15);
    }

    #[test]
    fn evolve_single_decay_channel_matches_exponential() {
        // third level is an inert spectator
        let spec = undriven_spec(3, 1.0, 10.0);
        let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&[1.0, 0.0, 0.0])).unwrap();
        let r = 0.5;
        let cfg = IntegratorConfig {
            dt: 1e-3,
            t_end: 1.0,
            ..IntegratorConfig::defaults_for(10.0)
        };
        let traj = evolve(
            &rho0,
            &spec,
            &[channel(1, 2, r)],
            &Constants::default(),
            &cfg,
            EnergyReference::Bare,
        )
        .unwrap();
        let p1 = traj.final_state().matrix()[(0, 0)].re;
        let expected = (-2.0 * r * 1.0f64).exp();
        assert!((p1 - expected).abs() < 1e-6, "p1 = {p1}, expected {expected}");
    }

    #[test]
    fn evolve_keeps_populations_in_range_and_trace_tight() {
        let spec = SystemSpec::with_default_drives(
            4,
            0.25,
            1.5,
            0.05,
            1.5,
            std::f64::consts::PI,
            40.0,
        )
        .unwrap();
        let rho0 = crate::model::initial_state(
            &spec,
            &InitialState::UniformGround,
            &Constants::default(),
        )
        .unwrap();
        let channels = [channel(1, 2, 0.01), channel(2, 1, 0.002), channel(2, 3, 0.015)];
        let cfg = IntegratorConfig { record_every: 50, ..IntegratorConfig::defaults_for(40.0) };
        let traj = evolve(
            &rho0,
            &spec,
            &channels,
            &Constants::default(),
            &cfg,
            EnergyReference::Bare,
        )
        .unwrap();
        assert!(traj.max_raw_trace_drift <= 1e-10);
        for rec in &traj.records {
            assert!(rec.trace_error <= 1e-9);
            for &p in &rec.populations {
                assert!((-1e-7..=1.0 + 1e-7).contains(&p), "population {p} out of range");
            }
        }
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.times.len(), traj.records.len());
        assert_eq!(traj.times.len(), traj.states.len());
        assert!((traj.times.last().unwrap() - 40.0).abs() < 1e-9);
    }

    #[test]
    fn evolve_diagonal_problem_stays_population_sector() {
        let spec = undriven_spec(4, 1.5, 5.0);
        let rho0 = crate::model::initial_state(
            &spec,
            &InitialState::UniformGround,
            &Constants::default(),
        )
        .unwrap();
        let mut channels = Vec::new();
        for a in 1..=4 {
            for b in 1..=4 {
                if a != b {
                    channels.push(channel(a, b, 0.05 + 0.01 * (a + b) as f64));
                }
            }
        }
        let cfg = IntegratorConfig { dt: 1e-3, ..IntegratorConfig::defaults_for(5.0) };
        let traj = evolve(
            &rho0,
            &spec,
            &channels,
            &Constants::default(),
            &cfg,
            EnergyReference::Bare,
        )
        .unwrap();
        for state in &traj.states {
            let m = state.matrix();
            for a in 0..4 {
                for b in 0..4 {
                    if a != b {
                        assert!(m[(a, b)].norm() <= 1e-12, "coherence grew at ({a},{b})");
                    }
                }
            }
        }
    }

    #[test]
    fn evolve_rejects_bad_config_and_mismatched_dimensions() {
        let spec = undriven_spec(3, 1.0, 1.0);
        let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&[1.0, 0.0])).unwrap();
        let cfg = IntegratorConfig::defaults_for(1.0);
        assert!(matches!(
            evolve(&rho0, &spec, &[], &Constants::default(), &cfg, EnergyReference::Bare),
            Err(DynamicsError::InvalidConfig { .. })
        ));

        let bad_cfg = IntegratorConfig { dt: 0.0, ..IntegratorConfig::defaults_for(1.0) };
        let rho3 =
            DensityMatrix::new(ComplexMatrix::real_diag(&[0.5, 0.25, 0.25])).unwrap();
        assert!(matches!(
            evolve(&rho3, &spec, &[], &Constants::default(), &bad_cfg, EnergyReference::Bare),
            Err(DynamicsError::InvalidConfig { .. })
        ));
    }
}
