//! Integration oracles for the RK4 master-equation solver: closed-system
//! evolution against the exact propagator, analytic rate equations, and
//! thermal stationarity.

mod common;

use std::collections::BTreeMap;

use qbsim_core::{
    bath::JumpChannel,
    evolve, propagator, Constants,
    ComplexMatrix, DensityMatrix, DriveWaveform, EnergyReference, IntegratorConfig, SystemSpec,
};

fn constant_drive_spec(n: usize, amplitude: f64, tau: f64) -> SystemSpec {
    let mut drives = BTreeMap::new();
    for j in 2..=n {
        drives.insert(j, DriveWaveform::Constant { amplitude, tau });
    }
    SystemSpec { n, epsilon_base: 0.25, delta_e: 1.5, tunneling: 0.0, drives }
}

fn channel(from: usize, to: usize, rate: f64) -> JumpChannel {
    JumpChannel { from, to, bohr_frequency: 0.0, rate }
}

fn spectral_norm(h: &ComplexMatrix) -> f64 {
    qbsim_core::eig_hermitian(h)
        .unwrap()
        .values
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
}

#[test]
fn closed_system_matches_exact_propagator() {
    let t_end = 2.0;
    let spec = constant_drive_spec(4, 1.5, 10.0);
    let h = spec.hamiltonian(0.0).unwrap();
    let norm = spectral_norm(&h);
    let consts = Constants::default();

    let mut diag = vec![0.0; 4];
    diag[1] = 1.0;
    let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&diag)).unwrap();

    let cfg = IntegratorConfig {
        dt: 1e-3 / norm,
        t_end,
        record_every: 2_000,
        ..IntegratorConfig::defaults_for(10.0)
    };
    let traj = evolve(&rho0, &spec, &[], &consts, &cfg, EnergyReference::Bare).unwrap();

    let u = propagator(&h, t_end, consts.hbar).unwrap();
    let exact = u.matmul(rho0.matrix()).matmul(&u.adjoint());
    let err = traj.final_state().matrix().max_abs_diff(&exact);
    assert!(err <= 1e-8, "closed-system deviation {err:.3e}");
}

#[test]
fn closed_system_conserves_purity_under_time_dependent_drive() {
    let tau = 20.0;
    let spec =
        SystemSpec::with_default_drives(4, 0.25, 1.5, 0.05, 1.5, std::f64::consts::PI, tau)
            .unwrap();
    let mut diag = vec![0.0; 4];
    diag[2] = 1.0;
    let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&diag)).unwrap();
    let cfg = IntegratorConfig { record_every: 100, ..IntegratorConfig::defaults_for(tau) };
    let traj =
        evolve(&rho0, &spec, &[], &Constants::default(), &cfg, EnergyReference::Bare).unwrap();
    for rec in &traj.records {
        assert!((rec.purity - 1.0).abs() <= 1e-8, "purity drifted to {} at t = {}", rec.purity, rec.t);
    }
}

#[test]
fn rk4_error_scales_fourth_order_under_step_halving() {
    let t_end = 2.0;
    let spec = constant_drive_spec(4, 1.5, 10.0);
    let h = spec.hamiltonian(0.0).unwrap();
    let consts = Constants::default();
    let mut diag = vec![0.0; 4];
    diag[1] = 1.0;
    let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&diag)).unwrap();

    let u = propagator(&h, t_end, consts.hbar).unwrap();
    let exact = u.matmul(rho0.matrix()).matmul(&u.adjoint());

    let error_at = |dt: f64| {
        let cfg = IntegratorConfig {
            dt,
            t_end,
            record_every: 100_000,
            ..IntegratorConfig::defaults_for(10.0)
        };
        let traj = evolve(&rho0, &spec, &[], &consts, &cfg, EnergyReference::Bare).unwrap();
        traj.final_state().matrix().max_abs_diff(&exact)
    };

    let coarse = error_at(0.02);
    let fine = error_at(0.01);
    let ratio = coarse / fine;
    assert!(
        (4.0..=64.0).contains(&ratio),
        "error ratio {ratio:.2} outside 16 +/- factor 4 (coarse {coarse:.3e}, fine {fine:.3e})"
    );
}

#[test]
fn single_decay_channel_follows_rate_equation() {
    // p1(t) = exp(-2 R t) under the doubled-sandwich convention.
    let spec = constant_drive_spec(3, 0.0, 10.0);
    let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&[1.0, 0.0, 0.0])).unwrap();
    let r = 0.5;
    let cfg = IntegratorConfig {
        dt: 5e-4,
        t_end: 5.0,
        record_every: 100,
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
    for rec in &traj.records {
        let expected = (-2.0 * r * rec.t).exp();
        assert!(
            (rec.populations[0] - expected).abs() <= 1e-6,
            "p1({}) = {}, expected {expected}",
            rec.t,
            rec.populations[0]
        );
    }
}

#[test]
fn paired_thermal_channels_reach_boltzmann_ratio() {
    // Two active levels with the bare gap at T = 1; the third level is untouched.
    let spec = constant_drive_spec(3, 0.0, 40.0);
    let temperature = 1.0;
    let gap = spec.delta_e;
    let r_down = 1.0;
    let r_up = r_down * (-gap / temperature).exp();
    let rho0 =
        DensityMatrix::new(ComplexMatrix::real_diag(&[0.5, 0.5, 0.0])).unwrap();
    let cfg = IntegratorConfig {
        dt: 2e-3,
        t_end: 40.0,
        record_every: 1_000,
        ..IntegratorConfig::defaults_for(40.0)
    };
    let traj = evolve(
        &rho0,
        &spec,
        &[channel(1, 2, r_down), channel(2, 1, r_up)],
        &Constants::default(),
        &cfg,
        EnergyReference::Bare,
    )
    .unwrap();
    let p = traj.final_state().populations();
    let ratio = p[0] / p[1];
    let expected = (-gap / temperature).exp();
    assert!(
        (ratio / expected - 1.0).abs() <= 1e-6,
        "stationary ratio {ratio} vs Boltzmann {expected}"
    );
}

#[test]
fn all_pair_channels_relax_to_gibbs_populations() {
    use qbsim_core::{enumerate_channels, BathSpec, SpectralKind};

    let bath = BathSpec {
        kind: SpectralKind::DebyeLorentzian,
        gamma: 0.5,
        omega0: 1.0,
        temperature: 1.0,
        consts: Constants::default(),
    };
    bath.validate().unwrap();
    let probe_spec = constant_drive_spec(4, 0.0, 1.0);
    let channels = enumerate_channels(&probe_spec, &bath);
    let min_rate = channels.iter().map(|c| c.rate).fold(f64::INFINITY, f64::min);
    let t_end = 50.0 / min_rate;
    let spec = constant_drive_spec(4, 0.0, t_end);

    let rho0 = DensityMatrix::new(ComplexMatrix::real_diag(&[0.0, 1.0, 0.0, 0.0])).unwrap();
    let cfg = IntegratorConfig {
        dt: 0.01,
        t_end,
        record_every: 10_000,
        ..IntegratorConfig::defaults_for(t_end)
    };
    let traj = evolve(&rho0, &spec, &channels, &Constants::default(), &cfg, EnergyReference::Bare)
        .unwrap();

    let energies = spec.bare_energies();
    let weights: Vec<f64> = energies.iter().map(|e| (-e / bath.temperature).exp()).collect();
    let z: f64 = weights.iter().sum();
    let p = traj.final_state().populations();
    for (k, (&got, want)) in p.iter().zip(weights.iter().map(|w| w / z)).enumerate() {
        assert!(
            (got / want - 1.0).abs() <= 1e-5,
            "population {k}: {got} vs Boltzmann {want}"
        );
    }
}

#[test]
fn trajectory_flags_are_quiet_for_well_behaved_runs() {
    let tau = 20.0;
    let spec =
        SystemSpec::with_default_drives(4, 0.25, 1.5, 0.0, 1.5, std::f64::consts::PI, tau)
            .unwrap();
    let rho0 = qbsim_core::model::initial_state(
        &spec,
        &qbsim_core::InitialState::UniformGround,
        &Constants::default(),
    )
    .unwrap();
    let channels = [channel(1, 2, 0.01), channel(2, 1, 0.004)];
    let cfg = IntegratorConfig { record_every: 200, ..IntegratorConfig::defaults_for(tau) };
    let traj = evolve(&rho0, &spec, &channels, &Constants::default(), &cfg, EnergyReference::Bare)
        .unwrap();
    assert!(!traj.positivity_flag);
    assert!(traj.worst_min_eigenvalue >= -1e-7);
    assert!(traj.max_raw_trace_drift <= 1e-10);
}
