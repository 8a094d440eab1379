//! Ergotropy oracles: brute-force minimization over eigenvalue pairings,
//! unitary covariance, and passivity of thermal states.

mod common;

use common::{permutations, random_density, random_hermitian, random_unitary};
use rand::rngs::StdRng;
use rand::SeedableRng;

use qbsim_core::{
    eig_hermitian, ergotropy, passive_state, trace_product, ComplexMatrix, DensityMatrix,
};

/// Minimum of sum_k r_{perm(k)} E_k over all pairings: the passive energy.
fn brute_force_passive_energy(rho: &DensityMatrix, h_ref: &ComplexMatrix) -> f64 {
    let r = eig_hermitian(rho.matrix()).unwrap().values;
    let e = eig_hermitian(h_ref).unwrap().values;
    permutations(r.len())
        .into_iter()
        .map(|perm| perm.iter().zip(e.iter()).map(|(&p, energy)| r[p] * energy).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn sorted_pairing_matches_brute_force_minimum() {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..300 {
        let rho = random_density(&mut rng, 4);
        let h = random_hermitian(&mut rng, 4, 2.0);
        let active = trace_product(&h, rho.matrix()).unwrap().re;
        let expected = active - brute_force_passive_energy(&rho, &h);
        let got = ergotropy(&rho, &h).unwrap();
        assert!(
            (got - expected).abs() <= 1e-10,
            "trial {trial}: sorted pairing {got} vs brute force {expected}"
        );
        assert!(got >= -1e-10, "trial {trial}: negative ergotropy {got}");
    }
}

#[test]
fn ergotropy_unitary_covariance() {
    let mut rng = StdRng::seed_from_u64(11);
    for trial in 0..100 {
        let rho = random_density(&mut rng, 4);
        let h = random_hermitian(&mut rng, 4, 1.5);
        let u = random_unitary(&mut rng, 4);
        let rho_u = DensityMatrix::new(
            u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitized(),
        )
        .unwrap();
        let h_u = u.matmul(&h).matmul(&u.adjoint()).hermitized();
        let base = ergotropy(&rho, &h).unwrap();
        let rotated = ergotropy(&rho_u, &h_u).unwrap();
        assert!(
            (base - rotated).abs() <= 1e-9,
            "trial {trial}: {base} vs {rotated} under conjugation"
        );
    }
}

#[test]
fn rotated_passive_state_unwinds_to_definition() {
    // rho = U rho_p U' for passive rho_p: ergotropy equals
    // Tr[H rho] - Tr[H rho_p] and is nonnegative.
    let mut rng = StdRng::seed_from_u64(23);
    let h = ComplexMatrix::real_diag(&[1.75, 0.25, 0.25, 0.25]);
    for trial in 0..100 {
        let seed = random_density(&mut rng, 4);
        let rho_p = passive_state(&seed, &h).unwrap();
        let u = random_unitary(&mut rng, 4);
        let rho = DensityMatrix::new(
            u.matmul(rho_p.matrix()).matmul(&u.adjoint()).hermitized(),
        )
        .unwrap();
        let got = ergotropy(&rho, &h).unwrap();
        let expected = trace_product(&h, rho.matrix()).unwrap().re
            - trace_product(&h, rho_p.matrix()).unwrap().re;
        assert!((got - expected).abs() <= 1e-9, "trial {trial}: {got} vs {expected}");
        assert!(got >= -1e-10);
    }
}

#[test]
fn passive_state_preserves_spectrum() {
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..50 {
        let rho = random_density(&mut rng, 5);
        let h = random_hermitian(&mut rng, 5, 1.0);
        let passive = passive_state(&rho, &h).unwrap();
        let mut original = eig_hermitian(rho.matrix()).unwrap().values;
        let mut output = eig_hermitian(passive.matrix()).unwrap().values;
        original.sort_by(f64::total_cmp);
        output.sort_by(f64::total_cmp);
        for (a, b) in original.iter().zip(output.iter()) {
            assert!((a - b).abs() <= 1e-10, "spectrum changed: {a} vs {b}");
        }
    }
}

#[test]
fn gibbs_states_carry_no_ergotropy() {
    let mut rng = StdRng::seed_from_u64(41);
    for _ in 0..50 {
        let h = random_hermitian(&mut rng, 4, 1.0);
        let eig = eig_hermitian(&h).unwrap();
        let beta = 0.9;
        let weights: Vec<f64> = eig.values.iter().map(|e| (-beta * e).exp()).collect();
        let z: f64 = weights.iter().sum();
        let n = 4;
        let gibbs = ComplexMatrix::from_fn(n, |a, b| {
            (0..n)
                .map(|k| eig.vectors[(a, k)] * (weights[k] / z) * eig.vectors[(b, k)].conj())
                .sum()
        });
        let rho = DensityMatrix::new(gibbs.hermitized()).unwrap();
        let erg = ergotropy(&rho, &h).unwrap();
        assert!(erg.abs() <= 1e-10, "gibbs ergotropy {erg}");
    }
}

#[test]
fn ergotropy_stable_under_degenerate_eigenvector_shuffle() {
    // Reference with a degenerate block: rotating the state within the
    // block must not change the ergotropy.
    let mut rng = StdRng::seed_from_u64(53);
    let h = ComplexMatrix::real_diag(&[2.0, 0.5, 0.5, 0.5]);
    for _ in 0..50 {
        let rho = random_density(&mut rng, 4);
        let base = ergotropy(&rho, &h).unwrap();

        // block unitary acting on the degenerate ground subspace
        let sub = random_unitary(&mut rng, 3);
        let mut u = ComplexMatrix::identity(4);
        for a in 0..3 {
            for b in 0..3 {
                u[(a + 1, b + 1)] = sub[(a, b)];
            }
        }
        let h_rot = u.matmul(&h).matmul(&u.adjoint()).hermitized();
        assert!(h_rot.max_abs_diff(&h) <= 1e-12, "degenerate block rotation must fix H");
        let rho_rot = DensityMatrix::new(
            u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitized(),
        )
        .unwrap();
        let rotated = ergotropy(&rho_rot, &h).unwrap();
        assert!((base - rotated).abs() <= 1e-9);
    }
}

#[test]
fn energy_record_fields_obey_bounds() {
    use qbsim_core::energetics::energy_record;
    let mut rng = StdRng::seed_from_u64(97);
    let h = ComplexMatrix::real_diag(&[1.75, 0.25, 0.25, 0.25]);
    let rho0 = random_density(&mut rng, 4);
    for _ in 0..100 {
        let rho = random_density(&mut rng, 4);
        let rec = energy_record(&rho, &rho0, &h, 1.25).unwrap();
        assert_eq!(rec.t, 1.25);
        assert!(rec.ergotropy >= -1e-10);
        // extractable work is capped by the distance to the bottom level
        let active = trace_product(&h, rho.matrix()).unwrap().re;
        assert!(rec.ergotropy <= active - 0.25 + 1e-10);
        let pop_sum: f64 = rec.populations.iter().sum();
        assert!((pop_sum - 1.0).abs() <= 1e-9);
        assert!(rec.purity > 0.0 && rec.purity <= 1.0 + 1e-12);
        assert!(rec.coherence_l1 >= 0.0);
    }
}

#[test]
fn density_eigenvalues_sum_to_one() {
    let mut rng = StdRng::seed_from_u64(61);
    for dim in 2..=8 {
        let rho = random_density(&mut rng, dim);
        let sum: f64 = eig_hermitian(rho.matrix()).unwrap().values.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn trace_product_real_for_hermitian_psd_pair() {
    let mut rng = StdRng::seed_from_u64(71);
    for _ in 0..50 {
        let rho = random_density(&mut rng, 4);
        let h = random_hermitian(&mut rng, 4, 3.0);
        let tr = trace_product(&h, rho.matrix()).unwrap();
        assert!(tr.im.abs() <= 1e-12);
    }
}
