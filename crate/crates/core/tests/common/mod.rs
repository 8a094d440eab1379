//! Shared deterministic random generators for the oracle tests.
#![allow(dead_code)] // each test target uses a subset

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

use qbsim_core::{eig_hermitian, ComplexMatrix, DensityMatrix};

pub fn random_hermitian(rng: &mut StdRng, dim: usize, scale: f64) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 2.0 * scale
    });
    raw.hermitized()
}

/// G G' / Tr(G G'): Hermitian, positive semidefinite, unit trace.
pub fn random_density(rng: &mut StdRng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let gram = g.matmul(&g.adjoint());
    let trace = gram.trace().re;
    DensityMatrix::new(gram.scaled(Complex64::new(1.0 / trace, 0.0)).hermitized())
        .expect("Gram construction yields a valid state")
}

/// Eigenvector matrix of a random Hermitian: unitary.
pub fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, dim, 1.0);
    eig_hermitian(&h).expect("random Hermitian decomposes").vectors
}

/// All permutations of 0..n (n small).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn recurse(prefix: &mut Vec<usize>, remaining: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..remaining.len() {
            let item = remaining.remove(k);
            prefix.push(item);
            recurse(prefix, remaining, out);
            prefix.pop();
            remaining.insert(k, item);
        }
    }
    let mut out = Vec::new();
    recurse(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}
