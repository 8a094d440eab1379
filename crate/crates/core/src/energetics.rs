//! Energy bookkeeping: internal energy relative to the initial state,
//! passive-state construction, ergotropy, and per-state diagnostics.
//!
//! The passive counterpart of rho pairs its eigenvalues, sorted descending,
//! with the reference Hamiltonian's eigenenergies sorted ascending. Ergotropy
//! is the energy gap to that state,
//!
//! ```text
//! ergotropy = Tr[H rho] - sum_k r_k E_k,   r_1 >= r_2 >= ...,  E_1 <= E_2 <= ...
//! ```
//!
//! which the rearrangement inequality makes the minimum over all pairings.

use crate::dynamics::DensityMatrix;
use crate::linalg::{self, ComplexMatrix, LinalgError};

/// Eigenvalues of rho below this are treated as positivity violations and
/// clamped to zero (with renormalization) before the passive construction.
pub const SPECTRUM_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnergeticsError {
    #[error("dimension mismatch: state is {state}, reference is {reference}")]
    DimensionMismatch { state: usize, reference: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which Hamiltonian prices energy and ergotropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyReference {
    /// The bare diagonal H0 (no drives, no tunneling). Default.
    #[default]
    Bare,
    /// The full instantaneous H(t).
    Instantaneous,
}

/// Energetic snapshot of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    pub energy: f64,
    pub ergotropy: f64,
    pub purity: f64,
    pub populations: Vec<f64>,
    pub coherence_l1: f64,
}

/// Tr[H_ref rho] - Tr[H_ref rho0].
pub fn internal_energy(
    rho: &DensityMatrix,
    rho0: &DensityMatrix,
    h_ref: &ComplexMatrix,
) -> Result<f64, EnergeticsError> {
    check_dims(rho, h_ref)?;
    check_dims(rho0, h_ref)?;
    let now = linalg::trace_product(h_ref, rho.matrix())?;
    let start = linalg::trace_product(h_ref, rho0.matrix())?;
    Ok(now.re - start.re)
}

/// Descending spectrum of rho, clamped and renormalized when eigenvalues dip
/// below -[`SPECTRUM_CLAMP`]. Returns (spectrum, clamped magnitude).
fn descending_spectrum(rho: &DensityMatrix) -> Result<(Vec<f64>, f64), EnergeticsError> {
    let eig = linalg::eig_hermitian(rho.matrix())?;
    let mut values = eig.values;
    values.reverse();
    let min = *values.last().expect("non-empty spectrum");
    let mut clamped = 0.0;
    if min < -SPECTRUM_CLAMP {
        clamped = -min;
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        for v in values.iter_mut() {
            *v /= sum;
        }
    }
    Ok((values, clamped))
}

/// The passive counterpart of rho with respect to h_ref.
pub fn passive_state(
    rho: &DensityMatrix,
    h_ref: &ComplexMatrix,
) -> Result<DensityMatrix, EnergeticsError> {
    check_dims(rho, h_ref)?;
    let (populations, _clamped) = descending_spectrum(rho)?;
    let h_eig = linalg::eig_hermitian(h_ref)?;
    let n = rho.dim();
    let mat = ComplexMatrix::from_fn(n, |a, b| {
        (0..n)
            .map(|k| h_eig.vectors[(a, k)] * populations[k] * h_eig.vectors[(b, k)].conj())
            .sum()
    });
    Ok(DensityMatrix::new(mat.hermitized()).expect("passive construction preserves state invariants"))
}

/// Maximum unitarily extractable work from rho with respect to h_ref.
pub fn ergotropy(rho: &DensityMatrix, h_ref: &ComplexMatrix) -> Result<f64, EnergeticsError> {
    check_dims(rho, h_ref)?;
    let (populations, _clamped) = descending_spectrum(rho)?;
    let h_eig = linalg::eig_hermitian(h_ref)?;
    let active = linalg::trace_product(h_ref, rho.matrix())?.re;
    let passive: f64 =
        populations.iter().zip(h_eig.values.iter()).map(|(r, e)| r * e).sum();
    Ok(active - passive)
}

/// Purity, populations, l1 coherence, minimum eigenvalue of rho.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDiagnostics {
    pub purity: f64,
    pub populations: Vec<f64>,
    pub coherence_l1: f64,
    pub min_eigenvalue: f64,
}

pub fn diagnostics(rho: &DensityMatrix) -> Result<StateDiagnostics, EnergeticsError> {
    let m = rho.matrix();
    let n = m.dim();
    let purity = linalg::trace_product(m, m)?.re;
    let mut coherence_l1 = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                coherence_l1 += m[(a, b)].norm();
            }
        }
    }
    let eig = linalg::eig_hermitian(m)?;
    Ok(StateDiagnostics {
        purity,
        populations: rho.populations(),
        coherence_l1,
        min_eigenvalue: eig.values[0],
    })
}

/// Bundle the energetic observables at time t.
pub fn energy_record(
    rho: &DensityMatrix,
    rho0: &DensityMatrix,
    h_ref: &ComplexMatrix,
    t: f64,
) -> Result<EnergyRecord, EnergeticsError> {
    let diag = diagnostics(rho)?;
    Ok(EnergyRecord {
        t,
        energy: internal_energy(rho, rho0, h_ref)?,
        ergotropy: ergotropy(rho, h_ref)?,
        purity: diag.purity,
        populations: diag.populations,
        coherence_l1: diag.coherence_l1,
    })
}

fn check_dims(rho: &DensityMatrix, h_ref: &ComplexMatrix) -> Result<(), EnergeticsError> {
    if rho.dim() != h_ref.dim() {
        return Err(EnergeticsError::DimensionMismatch {
            state: rho.dim(),
            reference: h_ref.dim(),
        });
    }
    Ok(())
}
