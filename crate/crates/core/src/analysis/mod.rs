//! Chaos diagnostics: concurrence, Uhlmann fidelity, spin-coherent-state
//! overlap (`O_SCS`) and time averages, plus the parameter sweeps built on
//! them.

mod sweep;

use std::f64::consts::{PI, TAU};

pub use sweep::{
    compile_schedule, evolve_exact, kappa_sweep, least_squares_slope, noisy_fidelity_trend,
    oscs_trace, phase_grid_sweep, tomography_fidelity, Axis, Mode, SlopeFit, SweepCell,
    SweepMetadata, SweepOptions, SweepResult,
};

use crate::error::{QktError, Result};
use crate::linalg::{eigh, kron2, mat4_to_dyn, pauli_y, sqrtm_psd, C64};
use crate::sim::{DensityMatrix, QubitState};

/// Eigenvalues of `ρρ̃` in `(−CLIP, 0)` are treated as zero; anything more
/// negative means the input was corrupted.
const CONCURRENCE_CLIP: f64 = 1e-10;

/// Wootters concurrence `max(0, √λ1 − √λ2 − √λ3 − √λ4)`.
///
/// The `λi` are the eigenvalues of `ρρ̃`, `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`. They are
/// obtained from the Hermitian matrix `√ρ ρ̃ √ρ`, which has the same spectrum.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let yy = kron2(&pauli_y(), &pauli_y());
    let m = rho.matrix();
    let tilde = yy * m.map(|x| x.conj()) * yy;
    let sqrt_rho = sqrtm_psd(&mat4_to_dyn(m));
    let prod = &sqrt_rho * mat4_to_dyn(&tilde) * &sqrt_rho;
    let (vals, _) = eigh(&prod);
    let mut roots = Vec::with_capacity(4);
    for l in vals {
        if l < -CONCURRENCE_CLIP {
            return Err(QktError::Internal(format!("ρρ̃ has eigenvalue {l:e}")));
        }
        roots.push(l.max(0.0).sqrt());
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0))
}

/// Concurrence of a pure state, `2|a00 a11 − a01 a10|`.
pub fn concurrence_pure(state: &QubitState) -> f64 {
    let a = state.amplitudes();
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}

/// States whose top eigenvalue is this close to one are treated as pure.
const PURITY_CUTOFF: f64 = 1e-12;

/// Dominant eigenvector when `rho` is numerically pure.
fn pure_vector(rho: &DensityMatrix) -> Option<QubitState> {
    let (vals, vecs) = eigh(&rho.to_dyn());
    let (k, &top) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if top < 1.0 - PURITY_CUTOFF {
        return None;
    }
    let col = vecs.column(k);
    QubitState::new([col[0], col[1], col[2], col[3]]).ok()
}

/// Uhlmann fidelity `(tr √(√σ ρ √σ))²`, evaluated as the squared trace norm
/// of `√ρ √σ`.
///
/// If either state is pure this reduces to `⟨ψ|ρ|ψ⟩`, evaluated directly to
/// avoid square roots of near-zero eigenvalues.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    if let Some(psi) = pure_vector(sigma) {
        return rho.expectation_pure(&psi).clamp(0.0, 1.0);
    }
    if let Some(psi) = pure_vector(rho) {
        return sigma.expectation_pure(&psi).clamp(0.0, 1.0);
    }
    let prod = sqrtm_psd(&rho.to_dyn()) * sqrtm_psd(&sigma.to_dyn());
    let trace_norm: f64 = prod.singular_values().iter().sum();
    (trace_norm * trace_norm).clamp(0.0, 1.0)
}

/// Grid resolution for the `O_SCS` scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscsGrid {
    /// Points in `θ ∈ [0, π]`, both ends included.
    pub n_theta: usize,
    /// Points in `φ ∈ [0, 2π)`.
    pub n_phi: usize,
    /// Refinement stops once the local step falls below this (radians).
    pub resolution: f64,
}

impl Default for OscsGrid {
    fn default() -> Self {
        Self { n_theta: 181, n_phi: 360, resolution: 1e-6 }
    }
}

/// `|⟨θ,φ|⊗²|ψ⟩|` for a two-qubit state.
fn scs_overlap(a: &[C64; 4], theta: f64, phi: f64) -> f64 {
    let (s, co) = (theta / 2.0).sin_cos();
    let e1 = C64::from_polar(1.0, -phi);
    let sym = a[1] + a[2];
    (a[0] * (co * co) + sym * e1 * (co * s) + a[3] * e1 * e1 * (s * s)).norm()
}

/// `max_SCS |⟨SCS|ψ⟩|` over the two-qubit coherent states.
///
/// Coarse scan over the grid, then repeated local scans around the best point
/// with a halving window until the step drops below `grid.resolution`.
pub fn oscs(state: &QubitState, grid: OscsGrid) -> Result<f64> {
    let singlet = state.singlet_overlap();
    if singlet > 1e-6 {
        return Err(QktError::SymmetryViolation(singlet));
    }
    if grid.n_theta < 2 || grid.n_phi < 1 {
        return Err(QktError::InvalidArgument("O_SCS grid needs n_theta ≥ 2 and n_phi ≥ 1".into()));
    }
    let a = state.amplitudes();
    let d_theta = PI / (grid.n_theta - 1) as f64;
    let d_phi = TAU / grid.n_phi as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..grid.n_theta {
        let theta = d_theta * i as f64;
        for k in 0..grid.n_phi {
            let phi = d_phi * k as f64;
            let v = scs_overlap(a, theta, phi);
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let (mut h_theta, mut h_phi) = (d_theta, d_phi);
    const STEPS: i32 = 4;
    while h_theta.max(h_phi) > grid.resolution {
        let (_, t0, p0) = best;
        for i in -STEPS..=STEPS {
            let theta = (t0 + h_theta * i as f64 / STEPS as f64).clamp(0.0, PI);
            for k in -STEPS..=STEPS {
                let phi = p0 + h_phi * k as f64 / STEPS as f64;
                let v = scs_overlap(a, theta, phi);
                if v > best.0 {
                    best = (v, theta, phi);
                }
            }
        }
        h_theta /= 2.0;
        h_phi /= 2.0;
    }
    Ok(best.0.min(1.0))
}

/// Arithmetic mean of a non-empty series.
pub fn time_average(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(QktError::InvalidArgument("time average of an empty series".into()));
    }
    Ok(series.iter().sum::<f64>() / series.len() as f64)
}

#[cfg(test)]
mod tests;
