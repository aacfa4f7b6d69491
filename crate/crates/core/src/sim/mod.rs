//! Dense two-qubit execution of gate sequences: pure statevector evolution,
//! density-matrix evolution with depolarizing noise, projective sampling and
//! Pauli-basis state tomography.

mod state;
pub mod tomography;

use serde::{Deserialize, Serialize};

pub use state::{DensityMatrix, QubitState};
pub use tomography::{
    measure_basis, tomography, Pauli, PauliBasis, ShotRecord,
};

use crate::error::{QktError, Result};
use crate::linalg::{pauli_x, pauli_y, pauli_z, Mat2, Mat4};
use crate::synth::{embed, Gate, GateSequence};

/// Depolarizing noise applied after every gate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Single-qubit depolarizing probability on the acted qubit.
    pub p1: f64,
    /// Probability of replacing the state with `I/4` after a CNOT.
    pub p2: f64,
    /// Seed for any sampling performed on the noisy state.
    pub seed: u64,
}

impl NoiseConfig {
    pub fn noiseless(seed: u64) -> Self {
        Self { p1: 0.0, p2: 0.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(QktError::InvalidArgument(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Apply a 2×2 operator to qubit `q` of a statevector in place.
fn apply_single(amps: &mut [crate::C64; 4], q: usize, m: &Mat2) {
    let stride = if q == 0 { 2 } else { 1 };
    for base in 0..4usize {
        if base & stride != 0 {
            continue;
        }
        let (a0, a1) = (amps[base], amps[base | stride]);
        amps[base] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
        amps[base | stride] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
    }
}

fn apply_cnot(amps: &mut [crate::C64; 4], control: usize, target: usize) {
    let cbit = if control == 0 { 2 } else { 1 };
    let tbit = if target == 0 { 2 } else { 1 };
    for idx in 0..4usize {
        if idx & cbit != 0 && idx & tbit == 0 {
            amps.swap(idx, idx | tbit);
        }
    }
}

fn validate_all(seq: &GateSequence) -> Result<()> {
    seq.gates.iter().try_for_each(Gate::validate)
}

/// Execute `seq` on `input` by direct amplitude updates.
pub fn run_circuit(seq: &GateSequence, input: &QubitState) -> Result<QubitState> {
    validate_all(seq)?;
    let mut state = *input;
    let amps = state.amplitudes_mut();
    for g in &seq.gates {
        match *g {
            Gate::Cnot { control, target } => apply_cnot(amps, control, target),
            _ => {
                let m = g.single_qubit_matrix().expect("single-qubit gate");
                apply_single(amps, g.qubit().expect("single-qubit gate"), &m);
            }
        }
    }
    let norm = state.norm();
    if (norm * norm - 1.0).abs() > 1e-12 {
        return Err(QktError::Internal(format!("norm drifted to {norm}")));
    }
    Ok(state)
}

/// `(1 − p)ρ + p (I/2 ⊗ Tr_q ρ)` written as a Pauli twirl on qubit `q`.
fn depolarize_single(rho: &Mat4, q: usize, p: f64) -> Mat4 {
    if p == 0.0 {
        return *rho;
    }
    let mut twirl = *rho;
    for pauli in [pauli_x(), pauli_y(), pauli_z()] {
        let op = embed(q, &pauli);
        twirl += op * rho * op;
    }
    rho.map(|x| x * (1.0 - p)) + twirl.map(|x| x * (p / 4.0))
}

fn depolarize_full(rho: &Mat4, p: f64) -> Mat4 {
    if p == 0.0 {
        return *rho;
    }
    rho.map(|x| x * (1.0 - p)) + Mat4::identity().map(|x| x * (p / 4.0))
}

/// Density-matrix evolution with a depolarizing channel after each gate.
pub fn run_noisy(seq: &GateSequence, input: &DensityMatrix, noise: &NoiseConfig) -> Result<DensityMatrix> {
    noise.validate()?;
    validate_all(seq)?;
    let mut rho = *input.matrix();
    for g in &seq.gates {
        let u = g.matrix();
        rho = u * rho * u.adjoint();
        rho = match g.qubit() {
            Some(q) => depolarize_single(&rho, q, noise.p1),
            None => depolarize_full(&rho, noise.p2),
        };
    }
    // Restore exact Hermiticity lost to rounding.
    let rho = (rho + rho.adjoint()).map(|x| x * 0.5);
    DensityMatrix::new(rho)
}

#[cfg(test)]
mod tests;
