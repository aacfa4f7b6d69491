//! Quantum kicked top simulation through fixed-size two-qubit circuits.
//!
//! The N-kick Floquet operator `U^N` is computed classically, synthesized into
//! a constant-size gate sequence (8 CNOTs regardless of `N` or `κ`), executed on
//! a dense statevector / density-matrix simulator and analysed for signatures
//! of chaos: concurrence, fidelity and delocalization (`O_SCS`).
//!
//! Conventions used throughout the crate:
//!
//! * `ħ = 1`, all angles in radians.
//! * The spin state `|j, j⟩` (spin up) corresponds to the qubit state `|0⟩`.
//! * Two-qubit basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with qubit 0 leftmost
//!   (most significant).
//! * `Rz(λ) = diag(e^{-iλ/2}, e^{iλ/2})`, `Ry(θ) = exp(-iθσy/2)`.

pub mod analysis;
pub mod classical;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod rng;
pub mod sim;
pub mod spin;
pub mod synth;

pub use error::{QktError, Result};
pub use linalg::C64;
