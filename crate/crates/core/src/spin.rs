//! Angular-momentum algebra for spin `j`, spin coherent states and the
//! spin-1 ↔ symmetric two-qubit (Dicke) embedding.
//!
//! Spin vectors are indexed by `m = j, j-1, …, -j` (index 0 is `m = j`).

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{QktError, Result};
use crate::linalg::{c, eigh, expm_i_hermitian, CMatrix, C64, ZERO};
use crate::sim::QubitState;

/// Spin quantum number stored as the integer `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinQuantumNumber {
    twice_j: u32,
}

impl SpinQuantumNumber {
    pub const ONE: SpinQuantumNumber = SpinQuantumNumber { twice_j: 2 };

    pub fn from_twice(twice_j: u32) -> Result<Self> {
        if twice_j == 0 {
            return Err(QktError::InvalidSpin(twice_j));
        }
        Ok(Self { twice_j })
    }

    pub fn twice_j(self) -> u32 {
        self.twice_j
    }

    pub fn j(self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    /// Hilbert-space dimension `2j + 1`.
    pub fn dim(self) -> usize {
        self.twice_j as usize + 1
    }

    /// `2m` for basis index `k`.
    fn twice_m(self, k: usize) -> i64 {
        self.twice_j as i64 - 2 * k as i64
    }

    pub(crate) fn require_one(self) -> Result<()> {
        if self.twice_j != 2 {
            return Err(QktError::UnsupportedSpin(self.twice_j));
        }
        Ok(())
    }
}

/// Point `(θ, φ)` on the unit sphere. `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    theta: f64,
    phi: f64,
}

impl PhasePoint {
    /// `φ` is reduced modulo `2π`; `θ` outside `[0, π]` is rejected.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(QktError::InvalidArgument(format!(
                "non-finite phase point ({theta}, {phi})"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(QktError::InvalidArgument(format!(
                "theta = {theta} outside [0, π]"
            )));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Great-circle distance between two points.
    pub fn angular_distance(&self, other: &PhasePoint) -> f64 {
        let (a, b) = (self.unit_vector(), other.unit_vector());
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        dot.clamp(-1.0, 1.0).acos()
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Normalized spin-`j` state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    j: SpinQuantumNumber,
    amplitudes: Vec<C64>,
}

impl SpinState {
    pub fn new(j: SpinQuantumNumber, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(QktError::InvalidArgument(format!(
                "expected {} amplitudes for 2j = {}, got {}",
                j.dim(),
                j.twice_j(),
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QktError::NotNormalized((norm - 1.0).abs()));
        }
        Ok(Self { j, amplitudes })
    }

    /// `|j, j⟩`.
    pub fn highest_weight(j: SpinQuantumNumber) -> Self {
        let mut amplitudes = vec![ZERO; j.dim()];
        amplitudes[0] = c(1.0, 0.0);
        Self { j, amplitudes }
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }
}

/// `Jx`, `Jy`, `Jz` in the `|j, m⟩` basis.
#[derive(Clone, Debug)]
pub struct AngularMomentumOps {
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

pub fn build_ops(j: SpinQuantumNumber) -> AngularMomentumOps {
    let n = j.dim();
    let tj = j.twice_j() as i64;
    let mut jz = CMatrix::zeros(n, n);
    // J+ |j,m⟩ = sqrt((j-m)(j+m+1)) |j,m+1⟩; m+1 lives at index k-1.
    let mut jplus = CMatrix::zeros(n, n);
    for k in 0..n {
        let tm = j.twice_m(k);
        jz[(k, k)] = c(tm as f64 / 2.0, 0.0);
        if k > 0 {
            let num = (tj - tm) * (tj + tm + 2);
            jplus[(k - 1, k)] = c((num as f64 / 4.0).sqrt(), 0.0);
        }
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale(0.5);
    let jy = (&jplus - &jminus).map(|v| v * c(0.0, -0.5));
    AngularMomentumOps { jx, jy, jz }
}

/// Spin coherent state `exp[iθ(Jx sinφ − Jy cosφ)] |j, j⟩`.
pub fn scs(j: SpinQuantumNumber, point: PhasePoint) -> SpinState {
    let ops = build_ops(j);
    let (sp, cp) = point.phi().sin_cos();
    let generator = ops.jx.scale(sp) - ops.jy.scale(cp);
    let rot = expm_i_hermitian(&generator, point.theta());
    let mut amplitudes: Vec<C64> = rot.column(0).iter().copied().collect();
    renormalize(&mut amplitudes);
    SpinState { j, amplitudes }
}

/// Single-qubit coherent state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`, i.e. the
/// `j = 1/2` case of [`scs`].
pub fn qubit_coherent(point: PhasePoint) -> [C64; 2] {
    let (s, co) = (point.theta() / 2.0).sin_cos();
    [c(co, 0.0), C64::from_polar(s, point.phi())]
}

/// Two-qubit product coherent state `|θ, φ⟩ ⊗ |θ, φ⟩` representing the spin-1
/// coherent state.
pub fn scs_to_qubits(j: SpinQuantumNumber, point: PhasePoint) -> Result<QubitState> {
    j.require_one()?;
    let q = qubit_coherent(point);
    QubitState::new([q[0] * q[0], q[0] * q[1], q[1] * q[0], q[1] * q[1]])
}

/// Dicke isometry for spin 1: `|1,1⟩ → |00⟩`, `|1,0⟩ → (|01⟩+|10⟩)/√2`,
/// `|1,-1⟩ → |11⟩`.
pub fn symmetric_embed(state: &SpinState) -> Result<QubitState> {
    state.spin().require_one()?;
    let a = state.amplitudes();
    let mid = a[1] * FRAC_1_SQRT_2;
    QubitState::new([a[0], mid, mid, a[2]])
}

/// Inverse of [`symmetric_embed`]. Fails with `SymmetryViolation` when the
/// state has singlet weight above `1e-6`.
pub fn symmetric_project(state: &QubitState) -> Result<SpinState> {
    let singlet = state.singlet_overlap();
    if singlet > 1e-6 {
        return Err(QktError::SymmetryViolation(singlet));
    }
    let a = state.amplitudes();
    let mut amplitudes = vec![a[0], (a[1] + a[2]) * FRAC_1_SQRT_2, a[3]];
    renormalize(&mut amplitudes);
    SpinState::new(SpinQuantumNumber::ONE, amplitudes)
}

/// Fixed 4×3 Dicke isometry matrix, columns indexed by `m = 1, 0, -1`.
pub fn dicke_isometry() -> CMatrix {
    let mut iso = CMatrix::zeros(4, 3);
    iso[(0, 0)] = c(1.0, 0.0);
    iso[(1, 1)] = c(FRAC_1_SQRT_2, 0.0);
    iso[(2, 1)] = c(FRAC_1_SQRT_2, 0.0);
    iso[(3, 2)] = c(1.0, 0.0);
    iso
}

fn renormalize(v: &mut [C64]) {
    let n: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|a| *a /= n);
    }
}

/// Spectrum of a Hermitian operator, sorted ascending. Used by callers that
/// need the eigenvalues of the angular-momentum operators.
pub fn hermitian_spectrum(m: &CMatrix) -> Vec<f64> {
    let (mut vals, _) = eigh(m);
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}
