use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{QktError, Result};
use crate::linalg::{c, eigh, mat4_to_dyn, CMatrix, Mat4, C64, ZERO};

/// Normalized two-qubit pure state, basis order `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitState([C64; 4]);

impl QubitState {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= Self::NORM_TOLERANCE) {
            return Err(QktError::NotNormalized((norm - 1.0).abs()));
        }
        Ok(Self(amplitudes))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(index: usize) -> Self {
        let mut a = [ZERO; 4];
        a[index] = c(1.0, 0.0);
        Self(a)
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64; 4] {
        &mut self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|⟨ψ⁻|ψ⟩|` with the singlet `ψ⁻ = (|01⟩ − |10⟩)/√2`.
    pub fn singlet_overlap(&self) -> f64 {
        ((self.0[1] - self.0[2]) * FRAC_1_SQRT_2).norm()
    }

    pub fn inner(&self, other: &QubitState) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply(&self, u: &Mat4) -> Result<QubitState> {
        let v = u * nalgebra::Vector4::from_column_slice(&self.0);
        QubitState::new([v[0], v[1], v[2], v[3]])
    }

    pub fn density(&self) -> DensityMatrix {
        let v = nalgebra::Vector4::from_column_slice(&self.0);
        DensityMatrix(v * v.adjoint())
    }
}

/// Two-qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
    pub const TRACE_TOLERANCE: f64 = 1e-10;
    pub const EIGEN_TOLERANCE: f64 = 1e-9;

    pub fn new(m: Mat4) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if !(herm <= Self::HERMITIAN_TOLERANCE) {
            return Err(QktError::InvalidDensityMatrix(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace();
        if !((tr - c(1.0, 0.0)).norm() <= Self::TRACE_TOLERANCE) {
            return Err(QktError::InvalidDensityMatrix(format!("trace {tr} ≠ 1")));
        }
        let min_eig = eigh(&mat4_to_dyn(&m)).0.into_iter().fold(f64::INFINITY, f64::min);
        if !(min_eig >= -Self::EIGEN_TOLERANCE) {
            return Err(QktError::InvalidDensityMatrix(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self(m))
    }

    pub fn from_pure(state: &QubitState) -> Self {
        state.density()
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity().map(|x| x * 0.25))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn to_dyn(&self) -> CMatrix {
        mat4_to_dyn(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let (mut vals, _) = eigh(&self.to_dyn());
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, state: &QubitState) -> f64 {
        let v = nalgebra::Vector4::from_column_slice(state.amplitudes());
        (v.adjoint() * self.0 * v)[(0, 0)].re
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..4)
            .map(|r| (0..4).map(|col| [self.0[(r, col)].re, self.0[(r, col)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(serde::de::Error::custom("density matrix must be 4×4"));
        }
        let m = Mat4::from_fn(|r, col| c(rows[r][col][0], rows[r][col][1]));
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
