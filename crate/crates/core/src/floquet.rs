//! Exact Floquet operators for the kicked top, in spin space and in the
//! two-qubit representation, and their integer powers.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{QktError, Result};
use crate::linalg::{
    c, cis, eigh, expm_i_hermitian, kron2, mat2_to_dyn, mat4_to_dyn, pauli_y, pauli_z,
    unitarity_error, CMatrix, C64,
};
use crate::spin::{build_ops, SpinQuantumNumber};

/// Kicked-top parameters. The kick period is fixed to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KickedTopParams {
    pub kappa: f64,
    pub p: f64,
    pub j: SpinQuantumNumber,
}

impl KickedTopParams {
    /// Two-qubit (`j = 1`) top with `p = π/2`.
    pub fn qubits(kappa: f64) -> Self {
        Self {
            kappa,
            p: FRAC_PI_2,
            j: SpinQuantumNumber::ONE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() || !self.p.is_finite() {
            return Err(QktError::InvalidArgument(format!(
                "non-finite parameters κ = {}, p = {}",
                self.kappa, self.p
            )));
        }
        Ok(())
    }
}

/// Square matrix checked to satisfy `U†U = I` within `1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(m: CMatrix) -> Result<Self> {
        let err = unitarity_error(&m);
        if err > Self::TOLERANCE {
            return Err(QktError::NotUnitary(err));
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// `exp(−i κ Jz²/(2j)) · exp(−i p Jy)` in the `(2j+1)`-dimensional spin space.
pub fn floquet_spin(params: &KickedTopParams) -> Result<UnitaryMatrix> {
    params.validate()?;
    let j = params.j;
    let ops = build_ops(j);
    let rotation = expm_i_hermitian(&ops.jy, -params.p);
    let tj = j.twice_j() as i64;
    let twist: Vec<C64> = (0..j.dim())
        .map(|k| {
            let tm = tj - 2 * k as i64;
            // κ m²/(2j) = κ (2m)² / (4 · 2j)
            cis(-params.kappa * (tm * tm) as f64 / (4.0 * tj as f64))
        })
        .collect();
    let mut u = rotation;
    for (r, t) in twist.iter().enumerate() {
        for col in 0..u.ncols() {
            u[(r, col)] *= t;
        }
    }
    UnitaryMatrix::new(u)
}

/// Two-qubit Floquet operator
/// `exp(−i κ/4 (I + σz⊗σz)) · exp(−i p/2 (σy⊗I + I⊗σy))`.
pub fn floquet_2q(params: &KickedTopParams) -> Result<UnitaryMatrix> {
    params.validate()?;
    params.j.require_one()?;
    let id = crate::linalg::Mat2::identity();
    let zz = kron2(&pauli_z(), &pauli_z());
    let twist_gen = mat4_to_dyn(&(crate::linalg::Mat4::identity() + zz));
    let rot_gen = mat4_to_dyn(&(kron2(&pauli_y(), &id) + kron2(&id, &pauli_y())));
    let twist = expm_i_hermitian(&twist_gen, -params.kappa / 4.0);
    let rotation = expm_i_hermitian(&rot_gen, -params.p / 2.0);
    UnitaryMatrix::new(twist * rotation)
}

/// `U^n` from the Schur form `U = Q T Q†`. For a unitary (normal) matrix `T`
/// is diagonal up to rounding and its diagonal lies on the unit circle.
pub fn unitary_power(u: &UnitaryMatrix, n: u64) -> Result<UnitaryMatrix> {
    let dim = u.dim();
    match n {
        0 => return Ok(UnitaryMatrix::identity(dim)),
        1 => return Ok(u.clone()),
        _ => {}
    }
    let schur = u.matrix().clone().schur();
    let (q, t) = schur.unpack();
    let off_diag = (0..dim)
        .flat_map(|r| (0..dim).filter(move |&c| c != r).map(move |c| (r, c)))
        .map(|(r, c)| t[(r, c)].norm())
        .fold(0.0, f64::max);
    if off_diag > 1e-8 {
        return Err(QktError::Internal(format!(
            "Schur form of unitary not diagonal (off-diagonal {off_diag:e})"
        )));
    }
    let mut scaled = q.clone();
    for k in 0..dim {
        let phase = t[(k, k)].arg();
        let factor = cis(phase * n as f64);
        for r in 0..dim {
            scaled[(r, k)] *= factor;
        }
    }
    UnitaryMatrix::new(scaled * q.adjoint())
}

/// Spectrum of a Hermitian generator, exposed for checks on the twist
/// operator's periodicity.
pub fn twist_spectrum(j: SpinQuantumNumber) -> Vec<f64> {
    let ops = build_ops(j);
    let jz2 = &ops.jz * &ops.jz;
    let (mut vals, _) = eigh(&jz2.scale(1.0 / j.twice_j() as f64));
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// `Ry(θ)` as a 2×2 matrix, used in product-form checks.
pub fn ry_matrix(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    mat2_to_dyn(&crate::linalg::Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, phase_aligned_error, ZERO};
    use crate::spin::dicke_isometry;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn params(kappa: f64, p: f64) -> KickedTopParams {
        KickedTopParams { kappa, p, j: SpinQuantumNumber::ONE }
    }

    /// Independent Hermitian exponential: Taylor series with scaling and
    /// squaring. Deliberately a different route from the eigendecomposition.
    fn expm_series(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let norm: f64 = a.iter().map(|x| x.norm()).sum();
        let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let scaled = a.scale(1.0 / 2f64.powi(s));
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &scaled / c(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn trivial_parameters_give_identity() {
        for twice in [1, 2, 5] {
            let p = KickedTopParams {
                kappa: 0.0,
                p: 0.0,
                j: SpinQuantumNumber::from_twice(twice).unwrap(),
            };
            let u = floquet_spin(&p).unwrap();
            assert!(max_abs_diff(u.matrix(), &CMatrix::identity(twice as usize + 1, twice as usize + 1)) < 1e-14);
        }
    }

    #[test]
    fn quarter_turns_compose_to_identity() {
        let u = floquet_spin(&params(0.0, FRAC_PI_2)).unwrap();
        let u4 = u.matrix().pow(4);
        assert!(phase_aligned_error(&u4, &CMatrix::identity(3, 3)) < 1e-12);
    }

    #[test]
    fn spin_floquet_matches_series_oracle() {
        let ops = build_ops(SpinQuantumNumber::ONE);
        let (kappa, p) = (2.5, FRAC_PI_2);
        let jz2 = &ops.jz * &ops.jz;
        let twist = expm_series(&jz2.map(|v| v * c(0.0, -kappa / 2.0)));
        let rot = expm_series(&ops.jy.map(|v| v * c(0.0, -p)));
        let oracle = twist * rot;
        let u = floquet_spin(&params(kappa, p)).unwrap();
        assert!(max_abs_diff(u.matrix(), &oracle) < 1e-12);
    }

    #[test]
    fn zero_kappa_two_qubit_is_product_rotation() {
        let u = floquet_2q(&params(0.0, FRAC_PI_2)).unwrap();
        let ry = ry_matrix(FRAC_PI_2);
        let expected = ry.kronecker(&ry);
        assert!(max_abs_diff(u.matrix(), &expected) < 1e-14);
    }

    #[test]
    fn two_qubit_floquet_restricts_to_spin_floquet() {
        let iso = dicke_isometry();
        for &(kappa, p) in &[(0.3, FRAC_PI_2), (2.5, FRAC_PI_2), (6.1, 0.7), (11.0, 2.2)] {
            let u2 = floquet_2q(&params(kappa, p)).unwrap();
            let us = floquet_spin(&params(kappa, p)).unwrap();
            let restricted = iso.adjoint() * u2.matrix() * &iso;
            assert!(phase_aligned_error(&restricted, us.matrix()) < 1e-10);
        }
    }

    #[test]
    fn singlet_is_an_eigenvector() {
        let s = FRAC_1_SQRT_2;
        let singlet = CMatrix::from_column_slice(4, 1, &[ZERO, c(s, 0.0), c(-s, 0.0), ZERO]);
        for kappa in [0.0, 1.7, 2.5, 9.0] {
            let u = floquet_2q(&params(kappa, 1.1)).unwrap();
            let image = u.matrix() * &singlet;
            let overlap = (singlet.adjoint() * &image)[(0, 0)].norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn four_pi_operator_periodicity() {
        assert_eq!(twist_spectrum(SpinQuantumNumber::ONE).len(), 3);
        for kappa in [0.5, 2.5, 4.5] {
            let a = floquet_2q(&params(kappa, FRAC_PI_2)).unwrap();
            let b = floquet_2q(&params(kappa + 4.0 * PI, FRAC_PI_2)).unwrap();
            assert!(phase_aligned_error(a.matrix(), b.matrix()) < 1e-10);
            let c2 = floquet_2q(&params(kappa + 2.0 * PI, FRAC_PI_2)).unwrap();
            assert!(phase_aligned_error(a.matrix(), c2.matrix()) > 1e-3);
        }
    }

    #[test]
    fn power_edge_cases() {
        let u = floquet_2q(&params(2.5, FRAC_PI_2)).unwrap();
        assert!(max_abs_diff(unitary_power(&u, 0).unwrap().matrix(), &CMatrix::identity(4, 4)) < 1e-15);
        assert!(max_abs_diff(unitary_power(&u, 1).unwrap().matrix(), u.matrix()) < 1e-14);
    }

    #[test]
    fn power_matches_repeated_multiplication() {
        let u = floquet_2q(&params(2.5, FRAC_PI_2)).unwrap();
        let mut acc = CMatrix::identity(4, 4);
        for _ in 0..200 {
            acc = u.matrix() * acc;
        }
        let fast = unitary_power(&u, 200).unwrap();
        assert!(max_abs_diff(fast.matrix(), &acc) < 1e-9);
    }

    #[test]
    fn power_is_additive_and_stays_unitary() {
        let u = floquet_2q(&params(3.3, FRAC_PI_2)).unwrap();
        for (a, b) in [(3u64, 5u64), (17, 40), (1000, 999)] {
            let lhs = unitary_power(&u, a + b).unwrap();
            let rhs = unitary_power(&u, a).unwrap().matrix() * unitary_power(&u, b).unwrap().matrix();
            assert!(max_abs_diff(lhs.matrix(), &rhs) < 1e-9);
        }
        let big = unitary_power(&u, 1_000_000).unwrap();
        assert!(unitarity_error(big.matrix()) < 1e-10);
    }

    #[test]
    fn degenerate_spectrum_power() {
        // κ = 0, p = 0 is the identity; p = π gives degenerate ±1 spectrum.
        let u = floquet_2q(&params(0.0, PI)).unwrap();
        let u3 = unitary_power(&u, 3).unwrap();
        assert!(max_abs_diff(u3.matrix(), &u.matrix().pow(3)) < 1e-12);
    }
}
