//! Small dense complex linear-algebra helpers shared by the other modules.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = num_complex::Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

/// Eigendecomposition of a Hermitian matrix. Only the Hermitian part of `m`
/// is used. Eigenvalues are returned in the order produced by the solver,
/// together with the unitary whose columns are the eigenvectors.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `exp(i t H)` for Hermitian `H`, via `H = V diag(λ) V†`.
pub fn expm_i_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = eigh(h);
    apply_spectral(&vals, &vecs, |l| cis(t * l))
}

/// `V diag(f(λ)) V†`.
pub fn apply_spectral(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let mut scaled = vecs.clone();
    for (k, &l) in vals.iter().enumerate() {
        let fl = f(l);
        for r in 0..scaled.nrows() {
            scaled[(r, k)] *= fl;
        }
    }
    scaled * vecs.adjoint()
}

/// Principal square root of a positive semidefinite matrix; tiny negative
/// eigenvalues are clipped to zero.
pub fn sqrtm_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(m);
    apply_spectral(&vals, &vecs, |l| c(l.max(0.0).sqrt(), 0.0))
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.nrows();
    if n != u.ncols() {
        return f64::INFINITY;
    }
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMatrix::identity(n, n))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Max-entry distance between `a` and `b` after multiplying `a` by the
/// unit-modulus scalar that maximizes the overlap `Re tr(e^{iφ} a† b)`.
pub fn phase_aligned_error(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    max_abs_diff(&a.map(|x| x * phase), b)
}

/// `|⟨a|b⟩|` for two state vectors.
pub fn overlap_abs(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm()
}

pub fn mat2_to_dyn(m: &Mat2) -> CMatrix {
    CMatrix::from_fn(2, 2, |r, c| m[(r, c)])
}

pub fn mat4_to_dyn(m: &Mat4) -> CMatrix {
    CMatrix::from_fn(4, 4, |r, c| m[(r, c)])
}

pub fn dyn_to_mat2(m: &CMatrix) -> Mat2 {
    Mat2::from_fn(|r, c| m[(r, c)])
}

pub fn dyn_to_mat4(m: &CMatrix) -> Mat4 {
    Mat4::from_fn(|r, c| m[(r, c)])
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let k = a.kronecker(b);
    Mat4::from_fn(|r, c| k[(r, c)])
}

/// Haar-distributed random unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / std::f64::consts::SQRT_2
    });
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..dim {
            q[(row, k)] *= ph;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expm_of_pauli_matches_closed_form() {
        let y = mat2_to_dyn(&pauli_y());
        let t = 0.37;
        let e = expm_i_hermitian(&y, t);
        // exp(i t σy) = cos t I + i sin t σy
        let expected = CMatrix::identity(2, 2).scale(t.cos()) + y.map(|v| v * I * t.sin());
        assert!(max_abs_diff(&e, &expected) < 1e-14);
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2, 3, 4, 8] {
            let u = haar_unitary(dim, &mut rng);
            assert!(unitarity_error(&u) < 1e-12);
        }
    }

    #[test]
    fn phase_alignment_removes_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(4, &mut rng);
        let v = u.map(|x| x * cis(1.234));
        assert!(phase_aligned_error(&u, &v) < 1e-14);
        assert!(max_abs_diff(&u, &v) > 0.1);
    }

    #[test]
    fn sqrtm_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = haar_unitary(4, &mut rng);
        let psd = &a * CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.5, 0.0),
            c(0.3, 0.0),
            c(0.2, 0.0),
            ZERO,
        ])) * a.adjoint();
        let s = sqrtm_psd(&psd);
        assert!(max_abs_diff(&(&s * &s), &psd) < 1e-12);
    }
}
