use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QktError, Result};
use crate::linalg::{c, cis, kron2, Mat2, Mat4, ONE, ZERO};

/// Primitive gate on a two-qubit register. Qubit indices are 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    X(usize),
    Rz(usize, f64),
    Ry(usize, f64),
    U1(usize, f64),
    U3 { qubit: usize, theta: f64, phi: f64, lambda: f64 },
}

impl Gate {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Cnot { .. } => "CNOT",
            Gate::X(_) => "X",
            Gate::Rz(..) => "RZ",
            Gate::Ry(..) => "RY",
            Gate::U1(..) => "U1",
            Gate::U3 { .. } => "U3",
        }
    }

    /// Qubit acted on by a single-qubit gate.
    pub fn qubit(&self) -> Option<usize> {
        match *self {
            Gate::Cnot { .. } => None,
            Gate::X(q) | Gate::Rz(q, _) | Gate::Ry(q, _) | Gate::U1(q, _) => Some(q),
            Gate::U3 { qubit, .. } => Some(qubit),
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        match *self {
            Gate::Cnot { .. } | Gate::X(_) => vec![],
            Gate::Rz(_, a) | Gate::Ry(_, a) | Gate::U1(_, a) => vec![a],
            Gate::U3 { theta, phi, lambda, .. } => vec![theta, phi, lambda],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Gate::Cnot { control, target } => {
                if control > 1 || target > 1 {
                    return Err(QktError::MalformedGate(format!("{self}: qubit index out of range")));
                }
                if control == target {
                    return Err(QktError::MalformedGate(format!("{self}: control equals target")));
                }
            }
            _ => {
                let q = self.qubit().unwrap_or(0);
                if q > 1 {
                    return Err(QktError::MalformedGate(format!("{self}: qubit index out of range")));
                }
            }
        }
        if self.angles().iter().any(|a| !a.is_finite()) {
            return Err(QktError::MalformedGate(format!("{self}: non-finite angle")));
        }
        Ok(())
    }

    /// 2×2 matrix of a single-qubit gate.
    pub fn single_qubit_matrix(&self) -> Option<Mat2> {
        Some(match *self {
            Gate::Cnot { .. } => return None,
            Gate::X(_) => Mat2::new(ZERO, ONE, ONE, ZERO),
            Gate::Rz(_, l) => rz(l),
            Gate::Ry(_, t) => ry(t),
            Gate::U1(_, l) => Mat2::new(ONE, ZERO, ZERO, cis(l)),
            Gate::U3 { theta, phi, lambda, .. } => u3(theta, phi, lambda),
        })
    }

    /// Full 4×4 matrix in the `|q0 q1⟩` basis.
    pub fn matrix(&self) -> Mat4 {
        match *self {
            Gate::Cnot { control, target } => cnot(control, target),
            _ => {
                let m = self.single_qubit_matrix().expect("single-qubit gate");
                embed(self.qubit().unwrap_or(0), &m)
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Rz(q, a) => write!(f, "RZ {q} {a:.16e}"),
            Gate::Ry(q, a) => write!(f, "RY {q} {a:.16e}"),
            Gate::U1(q, a) => write!(f, "U1 {q} {a:.16e}"),
            Gate::U3 { qubit, theta, phi, lambda } => {
                write!(f, "U3 {qubit} {theta:.16e} {phi:.16e} {lambda:.16e}")
            }
        }
    }
}

pub fn rz(lambda: f64) -> Mat2 {
    Mat2::new(cis(-lambda / 2.0), ZERO, ZERO, cis(lambda / 2.0))
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// `U3(θ, φ, λ) = [[cos(θ/2), −e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(
        c(co, 0.0),
        -cis(lambda) * s,
        cis(phi) * s,
        cis(phi + lambda) * co,
    )
}

/// Single-qubit operator placed on qubit `q` (0 is the left tensor factor).
pub fn embed(q: usize, m: &Mat2) -> Mat4 {
    if q == 0 {
        kron2(m, &Mat2::identity())
    } else {
        kron2(&Mat2::identity(), m)
    }
}

pub fn cnot(control: usize, target: usize) -> Mat4 {
    let mut m = Mat4::zeros();
    for idx in 0..4usize {
        let bit = |q: usize| (idx >> (1 - q)) & 1;
        let out = if bit(control) == 1 { idx ^ (1 << (1 - target)) } else { idx };
        m[(out, idx)] = ONE;
    }
    m
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ V` with the control/target roles given.
pub fn controlled(control: usize, target: usize, v: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for idx in 0..4usize {
        let bit = |i: usize, q: usize| (i >> (1 - q)) & 1;
        for out in 0..4usize {
            if bit(out, control) != bit(idx, control) {
                continue;
            }
            if bit(idx, control) == 0 {
                if out == idx {
                    m[(out, idx)] = ONE;
                }
            } else {
                m[(out, idx)] = v[(bit(out, target), bit(idx, target))];
            }
        }
    }
    m
}
