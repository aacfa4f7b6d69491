//! Compilation of two-qubit unitaries into a fixed six-block template of
//! controlled and uncontrolled single-qubit operations, lowered to
//! CNOT + rotation gates or to the U1/U3 gate set.
//!
//! Template (time order, left to right):
//!
//! ```text
//! q0 ──●────V5────●────V3────●──────────
//!      │    │     │          │
//! q1 ──V6───●─────V4─────────V2────V1───
//! ```
//!
//! i.e. `U = (I⊗V1) · C0(V2) · (V3⊗I) · C0(V4) · C1(V5) · C0(V6)`, where
//! `Cq(V)` applies `V` to the other qubit when qubit `q` is `|1⟩`.
//!
//! Every compile emits the same number of gates regardless of the input:
//! 46 gates (8 CNOT) at [`Level::Rotation`], 26 gates (8 CNOT) at
//! [`Level::Ibmq`]. Zero-angle gates are kept unless explicitly pruned.

mod gate;
pub mod netlist;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use gate::{cnot, controlled, embed, rz, ry, u3, Gate};

use crate::error::{QktError, Result};
use crate::floquet::{floquet_2q, unitary_power, KickedTopParams, UnitaryMatrix};
use crate::linalg::{
    cis, dyn_to_mat4, mat4_to_dyn, max_abs_diff, phase_aligned_error, CMatrix, Mat2, Mat4, C64,
};

/// Reconstruction error above which compilation reports failure.
pub const FAILURE_TOLERANCE: f64 = 1e-8;

/// Below this magnitude a ZYZ off-diagonal (or diagonal) entry is treated as
/// zero and `β` is pinned to 0.
const DEGENERATE_EPS: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Level {
    /// CNOT, X, RZ, RY.
    Rotation,
    /// CNOT, U1, U3.
    Ibmq,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Rotation => "ROTATION",
            Level::Ibmq => "IBMQ",
        })
    }
}

impl FromStr for Level {
    type Err = QktError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ROTATION" => Ok(Level::Rotation),
            "IBMQ" => Ok(Level::Ibmq),
            other => Err(QktError::InvalidArgument(format!("unknown level {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    pub gates: Vec<Gate>,
    pub level: Level,
}

impl GateSequence {
    pub fn new(level: Level) -> Self {
        Self { gates: Vec::new(), level }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn single_qubit_count(&self) -> usize {
        self.len() - self.cnot_count()
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.validate()?;
            let allowed = match self.level {
                Level::Rotation => matches!(g, Gate::Cnot { .. } | Gate::X(_) | Gate::Rz(..) | Gate::Ry(..)),
                Level::Ibmq => matches!(g, Gate::Cnot { .. } | Gate::U1(..) | Gate::U3 { .. }),
            };
            if !allowed {
                return Err(QktError::MalformedGate(format!(
                    "{} gate not allowed at {} level",
                    g.name(),
                    self.level
                )));
            }
        }
        Ok(())
    }

    /// Product of all gate matrices in time order.
    pub fn matrix(&self) -> Result<Mat4> {
        let mut m = Mat4::identity();
        for g in &self.gates {
            g.validate()?;
            m = g.matrix() * m;
        }
        Ok(m)
    }

    /// Copy without rotations whose angle is a multiple of `4π` (identity)
    /// and without U1/U3 gates equal to the identity. Breaks the fixed gate
    /// count; meant for export only.
    pub fn pruned(&self) -> Self {
        let is_identity = |g: &Gate| -> bool {
            let zero = |a: f64| {
                let r = a.rem_euclid(2.0 * TAU);
                r < 1e-12 || (2.0 * TAU - r) < 1e-12
            };
            let zero2pi = |a: f64| {
                let r = a.rem_euclid(TAU);
                r < 1e-12 || (TAU - r) < 1e-12
            };
            match *g {
                Gate::Rz(_, a) | Gate::Ry(_, a) => zero(a),
                Gate::U1(_, a) => zero2pi(a),
                Gate::U3 { theta, phi, lambda, .. } => zero(theta) && zero2pi(phi + lambda),
                _ => false,
            }
        };
        Self {
            gates: self.gates.iter().copied().filter(|g| !is_identity(g)).collect(),
            level: self.level,
        }
    }

    fn push(&mut self, g: Gate) {
        self.gates.push(canonical(g));
    }

    fn extend(&mut self, other: GateSequence) {
        self.gates.extend(other.gates);
    }
}

/// Reduce an angle into `(−2π, 2π]`.
pub fn canonical_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * TAU);
    if r > TAU {
        r - 2.0 * TAU
    } else {
        r
    }
}

fn canonical(g: Gate) -> Gate {
    match g {
        Gate::Rz(q, a) => Gate::Rz(q, canonical_angle(a)),
        Gate::Ry(q, a) => Gate::Ry(q, canonical_angle(a)),
        Gate::U1(q, a) => Gate::U1(q, canonical_angle(a)),
        Gate::U3 { qubit, theta, phi, lambda } => Gate::U3 {
            qubit,
            theta: canonical_angle(theta),
            phi: canonical_angle(phi),
            lambda: canonical_angle(lambda),
        },
        other => other,
    }
}

/// `w = e^{iδ} Rz(α) Ry(θ) Rz(β)` with `θ ∈ [0, π]`, `δ ∈ (−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerZYZ {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub delta: f64,
}

impl EulerZYZ {
    pub fn matrix(&self) -> Mat2 {
        (rz(self.alpha) * ry(self.theta) * rz(self.beta)).map(|x| x * cis(self.delta))
    }
}

fn mat2_unitarity_error(w: &Mat2) -> f64 {
    let prod = w.adjoint() * w;
    let id = Mat2::identity();
    prod.iter().zip(id.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

pub fn zyz_decompose(w: &Mat2) -> Result<EulerZYZ> {
    let err = mat2_unitarity_error(w);
    if !(err <= 1e-8) {
        return Err(QktError::NotUnitary(err));
    }
    let det = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)];
    // arg ∈ (−π, π] so δ ∈ (−π/2, π/2].
    let delta = det.arg() / 2.0;
    let su = w.map(|x| x * cis(-delta));
    let a = su[(0, 0)];
    let b = su[(1, 0)];
    let theta = 2.0 * b.norm().atan2(a.norm());
    let (alpha, beta) = if b.norm() < DEGENERATE_EPS {
        (-2.0 * a.arg(), 0.0)
    } else if a.norm() < DEGENERATE_EPS {
        (2.0 * b.arg(), 0.0)
    } else {
        (b.arg() - a.arg(), -a.arg() - b.arg())
    };
    Ok(EulerZYZ {
        alpha: canonical_angle(alpha),
        beta: canonical_angle(beta),
        theta: theta.clamp(0.0, PI),
        delta,
    })
}

/// Controlled-`v` as two CNOTs, five target rotations and one `Rz(δ)` on the
/// control:
///
/// ```text
/// c ─────────────●────────────────────●──────────────── Rz(δ)
/// t ─Rz((β−α)/2)─X─Rz(−(α+β)/2)─Ry(−θ/2)─X─Ry(θ/2)─Rz(α)─
/// ```
pub fn lower_controlled(v: &Mat2, control: usize, target: usize) -> Result<GateSequence> {
    check_pair(control, target)?;
    let e = zyz_decompose(v)?;
    let mut seq = GateSequence::new(Level::Rotation);
    seq.push(Gate::Rz(target, (e.beta - e.alpha) / 2.0));
    seq.push(Gate::Cnot { control, target });
    seq.push(Gate::Rz(target, -(e.alpha + e.beta) / 2.0));
    seq.push(Gate::Ry(target, -e.theta / 2.0));
    seq.push(Gate::Cnot { control, target });
    seq.push(Gate::Ry(target, e.theta / 2.0));
    seq.push(Gate::Rz(target, e.alpha));
    seq.push(Gate::Rz(control, e.delta));
    Ok(seq)
}

/// Single-qubit `v` in the same pattern with the CNOTs replaced by X gates;
/// the phase `e^{iδ}` is global and dropped.
pub fn lower_uncontrolled(v: &Mat2, target: usize) -> Result<GateSequence> {
    if target > 1 {
        return Err(QktError::MalformedGate(format!("target qubit {target} out of range")));
    }
    let e = zyz_decompose(v)?;
    let mut seq = GateSequence::new(Level::Rotation);
    seq.push(Gate::Rz(target, (e.beta - e.alpha) / 2.0));
    seq.push(Gate::X(target));
    seq.push(Gate::Rz(target, -(e.alpha + e.beta) / 2.0));
    seq.push(Gate::Ry(target, -e.theta / 2.0));
    seq.push(Gate::X(target));
    seq.push(Gate::Ry(target, e.theta / 2.0));
    seq.push(Gate::Rz(target, e.alpha));
    Ok(seq)
}

/// IBMQ-level controlled block: the target segments become one U1 and two U3
/// gates, the control phase becomes `U1(δ)`.
fn lower_controlled_ibmq(v: &Mat2, control: usize, target: usize) -> Result<GateSequence> {
    check_pair(control, target)?;
    let e = zyz_decompose(v)?;
    let mut seq = GateSequence::new(Level::Ibmq);
    // Rz(λ) = e^{−iλ/2} U1(λ); phases on the unconditionally applied target
    // segments are global.
    seq.push(Gate::U1(target, (e.beta - e.alpha) / 2.0));
    seq.push(Gate::Cnot { control, target });
    // Ry(−θ/2) Rz(−(α+β)/2) ∝ U3(−θ/2, 0, −(α+β)/2)
    seq.push(Gate::U3 { qubit: target, theta: -e.theta / 2.0, phi: 0.0, lambda: -(e.alpha + e.beta) / 2.0 });
    seq.push(Gate::Cnot { control, target });
    // Rz(α) Ry(θ/2) ∝ U3(θ/2, α, 0)
    seq.push(Gate::U3 { qubit: target, theta: e.theta / 2.0, phi: e.alpha, lambda: 0.0 });
    seq.push(Gate::U1(control, e.delta));
    Ok(seq)
}

fn lower_uncontrolled_ibmq(v: &Mat2, target: usize) -> Result<GateSequence> {
    let e = zyz_decompose(v)?;
    let mut seq = GateSequence::new(Level::Ibmq);
    seq.push(Gate::U3 { qubit: target, theta: e.theta, phi: e.alpha, lambda: e.beta });
    Ok(seq)
}

fn check_pair(control: usize, target: usize) -> Result<()> {
    if control > 1 || target > 1 || control == target {
        return Err(QktError::MalformedGate(format!(
            "invalid control/target pair ({control}, {target})"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlockKind {
    Controlled { control: usize, target: usize },
    Uncontrolled { target: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemplateBlock {
    /// 1-based block label (`V1` … `V6`).
    pub label: u8,
    pub kind: BlockKind,
    pub v: Mat2,
}

impl TemplateBlock {
    pub fn matrix(&self) -> Mat4 {
        match self.kind {
            BlockKind::Controlled { control, target } => controlled(control, target, &self.v),
            BlockKind::Uncontrolled { target } => embed(target, &self.v),
        }
    }

    pub fn lower(&self, level: Level) -> Result<GateSequence> {
        match (self.kind, level) {
            (BlockKind::Controlled { control, target }, Level::Rotation) => {
                lower_controlled(&self.v, control, target)
            }
            (BlockKind::Controlled { control, target }, Level::Ibmq) => {
                lower_controlled_ibmq(&self.v, control, target)
            }
            (BlockKind::Uncontrolled { target }, Level::Rotation) => lower_uncontrolled(&self.v, target),
            (BlockKind::Uncontrolled { target }, Level::Ibmq) => lower_uncontrolled_ibmq(&self.v, target),
        }
    }
}

/// The six template blocks in time order: `V6, V5, V4, V3, V2, V1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TemplateDecomposition {
    pub blocks: [TemplateBlock; 6],
}

impl TemplateDecomposition {
    pub fn matrix(&self) -> Mat4 {
        self.blocks.iter().fold(Mat4::identity(), |acc, b| b.matrix() * acc)
    }

    pub fn block(&self, label: u8) -> &TemplateBlock {
        &self.blocks[6 - label as usize]
    }
}

/// Unitary `G` with first column `(a, b)/r`, so that `G†(a, b)ᵀ = (r, 0)ᵀ`.
fn givens_first(a: C64, b: C64) -> Mat2 {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r < 1e-300 {
        return Mat2::identity();
    }
    Mat2::new(a / r, -b.conj() / r, b / r, a.conj() / r)
}

/// Unitary `G` with second column `(a, b)/r`, so that `G†(a, b)ᵀ = (0, r)ᵀ`.
fn givens_second(a: C64, b: C64) -> Mat2 {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r < 1e-300 {
        return Mat2::identity();
    }
    Mat2::new(-b.conj() / r, a / r, a.conj() / r, b / r)
}

/// Factor a 4×4 unitary into the six-block template by elimination.
///
/// Left-multiplying by the inverse blocks, in order `V1†, C0(V2)†, V3†,
/// C0(V4)†, C1(V5)†`, drives the first two columns to `e0, e1`; the remainder
/// is then `C0(V6)` exactly.
///
/// 1. `I⊗V1` zeroes row 1 of column 0.
/// 2. `C0(V2)` zeroes row 3 of column 0.
/// 3. `V3⊗I` maps column 0 to `e0`.
/// 4. `C0(V4)` zeroes row 2 of column 1.
/// 5. `C1(V5)` maps column 1 to `e1`.
pub fn template_decompose(u: &UnitaryMatrix) -> Result<TemplateDecomposition> {
    if u.dim() != 4 {
        return Err(QktError::InvalidArgument(format!(
            "two-qubit synthesis needs a 4×4 unitary, got {0}×{0}",
            u.dim()
        )));
    }
    let target = dyn_to_mat4(u.matrix());
    let mut m = target;

    let v1 = givens_first(m[(0, 0)], m[(1, 0)]);
    m = embed(1, &v1).adjoint() * m;

    let v2 = givens_first(m[(2, 0)], m[(3, 0)]);
    m = controlled(0, 1, &v2).adjoint() * m;

    let v3 = givens_first(m[(0, 0)], m[(2, 0)]);
    m = embed(0, &v3).adjoint() * m;

    let v4 = givens_second(m[(2, 1)], m[(3, 1)]);
    m = controlled(0, 1, &v4).adjoint() * m;

    let v5 = givens_first(m[(1, 1)], m[(3, 1)]);
    m = controlled(1, 0, &v5).adjoint() * m;

    let v6 = Mat2::new(m[(2, 2)], m[(2, 3)], m[(3, 2)], m[(3, 3)]);

    let blocks = [
        TemplateBlock { label: 6, kind: BlockKind::Controlled { control: 0, target: 1 }, v: v6 },
        TemplateBlock { label: 5, kind: BlockKind::Controlled { control: 1, target: 0 }, v: v5 },
        TemplateBlock { label: 4, kind: BlockKind::Controlled { control: 0, target: 1 }, v: v4 },
        TemplateBlock { label: 3, kind: BlockKind::Uncontrolled { target: 0 }, v: v3 },
        TemplateBlock { label: 2, kind: BlockKind::Controlled { control: 0, target: 1 }, v: v2 },
        TemplateBlock { label: 1, kind: BlockKind::Uncontrolled { target: 1 }, v: v1 },
    ];
    let dec = TemplateDecomposition { blocks };
    let err = phase_aligned_error(&mat4_to_dyn(&dec.matrix()), u.matrix());
    if !(err <= FAILURE_TOLERANCE) {
        return Err(QktError::DecompositionFailure(err));
    }
    Ok(dec)
}

/// Full compile of a two-qubit unitary, verified against the input.
pub fn compile_2q(u: &UnitaryMatrix, level: Level) -> Result<GateSequence> {
    let dec = template_decompose(u)?;
    let mut seq = GateSequence::new(level);
    for block in &dec.blocks {
        seq.extend(block.lower(level)?);
    }
    let err = reconstruction_error(&seq, u.matrix())?;
    if !(err <= FAILURE_TOLERANCE) {
        return Err(QktError::DecompositionFailure(err));
    }
    Ok(seq)
}

/// `compile_2q(U^N)` for the two-qubit kicked top.
pub fn compile_qkt(params: &KickedTopParams, n_kicks: u64, level: Level) -> Result<GateSequence> {
    let u = floquet_2q(params)?;
    compile_2q(&unitary_power(&u, n_kicks)?, level)
}

/// Phase-aligned max-entry distance between a sequence's matrix and `u`.
pub fn reconstruction_error(seq: &GateSequence, u: &CMatrix) -> Result<f64> {
    Ok(phase_aligned_error(&mat4_to_dyn(&seq.matrix()?), u))
}

/// Exact-match (no phase freedom) distance, for diagnostics.
pub fn raw_error(seq: &GateSequence, u: &CMatrix) -> Result<f64> {
    Ok(max_abs_diff(&mat4_to_dyn(&seq.matrix()?), u))
}
