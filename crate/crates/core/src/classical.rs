//! Classical kicked-top map for `p = π/2` on the unit sphere.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{QktError, Result};
use crate::spin::PhasePoint;

/// Point `(X, Y, Z)` on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ClassicalState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn distance(&self, other: &ClassicalState) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// One kick of the classical map, renormalized to the sphere:
///
/// ```text
/// X' = Z cos(κX) + Y sin(κX)
/// Y' = Y cos(κX) − Z sin(κX)
/// Z' = −X
/// ```
pub fn classical_step(s: ClassicalState, kappa: f64) -> ClassicalState {
    let (sk, ck) = (kappa * s.x).sin_cos();
    ClassicalState::new(s.z * ck + s.y * sk, s.y * ck - s.z * sk, -s.x).normalized()
}

/// Trajectory of `n_kicks + 1` points starting with `s0`.
pub fn classical_trajectory(s0: ClassicalState, kappa: f64, n_kicks: usize) -> Vec<ClassicalState> {
    let mut out = Vec::with_capacity(n_kicks + 1);
    let mut s = s0;
    out.push(s);
    for _ in 0..n_kicks {
        s = classical_step(s, kappa);
        out.push(s);
    }
    out
}

pub fn angles_to_sphere(p: PhasePoint) -> ClassicalState {
    let [x, y, z] = p.unit_vector();
    ClassicalState::new(x, y, z)
}

/// Inverse of [`angles_to_sphere`]; `φ = 0` at the poles.
pub fn sphere_to_angles(s: ClassicalState) -> Result<PhasePoint> {
    let s = s.normalized();
    let theta = s.z.clamp(-1.0, 1.0).acos();
    let rho = s.x.hypot(s.y);
    let phi = if rho == 0.0 || s.z.abs() >= 1.0 {
        0.0
    } else {
        s.y.atan2(s.x).rem_euclid(TAU)
    };
    PhasePoint::new(theta.clamp(0.0, PI), phi)
}

/// Uniform `(θ, φ)` lattice over `[0, π] × [0, 2π)`: `n_theta` points with both
/// poles included, `n_phi` points with `2π` excluded. Row-major, θ outer.
pub fn phase_grid(n_theta: usize, n_phi: usize) -> Result<Vec<PhasePoint>> {
    if n_theta < 2 || n_phi < 1 {
        return Err(QktError::InvalidArgument(format!(
            "phase grid needs n_theta ≥ 2 and n_phi ≥ 1, got {n_theta} × {n_phi}"
        )));
    }
    let mut pts = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = PI * i as f64 / (n_theta - 1) as f64;
        for k in 0..n_phi {
            pts.push(PhasePoint::new(theta, TAU * k as f64 / n_phi as f64)?);
        }
    }
    Ok(pts)
}

/// Stroboscopic trajectories from each start point, in long format:
/// `point,kick,x,y,z,theta,phi`, 15 significant digits.
pub fn trajectories_csv(starts: &[PhasePoint], kappa: f64, n_kicks: usize) -> Result<String> {
    use std::fmt::Write as _;
    let mut out = String::from("point,kick,x,y,z,theta,phi\n");
    for (idx, &p) in starts.iter().enumerate() {
        for (kick, s) in classical_trajectory(angles_to_sphere(p), kappa, n_kicks).into_iter().enumerate() {
            let a = sphere_to_angles(s)?;
            let _ = writeln!(
                out,
                "{idx},{kick},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                s.x,
                s.y,
                s.z,
                a.theta(),
                a.phi()
            );
        }
    }
    Ok(out)
}

/// Period-4 orbit `(1,0,0) → (0,0,−1) → (−1,0,0) → (0,0,1)` present for every κ.
pub fn period4_orbit() -> [ClassicalState; 4] {
    [
        ClassicalState::new(1.0, 0.0, 0.0),
        ClassicalState::new(0.0, 0.0, -1.0),
        ClassicalState::new(-1.0, 0.0, 0.0),
        ClassicalState::new(0.0, 0.0, 1.0),
    ]
}

/// A numerically located fixed point of the map and its linear stability.
#[derive(Clone, Copy, Debug)]
pub struct FixedPoint {
    pub state: ClassicalState,
    /// Elliptic (stable) if the tangent map has `|trace| < 2`.
    pub elliptic: bool,
}

/// Fixed points of the map for `p = π/2`.
///
/// A fixed point has `Z = −X`, so on the sphere it is determined by `X`
/// alone; `Y = ±sqrt(1 − 2X²)`. The residual of the `Y` equation is scanned
/// for sign changes in `X` and each bracket is refined by bisection.
pub fn fixed_points(kappa: f64) -> Vec<FixedPoint> {
    let xmax = std::f64::consts::FRAC_1_SQRT_2;
    let mut found: Vec<ClassicalState> = Vec::new();
    for sign in [1.0, -1.0] {
        // Y' = Y cos(κX) + X sin(κX) must equal Y.
        let residual = |x: f64| {
            let y = sign * (1.0 - 2.0 * x * x).max(0.0).sqrt();
            y * (kappa * x).cos() + x * (kappa * x).sin() - y
        };
        let samples = 4000;
        let mut prev_x = -xmax;
        let mut prev_r = residual(prev_x);
        for k in 1..=samples {
            let x = -xmax + 2.0 * xmax * k as f64 / samples as f64;
            let r = residual(x);
            let root = if r == 0.0 {
                Some(x)
            } else if prev_r.signum() != r.signum() {
                Some(bisect(&residual, prev_x, x))
            } else {
                None
            };
            if let Some(x0) = root {
                let y0 = sign * (1.0 - 2.0 * x0 * x0).max(0.0).sqrt();
                let cand = ClassicalState::new(x0, y0, -x0).normalized();
                let moved = classical_step(cand, kappa).distance(&cand);
                if moved < 1e-9 && found.iter().all(|f| f.distance(&cand) > 1e-6) {
                    found.push(cand);
                }
            }
            prev_x = x;
            prev_r = r;
        }
    }
    found
        .into_iter()
        .map(|state| FixedPoint {
            state,
            elliptic: tangent_trace(state, kappa).abs() < 2.0,
        })
        .collect()
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < 1e-16 {
            return m;
        }
        if fa.signum() == fm.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Trace of the map's Jacobian restricted to the tangent plane at a fixed
/// point, estimated by central differences in a local orthonormal frame.
fn tangent_trace(s: ClassicalState, kappa: f64) -> f64 {
    let n = [s.x, s.y, s.z];
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(cross(n, helper));
    let e2 = cross(n, e1);
    let h = 1e-6;
    let image = |d: [f64; 3], t: f64| {
        let p = ClassicalState::new(n[0] + t * d[0], n[1] + t * d[1], n[2] + t * d[2]).normalized();
        let q = classical_step(p, kappa);
        [q.x, q.y, q.z]
    };
    let deriv = |d: [f64; 3]| {
        let (a, b) = (image(d, h), image(d, -h));
        [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h), (a[2] - b[2]) / (2.0 * h)]
    };
    dot(deriv(e1), e1) + dot(deriv(e2), e2)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Whether the classical orbit from `start` stays within `radius` (great-circle
/// distance) of `center` for `n_kicks` kicks.
pub fn orbit_confined(start: ClassicalState, center: ClassicalState, kappa: f64, n_kicks: usize, radius: f64) -> bool {
    let mut s = start;
    for _ in 0..=n_kicks {
        let d = dot([s.x, s.y, s.z], [center.x, center.y, center.z]).clamp(-1.0, 1.0).acos();
        if d > radius {
            return false;
        }
        s = classical_step(s, kappa);
    }
    true
}
