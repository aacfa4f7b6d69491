use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::floquet::{floquet_spin, KickedTopParams};
use crate::linalg::{c, haar_unitary, kron2, Mat4, ZERO};
use crate::sim::NoiseConfig;
use crate::spin::{scs, symmetric_embed, PhasePoint, SpinState, SpinQuantumNumber};
use crate::synth::Level;

fn bell() -> QubitState {
    QubitState::new([c(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, c(FRAC_1_SQRT_2, 0.0)]).unwrap()
}

fn singlet() -> QubitState {
    QubitState::new([ZERO, c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0), ZERO]).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> QubitState {
    let u = haar_unitary(4, rng);
    QubitState::new([u[(0, 0)], u[(1, 0)], u[(2, 0)], u[(3, 0)]]).unwrap()
}

/// Random mixed state `G G† / tr`, with G a 4×4 complex Ginibre matrix of rank `rank`.
fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> DensityMatrix {
    let mut m = Mat4::zeros();
    for _ in 0..rank {
        let psi = random_state(rng);
        let w: f64 = rng.random();
        let v = nalgebra::Vector4::from_column_slice(psi.amplitudes());
        m += v * v.adjoint() * c(w, 0.0);
    }
    let tr = m.trace();
    DensityMatrix::new(m.map(|x| x / tr)).unwrap()
}

#[test]
fn concurrence_of_standard_states() {
    assert!((concurrence(&bell().density()).unwrap() - 1.0).abs() < 1e-10);
    assert!((concurrence(&singlet().density()).unwrap() - 1.0).abs() < 1e-10);
    assert!(concurrence(&QubitState::basis(0).density()).unwrap() < 1e-10);
    assert!(concurrence(&DensityMatrix::maximally_mixed()).unwrap() < 1e-12);
}

#[test]
fn werner_state_concurrence() {
    // ρ = w |Ψ⁻⟩⟨Ψ⁻| + (1 − w) I/4 has C = max(0, (3w − 1)/2).
    for w in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let m = singlet().density().matrix().map(|x| x * w) + Mat4::identity().map(|x| x * ((1.0 - w) / 4.0));
        let got = concurrence(&DensityMatrix::new(m).unwrap()).unwrap();
        let want = ((3.0 * w - 1.0) / 2.0).max(0.0);
        assert!((got - want).abs() < 1e-9, "w = {w}: {got} vs {want}");
    }
}

#[test]
fn pure_state_concurrence_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let psi = random_state(&mut rng);
        let a = concurrence(&psi.density()).unwrap();
        assert!((a - concurrence_pure(&psi)).abs() < 1e-7);
    }
}

#[test]
fn concurrence_bounds_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..10_000 {
        let rho = random_density(&mut rng, 1 + k % 4);
        let v = concurrence(&rho).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn concurrence_is_local_unitary_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let rho = random_density(&mut rng, 2);
        let a = haar_unitary(2, &mut rng);
        let b = haar_unitary(2, &mut rng);
        let local = kron2(&crate::linalg::dyn_to_mat2(&a), &crate::linalg::dyn_to_mat2(&b));
        let rotated = DensityMatrix::new(local * rho.matrix() * local.adjoint()).unwrap();
        let (x, y) = (concurrence(&rho).unwrap(), concurrence(&rotated).unwrap());
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn circuit_concurrence_matches_spin_oracle() {
    // Oracle: evolve the 3-level coherent state with the spin-1 Floquet
    // matrix, embed in the symmetric subspace, evaluate 2|a00 a11 − a01 a10|.
    let params = KickedTopParams::qubits(2.5);
    let point = PhasePoint::new(2.25, 2.0).unwrap();
    let u = floquet_spin(&params).unwrap();
    let s0 = scs(SpinQuantumNumber::ONE, point);
    let v = u.matrix() * DVector::from_column_slice(s0.amplitudes());
    let oracle_state = symmetric_embed(&SpinState::new(SpinQuantumNumber::ONE, v.as_slice().to_vec()).unwrap()).unwrap();
    let oracle = concurrence_pure(&oracle_state);
    let seq = crate::synth::compile_qkt(&params, 1, Level::Ibmq).unwrap();
    let psi = crate::sim::run_circuit(&seq, &crate::spin::scs_to_qubits(SpinQuantumNumber::ONE, point).unwrap()).unwrap();
    assert!((concurrence(&psi.density()).unwrap() - oracle).abs() < 1e-8);
}

#[test]
fn fidelity_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let (a, b) = (random_state(&mut rng), random_state(&mut rng));
        let f = fidelity(&a.density(), &b.density());
        assert!((f - a.inner(&b).norm_sqr()).abs() < 1e-10);
        let (r, s) = (random_density(&mut rng, 3), random_density(&mut rng, 2));
        assert!((fidelity(&r, &s) - fidelity(&s, &r)).abs() < 1e-8);
        assert!((fidelity(&r, &r) - 1.0).abs() < 1e-8);
    }
    assert!(fidelity(&QubitState::basis(0).density(), &QubitState::basis(3).density()) < 1e-12);
    let f = fidelity(&bell().density(), &DensityMatrix::maximally_mixed());
    assert!((f - 0.25).abs() < 1e-10);
}

#[test]
fn oscs_of_coherent_states_is_one() {
    for (t, p) in [(0.0, 0.0), (PI, 0.0), (FRAC_PI_2, 0.0), (2.25, 1.0), (0.3, 5.9), (1.7321, 3.3333)] {
        let psi = crate::spin::scs_to_qubits(SpinQuantumNumber::ONE, PhasePoint::new(t, p).unwrap()).unwrap();
        let v = oscs(&psi, OscsGrid::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "({t}, {p}): {v}");
    }
}

#[test]
fn oscs_of_symmetric_bell_state() {
    // (|00⟩ + |11⟩)/√2: the overlap with |θ,φ⟩⊗² is (cos²(θ/2) + e^{-2iφ} sin²(θ/2))/√2,
    // maximised at the poles.
    let v = oscs(&bell(), OscsGrid::default()).unwrap();
    assert!((v - FRAC_1_SQRT_2).abs() < 1e-9);
    // |m = 0⟩ = (|01⟩ + |10⟩)/√2 peaks on the equator at 2 · ½ · ½ · √2 = 1/√2.
    let w = QubitState::new([ZERO, c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), ZERO]).unwrap();
    assert!((oscs(&w, OscsGrid::default()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-9);
}

#[test]
fn oscs_rejects_antisymmetric_states() {
    assert!(matches!(oscs(&singlet(), OscsGrid::default()), Err(crate::QktError::SymmetryViolation(_))));
}

#[test]
fn oscs_coarse_grid_converges() {
    let psi = crate::spin::scs_to_qubits(SpinQuantumNumber::ONE, PhasePoint::new(1.234, 4.321).unwrap()).unwrap();
    let grid = OscsGrid { n_theta: 7, n_phi: 9, resolution: 1e-7 };
    assert!((oscs(&psi, grid).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn time_average_checks() {
    assert_eq!(time_average(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
    assert!(time_average(&[]).is_err());
}

#[test]
fn zero_kappa_gives_zero_concurrence() {
    // Without the twist the evolution is a product rotation.
    let opts = SweepOptions::default();
    let r = phase_grid_sweep(0.0, 3, 4, 5, &opts).unwrap();
    assert_eq!(r.shape(), vec![3, 4]);
    assert!(r.values().iter().all(|&v| v < 1e-8));
    let r = kappa_sweep(PhasePoint::new(1.0, 1.0).unwrap(), &[0.0], 10, &opts).unwrap();
    assert!(r.values()[0] < 1e-8);
}

#[test]
fn shot_mode_tracks_exact() {
    let point = PhasePoint::new(2.25, 1.0).unwrap();
    let exact = kappa_sweep(point, &[1.5, 3.0], 4, &SweepOptions::default()).unwrap();
    let shots = kappa_sweep(point, &[1.5, 3.0], 4, &SweepOptions { mode: Mode::Shots, ..Default::default() }).unwrap();
    for (a, b) in exact.values().iter().zip(shots.values()) {
        assert!((a - b).abs() < 0.05, "{a} vs {b}");
    }
    assert_eq!(shots.metadata.shots, Some(8192));
}

#[test]
fn sweeps_are_deterministic() {
    let point = PhasePoint::new(0.9, 2.0).unwrap();
    for mode in [Mode::Exact, Mode::Shots, Mode::Noisy] {
        let opts = SweepOptions { mode, shots: 512, seed: 3, ..Default::default() };
        let a = kappa_sweep(point, &[0.5, 2.5], 3, &opts).unwrap();
        let b = kappa_sweep(point, &[0.5, 2.5], 3, &opts).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json(), b.to_json());
    }
}

#[test]
fn noisy_mode_lowers_concurrence() {
    let point = PhasePoint::new(FRAC_PI_2, 0.0).unwrap();
    let exact = kappa_sweep(point, &[2.5], 5, &SweepOptions::default()).unwrap();
    let noisy = kappa_sweep(
        point,
        &[2.5],
        5,
        &SweepOptions { mode: Mode::Noisy, noise: NoiseConfig { p1: 0.01, p2: 0.05, seed: 0 }, ..Default::default() },
    )
    .unwrap();
    assert!(noisy.values()[0] < exact.values()[0]);
}

#[test]
fn sweep_output_formats() {
    let r = phase_grid_sweep(2.5, 2, 3, 2, &SweepOptions::default()).unwrap();
    let csv = r.to_csv();
    assert_eq!(csv.lines().next(), Some("theta,phi,kappa,n_kicks,mode,value"));
    assert_eq!(csv.lines().count(), 7);
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["shape"], serde_json::json!([2, 3]));
    assert_eq!(json["values"].as_array().unwrap().len(), 6);
    assert_eq!(json["metadata"]["mode"], "exact");
    assert_eq!(json["axes"][0]["values"][1].as_f64().unwrap(), PI);
}

#[test]
fn invalid_sweep_arguments() {
    let point = PhasePoint::new(1.0, 1.0).unwrap();
    assert!(kappa_sweep(point, &[1.0], 0, &SweepOptions::default()).is_err());
    let bad = SweepOptions { mode: Mode::Shots, shots: 0, ..Default::default() };
    assert!(kappa_sweep(point, &[1.0], 1, &bad).is_err());
    assert!(phase_grid_sweep(1.0, 1, 3, 1, &SweepOptions::default()).is_err());
}

#[test]
fn oscs_trace_starts_at_one() {
    let trace = oscs_trace(PhasePoint::new(2.25, 1.0).unwrap(), 2.5, 3).unwrap();
    assert_eq!(trace.len(), 4);
    assert!((trace[0] - 1.0).abs() < 1e-9);
    assert!(trace.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn exact_evolution_matches_circuits() {
    let params = KickedTopParams::qubits(3.3);
    let point = PhasePoint::new(0.7, 0.2).unwrap();
    let states = evolve_exact(&params, point, 6).unwrap();
    let schedule = compile_schedule(&params, 6, Level::Rotation).unwrap();
    let initial = crate::spin::scs_to_qubits(SpinQuantumNumber::ONE, point).unwrap();
    for (k, seq) in schedule.iter().enumerate() {
        let psi = crate::sim::run_circuit(seq, &initial).unwrap();
        assert!((psi.inner(&states[k + 1]).norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn slope_fit() {
    let xs: Vec<f64> = (0..10).map(f64::from).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
    let fit = least_squares_slope(&xs, &ys).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-12 && (fit.intercept - 1.0).abs() < 1e-12);
    assert!(fit.stderr < 1e-12);
    assert!(least_squares_slope(&[1.0, 2.0], &[1.0, 2.0]).is_err());
}

#[test]
fn tomography_fidelity_is_high() {
    let (_, _, f) =
        tomography_fidelity(&KickedTopParams::qubits(2.5), PhasePoint::new(2.25, 1.0).unwrap(), 10, Level::Ibmq, 8192, 1)
            .unwrap();
    assert!(f > 0.97);
}
