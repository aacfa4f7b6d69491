use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tomography::{exact_expectations, linear_inversion, measure_all};
use super::*;
use crate::floquet::{floquet_2q, KickedTopParams};
use crate::linalg::{c, haar_unitary, mat4_to_dyn, max_abs_diff, ZERO};
use crate::synth::{compile_qkt, Level};

fn bell() -> QubitState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    QubitState::new([c(s, 0.0), ZERO, ZERO, c(s, 0.0)]).unwrap()
}

fn bell_circuit() -> GateSequence {
    GateSequence {
        gates: vec![
            Gate::Ry(0, std::f64::consts::FRAC_PI_2),
            Gate::Cnot { control: 0, target: 1 },
        ],
        level: Level::Rotation,
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> QubitState {
    let u = haar_unitary(4, rng);
    QubitState::new([u[(0, 0)], u[(1, 0)], u[(2, 0)], u[(3, 0)]]).unwrap()
}

fn state_err(a: &QubitState, b: &QubitState) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn empty_sequence_is_identity() {
    let seq = GateSequence { gates: vec![], level: Level::Rotation };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = random_state(&mut rng);
    assert_eq!(run_circuit(&seq, &psi).unwrap(), psi);
}

#[test]
fn cnot_produces_bell_state() {
    let out = run_circuit(&bell_circuit(), &QubitState::basis(0)).unwrap();
    assert!(state_err(&out, &bell()) < 1e-15);
}

#[test]
fn circuit_matches_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kappa in [0.5, 2.5, 6.5] {
        let params = KickedTopParams::qubits(kappa);
        let u = floquet_2q(&params).unwrap();
        for level in [Level::Rotation, Level::Ibmq] {
            let seq = compile_qkt(&params, 3, level).unwrap();
            let m = seq.matrix().unwrap();
            let psi = random_state(&mut rng);
            let out = run_circuit(&seq, &psi).unwrap();
            assert!(state_err(&out, &psi.apply(&m).unwrap()) < 1e-12);
            // Up to a global phase, equals U³ applied directly.
            let u3 = mat4_to_dyn(&m);
            let direct = u.matrix() * u.matrix() * u.matrix();
            assert!(crate::linalg::phase_aligned_error(&u3, &direct) < 1e-9);
        }
    }
}

#[test]
fn noiseless_density_matches_pure() {
    let seq = compile_qkt(&KickedTopParams::qubits(2.5), 4, Level::Ibmq).unwrap();
    let psi = run_circuit(&seq, &QubitState::basis(1)).unwrap();
    let rho = run_noisy(&seq, &QubitState::basis(1).density(), &NoiseConfig::noiseless(0)).unwrap();
    assert!(max_abs_diff(&rho.to_dyn(), &psi.density().to_dyn()) < 1e-12);
}

#[test]
fn full_cnot_noise_gives_maximally_mixed() {
    let noise = NoiseConfig { p1: 0.0, p2: 1.0, seed: 0 };
    let rho = run_noisy(&bell_circuit(), &QubitState::basis(0).density(), &noise).unwrap();
    assert!(max_abs_diff(&rho.to_dyn(), &DensityMatrix::maximally_mixed().to_dyn()) < 1e-15);
}

#[test]
fn single_qubit_noise_preserves_trace_and_positivity() {
    let noise = NoiseConfig { p1: 0.3, p2: 0.2, seed: 0 };
    let seq = compile_qkt(&KickedTopParams::qubits(4.0), 2, Level::Rotation).unwrap();
    let rho = run_noisy(&seq, &bell().density(), &noise).unwrap();
    assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    assert!(rho.eigenvalues().iter().all(|&l| l > -1e-12));
}

#[test]
fn noise_is_deterministic() {
    let noise = NoiseConfig { p1: 1e-3, p2: 1e-2, seed: 9 };
    let seq = compile_qkt(&KickedTopParams::qubits(2.5), 5, Level::Ibmq).unwrap();
    let a = run_noisy(&seq, &QubitState::basis(0).density(), &noise).unwrap();
    let b = run_noisy(&seq, &QubitState::basis(0).density(), &noise).unwrap();
    assert_eq!(a, b);
}

#[test]
fn purity_decreases_with_noise() {
    let seq = compile_qkt(&KickedTopParams::qubits(2.5), 1, Level::Ibmq).unwrap();
    let mut last = f64::INFINITY;
    for p in [0.0, 0.01, 0.05, 0.2] {
        let noise = NoiseConfig { p1: p / 10.0, p2: p, seed: 0 };
        let purity = run_noisy(&seq, &bell().density(), &noise).unwrap().purity();
        assert!(purity < last);
        last = purity;
    }
}

#[test]
fn invalid_noise_rejected() {
    let noise = NoiseConfig { p1: -0.1, p2: 0.0, seed: 0 };
    assert!(run_noisy(&bell_circuit(), &bell().density(), &noise).is_err());
    let noise = NoiseConfig { p1: 0.0, p2: 1.5, seed: 0 };
    assert!(run_noisy(&bell_circuit(), &bell().density(), &noise).is_err());
}

#[test]
fn measuring_basis_state_is_deterministic_outcome() {
    let rho = QubitState::basis(2).density();
    let rec = measure_basis(&rho, "ZZ".parse().unwrap(), 1000, 3).unwrap();
    assert_eq!(rec.counts["10"], 1000);
    assert_eq!(rec.validate().unwrap(), PauliBasis(Pauli::Z, Pauli::Z));
}

#[test]
fn bell_statistics() {
    let rho = bell().density();
    let rec = measure_basis(&rho, "ZZ".parse().unwrap(), 100_000, 11).unwrap();
    let f00 = rec.counts["00"] as f64 / 1e5;
    let f11 = rec.counts["11"] as f64 / 1e5;
    assert!((f00 - 0.5).abs() < 0.01 && (f11 - 0.5).abs() < 0.01);
    assert_eq!(rec.counts["01"] + rec.counts["10"], 0);
    // In XX the Bell state is a +1 eigenstate of X⊗X.
    let rec = measure_basis(&rho, "XX".parse().unwrap(), 10_000, 12).unwrap();
    assert_eq!(rec.counts["00"] + rec.counts["11"], 10_000);
}

#[test]
fn mixed_basis_measurement() {
    // |+⟩|1⟩ measured in XZ is always "01".
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = QubitState::new([ZERO, c(s, 0.0), ZERO, c(s, 0.0)]).unwrap();
    let rec = measure_basis(&psi.density(), "XZ".parse().unwrap(), 500, 4).unwrap();
    assert_eq!(rec.counts["01"], 500);
}

#[test]
fn y_basis_rotation_maps_eigenstates() {
    // |+i⟩ = (|0⟩ + i|1⟩)/√2 on qubit 1, |0⟩ on qubit 0.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = QubitState::new([c(s, 0.0), c(0.0, s), ZERO, ZERO]).unwrap();
    let p = tomography::basis_probabilities(&psi.density(), "ZY".parse().unwrap());
    assert!((p[0] - 1.0).abs() < 1e-14);
}

#[test]
fn measurement_is_seeded() {
    let rho = bell().density();
    let a = measure_basis(&rho, "YY".parse().unwrap(), 4096, 77).unwrap();
    let b = measure_basis(&rho, "YY".parse().unwrap(), 4096, 77).unwrap();
    assert_eq!(a, b);
    assert!(measure_basis(&rho, "YY".parse().unwrap(), 0, 77).is_err());
}

#[test]
fn exact_inversion_recovers_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let rho = random_state(&mut rng).density();
        let back = linear_inversion(&exact_expectations(&rho));
        assert!(max_abs_diff(&mat4_to_dyn(&back), &rho.to_dyn()) < 1e-12);
    }
}

#[test]
fn bell_tomography_fidelity() {
    // Clipping costs about 0.007 of fidelity on average at 8192 shots, with
    // a tail below 0.99; bound the mean and the worst case separately.
    let rho = bell().density();
    let fs: Vec<f64> = (0..20)
        .map(|seed| tomography(&measure_all(&rho, 8192, seed).unwrap()).unwrap().expectation_pure(&bell()))
        .collect();
    let mean = fs.iter().sum::<f64>() / fs.len() as f64;
    assert!(mean >= 0.99, "mean {mean}");
    assert!(fs.iter().all(|&f| f >= 0.975), "{fs:?}");
}

#[test]
fn single_shot_tomography_is_physical() {
    let recs = measure_all(&bell().density(), 1, 5).unwrap();
    let est = tomography(&recs).unwrap();
    assert!((est.matrix().trace().re - 1.0).abs() < 1e-12);
    assert!(est.eigenvalues().iter().all(|&l| l >= -1e-12));
}

#[test]
fn missing_basis_is_reported() {
    let mut recs = measure_all(&bell().density(), 100, 5).unwrap();
    recs.retain(|r| r.basis != "YX");
    assert!(matches!(tomography(&recs), Err(crate::QktError::MissingBasis(b)) if b == "YX"));
}

#[test]
fn duplicate_bases_are_pooled() {
    let rho = bell().density();
    let mut recs = measure_all(&rho, 2000, 1).unwrap();
    recs.extend(measure_all(&rho, 2000, 2).unwrap());
    let est = tomography(&recs).unwrap();
    assert!(est.expectation_pure(&bell()) > 0.98);
}

#[test]
fn bad_shot_records_rejected() {
    let mut rec = measure_basis(&bell().density(), "ZZ".parse().unwrap(), 10, 1).unwrap();
    rec.shots = 11;
    assert!(rec.validate().is_err());
    rec.shots = 10;
    rec.basis = "ZQ".into();
    assert!(rec.validate().is_err());
}

#[test]
fn density_matrix_validation() {
    let mut m = *bell().density().matrix();
    m[(0, 1)] = c(0.3, 0.0);
    assert!(DensityMatrix::new(m).is_err());
    let m = crate::linalg::Mat4::identity();
    assert!(DensityMatrix::new(m).is_err());
    let json = serde_json::to_string(&bell().density()).unwrap();
    let back: DensityMatrix = serde_json::from_str(&json).unwrap();
    assert!(max_abs_diff(&back.to_dyn(), &bell().density().to_dyn()) < 1e-15);
}
