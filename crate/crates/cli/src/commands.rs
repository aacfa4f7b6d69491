//! Subcommand implementations.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use serde::Serialize;
use serde_json::json;

use qkt_core::analysis::{self, concurrence, fidelity, Mode, SweepResult};
use qkt_core::classical::{self, angles_to_sphere, classical_trajectory, trajectories_csv};
use qkt_core::floquet::{floquet_2q, unitary_power, KickedTopParams};
use qkt_core::sim::tomography::measure_all;
use qkt_core::sim::{run_circuit, run_noisy, tomography};
use qkt_core::spin::{scs_to_qubits, PhasePoint, SpinQuantumNumber};
use qkt_core::synth::netlist::{parse_netlist, write_netlist, NetlistHeader};
use qkt_core::synth::{compile_qkt, reconstruction_error, Level, FAILURE_TOLERANCE};

use crate::config::{resolve, CommonArgs, Defaults, Format, Settings};
use crate::output::{prepare_dir, write_atomic};

fn defaults(kappas: Vec<f64>, points: Vec<(f64, f64)>, kicks: u64, grid: Option<(usize, usize)>) -> Defaults {
    Defaults { kappas, points, kicks, level: Level::Ibmq, grid }
}

fn setup(args: &CommonArgs, d: Defaults, prune: bool) -> Result<Settings> {
    let s = resolve(args, d, prune)?;
    if let Some(jobs) = s.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring worker pool")?;
    }
    prepare_dir(&s.out, s.mkdirs)?;
    Ok(s)
}

fn grid_points(s: &Settings) -> Result<Vec<PhasePoint>> {
    match s.grid {
        Some((nt, np)) => Ok(classical::phase_grid(nt, np)?),
        None => Ok(s.points.clone()),
    }
}

fn params(s: &Settings, kappa: f64) -> KickedTopParams {
    KickedTopParams { kappa, p: s.p, j: SpinQuantumNumber::ONE }
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

fn write_sweep(s: &Settings, stem: &str, result: &SweepResult) -> Result<()> {
    let body = match s.format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json() + "\n",
    };
    report(&write_atomic(&s.out, &format!("{stem}.{}", s.format.extension()), &body)?);
    Ok(())
}

fn require_kicks(s: &Settings) -> Result<()> {
    ensure!(s.kicks >= 1, "time averages need --kicks ≥ 1");
    Ok(())
}

#[derive(Serialize)]
struct Trajectory {
    theta0: f64,
    phi0: f64,
    /// `[x, y, z]` after each kick, starting with the initial point.
    points: Vec<[f64; 3]>,
}

pub fn classical_map(args: &CommonArgs) -> Result<()> {
    let s = setup(args, defaults(vec![2.5], vec![], 150, Some((17, 17))), false)?;
    let kappa = s.single_kappa()?;
    let starts = grid_points(&s)?;
    let n = usize::try_from(s.kicks).context("--kicks too large")?;
    let body = match s.format {
        Format::Csv => trajectories_csv(&starts, kappa, n)?,
        Format::Json => {
            let trajectories: Vec<Trajectory> = starts
                .iter()
                .map(|&p| Trajectory {
                    theta0: p.theta(),
                    phi0: p.phi(),
                    points: classical_trajectory(angles_to_sphere(p), kappa, n)
                        .into_iter()
                        .map(|c| [c.x, c.y, c.z])
                        .collect(),
                })
                .collect();
            serde_json::to_string_pretty(&json!({
                "kappa": kappa,
                "n_kicks": s.kicks,
                "trajectories": trajectories,
            }))? + "\n"
        }
    };
    report(&write_atomic(&s.out, &format!("classical_map.{}", s.format.extension()), &body)?);
    Ok(())
}

pub fn compile(args: &CommonArgs, prune: bool, check: Option<&Path>) -> Result<()> {
    let mut d = defaults(vec![2.5], vec![(FRAC_PI_2, 0.0)], 1, None);
    d.level = Level::Rotation;
    if let Some(path) = check {
        return check_netlist(args, d, path);
    }
    let s = setup(args, d, prune)?;
    let kappa = s.single_kappa()?;
    let params = params(&s, kappa);
    let mut seq = compile_qkt(&params, s.kicks, s.level)?;
    if s.prune {
        seq = seq.pruned();
    }
    let target = unitary_power(&floquet_2q(&params)?, s.kicks)?;
    let error = reconstruction_error(&seq, target.matrix())?;
    let header = NetlistHeader { kappa: Some(kappa), p: Some(s.p), n_kicks: Some(s.kicks), level: Some(s.level) };
    report(&write_atomic(&s.out, "netlist.txt", &write_netlist(&seq, &header))?);
    let passed = error < FAILURE_TOLERANCE;
    let body = serde_json::to_string_pretty(&json!({
        "kappa": kappa,
        "p": s.p,
        "n_kicks": s.kicks,
        "level": s.level,
        "pruned": s.prune,
        "gates": seq.len(),
        "cnot": seq.cnot_count(),
        "single_qubit": seq.single_qubit_count(),
        "reconstruction_error": error,
        "tolerance": FAILURE_TOLERANCE,
        "passed": passed,
    }))? + "\n";
    report(&write_atomic(&s.out, "compile_report.json", &body)?);
    ensure!(passed, "verification failed: reconstruction error {error:e} ≥ {FAILURE_TOLERANCE:e}");
    Ok(())
}

fn check_netlist(args: &CommonArgs, d: Defaults, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (seq, header) = parse_netlist(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut args = args.clone();
    if args.kappa.is_none() && args.kappa_range.is_none() {
        args.kappa = header.kappa.map(|k| vec![k]);
    }
    args.p = args.p.or(header.p);
    args.kicks = args.kicks.or(header.n_kicks);
    let s = resolve(&args, d, false)?;
    let kappa = s.single_kappa()?;
    let target = unitary_power(&floquet_2q(&params(&s, kappa))?, s.kicks)?;
    let error = reconstruction_error(&seq, target.matrix())?;
    println!(
        "{}: {} gates ({} CNOT), level {}, κ = {kappa}, p = {}, N = {}, reconstruction error {error:.3e}",
        path.display(),
        seq.len(),
        seq.cnot_count(),
        seq.level,
        s.p,
        s.kicks
    );
    ensure!(
        error < FAILURE_TOLERANCE,
        "verification failed: reconstruction error {error:e} ≥ {FAILURE_TOLERANCE:e}"
    );
    println!("verification passed");
    Ok(())
}

pub fn kappa_sweep(args: &CommonArgs) -> Result<()> {
    let kappas: Vec<f64> = (0..=24).map(|k| 0.5 * k as f64).collect();
    let s = setup(args, defaults(kappas, vec![(2.25, 2.0)], 200, None), false)?;
    require_kicks(&s)?;
    let point = s.single_point()?;
    let result = analysis::kappa_sweep(point, &s.kappas, s.kicks, &s.sweep_options())?;
    write_sweep(&s, "kappa_sweep", &result)
}

pub fn phase_grid(args: &CommonArgs) -> Result<()> {
    let s = setup(args, defaults(vec![2.5], vec![], 200, Some((17, 17))), false)?;
    require_kicks(&s)?;
    let kappa = s.single_kappa()?;
    let (nt, np) = s
        .grid
        .context("phase-grid uses --n-theta/--n-phi, not --theta/--phi")?;
    let result = analysis::phase_grid_sweep(kappa, nt, np, s.kicks, &s.sweep_options())?;
    write_sweep(&s, "phase_grid", &result)
}

pub fn oscs(args: &CommonArgs) -> Result<()> {
    let s = setup(args, defaults(vec![2.5], vec![(FRAC_PI_2, 0.0), (2.25, 1.0)], 50, None), false)?;
    let kappa = s.single_kappa()?;
    let points = grid_points(&s)?;
    let result = SweepResult::oscs_traces(&points, kappa, s.kicks, &s.sweep_options())?;
    write_sweep(&s, "oscs", &result)
}

pub fn tomo_demo(args: &CommonArgs) -> Result<()> {
    let s = setup(args, defaults(vec![2.5], vec![(2.25, 2.0)], 1, None), false)?;
    let kappa = s.single_kappa()?;
    let point = s.single_point()?;
    let seq = compile_qkt(&params(&s, kappa), s.kicks, s.level)?;
    let initial = scs_to_qubits(SpinQuantumNumber::ONE, point)?;
    let ideal = run_circuit(&seq, &initial)?.density();
    let prepared = match s.mode {
        Mode::Noisy => run_noisy(&seq, &initial.density(), &s.noise)?,
        Mode::Exact | Mode::Shots => ideal,
    };
    let records = measure_all(&prepared, s.shots, s.seed)?;
    let rho = tomography(&records)?;
    let f = fidelity(&rho, &ideal);
    report(&write_atomic(&s.out, "tomo_shots.json", &(serde_json::to_string_pretty(&records)? + "\n"))?);
    let body = serde_json::to_string_pretty(&json!({
        "kappa": kappa,
        "p": s.p,
        "theta": point.theta(),
        "phi": point.phi(),
        "n_kicks": s.kicks,
        "mode": s.mode,
        "level": s.level,
        "shots": s.shots,
        "seed": s.seed,
        "noise": (s.mode == Mode::Noisy).then_some(s.noise),
        "fidelity": f,
        "concurrence_reconstructed": concurrence(&rho)?,
        "concurrence_ideal": concurrence(&ideal)?,
        "rho": rho,
        "ideal": ideal,
    }))? + "\n";
    report(&write_atomic(&s.out, "tomo_demo.json", &body)?);
    Ok(())
}
