//! Parameter sweeps over κ, over initial points and over kicks.
//!
//! Every kick count `N` is simulated independently: `U^N` is compiled into a
//! fixed-size circuit and applied to the initial coherent state. Cells are
//! computed in parallel and gathered in grid order; sampling uses seeds
//! derived from the master seed and the cell/kick index.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{concurrence, fidelity, oscs, time_average, OscsGrid};
use crate::classical::phase_grid;
use crate::error::{QktError, Result};
use crate::floquet::{floquet_2q, KickedTopParams};
use crate::rng::derive_seed;
use crate::sim::{run_circuit, run_noisy, tomography, DensityMatrix, NoiseConfig, QubitState};
use crate::sim::tomography::measure_all;
use crate::spin::{scs_to_qubits, PhasePoint, SpinQuantumNumber};
use crate::synth::{compile_qkt, GateSequence, Level};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Noiseless statevector.
    Exact,
    /// Noiseless statevector, then sampled tomography.
    Shots,
    /// Density matrix under depolarizing noise.
    Noisy,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Shots => "shots",
            Mode::Noisy => "noisy",
        })
    }
}

impl FromStr for Mode {
    type Err = QktError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "shots" => Ok(Mode::Shots),
            "noisy" => Ok(Mode::Noisy),
            other => Err(QktError::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub mode: Mode,
    pub shots: u64,
    pub noise: NoiseConfig,
    pub seed: u64,
    pub level: Level,
    pub p: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            shots: 8192,
            noise: NoiseConfig { p1: 1e-3, p2: 1e-2, seed: 0 },
            seed: 0,
            level: Level::Ibmq,
            p: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl SweepOptions {
    fn params(&self, kappa: f64) -> KickedTopParams {
        KickedTopParams { kappa, p: self.p, j: SpinQuantumNumber::ONE }
    }

    fn validate(&self) -> Result<()> {
        if self.mode == Mode::Shots && self.shots == 0 {
            return Err(QktError::InvalidArgument("shots must be ≥ 1".into()));
        }
        self.noise.validate()
    }
}

/// Compiled circuits for `U^1 … U^n`; entry `k` implements `k + 1` kicks.
pub fn compile_schedule(params: &KickedTopParams, n_kicks: u64, level: Level) -> Result<Vec<GateSequence>> {
    (1..=n_kicks)
        .into_par_iter()
        .map(|n| compile_qkt(params, n, level))
        .collect()
}

/// Reference evolution by repeated dense multiplication with the Floquet
/// matrix; entry `k` is the state after `k` kicks.
pub fn evolve_exact(params: &KickedTopParams, point: PhasePoint, n_kicks: u64) -> Result<Vec<QubitState>> {
    let u = crate::linalg::dyn_to_mat4(floquet_2q(params)?.matrix());
    let mut state = scs_to_qubits(params.j, point)?;
    let mut out = vec![state];
    for _ in 0..n_kicks {
        state = state.apply(&u)?;
        out.push(state);
    }
    Ok(out)
}

fn kick_concurrence(seq: &GateSequence, initial: &QubitState, opts: &SweepOptions, seed: u64) -> Result<f64> {
    match opts.mode {
        Mode::Exact => concurrence(&run_circuit(seq, initial)?.density()),
        Mode::Shots => {
            let rho = run_circuit(seq, initial)?.density();
            let records = measure_all(&rho, opts.shots, seed)?;
            concurrence(&tomography(&records)?)
        }
        Mode::Noisy => concurrence(&run_noisy(seq, &initial.density(), &opts.noise)?),
    }
}

/// Per-kick concurrence for kicks `1..=schedule.len()`.
fn concurrence_series(
    schedule: &[GateSequence],
    point: PhasePoint,
    opts: &SweepOptions,
    cell: u64,
) -> Result<Vec<f64>> {
    let initial = scs_to_qubits(SpinQuantumNumber::ONE, point)?;
    let master = derive_seed(opts.seed, cell);
    schedule
        .iter()
        .enumerate()
        .map(|(k, seq)| kick_concurrence(seq, &initial, opts, derive_seed(master, k as u64 + 1)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// One cell of a sweep in long format.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub theta: f64,
    pub phi: f64,
    pub kappa: f64,
    pub n_kicks: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub p: f64,
    pub twice_j: u32,
    pub n_kicks: u64,
    pub mode: Mode,
    pub level: Level,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
}

impl SweepMetadata {
    fn from_options(opts: &SweepOptions, n_kicks: u64) -> Self {
        Self {
            p: opts.p,
            twice_j: 2,
            n_kicks,
            mode: opts.mode,
            level: opts.level,
            seed: opts.seed,
            shots: (opts.mode == Mode::Shots).then_some(opts.shots),
            noise: (opts.mode == Mode::Noisy).then_some(opts.noise),
        }
    }
}

/// Observable values on a rectangular grid, row-major over `axes`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub observable: String,
    pub axes: Vec<Axis>,
    pub cells: Vec<SweepCell>,
    pub metadata: SweepMetadata,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    observable: &'a str,
    axes: &'a [Axis],
    shape: Vec<usize>,
    values: Vec<f64>,
    metadata: &'a SweepMetadata,
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.value).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let expected: usize = self.shape().iter().product();
        if expected != self.cells.len() {
            return Err(QktError::Internal(format!(
                "sweep has {} cells, axes imply {expected}",
                self.cells.len()
            )));
        }
        if matches!(self.observable.as_str(), "concurrence" | "fidelity" | "oscs")
            && self.cells.iter().any(|c| !(0.0..=1.0).contains(&c.value))
        {
            return Err(QktError::Internal(format!("{} value outside [0, 1]", self.observable)));
        }
        Ok(())
    }

    /// Long-format CSV: `theta,phi,kappa,n_kicks,mode,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,phi,kappa,n_kicks,mode,value\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:.14e},{:.14e},{:.14e},{},{},{:.14e}",
                c.theta, c.phi, c.kappa, c.n_kicks, self.metadata.mode, c.value
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let view = SweepJson {
            observable: &self.observable,
            axes: &self.axes,
            shape: self.shape(),
            values: self.values(),
            metadata: &self.metadata,
        };
        serde_json::to_string_pretty(&view).expect("sweep serializes")
    }
}

/// Time-averaged concurrence (kicks `1..=n_kicks`) for each κ.
pub fn kappa_sweep(point: PhasePoint, kappas: &[f64], n_kicks: u64, opts: &SweepOptions) -> Result<SweepResult> {
    opts.validate()?;
    if n_kicks == 0 {
        return Err(QktError::InvalidArgument("time average needs n_kicks ≥ 1".into()));
    }
    let cells = kappas
        .par_iter()
        .enumerate()
        .map(|(idx, &kappa)| {
            let schedule = compile_schedule(&opts.params(kappa), n_kicks, opts.level)?;
            let series = concurrence_series(&schedule, point, opts, idx as u64)?;
            Ok(SweepCell {
                theta: point.theta(),
                phi: point.phi(),
                kappa,
                n_kicks,
                value: time_average(&series)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let result = SweepResult {
        observable: "concurrence".into(),
        axes: vec![Axis { name: "kappa".into(), values: kappas.to_vec() }],
        cells,
        metadata: SweepMetadata::from_options(opts, n_kicks),
    };
    result.validate()?;
    Ok(result)
}

/// Time-averaged concurrence on an `n_theta × n_phi` lattice of initial
/// coherent states (θ outer, φ inner).
pub fn phase_grid_sweep(
    kappa: f64,
    n_theta: usize,
    n_phi: usize,
    n_kicks: u64,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    opts.validate()?;
    if n_kicks == 0 {
        return Err(QktError::InvalidArgument("time average needs n_kicks ≥ 1".into()));
    }
    let points = phase_grid(n_theta, n_phi)?;
    let schedule = compile_schedule(&opts.params(kappa), n_kicks, opts.level)?;
    let cells = points
        .par_iter()
        .enumerate()
        .map(|(idx, &point)| {
            let series = concurrence_series(&schedule, point, opts, idx as u64)?;
            Ok(SweepCell {
                theta: point.theta(),
                phi: point.phi(),
                kappa,
                n_kicks,
                value: time_average(&series)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let axis = |name: &str, stride: usize, len: usize| Axis {
        name: name.into(),
        values: (0..len).map(|k| if name == "theta" { points[k * stride].theta() } else { points[k].phi() }).collect(),
    };
    let result = SweepResult {
        observable: "concurrence".into(),
        axes: vec![axis("theta", n_phi, n_theta), axis("phi", 1, n_phi)],
        cells,
        metadata: SweepMetadata::from_options(opts, n_kicks),
    };
    result.validate()?;
    Ok(result)
}

/// `O_SCS` after each kick `0..=n_kicks` of the noiseless circuit evolution.
pub fn oscs_trace(point: PhasePoint, kappa: f64, n_kicks: u64) -> Result<Vec<f64>> {
    oscs_trace_with(point, &KickedTopParams::qubits(kappa), n_kicks, Level::Ibmq, OscsGrid::default())
}

pub(crate) fn oscs_trace_with(
    point: PhasePoint,
    params: &KickedTopParams,
    n_kicks: u64,
    level: Level,
    grid: OscsGrid,
) -> Result<Vec<f64>> {
    let initial = scs_to_qubits(params.j, point)?;
    let schedule = compile_schedule(params, n_kicks, level)?;
    let mut out = vec![oscs(&initial, grid)?];
    let rest = schedule
        .par_iter()
        .map(|seq| oscs(&run_circuit(seq, &initial)?, grid))
        .collect::<Result<Vec<_>>>()?;
    out.extend(rest);
    Ok(out)
}

impl SweepResult {
    /// `O_SCS` traces for several initial points as a `points × kicks` sweep.
    pub fn oscs_traces(points: &[PhasePoint], kappa: f64, n_kicks: u64, opts: &SweepOptions) -> Result<SweepResult> {
        let params = opts.params(kappa);
        let traces = points
            .iter()
            .map(|&p| oscs_trace_with(p, &params, n_kicks, opts.level, OscsGrid::default()))
            .collect::<Result<Vec<_>>>()?;
        let mut cells = Vec::new();
        for (p, trace) in points.iter().zip(&traces) {
            for (k, &v) in trace.iter().enumerate() {
                cells.push(SweepCell { theta: p.theta(), phi: p.phi(), kappa, n_kicks: k as u64, value: v });
            }
        }
        let mut metadata = SweepMetadata::from_options(&SweepOptions { mode: Mode::Exact, ..*opts }, n_kicks);
        metadata.shots = None;
        let result = SweepResult {
            observable: "oscs".into(),
            axes: vec![
                Axis { name: "point".into(), values: (0..points.len()).map(|k| k as f64).collect() },
                Axis { name: "kick".into(), values: (0..=n_kicks).map(|k| k as f64).collect() },
            ],
            cells,
            metadata,
        };
        result.validate()?;
        Ok(result)
    }
}

/// Fidelity of the shot-based tomographic reconstruction to the exact state
/// after `n_kicks` kicks.
pub fn tomography_fidelity(
    params: &KickedTopParams,
    point: PhasePoint,
    n_kicks: u64,
    level: Level,
    shots: u64,
    seed: u64,
) -> Result<(DensityMatrix, DensityMatrix, f64)> {
    let seq = compile_qkt(params, n_kicks, level)?;
    let ideal = run_circuit(&seq, &scs_to_qubits(params.j, point)?)?.density();
    let records = measure_all(&ideal, shots, seed)?;
    let rho = tomography(&records)?;
    let f = fidelity(&rho, &ideal);
    Ok((rho, ideal, f))
}

/// Mean fidelity of noisy to ideal evolution for each kick count, averaged
/// over every `(κ, point)` combination.
pub fn noisy_fidelity_trend(
    kappas: &[f64],
    points: &[PhasePoint],
    kicks: &[u64],
    noise: &NoiseConfig,
    level: Level,
) -> Result<Vec<f64>> {
    noise.validate()?;
    kicks
        .par_iter()
        .map(|&n| {
            let mut total = 0.0;
            for &kappa in kappas {
                let seq = compile_qkt(&KickedTopParams::qubits(kappa), n, level)?;
                for &point in points {
                    let initial = scs_to_qubits(SpinQuantumNumber::ONE, point)?;
                    let ideal = run_circuit(&seq, &initial)?.density();
                    let noisy = run_noisy(&seq, &initial.density(), noise)?;
                    total += fidelity(&noisy, &ideal);
                }
            }
            Ok(total / (kappas.len() * points.len()) as f64)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
}

/// Ordinary least-squares line fit.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let n = xs.len();
    if n != ys.len() || n < 3 {
        return Err(QktError::InvalidArgument("slope fit needs ≥ 3 paired samples".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(SlopeFit { slope, intercept, stderr })
}
