//! Experiment configuration: per-command defaults, overridden by a JSON config
//! file, overridden by command-line flags.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use qkt_core::analysis::{Mode, SweepOptions};
use qkt_core::sim::NoiseConfig;
use qkt_core::spin::PhasePoint;
use qkt_core::synth::Level;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Shots,
    Noisy,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Shots => Mode::Shots,
            ModeArg::Noisy => Mode::Noisy,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Rotation,
    Ibmq,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Rotation => Level::Rotation,
            LevelArg::Ibmq => Level::Ibmq,
        }
    }
}

/// Flags shared by every subcommand. Angles are in radians.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Kick strength κ in radians; kappa-sweep takes a comma-separated list
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub kappa: Option<Vec<f64>>,
    /// κ grid as START:STOP:COUNT, both ends included (kappa-sweep only)
    #[arg(long, conflicts_with = "kappa")]
    pub kappa_range: Option<String>,
    /// Rotation angle p of the linear kick in radians [default: π/2]
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// Polar angle(s) θ ∈ [0, π] of the initial coherent state, radians, comma-separated
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    /// Azimuth(s) φ of the initial coherent state, radians, comma-separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Option<Vec<f64>>,
    /// θ points of the initial-point grid, poles included [default: 17]
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// φ points of the initial-point grid, 2π excluded [default: 17]
    #[arg(long)]
    pub n_phi: Option<usize>,
    /// Number of kicks N
    #[arg(long)]
    pub kicks: Option<u64>,
    /// Simulation mode [default: exact]
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Shots per tomography basis in shots mode [default: 8192]
    #[arg(long)]
    pub shots: Option<u64>,
    /// Single-qubit depolarizing probability in noisy mode [default: 0.001]
    #[arg(long)]
    pub p1: Option<f64>,
    /// Two-qubit depolarizing probability after each CNOT in noisy mode [default: 0.01]
    #[arg(long)]
    pub p2: Option<f64>,
    /// Master seed for all sampling [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gate level of compiled circuits [default: ibmq; rotation for compile]
    #[arg(long, value_enum)]
    pub level: Option<LevelArg>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format for tabular data [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Create the output directory if it does not exist
    #[arg(long)]
    pub mkdirs: bool,
}

/// A scalar or a list in the config file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    pub kappa: Option<OneOrMany>,
    pub kappa_range: Option<String>,
    pub p: Option<f64>,
    pub theta: Option<OneOrMany>,
    pub phi: Option<OneOrMany>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    pub kicks: Option<u64>,
    pub mode: Option<ModeArg>,
    pub shots: Option<u64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub seed: Option<u64>,
    pub level: Option<LevelArg>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub mkdirs: Option<bool>,
    pub prune: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ConfigFile =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        ensure!(
            cfg.version == CONFIG_VERSION,
            "config {}: unsupported version {} (expected {CONFIG_VERSION})",
            path.display(),
            cfg.version
        );
        Ok(cfg)
    }
}

/// Per-command defaults.
#[derive(Clone, Debug)]
pub struct Defaults {
    pub kappas: Vec<f64>,
    pub points: Vec<(f64, f64)>,
    pub kicks: u64,
    pub level: Level,
    pub grid: Option<(usize, usize)>,
}

/// Fully resolved settings.
#[derive(Clone, Debug)]
pub struct Settings {
    pub kappas: Vec<f64>,
    pub p: f64,
    /// Explicit initial points; empty when a grid is used.
    pub points: Vec<PhasePoint>,
    pub grid: Option<(usize, usize)>,
    pub kicks: u64,
    pub mode: Mode,
    pub shots: u64,
    pub noise: NoiseConfig,
    pub seed: u64,
    pub level: Level,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub format: Format,
    pub mkdirs: bool,
    pub prune: bool,
}

impl Settings {
    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            mode: self.mode,
            shots: self.shots,
            noise: self.noise,
            seed: self.seed,
            level: self.level,
            p: self.p,
        }
    }

    pub fn single_kappa(&self) -> Result<f64> {
        match self.kappas.as_slice() {
            [k] => Ok(*k),
            other => bail!("this command takes a single --kappa, got {}", other.len()),
        }
    }

    pub fn single_point(&self) -> Result<PhasePoint> {
        match self.points.as_slice() {
            [p] => Ok(*p),
            other => bail!("this command takes a single initial point, got {}", other.len()),
        }
    }
}

fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    ensure!(parts.len() == 3, "--kappa-range must be START:STOP:COUNT, got {spec:?}");
    let start: f64 = parts[0].trim().parse().context("range start")?;
    let stop: f64 = parts[1].trim().parse().context("range stop")?;
    let count: usize = parts[2].trim().parse().context("range count")?;
    ensure!(count >= 1, "range count must be ≥ 1");
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect())
}

fn points_from(theta: Vec<f64>, phi: Vec<f64>) -> Result<Vec<PhasePoint>> {
    ensure!(
        theta.len() == phi.len(),
        "--theta has {} values but --phi has {}",
        theta.len(),
        phi.len()
    );
    theta
        .into_iter()
        .zip(phi)
        .map(|(t, p)| PhasePoint::new(t, p).map_err(anyhow::Error::from))
        .collect()
}

/// Merge defaults, config file and flags, then validate every numeric range.
pub fn resolve(args: &CommonArgs, defaults: Defaults, prune_flag: bool) -> Result<Settings> {
    let cfg = match &args.config {
        Some(path) => Some(ConfigFile::load(path)?),
        None => None,
    };
    let cfg_ref = cfg.as_ref();
    macro_rules! pick {
        ($field:ident) => {
            args.$field.clone().or_else(|| cfg_ref.and_then(|c| c.$field.clone()))
        };
    }

    let kappas = if let Some(k) = &args.kappa {
        k.clone()
    } else if let Some(r) = &args.kappa_range {
        parse_range(r)?
    } else if let Some(k) = cfg_ref.and_then(|c| c.kappa.clone()) {
        k.into_vec()
    } else if let Some(r) = cfg_ref.and_then(|c| c.kappa_range.clone()) {
        parse_range(&r)?
    } else {
        defaults.kappas.clone()
    };
    ensure!(!kappas.is_empty(), "no κ values given");
    ensure!(kappas.iter().all(|k| k.is_finite()), "κ must be finite");

    let theta = args.theta.clone().or_else(|| cfg_ref.and_then(|c| c.theta.clone()).map(OneOrMany::into_vec));
    let phi = args.phi.clone().or_else(|| cfg_ref.and_then(|c| c.phi.clone()).map(OneOrMany::into_vec));
    let n_theta = pick!(n_theta);
    let n_phi = pick!(n_phi);
    let (points, grid) = match (theta, phi) {
        (Some(t), Some(p)) => (points_from(t, p)?, None),
        (None, None) => match (defaults.grid, n_theta, n_phi) {
            (Some((dt, dp)), nt, np) => (Vec::new(), Some((nt.unwrap_or(dt), np.unwrap_or(dp)))),
            (None, _, _) => {
                let (t, p): (Vec<f64>, Vec<f64>) = defaults.points.iter().copied().unzip();
                (points_from(t, p)?, None)
            }
        },
        _ => bail!("--theta and --phi must be given together"),
    };
    if let Some((nt, np)) = grid {
        ensure!(nt >= 2 && np >= 1, "grid needs n_theta ≥ 2 and n_phi ≥ 1, got {nt} × {np}");
    }

    let p = pick!(p).unwrap_or(FRAC_PI_2);
    ensure!(p.is_finite(), "p must be finite");
    let kicks = pick!(kicks).unwrap_or(defaults.kicks);
    let mode: Mode = pick!(mode).map(Mode::from).unwrap_or(Mode::Exact);
    let shots = pick!(shots).unwrap_or(8192);
    ensure!(shots >= 1, "shots must be ≥ 1");
    let seed = pick!(seed).unwrap_or(0);
    let noise = NoiseConfig { p1: pick!(p1).unwrap_or(1e-3), p2: pick!(p2).unwrap_or(1e-2), seed };
    noise.validate()?;
    let level = pick!(level).map(Level::from).unwrap_or(defaults.level);
    let jobs = pick!(jobs);
    if let Some(j) = jobs {
        ensure!(j >= 1, "--jobs must be ≥ 1");
    }
    let out = pick!(out).unwrap_or_else(|| PathBuf::from("."));
    let format = pick!(format).unwrap_or(Format::Csv);
    let mkdirs = args.mkdirs || cfg_ref.and_then(|c| c.mkdirs).unwrap_or(false);
    let prune = prune_flag || cfg_ref.and_then(|c| c.prune).unwrap_or(false);

    Ok(Settings {
        kappas,
        p,
        points,
        grid,
        kicks,
        mode,
        shots,
        noise,
        seed,
        level,
        jobs,
        out,
        format,
        mkdirs,
        prune,
    })
}
