//! Pauli-basis measurement sampling and linear-inversion state tomography.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::error::{QktError, Result};
use crate::linalg::{apply_spectral, c, dyn_to_mat4, eigh, kron2, mat4_to_dyn, pauli_x, pauli_y, pauli_z, Mat2, Mat4, ONE, ZERO};
use crate::rng::TaskRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Index in the `I, X, Y, Z` ordering used by expectation tables.
    fn index(self) -> usize {
        match self {
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }

    /// Pre-measurement rotation taking this Pauli's eigenbasis to the Z basis
    /// (+1 eigenstate ↦ outcome 0). Z: identity, X: H, Y: S† then H.
    pub fn rotation(self) -> Mat2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = Mat2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0));
        match self {
            Pauli::Z => Mat2::identity(),
            Pauli::X => hadamard,
            Pauli::Y => hadamard * Mat2::new(ONE, ZERO, ZERO, c(0.0, -1.0)),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Measurement setting: one Pauli per qubit, qubit 0 first (e.g. `XZ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliBasis(pub Pauli, pub Pauli);

impl PauliBasis {
    /// All nine settings in lexicographic order `XX, XY, …, ZZ`.
    pub fn all() -> Vec<PauliBasis> {
        Pauli::ALL
            .iter()
            .flat_map(|&a| Pauli::ALL.iter().map(move |&b| PauliBasis(a, b)))
            .collect()
    }

    fn rotation(&self) -> Mat4 {
        kron2(&self.0.rotation(), &self.1.rotation())
    }
}

impl fmt::Display for PauliBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0.letter(), self.1.letter())
    }
}

impl FromStr for PauliBasis {
    type Err = QktError;

    fn from_str(s: &str) -> Result<Self> {
        let p = |ch: char| match ch.to_ascii_uppercase() {
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(QktError::InvalidArgument(format!("bad Pauli basis {s:?}"))),
        };
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 2 {
            return Err(QktError::InvalidArgument(format!("bad Pauli basis {s:?}")));
        }
        Ok(PauliBasis(p(chars[0])?, p(chars[1])?))
    }
}

/// Outcome counts for one basis. Outcome keys are `"b0b1"` with qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub basis: String,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl ShotRecord {
    pub fn validate(&self) -> Result<PauliBasis> {
        let basis: PauliBasis = self.basis.parse()?;
        let mut total = 0u64;
        for key in self.counts.keys() {
            if !matches!(key.as_str(), "00" | "01" | "10" | "11") {
                return Err(QktError::InvalidArgument(format!("bad outcome key {key:?}")));
            }
        }
        for v in self.counts.values() {
            total += v;
        }
        if total != self.shots {
            return Err(QktError::InvalidArgument(format!(
                "counts sum to {total}, expected {} shots",
                self.shots
            )));
        }
        Ok(basis)
    }

    fn count(&self, outcome: usize) -> u64 {
        self.counts.get(&format!("{outcome:02b}")).copied().unwrap_or(0)
    }
}

/// Outcome probabilities of measuring `rho` in `basis`, indexed by `2·b0 + b1`.
pub fn basis_probabilities(rho: &DensityMatrix, basis: PauliBasis) -> [f64; 4] {
    let r = basis.rotation();
    let rotated = r * rho.matrix() * r.adjoint();
    let mut p = [0.0; 4];
    for (k, pk) in p.iter_mut().enumerate() {
        *pk = rotated[(k, k)].re.max(0.0);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Sample `shots` projective measurements in `basis` using a generator
/// seeded with `seed`.
pub fn measure_basis(rho: &DensityMatrix, basis: PauliBasis, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(QktError::InvalidArgument("shots must be ≥ 1".into()));
    }
    let probs = basis_probabilities(rho, basis);
    let mut rng = TaskRng::seed_from_u64(seed);
    // Multinomial draw as a chain of conditional binomials.
    let mut remaining = shots;
    let mut mass = 1.0;
    let mut counts = BTreeMap::new();
    for (k, &pk) in probs.iter().enumerate() {
        let n = if k == 3 || remaining == 0 {
            remaining
        } else {
            let q = if mass > 0.0 { (pk / mass).clamp(0.0, 1.0) } else { 0.0 };
            let dist = Binomial::new(remaining, q)
                .map_err(|e| QktError::Internal(format!("binomial({remaining}, {q}): {e}")))?;
            dist.sample(&mut rng)
        };
        counts.insert(format!("{k:02b}"), n);
        remaining -= n;
        mass -= pk;
    }
    Ok(ShotRecord { basis: basis.to_string(), shots, counts })
}

/// Table of `⟨P ⊗ Q⟩` for `P, Q ∈ {I, X, Y, Z}`.
pub type Expectations = [[f64; 4]; 4];

fn pauli_or_identity(k: usize) -> Mat2 {
    match k {
        0 => Mat2::identity(),
        1 => pauli_x(),
        2 => pauli_y(),
        _ => pauli_z(),
    }
}

pub fn exact_expectations(rho: &DensityMatrix) -> Expectations {
    let mut e = [[0.0; 4]; 4];
    for (a, row) in e.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let op = kron2(&pauli_or_identity(a), &pauli_or_identity(b));
            *v = (rho.matrix() * op).trace().re;
        }
    }
    e
}

/// `ρ = ¼ Σ ⟨P⊗Q⟩ P⊗Q`, without any positivity correction.
pub fn linear_inversion(e: &Expectations) -> Mat4 {
    let mut rho = Mat4::zeros();
    for (a, row) in e.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            rho += kron2(&pauli_or_identity(a), &pauli_or_identity(b)).map(|x| x * (v / 4.0));
        }
    }
    rho
}

/// Nearest physical state by eigenvalue clipping: negative eigenvalues set to
/// zero, trace renormalized to one.
pub fn project_physical(m: &Mat4) -> Result<DensityMatrix> {
    let herm = (m + m.adjoint()).map(|x| x * 0.5);
    let (vals, vecs) = eigh(&mat4_to_dyn(&herm));
    let total: f64 = vals.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 {
        return Ok(DensityMatrix::maximally_mixed());
    }
    let rho = apply_spectral(&vals, &vecs, |l| c(l.max(0.0) / total, 0.0));
    let rho = dyn_to_mat4(&rho);
    DensityMatrix::new((rho + rho.adjoint()).map(|x| x * 0.5))
}

/// Estimate `⟨P⊗Q⟩` from counts. Single-qubit terms average the marginals of
/// every basis that measures that Pauli on that qubit.
pub fn estimate_expectations(records: &[ShotRecord]) -> Result<Expectations> {
    let mut pooled: BTreeMap<PauliBasis, [u64; 4]> = BTreeMap::new();
    for rec in records {
        let basis = rec.validate()?;
        let entry = pooled.entry(basis).or_insert([0; 4]);
        for (k, slot) in entry.iter_mut().enumerate() {
            *slot += rec.count(k);
        }
    }
    for basis in PauliBasis::all() {
        match pooled.get(&basis) {
            Some(c) if c.iter().sum::<u64>() > 0 => {}
            _ => return Err(QktError::MissingBasis(basis.to_string())),
        }
    }
    let sign = |bits: u32| if bits % 2 == 0 { 1.0 } else { -1.0 };
    let mut e = [[0.0; 4]; 4];
    e[0][0] = 1.0;
    let mut marg0 = [(0.0, 0usize); 4];
    let mut marg1 = [(0.0, 0usize); 4];
    for (basis, counts) in &pooled {
        let total = counts.iter().sum::<u64>() as f64;
        let (a, b) = (basis.0.index(), basis.1.index());
        let mut zz = 0.0;
        let mut z0 = 0.0;
        let mut z1 = 0.0;
        for (k, &n) in counts.iter().enumerate() {
            let f = n as f64 / total;
            let (b0, b1) = ((k >> 1) as u32, (k & 1) as u32);
            zz += sign(b0 + b1) * f;
            z0 += sign(b0) * f;
            z1 += sign(b1) * f;
        }
        e[a][b] = zz;
        marg0[a].0 += z0;
        marg0[a].1 += 1;
        marg1[b].0 += z1;
        marg1[b].1 += 1;
    }
    for k in 1..4 {
        e[k][0] = marg0[k].0 / marg0[k].1 as f64;
        e[0][k] = marg1[k].0 / marg1[k].1 as f64;
    }
    Ok(e)
}

/// Linear-inversion tomography followed by eigenvalue clipping. Requires all
/// nine bases; repeated bases are pooled.
pub fn tomography(records: &[ShotRecord]) -> Result<DensityMatrix> {
    let e = estimate_expectations(records)?;
    project_physical(&linear_inversion(&e))
}

/// Measure all nine bases with per-basis seeds derived from `seed`.
pub fn measure_all(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<Vec<ShotRecord>> {
    PauliBasis::all()
        .into_iter()
        .enumerate()
        .map(|(k, basis)| measure_basis(rho, basis, shots, crate::rng::derive_seed(seed, k as u64)))
        .collect()
}
