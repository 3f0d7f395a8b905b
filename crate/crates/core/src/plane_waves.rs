//! Plane-wave solutions of the one-dimensional generalized Dirac system
//!
//! ```text
//! iħ ∂ₜΨ₁ = −iħc ∂_zΨ₃ + μ_e (Ψ₁ − Φ₁)
//! iħ ∂ₜΨ₃ = −iħc ∂_zΨ₁ − μ_e (Ψ₃ − Φ₃)
//! iħ ∂ₜΦ₁ = −iħc ∂_zΦ₃ + μ_f (Φ₁ − Ψ₁)
//! iħ ∂ₜΦ₃ = −iħc ∂_zΦ₁ − μ_f (Φ₃ − Ψ₃)
//! ```
//!
//! and of its spin-down counterpart obtained by the index replacement
//! `1 → 2`, `3 → 4`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    condition_number, determinant, ComplexMatrix, QuantumParams, SPIN_DOWN_SLOTS, SPIN_UP_SLOTS,
};
use crate::dispersion::{branch_energy, Branch, BranchKind, EnergySign};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlaneWaveError {
    #[error("normalization seed b1 must be nonzero")]
    ZeroSeed,
    #[error("unknown spin `{0}` (expected up or down)")]
    UnknownSpin(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    /// Slots of this sector's `(Ψ_lo, Ψ_hi, Φ_lo, Φ_hi)` in an
    /// eight-component vector.
    pub fn slots(self) -> [usize; 4] {
        match self {
            Spin::Up => SPIN_UP_SLOTS,
            Spin::Down => SPIN_DOWN_SLOTS,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

impl FromStr for Spin {
    type Err = PlaneWaveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "up" | "+" => Ok(Spin::Up),
            "down" | "-" => Ok(Spin::Down),
            _ => Err(PlaneWaveError::UnknownSpin(s.to_string())),
        }
    }
}

/// Which amplitude expression produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeForm {
    /// The closed-form ratios seeded on `b1`.
    ClosedForm,
    /// Optical minus branch at `p_z = 0`, where `b1` vanishes: the seed is
    /// placed on `b3`, giving `(0, b, 0, −ε²b)`.
    LowerSeeded,
}

/// Sector amplitudes `(b1, b3, d1, d3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Amplitudes {
    pub b1: Complex64,
    pub b3: Complex64,
    pub d1: Complex64,
    pub d3: Complex64,
    pub form: AmplitudeForm,
}

impl Amplitudes {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.b1, self.b3, self.d1, self.d3]
    }
}

/// Closed-form amplitudes of the spin-up plane wave on `branch`.
///
/// * acoustic+: `b1 = b3 = d1 = d3`
/// * acoustic−: `b1 = −b3 = d1 = −d3`
/// * optical+: `b3 = cp/(|E| + M)·b1`, `d1 = −ε²b1`, `d3 = −ε²b3`
/// * optical−: `b3 = −cp/(|E| − M)·b1 = −(|E| + M)/(cp)·b1`,
///   `d1 = −ε²b1`, `d3 = −ε²b3`
///
/// with `M = m_e c²√(1+ε²)`. The optical− ratio is evaluated in the second
/// (cancellation-free) form.
pub fn amplitudes(
    branch: Branch,
    p_z: f64,
    params: &QuantumParams,
    b1: Complex64,
) -> Result<Amplitudes, PlaneWaveError> {
    if b1 == ZERO {
        return Err(PlaneWaveError::ZeroSeed);
    }
    let eps2 = params.epsilon * params.epsilon;
    let cp = params.c * p_z;
    let gap = params.optical_rest_energy();
    let magnitude = cp.hypot(gap);
    let closed = |b3: Complex64, d_ratio: f64| Amplitudes {
        b1,
        b3,
        d1: b1 * d_ratio,
        d3: b3 * d_ratio,
        form: AmplitudeForm::ClosedForm,
    };
    Ok(match (branch.kind, branch.sign) {
        (BranchKind::Acoustic, EnergySign::Plus) => closed(b1, 1.0),
        (BranchKind::Acoustic, EnergySign::Minus) => closed(-b1, 1.0),
        (BranchKind::Optical, EnergySign::Plus) => closed(b1 * (cp / (magnitude + gap)), -eps2),
        (BranchKind::Optical, EnergySign::Minus) => {
            if cp == 0.0 {
                Amplitudes {
                    b1: ZERO,
                    b3: b1,
                    d1: ZERO,
                    d3: -b1 * eps2,
                    form: AmplitudeForm::LowerSeeded,
                }
            } else {
                closed(b1 * (-(magnitude + gap) / cp), -eps2)
            }
        }
    })
}

/// Unit-norm sector eigenvector `(b1, b3, d1, d3)` on `branch`, continuous
/// in `p_z`. The optical− vector is seeded on `b3`.
pub fn mode_vector(branch: Branch, p_z: f64, params: &QuantumParams) -> [Complex64; 4] {
    let v = if branch == Branch::OPTICAL_MINUS {
        let eps2 = params.epsilon * params.epsilon;
        let cp = params.c * p_z;
        let gap = params.optical_rest_energy();
        let b1 = -cp / (cp.hypot(gap) + gap);
        [b1, 1.0, -eps2 * b1, -eps2].map(|x| Complex64::new(x, 0.0))
    } else {
        amplitudes(branch, p_z, params, Complex64::new(1.0, 0.0))
            .expect("unit seed")
            .as_array()
    };
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.map(|x| x / norm)
}

/// A plane wave `a·e^{−i(Et − p_z z)/ħ}` with eight amplitudes ordered
/// `(b1, b2, b3, b4, d1, d2, d3, d4)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneWaveSolution {
    pub branch: Branch,
    pub spin: Spin,
    pub p_z: f64,
    pub energy: f64,
    pub amplitudes: [Complex64; 8],
    pub form: AmplitudeForm,
    pub params: QuantumParams,
}

impl PlaneWaveSolution {
    pub fn phase(&self, t: f64, z: f64) -> Complex64 {
        Complex64::from_polar(1.0, -(self.energy * t - self.p_z * z) / self.params.hbar)
    }

    /// All eight field components at `(t, z)`.
    pub fn field(&self, t: f64, z: f64) -> [Complex64; 8] {
        let ph = self.phase(t, z);
        self.amplitudes.map(|a| a * ph)
    }

    /// The four components of this solution's spin sector at `(t, z)`.
    pub fn sector_field(&self, t: f64, z: f64) -> [Complex64; 4] {
        let f = self.field(t, z);
        self.spin.slots().map(|s| f[s])
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes.iter().fold(0.0, |m, a| m.max(a.norm()))
    }
}

/// Spin-up solution on `branch` seeded with `b1`; spin-down is its
/// [`spin_flip`].
pub fn build_solution(
    branch: Branch,
    spin: Spin,
    p_z: f64,
    params: &QuantumParams,
    b1: Complex64,
) -> Result<PlaneWaveSolution, PlaneWaveError> {
    let a = amplitudes(branch, p_z, params, b1)?;
    let mut amps = [ZERO; 8];
    for (slot, value) in SPIN_UP_SLOTS.iter().zip(a.as_array()) {
        amps[*slot] = value;
    }
    let up = PlaneWaveSolution {
        branch,
        spin: Spin::Up,
        p_z,
        energy: branch_energy(branch, p_z, params),
        amplitudes: amps,
        form: a.form,
        params: *params,
    };
    Ok(match spin {
        Spin::Up => up,
        Spin::Down => spin_flip(&up),
    })
}

/// Swaps slots `1 ↔ 2` and `3 ↔ 4` in both the Ψ and Φ blocks.
pub fn spin_flip(solution: &PlaneWaveSolution) -> PlaneWaveSolution {
    let a = &solution.amplitudes;
    PlaneWaveSolution {
        amplitudes: [a[1], a[0], a[3], a[2], a[5], a[4], a[7], a[6]],
        spin: solution.spin.flipped(),
        ..solution.clone()
    }
}

/// Right-hand sides of the eight first-order equations (spin-up system on
/// slots 1, 3 and its index-swapped copy on slots 2, 4), given the fields
/// and their `z` derivatives.
pub fn system_rhs(
    f: &[Complex64; 8],
    dz: &[Complex64; 8],
    params: &QuantumParams,
) -> [Complex64; 8] {
    let hc = IM * (-params.hbar * params.c);
    let (mu_e, mu_f) = (params.mu_e(), params.mu_f());
    let mut out = [ZERO; 8];
    for [a, b, c, d] in [SPIN_UP_SLOTS, SPIN_DOWN_SLOTS] {
        out[a] = hc * dz[b] + mu_e * (f[a] - f[c]);
        out[b] = hc * dz[a] - mu_e * (f[b] - f[d]);
        out[c] = hc * dz[d] + mu_f * (f[c] - f[a]);
        out[d] = hc * dz[c] - mu_f * (f[d] - f[b]);
    }
    out
}

/// Momentum-space matrix of the index-swapped system: the spin-up sector
/// block repeated on the spin-down slots.
pub fn index_swapped_operator(p_z: f64, params: &QuantumParams) -> ComplexMatrix {
    let cp = Complex64::new(params.c * p_z, 0.0);
    let (mu_e, mu_f) = (params.mu_e(), params.mu_f());
    let mut h = ComplexMatrix::zeros(8, 8);
    for [a, b, c, d] in [SPIN_UP_SLOTS, SPIN_DOWN_SLOTS] {
        h[(a, a)] = mu_e.into();
        h[(a, b)] = cp;
        h[(a, c)] = (-mu_e).into();
        h[(b, a)] = cp;
        h[(b, b)] = (-mu_e).into();
        h[(b, d)] = mu_e.into();
        h[(c, a)] = (-mu_f).into();
        h[(c, c)] = mu_f.into();
        h[(c, d)] = cp;
        h[(d, b)] = mu_f.into();
        h[(d, c)] = cp;
        h[(d, d)] = (-mu_f).into();
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivatives {
    /// `∂ₜ → −iE/ħ`, `∂_z → ip_z/ħ`.
    Exact,
    /// Central differences of the field evaluator with step `h`.
    FiniteDifference { h: f64 },
}

/// Maximum modulus of `iħ∂ₜf − rhs(f)` over all eight equations and all
/// sample points, in energy units times amplitude.
pub fn residual(
    solution: &PlaneWaveSolution,
    sample_points: &[(f64, f64)],
    params: &QuantumParams,
    derivatives: Derivatives,
) -> f64 {
    let ih = IM * params.hbar;
    let mut worst = 0.0f64;
    for &(t, z) in sample_points {
        let f = solution.field(t, z);
        let (dt, dz) = match derivatives {
            Derivatives::Exact => {
                let wt = -IM * (solution.energy / params.hbar);
                let kz = IM * (solution.p_z / params.hbar);
                (f.map(|x| wt * x), f.map(|x| kz * x))
            }
            Derivatives::FiniteDifference { h } => {
                let diff = |a: [Complex64; 8], b: [Complex64; 8]| {
                    std::array::from_fn(|i| (a[i] - b[i]) / (2.0 * h))
                };
                (
                    diff(solution.field(t + h, z), solution.field(t - h, z)),
                    diff(solution.field(t, z + h), solution.field(t, z - h)),
                )
            }
        };
        let rhs = system_rhs(&f, &dz, params);
        for i in 0..8 {
            worst = worst.max((ih * dt[i] - rhs[i]).norm());
        }
    }
    worst
}

/// [`residual`] divided by `m_e c²·max|amplitude|`.
pub fn relative_residual(
    solution: &PlaneWaveSolution,
    sample_points: &[(f64, f64)],
    params: &QuantumParams,
    derivatives: Derivatives,
) -> f64 {
    residual(solution, sample_points, params, derivatives)
        / (params.rest_energy() * solution.max_amplitude())
}

/// A reproducible spread of `(t, z)` points.
pub fn default_sample_points() -> Vec<(f64, f64)> {
    (0..16)
        .map(|i| {
            let x = i as f64;
            (0.37 * x - 2.0, 1.9 * (0.7 * x).sin() + 0.11 * x)
        })
        .collect()
}

/// The eight solutions `{acoustic, optical} × {+, −} × {up, down}`, each
/// seeded with unit `b1` (`b2` for spin down).
pub fn catalog_eight(p_z: f64, params: &QuantumParams) -> Vec<PlaneWaveSolution> {
    let one = Complex64::new(1.0, 0.0);
    Spin::BOTH
        .iter()
        .flat_map(|&spin| {
            Branch::ALL
                .iter()
                .map(move |&b| build_solution(b, spin, p_z, params, one).expect("unit seed"))
        })
        .collect()
}

/// Amplitude vectors stacked as columns.
pub fn amplitude_matrix(solutions: &[PlaneWaveSolution]) -> ComplexMatrix {
    let columns: Vec<Vec<Complex64>> = solutions.iter().map(|s| s.amplitudes.to_vec()).collect();
    ComplexMatrix::from_columns(&columns)
}

pub fn amplitude_determinant(solutions: &[PlaneWaveSolution]) -> Complex64 {
    determinant(&amplitude_matrix(solutions))
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub branch: String,
    pub spin: Spin,
    pub p_z: f64,
    pub energy: f64,
    pub form: AmplitudeForm,
    /// `[re, im]` pairs in the order `(b1, b2, b3, b4, d1, d2, d3, d4)`.
    pub amplitudes: Vec<[f64; 2]>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Catalog {
    pub p_z: f64,
    pub params: QuantumParams,
    pub solutions: Vec<CatalogEntry>,
    pub determinant: [f64; 2],
    pub determinant_abs: f64,
    pub condition_number: f64,
}

/// The eight-solution catalog with relative residuals and the
/// independence determinant.
pub fn catalog(p_z: f64, params: &QuantumParams) -> Catalog {
    let sols = catalog_eight(p_z, params);
    let points = default_sample_points();
    let det = amplitude_determinant(&sols);
    let solutions = sols
        .iter()
        .map(|s| CatalogEntry {
            branch: s.branch.to_string(),
            spin: s.spin,
            p_z: s.p_z,
            energy: s.energy,
            form: s.form,
            amplitudes: s.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
            residual: relative_residual(s, &points, params, Derivatives::Exact),
        })
        .collect();
    Catalog {
        p_z,
        params: *params,
        solutions,
        determinant: [det.re, det.im],
        determinant_abs: det.norm(),
        condition_number: condition_number(&amplitude_matrix(&sols)),
    }
}
