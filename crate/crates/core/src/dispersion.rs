//! Analytic dispersion relations: the two-branch continuum medium, the
//! relativistic determinant and its four branches, phase and group
//! velocities, and the tabulated branch energies.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::QuantumParams;
use crate::chain::{characteristic_scales, ChainParams};
use crate::output::fmt_f64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DispersionError {
    #[error("phase velocity is undefined at k_z = 0")]
    ZeroWavenumber,
    #[error("unknown branch `{0}` (expected acoustic+, acoustic-, optical+ or optical-)")]
    UnknownBranch(String),
}

/// Coefficients of the coupled continuum wave system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumParams {
    /// Wave speed of the inner-mass field.
    pub speed_inner: f64,
    /// Wave speed of the outer-mass field.
    pub speed_outer: f64,
    pub omega_o: f64,
    pub omega_a: f64,
}

impl ContinuumParams {
    pub fn from_chain(params: &ChainParams) -> Self {
        let s = characteristic_scales(params);
        Self {
            speed_inner: s.speed_inner,
            speed_outer: s.speed_outer,
            omega_o: s.omega_o,
            omega_a: s.omega_a,
        }
    }

    /// Quantum replacement: both speeds become `c`, `ω_O → m_e c²/ħ`,
    /// `ω_A → m_f c²/ħ`.
    pub fn from_quantum(params: &QuantumParams) -> Self {
        Self {
            speed_inner: params.c,
            speed_outer: params.c,
            omega_o: params.omega_e(),
            omega_a: params.omega_f(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    Acoustic,
    Optical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergySign {
    Plus,
    Minus,
}

impl EnergySign {
    pub fn factor(self) -> f64 {
        match self {
            EnergySign::Plus => 1.0,
            EnergySign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub kind: BranchKind,
    pub sign: EnergySign,
}

impl Branch {
    pub const ACOUSTIC_PLUS: Branch = Branch::new(BranchKind::Acoustic, EnergySign::Plus);
    pub const ACOUSTIC_MINUS: Branch = Branch::new(BranchKind::Acoustic, EnergySign::Minus);
    pub const OPTICAL_PLUS: Branch = Branch::new(BranchKind::Optical, EnergySign::Plus);
    pub const OPTICAL_MINUS: Branch = Branch::new(BranchKind::Optical, EnergySign::Minus);

    pub const ALL: [Branch; 4] = [
        Branch::ACOUSTIC_PLUS,
        Branch::ACOUSTIC_MINUS,
        Branch::OPTICAL_PLUS,
        Branch::OPTICAL_MINUS,
    ];

    pub const fn new(kind: BranchKind, sign: EnergySign) -> Self {
        Self { kind, sign }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            BranchKind::Acoustic => "acoustic",
            BranchKind::Optical => "optical",
        };
        let sign = match self.sign {
            EnergySign::Plus => '+',
            EnergySign::Minus => '-',
        };
        write!(f, "{kind}{sign}")
    }
}

impl FromStr for Branch {
    type Err = DispersionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "acoustic+" | "a+" => Ok(Branch::ACOUSTIC_PLUS),
            "acoustic-" | "a-" => Ok(Branch::ACOUSTIC_MINUS),
            "optical+" | "o+" => Ok(Branch::OPTICAL_PLUS),
            "optical-" | "o-" => Ok(Branch::OPTICAL_MINUS),
            _ => Err(DispersionError::UnknownBranch(s.to_string())),
        }
    }
}

/// Squared angular frequencies of the two continuum branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumRoots {
    pub omega2_acoustic: f64,
    pub omega2_optical: f64,
}

/// Roots `Ω²` of
/// `det[[Ω² − s_m²k² − ω_O², ω_O²], [ω_A², Ω² − s_M²k² − ω_A²]] = 0`,
/// ascending.
pub fn continuum_dispersion(k: f64, params: &ContinuumParams) -> ContinuumRoots {
    let wo2 = params.omega_o * params.omega_o;
    let wa2 = params.omega_a * params.omega_a;
    let sk_in = params.speed_inner * params.speed_inner * k * k;
    let sk_out = params.speed_outer * params.speed_outer * k * k;
    let a = sk_in + wo2;
    let b = sk_out + wa2;
    let half_sum = 0.5 * (a + b);
    let disc = (0.25 * (a - b) * (a - b) + wo2 * wa2).sqrt();
    let optical = half_sum + disc;
    // product of roots with the ω_O²ω_A² cancellation done symbolically
    let product = sk_in * sk_out + sk_in * wa2 + sk_out * wo2;
    let acoustic = if optical > 0.0 { product / optical } else { 0.0 };
    ContinuumRoots {
        omega2_acoustic: acoustic,
        omega2_optical: optical,
    }
}

/// `(E² − c²p²)·[E² − c²p² − (1+ε²) m_e² c⁴]`.
pub fn dirac_determinant(energy: f64, p_z: f64, params: &QuantumParams) -> f64 {
    let kinetic = params.c * params.c * p_z * p_z;
    let gap = params.optical_rest_energy();
    let e2 = energy * energy;
    (e2 - kinetic) * (e2 - kinetic - gap * gap)
}

/// Branch energy: acoustic `±c p_z`, optical `±√(c²p_z² + (1+ε²) m_e²c⁴)`.
pub fn branch_energy(branch: Branch, p_z: f64, params: &QuantumParams) -> f64 {
    let s = branch.sign.factor();
    match branch.kind {
        BranchKind::Acoustic => s * params.c * p_z,
        BranchKind::Optical => s * optical_magnitude(p_z, params),
    }
}

fn optical_magnitude(p_z: f64, params: &QuantumParams) -> f64 {
    (params.c * p_z).hypot(params.optical_rest_energy())
}

/// Signed angular frequency `Ω = E/ħ` at wavenumber `k_z` (`p_z = ħk_z`).
pub fn branch_frequency(branch: Branch, k_z: f64, params: &QuantumParams) -> f64 {
    branch_energy(branch, params.hbar * k_z, params) / params.hbar
}

/// `Ω/k_z`.
pub fn phase_velocity(branch: Branch, k_z: f64, params: &QuantumParams) -> Result<f64, DispersionError> {
    if k_z == 0.0 {
        return Err(DispersionError::ZeroWavenumber);
    }
    Ok(match branch.kind {
        BranchKind::Acoustic => branch.sign.factor() * params.c,
        BranchKind::Optical => branch_frequency(branch, k_z, params) / k_z,
    })
}

/// `dΩ/dk_z`: acoustic `±c`, optical `c²k_z/Ω`.
pub fn group_velocity(branch: Branch, k_z: f64, params: &QuantumParams) -> f64 {
    match branch.kind {
        BranchKind::Acoustic => branch.sign.factor() * params.c,
        BranchKind::Optical => {
            let omega = branch_frequency(branch, k_z, params);
            params.c * params.c * k_z / omega
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionRow {
    pub p_z: f64,
    pub e_acoustic_plus: f64,
    pub e_acoustic_minus: f64,
    pub e_optical_plus: f64,
    pub e_optical_minus: f64,
}

pub const FIGURE2_HEADER: &str =
    "p_z,E_acoustic_plus,E_acoustic_minus,E_optical_plus,E_optical_minus";

/// All four branch energies on a momentum grid, for the given ε.
pub fn dispersion_table(epsilon: f64, p_grid: &[f64], params: &QuantumParams) -> Vec<DispersionRow> {
    let params = params.with_epsilon(epsilon);
    p_grid
        .iter()
        .map(|&p| DispersionRow {
            p_z: p,
            e_acoustic_plus: branch_energy(Branch::ACOUSTIC_PLUS, p, &params),
            e_acoustic_minus: branch_energy(Branch::ACOUSTIC_MINUS, p, &params),
            e_optical_plus: branch_energy(Branch::OPTICAL_PLUS, p, &params),
            e_optical_minus: branch_energy(Branch::OPTICAL_MINUS, p, &params),
        })
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn write_dispersion_csv<W: Write>(mut out: W, rows: &[DispersionRow]) -> io::Result<()> {
    writeln!(out, "{FIGURE2_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.p_z),
            fmt_f64(r.e_acoustic_plus),
            fmt_f64(r.e_acoustic_minus),
            fmt_f64(r.e_optical_plus),
            fmt_f64(r.e_optical_minus)
        )?;
    }
    Ok(())
}
