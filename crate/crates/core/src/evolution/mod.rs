//! Time evolution of the one-dimensional generalized Dirac system and of
//! the coupled KGF system on a periodic grid.
//!
//! Dirac states hold the four components of one spin sector,
//! `(Ψ_lo, Ψ_hi, Φ_lo, Φ_hi)`. KGF states hold `(Ψ, Φ, ∂ₜΨ, ∂ₜΦ)`.

mod propagator;

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use propagator::{generator, rk4, rk4_step_bound, SpectralPropagator};

use crate::algebra::QuantumParams;
use crate::chain::least_squares_slope;
use crate::dispersion::Branch;
use crate::output::fmt_f64;
use crate::plane_waves::{mode_vector, PlaneWaveSolution, Spin};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("packet width {sigma} is under-resolved: need sigma >= 4*dz = {min}")]
    UnderResolved { sigma: f64, min: f64 },
    #[error("invalid packet: {0}")]
    InvalidPacket(String),
    #[error("time step {dt} violates the RK4 bound |dt| < dz/(4c) = {bound}")]
    Cfl { dt: f64, bound: f64 },
    #[error("time step must be finite and nonzero (got {0})")]
    BadStep(f64),
    #[error("field is identically zero")]
    ZeroField,
    #[error("momentum {p_z} is not a grid wavenumber (nearest mode {nearest})")]
    NotOnGrid { p_z: f64, nearest: f64 },
    #[error("state does not match the propagator grid or system")]
    Mismatch,
    #[error("{0}")]
    WrongSystem(&'static str),
    #[error("run too short: c*t_end = {travel} must be at least 10*dz = {min}")]
    RunTooShort { travel: f64, min: f64 },
    #[error("centroid displacement {displacement} exceeds L/4 = {max}")]
    DisplacementTooLarge { displacement: f64, max: f64 },
    #[error("need at least 20 samples (got {0})")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSystem {
    Dirac { spin: Spin },
    Kgf,
}

impl FieldSystem {
    pub fn component_names(self) -> [&'static str; 4] {
        match self {
            FieldSystem::Dirac { spin: Spin::Up } => ["Psi1", "Psi3", "Phi1", "Phi3"],
            FieldSystem::Dirac { spin: Spin::Down } => ["Psi2", "Psi4", "Phi2", "Phi4"],
            FieldSystem::Kgf => ["Psi", "Phi", "dPsi_dt", "dPhi_dt"],
        }
    }

    /// Components that carry field intensity (KGF time derivatives do not).
    fn field_components(self) -> usize {
        match self {
            FieldSystem::Dirac { .. } => 4,
            FieldSystem::Kgf => 2,
        }
    }
}

impl fmt::Display for FieldSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSystem::Dirac { spin } => write!(f, "dirac (spin {spin})"),
            FieldSystem::Kgf => f.write_str("kgf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub system: FieldSystem,
    /// Domain length `L`; grid points sit at `z_j = j·L/n`.
    pub length: f64,
    pub t: f64,
    pub components: [Vec<Complex64>; 4],
}

impl FieldState {
    pub fn n_grid(&self) -> usize {
        self.components[0].len()
    }

    pub fn dz(&self) -> f64 {
        self.length / self.n_grid() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        grid_points(self.n_grid(), self.length)
    }

    /// `Σ_c |f_c(z_j)|²` over the field components at each grid point.
    pub fn intensity(&self) -> Vec<f64> {
        let m = self.system.field_components();
        (0..self.n_grid())
            .map(|j| self.components[..m].iter().map(|c| c[j].norm_sqr()).sum())
            .collect()
    }

    /// Plain `Σ_j Σ_c |f_c(z_j)|² Δz` over the field components.
    pub fn l2_norm_squared(&self) -> f64 {
        self.intensity().iter().sum::<f64>() * self.dz()
    }

    /// Largest component-wise difference, relative to the larger state.
    pub fn relative_difference(&self, other: &FieldState) -> f64 {
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for (a, b) in self.components.iter().zip(&other.components) {
            for (x, y) in a.iter().zip(b) {
                diff = diff.max((x - y).norm());
                scale = scale.max(x.norm()).max(y.norm());
            }
        }
        diff / scale.max(f64::MIN_POSITIVE)
    }
}

pub(crate) fn check_grid(n_grid: usize, length: f64) -> Result<(), EvolutionError> {
    if !n_grid.is_power_of_two() || n_grid < 2 {
        return Err(EvolutionError::NotPowerOfTwo(n_grid));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(EvolutionError::InvalidDomain(format!("length {length}")));
    }
    Ok(())
}

pub fn grid_points(n_grid: usize, length: f64) -> Vec<f64> {
    (0..n_grid)
        .map(|j| j as f64 * length / n_grid as f64)
        .collect()
}

/// Wavenumbers of the transform bins in FFT order,
/// `2πj/L` for `j < n/2` and `2π(j − n)/L` otherwise.
pub fn wavenumbers(n_grid: usize, length: f64) -> Vec<f64> {
    (0..n_grid)
        .map(|j| {
            let signed = if j < n_grid / 2 {
                j as f64
            } else {
                j as f64 - n_grid as f64
            };
            2.0 * PI * signed / length
        })
        .collect()
}

pub(crate) struct Transform {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl Transform {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    pub(crate) fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut buf = x.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    pub(crate) fn inverse(&self, mut x: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut x);
        let s = 1.0 / self.n as f64;
        x.iter_mut().for_each(|v| *v *= s);
        x
    }

    pub(crate) fn forward_all(&self, c: &[Vec<Complex64>; 4]) -> [Vec<Complex64>; 4] {
        std::array::from_fn(|i| self.forward(&c[i]))
    }

    pub(crate) fn inverse_all(&self, c: [Vec<Complex64>; 4]) -> [Vec<Complex64>; 4] {
        c.map(|x| self.inverse(x))
    }
}

/// Gaussian packet of plane waves on one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    /// Carrier wavenumber.
    pub k0: f64,
    /// Envelope width; the intensity is `∝ exp(−(z − center)²/σ²)`.
    pub sigma: f64,
    pub branch: Branch,
    pub spin: Spin,
    pub center: f64,
}

impl PacketSpec {
    pub fn validate(&self, n_grid: usize, length: f64) -> Result<(), EvolutionError> {
        check_grid(n_grid, length)?;
        let dz = length / n_grid as f64;
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(EvolutionError::InvalidPacket(format!("sigma {}", self.sigma)));
        }
        if self.sigma < 4.0 * dz {
            return Err(EvolutionError::UnderResolved {
                sigma: self.sigma,
                min: 4.0 * dz,
            });
        }
        if !self.k0.is_finite() || self.k0.abs() * dz >= PI {
            return Err(EvolutionError::InvalidPacket(format!(
                "k0 {} is beyond the grid cutoff {}",
                self.k0,
                PI / dz
            )));
        }
        if self.k0 != 0.0 && 2.0 * PI / self.k0.abs() > length {
            return Err(EvolutionError::InvalidPacket(format!(
                "carrier wavelength {} exceeds the domain",
                2.0 * PI / self.k0.abs()
            )));
        }
        Ok(())
    }
}

/// Superposition of branch eigenvectors with Gaussian spectral weights
/// `exp(−(k − k₀)²σ²/2)·e^{−ik·center}`, a pure single-branch excitation
/// with peak amplitude near 1.
pub fn init_packet(
    spec: &PacketSpec,
    n_grid: usize,
    length: f64,
    params: &QuantumParams,
) -> Result<FieldState, EvolutionError> {
    spec.validate(n_grid, length)?;
    let transform = Transform::new(n_grid);
    let ks = wavenumbers(n_grid, length);
    // inverse transform divides by n; the continuum weight is Δk/(2π)·√(2π)σ
    let norm = n_grid as f64 * (2.0 * PI / length) / (2.0 * PI) * (2.0 * PI).sqrt() * spec.sigma;
    let mut spectra: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n_grid]);
    for (j, &k) in ks.iter().enumerate() {
        let x = (k - spec.k0) * spec.sigma;
        let w = (-0.5 * x * x).exp();
        if w < 1e-18 {
            continue;
        }
        let weight = Complex64::from_polar(w * norm, -k * spec.center);
        let v = mode_vector(spec.branch, params.hbar * k, params);
        for c in 0..4 {
            spectra[c][j] = weight * v[c];
        }
    }
    Ok(FieldState {
        system: FieldSystem::Dirac { spin: spec.spin },
        length,
        t: 0.0,
        components: transform.inverse_all(spectra),
    })
}

/// A catalog plane wave sampled on the grid at time `solution`'s `t = 0`.
/// The momentum must be a grid wavenumber times `ħ`.
pub fn init_plane_wave(
    solution: &PlaneWaveSolution,
    n_grid: usize,
    length: f64,
) -> Result<FieldState, EvolutionError> {
    check_grid(n_grid, length)?;
    let k = solution.p_z / solution.params.hbar;
    let dk = 2.0 * PI / length;
    let nearest = (k / dk).round() * dk;
    if (k - nearest).abs() > 1e-9 * dk.max(k.abs()) || k.abs() * length / n_grid as f64 >= PI {
        return Err(EvolutionError::NotOnGrid {
            p_z: solution.p_z,
            nearest: nearest * solution.params.hbar,
        });
    }
    let slots = solution.spin.slots();
    let z = grid_points(n_grid, length);
    let components = std::array::from_fn(|c| {
        z.iter()
            .map(|&zj| solution.amplitudes[slots[c]] * solution.phase(0.0, zj))
            .collect()
    });
    Ok(FieldState {
        system: FieldSystem::Dirac {
            spin: solution.spin,
        },
        length,
        t: 0.0,
        components,
    })
}

/// KGF initial data `(Ψ, Φ, ∂ₜΨ, ∂ₜΦ)` taken from the lower components of a
/// Dirac state and their exact time derivatives.
pub fn kgf_from_dirac(state: &FieldState, params: &QuantumParams) -> Result<FieldState, EvolutionError> {
    if state.system == FieldSystem::Kgf {
        return Err(EvolutionError::WrongSystem("expected a Dirac state"));
    }
    let prop = SpectralPropagator::new(state.system, state.n_grid(), state.length, params)?;
    let d = prop.time_derivative(state, params)?;
    Ok(FieldState {
        system: FieldSystem::Kgf,
        length: state.length,
        t: state.t,
        components: [
            state.components[0].clone(),
            state.components[2].clone(),
            d[0].clone(),
            d[2].clone(),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact per-mode propagator.
    SpectralExact,
    Rk4,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" | "spectral-exact" => Ok(Method::SpectralExact),
            "rk4" => Ok(Method::Rk4),
            _ => Err(format!("unknown method `{s}` (expected spectral-exact or rk4)")),
        }
    }
}

/// Advances `state` by `n_steps·dt`. The spectral propagator applies the
/// whole interval at once and accepts negative `dt`.
pub fn evolve(
    state: &FieldState,
    dt: f64,
    n_steps: usize,
    params: &QuantumParams,
    method: Method,
) -> Result<FieldState, EvolutionError> {
    if !dt.is_finite() || dt == 0.0 {
        return Err(EvolutionError::BadStep(dt));
    }
    match method {
        Method::SpectralExact => {
            SpectralPropagator::new(state.system, state.n_grid(), state.length, params)?
                .advance(state, dt * n_steps as f64)
        }
        Method::Rk4 => rk4(state, dt, n_steps, params),
    }
}

/// Intensity-weighted circular mean position in `[0, L)`.
pub fn packet_centroid(state: &FieldState) -> Result<f64, EvolutionError> {
    let intensity = state.intensity();
    let total: f64 = intensity.iter().sum();
    if total <= 0.0 {
        return Err(EvolutionError::ZeroField);
    }
    let n = state.n_grid();
    let s: Complex64 = intensity
        .iter()
        .enumerate()
        .map(|(j, &w)| Complex64::from_polar(w, 2.0 * PI * j as f64 / n as f64))
        .sum();
    let theta = s.arg().rem_euclid(2.0 * PI);
    Ok(theta / (2.0 * PI) * state.length)
}

/// RMS distance from the centroid, with distances wrapped to `(−L/2, L/2]`.
pub fn packet_width(state: &FieldState) -> Result<f64, EvolutionError> {
    let c = packet_centroid(state)?;
    let intensity = state.intensity();
    let total: f64 = intensity.iter().sum();
    let l = state.length;
    let m2: f64 = state
        .grid()
        .iter()
        .zip(&intensity)
        .map(|(&z, &w)| {
            let d = (z - c + 0.5 * l).rem_euclid(l) - 0.5 * l;
            w * d * d
        })
        .sum();
    Ok((m2 / total).sqrt())
}

/// `Σ_k |V(k)⁻¹ v̂(k)|² / N`, constant under the exact propagator.
pub fn conserved_quadratic(state: &FieldState, params: &QuantumParams) -> Result<f64, EvolutionError> {
    SpectralPropagator::new(state.system, state.n_grid(), state.length, params)?
        .conserved_quadratic(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub n_grid: usize,
    pub length: f64,
    pub t_end: f64,
    pub n_samples: usize,
    pub method: Method,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            n_grid: 1024,
            length: 200.0,
            t_end: 40.0,
            n_samples: 41,
            method: Method::SpectralExact,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub centroid: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupVelocityMeasurement {
    pub velocity: f64,
    pub displacement: f64,
    /// Centroids are unwrapped across the periodic boundary.
    pub series: Vec<SeriesPoint>,
}

/// Least-squares slope of the packet centroid over `[0, t_end]`.
pub fn measure_group_velocity(
    spec: &PacketSpec,
    config: &EvolutionConfig,
    params: &QuantumParams,
) -> Result<GroupVelocityMeasurement, EvolutionError> {
    if config.n_samples < 20 {
        return Err(EvolutionError::TooFewSamples(config.n_samples));
    }
    let dz = config.length / config.n_grid as f64;
    let travel = params.c * config.t_end.abs();
    if travel < 10.0 * dz {
        return Err(EvolutionError::RunTooShort {
            travel,
            min: 10.0 * dz,
        });
    }
    let initial = init_packet(spec, config.n_grid, config.length, params)?;
    let prop = SpectralPropagator::new(initial.system, config.n_grid, config.length, params)?;
    let interval = config.t_end / (config.n_samples - 1) as f64;
    // RK4 runs at half its stability bound between samples
    let substeps = (interval.abs() / (0.5 * rk4_step_bound(config.n_grid, config.length, params)))
        .ceil()
        .max(1.0) as usize;
    let mut series = Vec::with_capacity(config.n_samples);
    let mut previous: Option<f64> = None;
    let mut current = initial.clone();
    for i in 0..config.n_samples {
        let t = config.t_end * i as f64 / (config.n_samples - 1) as f64;
        let s = match config.method {
            Method::SpectralExact => prop.advance(&initial, t)?,
            Method::Rk4 => {
                if i > 0 {
                    current = rk4(&current, interval / substeps as f64, substeps, params)?;
                }
                current.clone()
            }
        };
        let raw = packet_centroid(&s)?;
        let centroid = match previous {
            None => raw,
            Some(prev) => {
                let l = config.length;
                prev + ((raw - prev + 0.5 * l).rem_euclid(l) - 0.5 * l)
            }
        };
        previous = Some(centroid);
        series.push(SeriesPoint {
            t,
            centroid,
            width: packet_width(&s)?,
        });
    }
    let displacement = series[series.len() - 1].centroid - series[0].centroid;
    if displacement.abs() > 0.25 * config.length {
        return Err(EvolutionError::DisplacementTooLarge {
            displacement,
            max: 0.25 * config.length,
        });
    }
    let ts: Vec<f64> = series.iter().map(|p| p.t).collect();
    let cs: Vec<f64> = series.iter().map(|p| p.centroid).collect();
    Ok(GroupVelocityMeasurement {
        velocity: least_squares_slope(&ts, &cs),
        displacement,
        series,
    })
}

/// `z` followed by `|f_c|²` for every component.
pub fn write_snapshot_csv<W: Write>(mut out: W, state: &FieldState) -> io::Result<()> {
    let names = state.system.component_names();
    let m = state.system.field_components();
    write!(out, "z")?;
    for name in &names[..m] {
        write!(out, ",|{name}|^2")?;
    }
    writeln!(out)?;
    for (j, z) in state.grid().iter().enumerate() {
        write!(out, "{}", fmt_f64(*z))?;
        for c in &state.components[..m] {
            write!(out, ",{}", fmt_f64(c[j].norm_sqr()))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub const SERIES_HEADER: &str = "t,centroid,width";

pub fn write_series_csv<W: Write>(mut out: W, series: &[SeriesPoint]) -> io::Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    for p in series {
        writeln!(
            out,
            "{},{},{}",
            fmt_f64(p.t),
            fmt_f64(p.centroid),
            fmt_f64(p.width)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{branch_frequency, group_velocity};
    use crate::plane_waves::build_solution;

    fn packet(branch: Branch, k0: f64) -> PacketSpec {
        PacketSpec {
            k0,
            sigma: 10.0,
            branch,
            spin: Spin::Up,
            center: 100.0,
        }
    }

    #[test]
    fn wavenumbers_in_fft_order() {
        let k = wavenumbers(8, 2.0 * PI);
        assert_eq!(k, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn rejects_bad_grids_and_packets() {
        let p = QuantumParams::default();
        let mut s = packet(Branch::OPTICAL_PLUS, 1.0);
        assert_eq!(
            init_packet(&s, 1000, 200.0, &p).unwrap_err(),
            EvolutionError::NotPowerOfTwo(1000)
        );
        s.sigma = 0.5;
        assert!(matches!(
            init_packet(&s, 1024, 200.0, &p),
            Err(EvolutionError::UnderResolved { .. })
        ));
    }

    #[test]
    fn packet_sits_at_its_center() {
        let p = QuantumParams::natural(0.5);
        let s = init_packet(&packet(Branch::ACOUSTIC_PLUS, 1.0), 1024, 200.0, &p).unwrap();
        assert!((packet_centroid(&s).unwrap() - 100.0).abs() < 1e-9);
        // intensity ∝ exp(−(z−c)²/σ²) has rms width σ/√2
        assert!((packet_width(&s).unwrap() - 10.0 / 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn centroid_is_translation_equivariant() {
        let p = QuantumParams::natural(0.5);
        let mut spec = packet(Branch::ACOUSTIC_PLUS, 1.0);
        let a = packet_centroid(&init_packet(&spec, 1024, 200.0, &p).unwrap()).unwrap();
        spec.center += 37.3;
        let b = packet_centroid(&init_packet(&spec, 1024, 200.0, &p).unwrap()).unwrap();
        assert!((b - a - 37.3).abs() < 1e-9);
    }

    #[test]
    fn acoustic_packet_components_are_equal() {
        let p = QuantumParams::natural(0.5);
        let s = init_packet(&packet(Branch::ACOUSTIC_PLUS, 0.5), 1024, 200.0, &p).unwrap();
        for j in 0..s.n_grid() {
            for c in 1..4 {
                assert!((s.components[c][j] - s.components[0][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn plane_wave_phase_is_exact() {
        let p = QuantumParams::natural(0.5);
        let k = 2.0 * PI * 32.0 / 200.0;
        for b in Branch::ALL {
            let sol = build_solution(b, Spin::Up, k, &p, Complex64::new(1.0, 0.0)).unwrap();
            let s0 = init_plane_wave(&sol, 256, 200.0).unwrap();
            let s1 = evolve(&s0, 0.7, 10, &p, Method::SpectralExact).unwrap();
            let phase = Complex64::from_polar(1.0, -sol.energy * 7.0);
            let expect = FieldState {
                components: s0.components.clone().map(|c| c.iter().map(|x| x * phase).collect()),
                t: 7.0,
                ..s0.clone()
            };
            assert!(s1.relative_difference(&expect) < 1e-12, "{b}");
        }
    }

    #[test]
    fn off_grid_momentum_rejected() {
        let p = QuantumParams::natural(0.5);
        let sol = build_solution(Branch::OPTICAL_PLUS, Spin::Up, 1.0, &p, Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            init_plane_wave(&sol, 256, 200.0),
            Err(EvolutionError::NotOnGrid { .. })
        ));
    }

    #[test]
    fn time_reversal() {
        let p = QuantumParams::natural(0.5);
        let s0 = init_packet(&packet(Branch::OPTICAL_MINUS, 1.0), 512, 200.0, &p).unwrap();
        let s1 = evolve(&s0, 0.5, 40, &p, Method::SpectralExact).unwrap();
        let back = evolve(&s1, -0.5, 40, &p, Method::SpectralExact).unwrap();
        assert!(back.relative_difference(&s0) < 1e-12);
    }

    #[test]
    fn zone_centre_uses_direct_exponential() {
        let p = QuantumParams::natural(0.5);
        let d = SpectralPropagator::new(FieldSystem::Dirac { spin: Spin::Up }, 64, 10.0, &p).unwrap();
        assert_eq!(d.direct_modes(), 1);
        let k = SpectralPropagator::new(FieldSystem::Kgf, 64, 10.0, &p).unwrap();
        assert_eq!(k.direct_modes(), 1);
    }

    #[test]
    fn rk4_step_bound_enforced() {
        let p = QuantumParams::natural(0.5);
        let s = init_packet(&packet(Branch::OPTICAL_PLUS, 1.0), 1024, 200.0, &p).unwrap();
        assert!(matches!(
            evolve(&s, 0.05, 1, &p, Method::Rk4),
            Err(EvolutionError::Cfl { .. })
        ));
    }

    #[test]
    fn rk4_agrees_with_spectral() {
        let p = QuantumParams::natural(0.5);
        let s = init_packet(&packet(Branch::OPTICAL_PLUS, 1.0), 512, 200.0, &p).unwrap();
        let exact = evolve(&s, 1.0, 2, &p, Method::SpectralExact).unwrap();
        let approx = evolve(&s, 0.05, 40, &p, Method::Rk4).unwrap();
        assert!(exact.relative_difference(&approx) < 1e-6);
    }

    #[test]
    fn quadratic_invariant_is_constant() {
        let p = QuantumParams::natural(0.5);
        let s0 = init_packet(&packet(Branch::OPTICAL_PLUS, 1.0), 512, 200.0, &p).unwrap();
        let q0 = conserved_quadratic(&s0, &p).unwrap();
        let s1 = evolve(&s0, 3.3, 7, &p, Method::SpectralExact).unwrap();
        let q1 = conserved_quadratic(&s1, &p).unwrap();
        assert!((q1 - q0).abs() < 1e-12 * q0);
    }

    #[test]
    fn hermitian_case_conserves_plain_norm() {
        let p = QuantumParams::natural(1.0);
        let mut mixed = init_packet(&packet(Branch::OPTICAL_PLUS, 1.0), 512, 200.0, &p).unwrap();
        let other = init_packet(&packet(Branch::ACOUSTIC_MINUS, -0.5), 512, 200.0, &p).unwrap();
        for c in 0..4 {
            for j in 0..512 {
                mixed.components[c][j] += other.components[c][j];
            }
        }
        let n0 = mixed.l2_norm_squared();
        let n1 = evolve(&mixed, 2.0, 9, &p, Method::SpectralExact).unwrap().l2_norm_squared();
        assert!((n1 - n0).abs() < 1e-10 * n0);
    }

    #[test]
    fn group_velocity_of_optical_packet() {
        let p = QuantumParams::natural(0.5);
        let m = measure_group_velocity(&packet(Branch::OPTICAL_PLUS, 1.0), &EvolutionConfig::default(), &p)
            .unwrap();
        let expect = group_velocity(Branch::OPTICAL_PLUS, 1.0, &p);
        assert!((m.velocity / expect - 1.0).abs() < 0.01);
        assert!(m.series.last().unwrap().width > m.series[0].width);
    }

    #[test]
    fn kgf_frequency_from_dirac_data() {
        let p = QuantumParams::natural(0.5);
        let k = 2.0 * PI * 16.0 / 100.0;
        let sol = build_solution(Branch::OPTICAL_PLUS, Spin::Up, k, &p, Complex64::new(1.0, 0.0)).unwrap();
        let d = init_plane_wave(&sol, 64, 100.0).unwrap();
        let kgf = kgf_from_dirac(&d, &p).unwrap();
        let expect = evolve(&d, 2.5, 1, &p, Method::SpectralExact).unwrap();
        let got = evolve(&kgf, 2.5, 1, &p, Method::SpectralExact).unwrap();
        for j in 0..64 {
            assert!((got.components[0][j] - expect.components[0][j]).norm() < 1e-12);
            assert!((got.components[1][j] - expect.components[2][j]).norm() < 1e-12);
        }
        assert!(branch_frequency(Branch::OPTICAL_PLUS, k, &p) > 0.0);
    }
}
