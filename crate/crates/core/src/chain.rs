//! The modified mass-in-mass chain on a periodic ring.
//!
//! Site `n` carries an outer mass `M` (displacement `U_n`) with an inner
//! mass `m` (displacement `u_n`) attached by a spring `K`. Neighbouring
//! inner masses are coupled by springs `I`, neighbouring outer masses by
//! springs `J`:
//!
//! ```text
//! m ü_n = K (U_n − u_n) + I (u_{n−1} + u_{n+1} − 2u_n)
//! M Ü_n = K (u_n − U_n) + J (U_{n−1} + U_{n+1} − 2U_n)
//! ```

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::{continuum_dispersion, ContinuumParams};
use crate::output::fmt_f64;
use crate::spectral::{peak_frequency_real, zero_crossing_frequency};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),
    #[error("ring needs at least 2 sites (got {0})")]
    TooFewSites(usize),
    #[error("mode index {index} out of range for {n_sites} sites")]
    InvalidModeIndex { index: usize, n_sites: usize },
    #[error("time step {dt} violates the Verlet stability bound dt*omega_max < 2 (omega_max = {omega_max})")]
    Unstable { dt: f64, omega_max: f64 },
    #[error("time step must be positive (got {0})")]
    NonPositiveStep(f64),
    #[error("trajectory too short: {0}")]
    TrajectoryTooShort(String),
    #[error("no oscillation detected at site {0}")]
    NoOscillation(usize),
    #[error("site {site} out of range for {n_sites} sites")]
    InvalidSite { site: usize, n_sites: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Inner mass `m`.
    pub inner_mass: f64,
    /// Outer mass `M`.
    pub outer_mass: f64,
    /// Inner–outer spring `K`.
    pub coupling: f64,
    /// Spring `I` between neighbouring inner masses.
    pub inner_spring: f64,
    /// Spring `J` between neighbouring outer masses.
    pub outer_spring: f64,
    /// Lattice period `a`.
    pub period: f64,
}

impl ChainParams {
    pub fn new(
        inner_mass: f64,
        outer_mass: f64,
        coupling: f64,
        inner_spring: f64,
        outer_spring: f64,
        period: f64,
    ) -> Result<Self, ChainError> {
        let p = Self {
            inner_mass,
            outer_mass,
            coupling,
            inner_spring,
            outer_spring,
            period,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let pos = [
            ("m", self.inner_mass),
            ("M", self.outer_mass),
            ("K", self.coupling),
            ("a", self.period),
        ];
        for (name, v) in pos {
            if !(v.is_finite() && v > 0.0) {
                return Err(ChainError::InvalidParams(format!("{name} must be positive (got {v})")));
            }
        }
        for (name, v) in [("I", self.inner_spring), ("J", self.outer_spring)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ChainError::InvalidParams(format!(
                    "{name} must be non-negative (got {v})"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ChainParams {
    fn default() -> Self {
        Self {
            inner_mass: 1.0,
            outer_mass: 4.0,
            coupling: 1.0,
            inner_spring: 1.0,
            outer_spring: 1.0,
            period: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicScales {
    /// `√(K/m)`
    pub omega_o: f64,
    /// `√(K/M)`
    pub omega_a: f64,
    /// `√(I/m)`
    pub omega_inner: f64,
    /// `√(J/M)`
    pub omega_outer: f64,
    /// `a·√(I/m)`
    pub speed_inner: f64,
    /// `a·√(J/M)`
    pub speed_outer: f64,
    /// `√(m/M)`
    pub epsilon: f64,
}

pub fn characteristic_scales(params: &ChainParams) -> CharacteristicScales {
    let omega_inner = (params.inner_spring / params.inner_mass).sqrt();
    let omega_outer = (params.outer_spring / params.outer_mass).sqrt();
    CharacteristicScales {
        omega_o: (params.coupling / params.inner_mass).sqrt(),
        omega_a: (params.coupling / params.outer_mass).sqrt(),
        omega_inner,
        omega_outer,
        speed_inner: params.period * omega_inner,
        speed_outer: params.period * omega_outer,
        epsilon: (params.inner_mass / params.outer_mass).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainBranch {
    Acoustic,
    Optical,
}

/// Both normal modes of the chain at one wavenumber.
///
/// Eigenvectors are `(u, U)` amplitude pairs with unit Euclidean norm and a
/// non-negative inner component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteModes {
    pub omega_acoustic: f64,
    pub omega_optical: f64,
    pub eigvec_acoustic: [f64; 2],
    pub eigvec_optical: [f64; 2],
}

impl DiscreteModes {
    pub fn omega(&self, branch: ChainBranch) -> f64 {
        match branch {
            ChainBranch::Acoustic => self.omega_acoustic,
            ChainBranch::Optical => self.omega_optical,
        }
    }

    pub fn eigvec(&self, branch: ChainBranch) -> [f64; 2] {
        match branch {
            ChainBranch::Acoustic => self.eigvec_acoustic,
            ChainBranch::Optical => self.eigvec_optical,
        }
    }
}

/// Exact normal modes of the infinite chain from the 2×2 eigenproblem
///
/// ```text
/// ω² (b, d)ᵀ = [[ω_O² + 4ω_m² sin²(ka/2), −ω_O²],
///               [−ω_A², ω_A² + 4ω_M² sin²(ka/2)]] (b, d)ᵀ
/// ```
pub fn discrete_dispersion(k: f64, params: &ChainParams) -> DiscreteModes {
    let s = characteristic_scales(params);
    let sin2 = (0.5 * k * params.period).sin().powi(2);
    let wo2 = s.omega_o * s.omega_o;
    let wa2 = s.omega_a * s.omega_a;
    let d11 = wo2 + 4.0 * s.omega_inner * s.omega_inner * sin2;
    let d22 = wa2 + 4.0 * s.omega_outer * s.omega_outer * sin2;
    let half_tr = 0.5 * (d11 + d22);
    let disc = (0.25 * (d11 - d22) * (d11 - d22) + wo2 * wa2).sqrt();
    let big = half_tr + disc;
    // det = d11 d22 − ω_O²ω_A², expanded so the k = 0 zero is exact
    let g_in = 4.0 * s.omega_inner * s.omega_inner * sin2;
    let g_out = 4.0 * s.omega_outer * s.omega_outer * sin2;
    let det = g_in * g_out + g_in * wa2 + g_out * wo2;
    let small = (det / big).max(0.0);

    let eigvec = |lambda: f64| {
        // first row: (d11 − λ) b − ω_O² d = 0  ⇒  (b, d) ∝ (ω_O², d11 − λ)
        let (b, d) = (wo2, d11 - lambda);
        let n = b.hypot(d);
        [b / n, d / n]
    };
    DiscreteModes {
        omega_acoustic: small.sqrt(),
        omega_optical: big.sqrt(),
        eigvec_acoustic: eigvec(small),
        eigvec_optical: eigvec(big),
    }
}

/// Highest normal-mode frequency of the chain (optical branch at `ka = π`).
pub fn max_frequency(params: &ChainParams) -> f64 {
    discrete_dispersion(PI / params.period, params)
        .omega_optical
        .max(discrete_dispersion(0.0, params).omega_optical)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeState {
    pub t: f64,
    /// Inner-mass displacements `u_n`.
    pub inner: Vec<f64>,
    /// Outer-mass displacements `U_n`.
    pub outer: Vec<f64>,
    pub inner_velocity: Vec<f64>,
    pub outer_velocity: Vec<f64>,
}

impl LatticeState {
    pub fn at_rest(n_sites: usize) -> Self {
        Self {
            t: 0.0,
            inner: vec![0.0; n_sites],
            outer: vec![0.0; n_sites],
            inner_velocity: vec![0.0; n_sites],
            outer_velocity: vec![0.0; n_sites],
        }
    }

    pub fn n_sites(&self) -> usize {
        self.inner.len()
    }
}

/// Wavenumber of ring mode `mode_index`: `2π·index/(n·a)`.
pub fn mode_wavenumber(n_sites: usize, mode_index: usize, params: &ChainParams) -> f64 {
    2.0 * PI * mode_index as f64 / (n_sites as f64 * params.period)
}

/// Standing normal mode `(u_n, U_n) = A·(b, d)·cos(k a n)` at rest.
///
/// `(b, d)` is the branch eigenvector rescaled so its larger component is 1,
/// hence `‖u‖∞, ‖U‖∞ ≤ amplitude`.
pub fn init_mode(
    n_sites: usize,
    mode_index: usize,
    amplitude: f64,
    branch: ChainBranch,
    params: &ChainParams,
) -> Result<LatticeState, ChainError> {
    params.validate()?;
    if n_sites < 2 {
        return Err(ChainError::TooFewSites(n_sites));
    }
    if mode_index >= n_sites {
        return Err(ChainError::InvalidModeIndex {
            index: mode_index,
            n_sites,
        });
    }
    let k = mode_wavenumber(n_sites, mode_index, params);
    let [b, d] = discrete_dispersion(k, params).eigvec(branch);
    let peak = b.abs().max(d.abs());
    let (b, d) = (b / peak, d / peak);
    let mut state = LatticeState::at_rest(n_sites);
    for n in 0..n_sites {
        let phase = (k * params.period * n as f64).cos();
        state.inner[n] = amplitude * b * phase;
        state.outer[n] = amplitude * d * phase;
    }
    Ok(state)
}

fn accelerations(state: &LatticeState, params: &ChainParams, acc_in: &mut [f64], acc_out: &mut [f64]) {
    let n = state.n_sites();
    let (u, uu) = (&state.inner, &state.outer);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        let stretch = uu[i] - u[i];
        acc_in[i] = (params.coupling * stretch
            + params.inner_spring * (u[prev] + u[next] - 2.0 * u[i]))
            / params.inner_mass;
        acc_out[i] = (-params.coupling * stretch
            + params.outer_spring * (uu[prev] + uu[next] - 2.0 * uu[i]))
            / params.outer_mass;
    }
}

/// One velocity-Verlet step of the ring equations of motion.
pub fn step(state: LatticeState, dt: f64, params: &ChainParams) -> Result<LatticeState, ChainError> {
    let omega_max = max_frequency(params);
    check_step(dt, omega_max)?;
    Ok(verlet_step(state, dt, params))
}

fn check_step(dt: f64, omega_max: f64) -> Result<(), ChainError> {
    if !(dt > 0.0) {
        return Err(ChainError::NonPositiveStep(dt));
    }
    if dt * omega_max >= 2.0 {
        return Err(ChainError::Unstable { dt, omega_max });
    }
    Ok(())
}

fn verlet_step(mut s: LatticeState, dt: f64, params: &ChainParams) -> LatticeState {
    let n = s.n_sites();
    let mut a_in = vec![0.0; n];
    let mut a_out = vec![0.0; n];
    accelerations(&s, params, &mut a_in, &mut a_out);
    for i in 0..n {
        s.inner_velocity[i] += 0.5 * dt * a_in[i];
        s.outer_velocity[i] += 0.5 * dt * a_out[i];
        s.inner[i] += dt * s.inner_velocity[i];
        s.outer[i] += dt * s.outer_velocity[i];
    }
    accelerations(&s, params, &mut a_in, &mut a_out);
    for i in 0..n {
        s.inner_velocity[i] += 0.5 * dt * a_in[i];
        s.outer_velocity[i] += 0.5 * dt * a_out[i];
    }
    s.t += dt;
    s
}

/// Runs `n_steps` Verlet steps, keeping every `sample_every`-th state
/// (the initial state included).
pub fn simulate(
    initial: LatticeState,
    dt: f64,
    n_steps: usize,
    sample_every: usize,
    params: &ChainParams,
) -> Result<Vec<LatticeState>, ChainError> {
    check_step(dt, max_frequency(params))?;
    let stride = sample_every.max(1);
    let mut samples = Vec::with_capacity(n_steps / stride + 1);
    let mut state = initial;
    samples.push(state.clone());
    for i in 1..=n_steps {
        state = verlet_step(state, dt, params);
        if i % stride == 0 {
            samples.push(state.clone());
        }
    }
    Ok(samples)
}

/// Kinetic plus spring energy with periodic indexing.
pub fn total_energy(state: &LatticeState, params: &ChainParams) -> f64 {
    let n = state.n_sites();
    let mut e = 0.0;
    for i in 0..n {
        let next = (i + 1) % n;
        e += 0.5 * params.inner_mass * state.inner_velocity[i].powi(2);
        e += 0.5 * params.outer_mass * state.outer_velocity[i].powi(2);
        e += 0.5 * params.coupling * (state.outer[i] - state.inner[i]).powi(2);
        e += 0.5 * params.inner_spring * (state.inner[next] - state.inner[i]).powi(2);
        e += 0.5 * params.outer_spring * (state.outer[next] - state.outer[i]).powi(2);
    }
    e
}

/// Dominant angular frequency of `u_site(t)` along a sampled trajectory.
///
/// The mean-removed signal is analysed by zero crossings; if that estimate
/// disagrees with the windowed spectral peak by more than 2% of a frequency
/// bin the refined spectral peak is returned instead.
pub fn measure_mode_frequency(trajectory: &[LatticeState], site: usize) -> Result<f64, ChainError> {
    let first = trajectory
        .first()
        .ok_or_else(|| ChainError::TrajectoryTooShort("empty trajectory".into()))?;
    let n_sites = first.n_sites();
    if site >= n_sites {
        return Err(ChainError::InvalidSite { site, n_sites });
    }
    if trajectory.len() < 8 {
        return Err(ChainError::TrajectoryTooShort(format!(
            "{} samples",
            trajectory.len()
        )));
    }
    let times: Vec<f64> = trajectory.iter().map(|s| s.t).collect();
    let mut signal: Vec<f64> = trajectory.iter().map(|s| s.inner[site]).collect();
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    signal.iter_mut().for_each(|x| *x -= mean);
    let scale = signal.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let reference = trajectory
        .iter()
        .flat_map(|s| s.inner.iter().chain(&s.outer))
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if scale <= 1e-12 * reference.max(f64::MIN_POSITIVE) || scale == 0.0 {
        return Err(ChainError::NoOscillation(site));
    }

    let span = times[times.len() - 1] - times[0];
    let dt = span / (times.len() - 1) as f64;
    let spectral = peak_frequency_real(&signal, dt);
    let bin = 2.0 * PI / span;
    if spectral * span < 3.0 * 2.0 * PI {
        return Err(ChainError::TrajectoryTooShort(format!(
            "spans {:.2} periods, need at least 3",
            spectral * span / (2.0 * PI)
        )));
    }
    match zero_crossing_frequency(&times, &signal) {
        Some(zc) if (zc - spectral).abs() <= 0.02 * bin => Ok(zc),
        _ => Ok(spectral),
    }
}

/// A single-mode run and its frequency measurement.
#[derive(Debug, Clone, Serialize)]
pub struct ModeMeasurement {
    pub n_sites: usize,
    pub mode_index: usize,
    pub branch: ChainBranch,
    pub k: f64,
    pub omega_discrete: f64,
    /// Same branch of the continuum system at `k`.
    pub omega_continuum: f64,
    pub omega_measured: f64,
    /// `|ω_measured − ω_discrete|/ω_discrete`, zero for the translation mode.
    pub relative_error: f64,
    pub dt: f64,
    pub n_steps: usize,
    #[serde(skip)]
    pub trajectory: Vec<LatticeState>,
}

/// Simulates a standing normal mode for about `periods` periods with
/// `dt = 0.02/ω_max` and measures its frequency at site 0.
///
/// The acoustic zone-centre mode is a rigid translation; it is reported
/// with `ω = 0` and an empty trajectory.
pub fn run_mode(
    params: &ChainParams,
    n_sites: usize,
    mode_index: usize,
    branch: ChainBranch,
    amplitude: f64,
    periods: f64,
) -> Result<ModeMeasurement, ChainError> {
    let dt = 0.02 / max_frequency(params);
    run_mode_with_step(params, n_sites, mode_index, branch, amplitude, periods, dt)
}

/// [`run_mode`] with an explicit Verlet step.
pub fn run_mode_with_step(
    params: &ChainParams,
    n_sites: usize,
    mode_index: usize,
    branch: ChainBranch,
    amplitude: f64,
    periods: f64,
    dt: f64,
) -> Result<ModeMeasurement, ChainError> {
    check_step(dt, max_frequency(params))?;
    let initial = init_mode(n_sites, mode_index, amplitude, branch, params)?;
    let k = mode_wavenumber(n_sites, mode_index, params);
    let omega = discrete_dispersion(k, params).omega(branch);
    let roots = continuum_dispersion(k, &ContinuumParams::from_chain(params));
    let omega_continuum = match branch {
        ChainBranch::Acoustic => roots.omega2_acoustic,
        ChainBranch::Optical => roots.omega2_optical,
    }
    .sqrt();
    let mut out = ModeMeasurement {
        n_sites,
        mode_index,
        branch,
        k,
        omega_discrete: omega,
        omega_continuum,
        omega_measured: 0.0,
        relative_error: 0.0,
        dt,
        n_steps: 0,
        trajectory: Vec::new(),
    };
    if omega == 0.0 {
        out.trajectory.push(initial);
        return Ok(out);
    }
    let steps_per_period = 2.0 * PI / (omega * dt);
    out.n_steps = (periods * steps_per_period).ceil() as usize;
    let sample_every = ((steps_per_period / 64.0).floor() as usize).max(1);
    out.trajectory = simulate(initial, dt, out.n_steps, sample_every, params)?;
    out.omega_measured = measure_mode_frequency(&out.trajectory, 0)?;
    out.relative_error = (out.omega_measured - omega).abs() / omega;
    Ok(out)
}

/// Relative acoustic-branch discrepancy between the chain and its continuum
/// limit at wavenumber `k`: `|Ω²_disc − Ω²_cont| / Ω²_cont`.
pub fn continuum_discrepancy(k: f64, params: &ChainParams) -> f64 {
    let disc = discrete_dispersion(k, params).omega_acoustic.powi(2);
    let cont = continuum_dispersion(k, &ContinuumParams::from_chain(params)).omega2_acoustic;
    (disc - cont).abs() / cont
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceFit {
    pub ka: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(ka)`.
    pub exponent: f64,
}

/// Continuum-limit convergence for a fixed wavenumber scale: the period is
/// varied so that `k·a` takes the given values.
pub fn continuum_convergence(params: &ChainParams, k: f64, ka_values: &[f64]) -> ConvergenceFit {
    let errors: Vec<f64> = ka_values
        .iter()
        .map(|&ka| {
            // keep the continuum speeds fixed while the lattice is refined
            let a = ka / k;
            let scale = params.period / a;
            let refined = ChainParams {
                period: a,
                inner_spring: params.inner_spring * scale * scale,
                outer_spring: params.outer_spring * scale * scale,
                ..*params
            };
            continuum_discrepancy(k, &refined)
        })
        .collect();
    let xs: Vec<f64> = ka_values.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|x| x.ln()).collect();
    ConvergenceFit {
        ka: ka_values.to_vec(),
        errors,
        exponent: least_squares_slope(&xs, &ys),
    }
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub const TRAJECTORY_HEADER: &str = "t,site,u,U,du_dt,dU_dt";

pub fn write_trajectory_csv<W: Write>(mut out: W, samples: &[LatticeState]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in samples {
        for i in 0..s.n_sites() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(s.t),
                i,
                fmt_f64(s.inner[i]),
                fmt_f64(s.outer[i]),
                fmt_f64(s.inner_velocity[i]),
                fmt_f64(s.outer_velocity[i])
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ChainParams {
        ChainParams::default()
    }

    #[test]
    fn run_mode_matches_dispersion() {
        for branch in [ChainBranch::Acoustic, ChainBranch::Optical] {
            let m = run_mode(&params(), 64, 3, branch, 1e-3, 10.0).unwrap();
            assert!(m.relative_error < 1e-4, "{branch:?}: {}", m.relative_error);
        }
    }

    #[test]
    fn run_mode_zero_mode_is_static() {
        let m = run_mode(&params(), 32, 0, ChainBranch::Acoustic, 1e-3, 5.0).unwrap();
        assert_eq!(m.omega_discrete, 0.0);
        assert_eq!(m.n_steps, 0);
    }

    #[test]
    fn scales_by_substitution() {
        let s = characteristic_scales(&ChainParams::new(1.0, 4.0, 1.0, 0.0, 1.0, 1.0).unwrap());
        assert_eq!(s.omega_o, 1.0);
        assert_eq!(s.omega_a, 0.5);
        assert_eq!(s.epsilon, 0.5);
        assert_eq!(s.speed_inner, 0.0);
    }

    #[test]
    fn invalid_params() {
        assert!(ChainParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ChainParams::new(1.0, 1.0, 1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn zone_centre_modes() {
        let d = discrete_dispersion(0.0, &params());
        assert_eq!(d.omega_acoustic, 0.0);
        assert!((d.omega_optical - 1.25f64.sqrt()).abs() < 1e-15);
        let r = 0.5f64.sqrt();
        assert!((d.eigvec_acoustic[0] - r).abs() < 1e-15);
        assert!((d.eigvec_acoustic[1] - r).abs() < 1e-15);
        // optical: centre of mass at rest, u/U = −M/m
        let [b, dd] = d.eigvec_optical;
        assert!((b / dd + 4.0).abs() < 1e-13);
    }

    #[test]
    fn eigenpairs_satisfy_the_matrix() {
        let p = ChainParams::new(1.3, 2.9, 0.7, 0.4, 1.6, 0.8).unwrap();
        let s = characteristic_scales(&p);
        for k in [0.1, 1.0, 2.5, PI / p.period] {
            let d = discrete_dispersion(k, &p);
            let sin2 = (0.5 * k * p.period).sin().powi(2);
            let m = [
                [s.omega_o.powi(2) + 4.0 * s.omega_inner.powi(2) * sin2, -s.omega_o.powi(2)],
                [-s.omega_a.powi(2), s.omega_a.powi(2) + 4.0 * s.omega_outer.powi(2) * sin2],
            ];
            for br in [ChainBranch::Acoustic, ChainBranch::Optical] {
                let w2 = d.omega(br).powi(2);
                let v = d.eigvec(br);
                for (i, row) in m.iter().enumerate() {
                    let r = row[0] * v[0] + row[1] * v[1] - w2 * v[i];
                    assert!(r.abs() < 1e-12, "k={k} {br:?} residual {r}");
                }
            }
        }
    }

    #[test]
    fn mode_initialisation() {
        let p = params();
        let s = init_mode(16, 0, 0.01, ChainBranch::Acoustic, &p).unwrap();
        assert!(s.inner.iter().chain(&s.outer).all(|&x| (x - 0.01).abs() < 1e-15));
        let mut a_in = vec![0.0; 16];
        let mut a_out = vec![0.0; 16];
        accelerations(&s, &p, &mut a_in, &mut a_out);
        assert!(a_in.iter().chain(&a_out).all(|&a| a.abs() < 1e-16));

        let s = init_mode(64, 1, 0.01, ChainBranch::Optical, &p).unwrap();
        let v = discrete_dispersion(mode_wavenumber(64, 1, &p), &p).eigvec_optical;
        assert!((s.inner[0] / s.outer[0] - v[0] / v[1]).abs() < 1e-12);
        for n in 0..64 {
            assert!(s.inner[n].abs() <= 0.01 && s.outer[n].abs() <= 0.01);
        }
    }

    #[test]
    fn mode_index_validation() {
        assert_eq!(
            init_mode(8, 8, 1.0, ChainBranch::Acoustic, &params()),
            Err(ChainError::InvalidModeIndex { index: 8, n_sites: 8 })
        );
        assert_eq!(
            init_mode(1, 0, 1.0, ChainBranch::Acoustic, &params()),
            Err(ChainError::TooFewSites(1))
        );
    }

    #[test]
    fn equilibrium_is_fixed() {
        let s = LatticeState::at_rest(8);
        let next = step(s.clone(), 0.1, &params()).unwrap();
        assert_eq!(next.inner, s.inner);
        assert_eq!(next.outer_velocity, s.outer_velocity);
        assert_eq!(total_energy(&s, &params()), 0.0);
    }

    #[test]
    fn stability_bound_enforced() {
        let p = params();
        let dt = 2.0 / max_frequency(&p);
        assert!(matches!(
            step(LatticeState::at_rest(4), dt, &p),
            Err(ChainError::Unstable { .. })
        ));
        assert!(matches!(
            step(LatticeState::at_rest(4), -0.1, &p),
            Err(ChainError::NonPositiveStep(_))
        ));
    }

    #[test]
    fn uniform_velocity_energy() {
        let p = params();
        let mut s = LatticeState::at_rest(10);
        s.inner_velocity.iter_mut().for_each(|v| *v = 0.3);
        assert!((total_energy(&s, &p) - 0.5 * 10.0 * 1.0 * 0.09).abs() < 1e-15);
    }

    #[test]
    fn measurement_errors() {
        let p = params();
        let traj = simulate(LatticeState::at_rest(4), 0.01, 100, 1, &p).unwrap();
        assert_eq!(measure_mode_frequency(&traj, 0), Err(ChainError::NoOscillation(0)));
        assert!(matches!(
            measure_mode_frequency(&traj, 9),
            Err(ChainError::InvalidSite { .. })
        ));
        let s = init_mode(8, 2, 1e-3, ChainBranch::Optical, &p).unwrap();
        let short = simulate(s, 0.01, 200, 1, &p).unwrap();
        assert!(matches!(
            measure_mode_frequency(&short, 0),
            Err(ChainError::TrajectoryTooShort(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let s = init_mode(3, 1, 1e-3, ChainBranch::Acoustic, &params()).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &[s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0,1,"));
    }
}
