//! Per-mode generators and time stepping.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{wavenumbers, EvolutionError, FieldState, FieldSystem, Transform};
use crate::algebra::{
    eigen_decompose, expm, hamiltonian_d8, sector_block, ComplexMatrix, EigenDecomposition,
    QuantumParams, SPIN_UP_SLOTS,
};

const IM: Complex64 = Complex64::new(0.0, 1.0);

/// Generator `G(k)` of `d v̂/dt = G(k) v̂` for one Fourier mode.
///
/// Dirac: `−(i/ħ) H(ħk)` with `H` the 4×4 sector block of the generalized
/// Hamiltonian. Both spin sectors share this block (the spin-down system
/// is the index-swapped copy). KGF: the first-order reduction
/// `[[0, I], [K(k), 0]]` of the coupled second-order system.
pub fn generator(system: FieldSystem, k: f64, params: &QuantumParams) -> ComplexMatrix {
    match system {
        FieldSystem::Dirac { .. } => {
            let h = hamiltonian_d8([0.0, 0.0, params.hbar * k], params);
            sector_block(&h, &SPIN_UP_SLOTS).scale(-IM / params.hbar)
        }
        FieldSystem::Kgf => {
            let ck2 = (params.c * k).powi(2);
            let we2 = params.omega_e().powi(2);
            let wf2 = params.omega_f().powi(2);
            ComplexMatrix::from_rows(&[
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 0.0, 0.0, 1.0],
                &[-ck2 - we2, we2, 0.0, 0.0],
                &[wf2, -ck2 - wf2, 0.0, 0.0],
            ])
        }
    }
}

enum ModeFlow {
    Eigen(EigenDecomposition),
    /// Degenerate or defective generator, exponentiated directly.
    Direct(ComplexMatrix),
}

/// Exact per-mode propagator `exp(G(k) t)` for every wavenumber on a grid.
pub struct SpectralPropagator {
    system: FieldSystem,
    n_grid: usize,
    length: f64,
    modes: Vec<ModeFlow>,
    transform: Transform,
}

impl SpectralPropagator {
    pub fn new(
        system: FieldSystem,
        n_grid: usize,
        length: f64,
        params: &QuantumParams,
    ) -> Result<Self, EvolutionError> {
        super::check_grid(n_grid, length)?;
        let modes = wavenumbers(n_grid, length)
            .into_par_iter()
            .map(|k| {
                let g = generator(system, k, params);
                match eigen_decompose(&g) {
                    Ok(d) if !d.degenerate => ModeFlow::Eigen(d),
                    _ => ModeFlow::Direct(g),
                }
            })
            .collect();
        Ok(Self {
            system,
            n_grid,
            length,
            modes,
            transform: Transform::new(n_grid),
        })
    }

    /// Number of modes that fell back to the matrix exponential.
    pub fn direct_modes(&self) -> usize {
        self.modes
            .iter()
            .filter(|m| matches!(m, ModeFlow::Direct(_)))
            .count()
    }

    fn check_state(&self, state: &FieldState) -> Result<(), EvolutionError> {
        if state.system != self.system || state.n_grid() != self.n_grid || state.length != self.length
        {
            return Err(EvolutionError::Mismatch);
        }
        Ok(())
    }

    /// The state advanced by `time` (any sign).
    pub fn advance(&self, state: &FieldState, time: f64) -> Result<FieldState, EvolutionError> {
        self.check_state(state)?;
        let mut spec = self.transform.forward_all(&state.components);
        let updated: Vec<[Complex64; 4]> = (0..self.n_grid)
            .into_par_iter()
            .map(|j| {
                let v = [spec[0][j], spec[1][j], spec[2][j], spec[3][j]];
                let m = match &self.modes[j] {
                    ModeFlow::Eigen(d) => d.apply_function(|l| (l * time).exp()),
                    ModeFlow::Direct(g) => expm(&g.scale(time)),
                };
                let out = m.mul_vec(&v);
                [out[0], out[1], out[2], out[3]]
            })
            .collect();
        for (j, v) in updated.iter().enumerate() {
            for c in 0..4 {
                spec[c][j] = v[c];
            }
        }
        Ok(FieldState {
            system: state.system,
            length: state.length,
            t: state.t + time,
            components: self.transform.inverse_all(spec),
        })
    }

    /// `Σ_k Σ_j |c_j(k)|² / N` with `c(k) = V(k)⁻¹ v̂(k)` the eigenmode
    /// coefficients.
    pub fn conserved_quadratic(&self, state: &FieldState) -> Result<f64, EvolutionError> {
        self.check_state(state)?;
        if state.system == FieldSystem::Kgf {
            return Err(EvolutionError::WrongSystem("conserved_quadratic is defined for the Dirac system"));
        }
        let spec = self.transform.forward_all(&state.components);
        let total: f64 = (0..self.n_grid)
            .into_par_iter()
            .map(|j| {
                let v = [spec[0][j], spec[1][j], spec[2][j], spec[3][j]];
                let coeffs = match &self.modes[j] {
                    ModeFlow::Eigen(d) => d.inverse.mul_vec(&v),
                    // the Dirac generator stays diagonalizable at degeneracies
                    ModeFlow::Direct(g) => eigen_decompose(g)
                        .map(|d| d.inverse.mul_vec(&v))
                        .unwrap_or_else(|_| v.to_vec()),
                };
                coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
            })
            .sum();
        Ok(total / self.n_grid as f64)
    }

    /// `G(k) v̂(k)` for every mode, transformed back: the exact time
    /// derivative of the state.
    pub fn time_derivative(
        &self,
        state: &FieldState,
        params: &QuantumParams,
    ) -> Result<[Vec<Complex64>; 4], EvolutionError> {
        self.check_state(state)?;
        let mut spec = self.transform.forward_all(&state.components);
        for (j, k) in wavenumbers(self.n_grid, self.length).into_iter().enumerate() {
            let v = [spec[0][j], spec[1][j], spec[2][j], spec[3][j]];
            let out = generator(self.system, k, params).mul_vec(&v);
            for c in 0..4 {
                spec[c][j] = out[c];
            }
        }
        Ok(self.transform.inverse_all(spec))
    }
}

/// Largest stable step for the method-of-lines RK4 scheme, `Δz/(4c)`.
pub fn rk4_step_bound(n_grid: usize, length: f64, params: &QuantumParams) -> f64 {
    length / n_grid as f64 / (4.0 * params.c)
}

/// Real-space right-hand side with transform-based `z` derivatives.
fn rk4_rhs(
    system: FieldSystem,
    f: &[Vec<Complex64>; 4],
    transform: &Transform,
    ks: &[f64],
    params: &QuantumParams,
) -> [Vec<Complex64>; 4] {
    let n = ks.len();
    let derivative = |x: &Vec<Complex64>, order: i32| {
        let mut s = transform.forward(x);
        for (j, v) in s.iter_mut().enumerate() {
            // the Nyquist mode has no odd derivative
            let ik = if order % 2 == 1 && j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                (IM * ks[j]).powi(order)
            };
            *v *= ik;
        }
        transform.inverse(s)
    };
    match system {
        FieldSystem::Dirac { .. } => {
            let (mu_e, mu_f) = (params.mu_e(), params.mu_f());
            let d: Vec<Vec<Complex64>> = f.iter().map(|x| derivative(x, 1)).collect();
            let scale = -IM / params.hbar;
            let hc = -IM * params.hbar * params.c;
            let row = |i: usize| -> Vec<Complex64> {
                (0..n)
                    .map(|p| {
                        let r = match i {
                            0 => hc * d[1][p] + mu_e * (f[0][p] - f[2][p]),
                            1 => hc * d[0][p] - mu_e * (f[1][p] - f[3][p]),
                            2 => hc * d[3][p] + mu_f * (f[2][p] - f[0][p]),
                            _ => hc * d[2][p] - mu_f * (f[3][p] - f[1][p]),
                        };
                        scale * r
                    })
                    .collect()
            };
            [row(0), row(1), row(2), row(3)]
        }
        FieldSystem::Kgf => {
            let c2 = params.c * params.c;
            let we2 = params.omega_e().powi(2);
            let wf2 = params.omega_f().powi(2);
            let lap_psi = derivative(&f[0], 2);
            let lap_phi = derivative(&f[1], 2);
            let acc_psi = (0..n)
                .map(|p| c2 * lap_psi[p] - we2 * (f[0][p] - f[1][p]))
                .collect();
            let acc_phi = (0..n)
                .map(|p| c2 * lap_phi[p] - wf2 * (f[1][p] - f[0][p]))
                .collect();
            [f[2].clone(), f[3].clone(), acc_psi, acc_phi]
        }
    }
}

fn axpy(base: &[Vec<Complex64>; 4], h: f64, k: &[Vec<Complex64>; 4]) -> [Vec<Complex64>; 4] {
    std::array::from_fn(|c| base[c].iter().zip(&k[c]).map(|(b, d)| b + d * h).collect())
}

/// Classical fourth-order Runge–Kutta on the method-of-lines system.
pub fn rk4(
    state: &FieldState,
    dt: f64,
    n_steps: usize,
    params: &QuantumParams,
) -> Result<FieldState, EvolutionError> {
    let n = state.n_grid();
    let bound = rk4_step_bound(n, state.length, params);
    if dt.abs() >= bound {
        return Err(EvolutionError::Cfl { dt, bound });
    }
    let transform = Transform::new(n);
    let ks = wavenumbers(n, state.length);
    let mut f = state.components.clone();
    for _ in 0..n_steps {
        let k1 = rk4_rhs(state.system, &f, &transform, &ks, params);
        let k2 = rk4_rhs(state.system, &axpy(&f, 0.5 * dt, &k1), &transform, &ks, params);
        let k3 = rk4_rhs(state.system, &axpy(&f, 0.5 * dt, &k2), &transform, &ks, params);
        let k4 = rk4_rhs(state.system, &axpy(&f, dt, &k3), &transform, &ks, params);
        for c in 0..4 {
            for p in 0..n {
                f[c][p] += (k1[c][p] + 2.0 * k2[c][p] + 2.0 * k3[c][p] + k4[c][p]) * (dt / 6.0);
            }
        }
    }
    Ok(FieldState {
        system: state.system,
        length: state.length,
        t: state.t + dt * n_steps as f64,
        components: f,
    })
}
