//! The full invariant suite behind `dirac8 verify`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::algebra::{
    check_algebra, eigenvalues, hamiltonian_d4, hamiltonian_d8, hamiltonian_d8_squared_closed_form,
    null_space, ComplexMatrix, QuantumParams, DEFAULT_NULL_TOL,
};
use crate::chain::{continuum_convergence, run_mode, ChainBranch, ChainParams};
use crate::dispersion::{
    branch_energy, branch_frequency, continuum_dispersion, dirac_determinant, group_velocity,
    phase_velocity, Branch, BranchKind, ContinuumParams,
};
use crate::evolution::{
    conserved_quadratic, evolve, init_packet, init_plane_wave, kgf_from_dirac,
    measure_group_velocity, EvolutionConfig, FieldState, Method, PacketSpec,
};
use crate::plane_waves::{
    amplitude_determinant, build_solution, catalog_eight, default_sample_points,
    index_swapped_operator, relative_residual, Derivatives, PlaneWaveSolution, Spin,
};
use crate::report::{Check, VerificationReport};
use crate::spectral::peak_frequency_complex;

/// Deliberate faults that the suite must detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// Scales the optical+ `b3/b1` ratio by 1.01.
    OpticalPlusRatio,
    /// Reads the optical continuum branch with a doubled `c²k²` term.
    DoubledWaveTerm,
}

impl FromStr for Corruption {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "optical-plus-ratio" => Ok(Corruption::OpticalPlusRatio),
            "doubled-wave-term" => Ok(Corruption::DoubledWaveTerm),
            _ => Err(format!(
                "unknown corruption `{s}` (expected optical-plus-ratio or doubled-wave-term)"
            )),
        }
    }
}

impl fmt::Display for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Corruption::OpticalPlusRatio => "optical-plus-ratio",
            Corruption::DoubledWaveTerm => "doubled-wave-term",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub params: QuantumParams,
    pub chain: ChainParams,
    pub corruption: Option<Corruption>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            params: QuantumParams::default(),
            chain: ChainParams::default(),
            corruption: None,
            seed: 20_240_917,
        }
    }
}

impl VerifyOptions {
    fn corrupt(&self, solution: &mut PlaneWaveSolution) {
        if self.corruption == Some(Corruption::OpticalPlusRatio)
            && solution.branch == Branch::OPTICAL_PLUS
        {
            let slot = solution.spin.slots()[1];
            solution.amplitudes[slot] *= 1.01;
        }
    }
}

fn with_units(params: &QuantumParams, epsilon: f64) -> QuantumParams {
    params.with_epsilon(epsilon)
}

/// `H_D4² = (m_e²c⁴ + c²|p|²) I` and `H_D8²` closed form over random draws.
pub fn check_squaring(opts: &VerifyOptions, draws: usize) -> VerificationReport {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut worst4 = 0.0f64;
    let mut worst8 = 0.0f64;
    for _ in 0..draws {
        let scale = 5.0 * opts.params.rest_energy() / opts.params.c;
        let p = [0; 3].map(|_| rng.gen_range(-scale..scale));
        let params = with_units(&opts.params, rng.gen_range(0.0..3.0));
        let p2: f64 = p.iter().map(|x| x * x).sum();
        let h4 = hamiltonian_d4(p, &params);
        let expect4 = ComplexMatrix::identity(4)
            .scale(params.rest_energy().powi(2) + params.c * params.c * p2);
        worst4 = worst4.max((&h4 * &h4).max_abs_diff(&expect4) / expect4.max_abs());
        let h8 = hamiltonian_d8(p, &params);
        let expect8 = hamiltonian_d8_squared_closed_form(p, &params);
        worst8 = worst8.max((&h8 * &h8).max_abs_diff(&expect8) / expect8.max_abs());
    }
    let mut r = VerificationReport::new();
    r.push(Check::within(
        "H_D4 squared",
        "H_D4^2 = (m_e^2 c^4 + c^2 |p|^2) I_4",
        worst4,
        1e-12,
    ).with_notes(format!("{draws} random momenta")));
    r.push(Check::within(
        "H_D8 squared",
        "H_D8^2 = m_f^2 c^4 A_{0-}^2 + m_e^2 c^4 A_{0+}^2 + c^2 |p|^2 I_8",
        worst8,
        1e-12,
    ).with_notes(format!("{draws} random momenta and epsilon")));
    r
}

/// Branch energies at rest, the dispersion table anchors and the continuum
/// reading of the optical branch.
pub fn check_dispersion(opts: &VerifyOptions) -> VerificationReport {
    let mut r = VerificationReport::new();
    let p = &opts.params;
    let rest = p.rest_energy();
    for (eps, expect) in [(0.5, 1.25f64.sqrt()), (0.0, 1.0)] {
        let q = with_units(p, eps);
        let e = branch_energy(Branch::OPTICAL_PLUS, 0.0, &q);
        r.push(Check::within(
            format!("optical rest energy, epsilon={eps}"),
            "E_O+(0) = m_e c^2 sqrt(1 + eps^2)",
            (e / rest - expect).abs(),
            1e-12,
        ));
    }
    let mut worst_acoustic = 0.0f64;
    let mut worst_root = 0.0f64;
    for i in 0..=40 {
        let pz = (i as f64 - 20.0) * 0.5 * rest / p.c;
        worst_acoustic = worst_acoustic
            .max((branch_energy(Branch::ACOUSTIC_PLUS, pz, p) - p.c * pz).abs())
            .max((branch_energy(Branch::ACOUSTIC_MINUS, pz, p) + p.c * pz).abs());
        for b in Branch::ALL {
            let d = dirac_determinant(branch_energy(b, pz, p), pz, p);
            worst_root = worst_root.max(d.abs() / rest.powi(4));
        }
    }
    r.push(Check::within(
        "acoustic lines",
        "E_A = +/- c p_z",
        worst_acoustic,
        0.0,
    ));
    r.push(Check::within(
        "determinant roots",
        "(E^2 - c^2 p^2)(E^2 - c^2 p^2 - (1+eps^2) m_e^2 c^4) = 0 on all branches",
        worst_root,
        1e-10,
    ).with_notes("|p| <= 10 m_e c"));

    let cp = ContinuumParams::from_quantum(p);
    let mut worst = 0.0f64;
    for k in [0.1, 0.5, 1.0, 2.0, 5.0].map(|x| x * rest / (p.c * p.hbar)) {
        let roots = continuum_dispersion(k, &cp);
        let wave = if opts.corruption == Some(Corruption::DoubledWaveTerm) {
            2.0 * (p.c * k).powi(2)
        } else {
            (p.c * k).powi(2)
        };
        let optical = wave + cp.omega_o.powi(2) + cp.omega_a.powi(2);
        let from_det = branch_frequency(Branch::OPTICAL_PLUS, k, p).powi(2);
        worst = worst
            .max((optical - from_det).abs() / from_det)
            .max((roots.omega2_optical - from_det).abs() / from_det)
            .max((roots.omega2_acoustic - (p.c * k).powi(2)).abs() / (p.c * k).powi(2));
    }
    r.push(
        Check::within(
            "continuum branches match determinant",
            "Omega_O^2 = c^2 k^2 + omega_O^2 + omega_A^2, Omega_A^2 = c^2 k^2",
            worst,
            1e-12,
        )
        .with_notes("optical branch read with a single c^2 k^2 term; a doubled term contradicts the determinant roots"),
    );

    let mut worst_product = 0.0f64;
    let mut subluminal = true;
    for b in Branch::ALL {
        for k in [0.1, 0.5, 1.0, 2.0, 5.0, -0.7] {
            let kz = k * rest / (p.c * p.hbar);
            let vp = phase_velocity(b, kz, p).expect("nonzero k");
            let vg = group_velocity(b, kz, p);
            worst_product = worst_product.max((vp * vg / (p.c * p.c) - 1.0).abs());
            if b.kind == BranchKind::Optical && vg.abs() >= p.c {
                subluminal = false;
            }
        }
    }
    r.push(Check::within(
        "phase times group velocity",
        "v_p v_g = c^2",
        worst_product,
        1e-12,
    ));
    r.push(Check::within(
        "optical group velocity subluminal",
        "|v_g| < c on optical branches",
        if subluminal { 0.0 } else { 1.0 },
        0.0,
    ));
    r
}

/// Sorted real parts, largest imaginary part and the largest mismatch
/// against the doubled branch energies.
fn spectrum_mismatch(p_z: f64, params: &QuantumParams) -> (f64, f64) {
    let mut ev = eigenvalues(&hamiltonian_d8([0.0, 0.0, p_z], params));
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut expect: Vec<f64> = Branch::ALL
        .iter()
        .flat_map(|&b| [branch_energy(b, p_z, params); 2])
        .collect();
    expect.sort_by(f64::total_cmp);
    let scale = params.rest_energy().max(params.c * p_z.abs());
    let imag = ev.iter().fold(0.0f64, |m, l| m.max(l.im.abs())) / params.rest_energy();
    let real = ev
        .iter()
        .zip(&expect)
        .fold(0.0f64, |m, (l, e)| m.max((l.re - e).abs()))
        / scale;
    (imag, real)
}

/// Real spectrum of the non-Hermitian `H_D8` and its agreement with the
/// branch energies.
pub fn check_spectrum(opts: &VerifyOptions, epsilons: &[f64]) -> VerificationReport {
    let mut r = VerificationReport::new();
    let p = &opts.params;
    let mut worst_im = 0.0f64;
    let mut worst_re = 0.0f64;
    for &eps in epsilons {
        let q = with_units(p, eps);
        for x in [-3.1, -1.0, -0.2, 0.05, 0.5, 1.0, 2.5, 7.0] {
            let (im, re) = spectrum_mismatch(x * q.rest_energy() / q.c, &q);
            worst_im = worst_im.max(im);
            worst_re = worst_re.max(re);
        }
    }
    let eps_list = epsilons
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",");
    r.push(Check::within(
        "H_D8 eigenvalues real",
        "Im(lambda) = 0 for eigenvalues of H_D8(p_z)",
        worst_im,
        1e-10,
    ).with_notes(format!("epsilon in {{{eps_list}}}")));
    r.push(Check::within(
        "H_D8 eigenvalues are branch energies",
        "spec H_D8(p_z) = {+/- c p_z, +/- sqrt(c^2 p_z^2 + (1+eps^2) m_e^2 c^4)} x2",
        worst_re,
        1e-10,
    ));
    if (p.epsilon - 1.0).abs() < 1e-15 {
        let h = hamiltonian_d8([0.3, -0.4, 1.2], p);
        r.push(Check::within(
            "H_D8 Hermitian at epsilon=1",
            "H_D8 = H_D8^dagger when mu_e = mu_f",
            h.max_abs_diff(&h.adjoint()),
            1e-15,
        ));
    }
    r
}

/// `‖v − P v‖/‖v‖` with `P` the orthogonal projector on the null space of `m`.
fn null_space_deviation(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    let basis = null_space(m, DEFAULT_NULL_TOL);
    if basis.is_empty() {
        return 1.0;
    }
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let mut rest = v.to_vec();
    for b in &basis {
        let c: Complex64 = b.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
        rest.iter_mut().zip(b).for_each(|(r, x)| *r -= c * x);
    }
    rest.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() / norm
}

/// Closed-form amplitudes against numerical null vectors of `H_D8 − E·I`
/// over random `(p_z, ε)` draws.
pub fn check_amplitudes(opts: &VerifyOptions, draws: usize) -> VerificationReport {
    let mut rng = StdRng::seed_from_u64(opts.seed ^ 0x5eed);
    let p = &opts.params;
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let pz = rng.gen_range(-5.0..5.0) * p.rest_energy() / p.c;
        let q = with_units(p, rng.gen_range(0.05..2.0));
        let h = hamiltonian_d8([0.0, 0.0, pz], &q);
        for b in Branch::ALL {
            let mut s = build_solution(b, Spin::Up, pz, &q, Complex64::new(1.0, 0.0))
                .expect("unit seed");
            opts.corrupt(&mut s);
            let shifted = &h - &ComplexMatrix::identity(8).scale(s.energy);
            worst = worst.max(null_space_deviation(&shifted, &s.amplitudes));
        }
    }
    let mut r = VerificationReport::new();
    r.push(Check::within(
        "closed-form amplitudes are null vectors",
        "(H_D8(p_z) - E I) a = 0 for the closed-form amplitudes",
        worst,
        1e-10,
    ).with_notes(format!("{draws} random (p_z, epsilon), spin-up sector")));
    r
}

/// Residuals, independence and null-space agreement of the catalog, plus
/// the acoustic− cancellation.
pub fn check_catalog(opts: &VerifyOptions, p_z: f64) -> VerificationReport {
    let mut r = VerificationReport::new();
    let p = &opts.params;
    let mut sols = catalog_eight(p_z, p);
    sols.iter_mut().for_each(|s| opts.corrupt(s));
    let points = default_sample_points();
    let worst = sols
        .iter()
        .map(|s| relative_residual(s, &points, p, Derivatives::Exact))
        .fold(0.0f64, f64::max);
    r.push(Check::within(
        "catalog residuals",
        "i hbar d_t f = rhs(f) for all eight plane waves",
        worst,
        1e-10,
    ).with_notes(format!("p_z={p_z}, relative to m_e c^2 max|a|")));
    let det = amplitude_determinant(&sols).norm();
    r.push(Check::at_least(
        "eight solutions independent",
        "|det[a_1 ... a_8]| > 1e-8",
        det,
        1e-8,
    ));
    let h_up = hamiltonian_d8([0.0, 0.0, p_z], p);
    let h_swapped = index_swapped_operator(p_z, p);
    let mut worst_ns = 0.0f64;
    for s in &sols {
        let h = match s.spin {
            Spin::Up => &h_up,
            Spin::Down => &h_swapped,
        };
        let shifted = h - &ComplexMatrix::identity(8).scale(s.energy);
        worst_ns = worst_ns.max(null_space_deviation(&shifted, &s.amplitudes));
    }
    r.push(Check::within(
        "catalog matches null spaces",
        "a in null(H - E I); index-swapped operator for spin down",
        worst_ns,
        1e-10,
    ));

    let mut rng = StdRng::seed_from_u64(opts.seed ^ 0xacc);
    let s = build_solution(Branch::ACOUSTIC_MINUS, Spin::Up, p_z, p, Complex64::new(1.0, 0.0))
        .expect("unit seed");
    let mut cancel = 0.0f64;
    for _ in 0..100 {
        let t = rng.gen_range(-50.0..50.0);
        let z = rng.gen_range(-50.0..50.0);
        let f = s.field(t, z);
        cancel = cancel.max((f[0] + f[2]).norm()).max((f[4] + f[6]).norm());
    }
    r.push(Check::within(
        "acoustic- waves compensate",
        "Psi_1 + Psi_3 = 0 and Phi_1 + Phi_3 = 0",
        cancel / s.max_amplitude(),
        1e-14,
    ));
    r
}

/// Continuum convergence and time-domain mode frequencies of the chain.
pub fn check_chain(opts: &VerifyOptions) -> VerificationReport {
    let mut r = VerificationReport::new();
    let fit = continuum_convergence(&opts.chain, 0.5, &[0.2, 0.1, 0.05, 0.025]);
    r.push(Check::within(
        "chain continuum convergence order",
        "|Omega_disc^2 - Omega_cont^2| / Omega^2 = O((ka)^2)",
        (fit.exponent - 2.0).abs(),
        0.2,
    ).with_notes(format!("fitted exponent {:.4}", fit.exponent)));
    for branch in [ChainBranch::Acoustic, ChainBranch::Optical] {
        match run_mode(&opts.chain, 64, 2, branch, 1e-3, 10.0) {
            Ok(m) => r.push(Check::within(
                format!("chain {branch:?} mode frequency").to_lowercase(),
                "measured omega = discrete dispersion omega",
                m.relative_error,
                1e-4,
            )),
            Err(e) => r.push(
                Check::within("chain mode frequency", "measured omega", f64::NAN, 1e-4)
                    .with_notes(e.to_string()),
            ),
        }
    }
    r
}

fn phase_rotated(state: &FieldState, energy: f64, t: f64, hbar: f64) -> FieldState {
    let ph = Complex64::from_polar(1.0, -energy * t / hbar);
    FieldState {
        components: state.components.clone().map(|c| c.iter().map(|x| x * ph).collect()),
        t: state.t + t,
        ..state.clone()
    }
}

/// Exact plane-wave phases, reversibility, RK4 order, group velocities and
/// the KGF cross-check.
pub fn check_evolution(opts: &VerifyOptions) -> VerificationReport {
    let mut r = VerificationReport::new();
    let p = &opts.params;
    let length = 200.0 * p.hbar / (p.m_e * p.c);
    let k = 2.0 * PI * 32.0 / length;

    let mut worst_phase = 0.0f64;
    for spin in Spin::BOTH {
        for b in Branch::ALL {
            let sol = build_solution(b, spin, p.hbar * k, p, Complex64::new(1.0, 0.0)).expect("unit seed");
            let s0 = init_plane_wave(&sol, 256, length).expect("grid momentum");
            let t = 13.7 * p.hbar / p.rest_energy();
            match evolve(&s0, t / 10.0, 10, p, Method::SpectralExact) {
                Ok(s1) => {
                    let expect = phase_rotated(&s0, sol.energy, t, p.hbar);
                    worst_phase = worst_phase.max(s1.relative_difference(&expect));
                }
                Err(_) => worst_phase = f64::NAN,
            }
        }
    }
    r.push(Check::within(
        "plane-wave phases under exact evolution",
        "f(t) = f(0) exp(-i E t / hbar)",
        worst_phase,
        1e-10,
    ));

    let unit_t = p.hbar / p.rest_energy();
    let spec = PacketSpec {
        k0: 1.0 / (length / 200.0),
        sigma: 10.0 * length / 200.0,
        branch: Branch::OPTICAL_MINUS,
        spin: Spin::Up,
        center: 0.5 * length,
    };
    let reversal = init_packet(&spec, 512, length, p).and_then(|s0| {
        let fwd = evolve(&s0, 0.5 * unit_t, 40, p, Method::SpectralExact)?;
        let back = evolve(&fwd, -0.5 * unit_t, 40, p, Method::SpectralExact)?;
        let q0 = conserved_quadratic(&s0, p)?;
        let q1 = conserved_quadratic(&fwd, p)?;
        Ok((back.relative_difference(&s0), (q1 - q0).abs() / q0))
    });
    let (rev, quad) = reversal.unwrap_or((f64::NAN, f64::NAN));
    r.push(Check::within(
        "exact evolution is time-reversible",
        "U(-t) U(t) = I",
        rev,
        1e-10,
    ));
    r.push(Check::within(
        "eigenmode quadratic conserved",
        "sum_k |V(k)^-1 f(k)|^2 constant",
        quad,
        1e-12,
    ));

    let rk = init_packet(&PacketSpec { branch: Branch::OPTICAL_PLUS, ..spec }, 256, length, p)
        .and_then(|s0| {
            let t_end = 4.0 * unit_t;
            let exact = evolve(&s0, t_end, 1, p, Method::SpectralExact)?;
            let coarse = evolve(&s0, t_end / 40.0, 40, p, Method::Rk4)?;
            let fine = evolve(&s0, t_end / 80.0, 80, p, Method::Rk4)?;
            Ok(coarse.relative_difference(&exact) / fine.relative_difference(&exact))
        })
        .unwrap_or(f64::NAN);
    r.push(Check::within(
        "rk4 fourth-order convergence",
        "error(dt) / error(dt/2) = 16",
        (rk - 16.0).abs(),
        3.0,
    ).with_notes(format!("ratio {rk:.3}")));

    let config = EvolutionConfig {
        length,
        t_end: 40.0 * unit_t,
        ..EvolutionConfig::default()
    };
    for (branch, tol) in [
        (Branch::ACOUSTIC_PLUS, 1e-3),
        (Branch::OPTICAL_PLUS, 1e-2),
        (Branch::OPTICAL_MINUS, 1e-2),
    ] {
        let packet = PacketSpec { branch, ..spec };
        let expect = group_velocity(branch, packet.k0, p);
        let measured = measure_group_velocity(&packet, &config, p)
            .map(|m| m.velocity)
            .unwrap_or(f64::NAN);
        r.push(Check::within(
            format!("{branch} packet group velocity"),
            "centroid velocity = dOmega/dk",
            (measured / expect - 1.0).abs(),
            tol,
        ).with_notes(format!("measured {measured:.6}, expected {expect:.6}")));
    }

    let kgf = (|| {
        let kz = 2.0 * PI * 16.0 / length;
        let sol = build_solution(Branch::OPTICAL_PLUS, Spin::Up, p.hbar * kz, p, Complex64::new(1.0, 0.0))
            .expect("unit seed");
        let d = init_plane_wave(&sol, 128, length).ok()?;
        let s0 = kgf_from_dirac(&d, p).ok()?;
        let n = 512;
        let dt = 0.25 * unit_t;
        let prop = crate::evolution::SpectralPropagator::new(s0.system, 128, length, p).ok()?;
        let signal: Vec<Complex64> = (0..n)
            .map(|i| prop.advance(&s0, i as f64 * dt).map(|s| s.components[0][5]))
            .collect::<Result<_, _>>()
            .ok()?;
        let omega = peak_frequency_complex(&signal, dt);
        let bin = 2.0 * PI / (n as f64 * dt);
        Some((omega - branch_frequency(Branch::OPTICAL_PLUS, kz, p)).abs() / bin)
    })()
    .unwrap_or(f64::NAN);
    r.push(Check::within(
        "coupled KGF frequency from Dirac data",
        "peak of Psi(t) at Omega_O+(k), within one bin",
        kgf,
        1.0,
    ));
    r
}

/// Every check, in module order.
pub fn run_all(opts: &VerifyOptions) -> VerificationReport {
    let mut r = check_algebra(&opts.params);
    r.extend(check_squaring(opts, 100));
    r.extend(check_dispersion(opts));
    r.extend(check_spectrum(opts, &[0.25, 0.5, 2.0, opts.params.epsilon]));
    r.extend(check_amplitudes(opts, 50));
    r.extend(check_catalog(opts, opts.params.rest_energy() / opts.params.c));
    r.extend(check_chain(opts));
    r.extend(check_evolution(opts));
    r
}
