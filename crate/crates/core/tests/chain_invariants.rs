//! Invariants of the mass-in-mass ring simulation.

use std::f64::consts::PI;

use dirac8::chain::{
    characteristic_scales, discrete_dispersion, init_mode, max_frequency, measure_mode_frequency,
    run_mode, simulate, step, total_energy, ChainError, LatticeState,
};
use dirac8::{ChainBranch, ChainParams};

fn params() -> ChainParams {
    ChainParams::default()
}

#[test]
fn long_wave_energy_is_conserved() {
    let p = params();
    let dt = 0.01 / max_frequency(&p);
    let s0 = init_mode(64, 1, 1e-3, ChainBranch::Acoustic, &p).unwrap();
    let e0 = total_energy(&s0, &p);
    let traj = simulate(s0, dt, 10_000, 100, &p).unwrap();
    let drift = traj
        .iter()
        .map(|s| (total_energy(s, &p) - e0).abs() / e0)
        .fold(0.0, f64::max);
    assert!(drift < 1e-6, "{drift}");
}

#[test]
fn generic_state_energy_error_is_bounded_without_drift() {
    let p = params();
    let w = max_frequency(&p);
    let dt = 0.01 / w;
    let n = 32;
    let mut s0 = LatticeState::at_rest(n);
    for i in 0..n {
        let x = i as f64;
        s0.inner[i] = 1e-3 * (0.9 * x).sin() + 5e-4 * (2.3 * x).cos();
        s0.outer[i] = 7e-4 * (1.7 * x).cos();
        s0.inner_velocity[i] = 3e-4 * (0.4 * x).sin();
    }
    let e0 = total_energy(&s0, &p);
    let traj = simulate(s0, dt, 20_000, 50, &p).unwrap();
    let errors: Vec<f64> = traj.iter().map(|s| (total_energy(s, &p) - e0) / e0).collect();
    let bound = (w * dt).powi(2) / 4.0;
    assert!(errors.iter().all(|e| e.abs() <= bound));
    let half = errors.len() / 2;
    let first = errors[..half].iter().sum::<f64>() / half as f64;
    let second = errors[half..].iter().sum::<f64>() / (errors.len() - half) as f64;
    assert!((second - first).abs() < 0.1 * bound);
}

#[test]
fn momentum_is_conserved() {
    let p = params();
    let mut s = init_mode(16, 3, 1e-2, ChainBranch::Optical, &p).unwrap();
    s.inner_velocity[2] = 0.01;
    let momentum = |s: &LatticeState| {
        p.inner_mass * s.inner_velocity.iter().sum::<f64>()
            + p.outer_mass * s.outer_velocity.iter().sum::<f64>()
    };
    let m0 = momentum(&s);
    let dt = 0.05 / max_frequency(&p);
    for _ in 0..2000 {
        s = step(s, dt, &p).unwrap();
    }
    assert!((momentum(&s) - m0).abs() < 1e-14);
}

#[test]
fn verlet_is_time_reversible() {
    let p = params();
    let s0 = init_mode(16, 2, 1e-3, ChainBranch::Optical, &p).unwrap();
    let dt = 0.05 / max_frequency(&p);
    let mut s = s0.clone();
    for _ in 0..500 {
        s = step(s, dt, &p).unwrap();
    }
    s.inner_velocity.iter_mut().for_each(|v| *v = -*v);
    s.outer_velocity.iter_mut().for_each(|v| *v = -*v);
    for _ in 0..500 {
        s = step(s, dt, &p).unwrap();
    }
    for (a, b) in s.inner.iter().zip(&s0.inner) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn unstable_step_is_rejected() {
    let p = params();
    let s = LatticeState::at_rest(4);
    let dt = 2.0 / max_frequency(&p);
    assert!(matches!(step(s.clone(), dt, &p), Err(ChainError::Unstable { .. })));
    assert!(matches!(step(s, -0.1, &p), Err(ChainError::NonPositiveStep(_))));
}

#[test]
fn measured_frequencies_match_dispersion_across_modes() {
    let p = ChainParams::new(1.0, 2.5, 2.0, 0.7, 1.3, 1.0).unwrap();
    for branch in [ChainBranch::Acoustic, ChainBranch::Optical] {
        for mode in [1, 5, 16, 31] {
            let m = run_mode(&p, 64, mode, branch, 1e-3, 10.0).unwrap();
            assert!(m.relative_error < 1e-4, "{branch:?} mode {mode}: {}", m.relative_error);
        }
    }
}

#[test]
fn translation_mode_has_zero_frequency() {
    let m = run_mode(&params(), 32, 0, ChainBranch::Acoustic, 1e-3, 10.0).unwrap();
    assert_eq!(m.omega_discrete, 0.0);
    assert_eq!(m.omega_measured, 0.0);
    assert_eq!(m.trajectory.len(), 1);
}

#[test]
fn decoupled_limit_approaches_optical_frequency() {
    // I = J = 0 and M ≫ m: every optical mode oscillates at sqrt(K/m)·sqrt(1+m/M)
    let p = ChainParams::new(1.0, 1000.0, 2.0, 0.0, 0.0, 1.0).unwrap();
    let s = characteristic_scales(&p);
    for mode in [1, 7] {
        let m = run_mode(&p, 32, mode, ChainBranch::Optical, 1e-3, 10.0).unwrap();
        let rel = (m.omega_measured - s.omega_o).abs() / s.omega_o;
        assert!(rel < s.epsilon.powi(2) + 1e-4, "{rel}");
    }
}

#[test]
fn superposition_reports_the_stronger_mode() {
    let p = params();
    let n = 64;
    let weak = init_mode(n, 3, 2e-4, ChainBranch::Optical, &p).unwrap();
    let strong = init_mode(n, 3, 1e-3, ChainBranch::Acoustic, &p).unwrap();
    let mut s0 = strong.clone();
    for i in 0..n {
        s0.inner[i] += weak.inner[i];
        s0.outer[i] += weak.outer[i];
    }
    let k = 2.0 * PI * 3.0 / n as f64;
    let modes = discrete_dispersion(k, &p);
    let w = modes.omega(ChainBranch::Acoustic);
    let dt = 0.02 / max_frequency(&p);
    let steps = (12.0 * 2.0 * PI / (w * dt)) as usize;
    let traj = simulate(s0, dt, steps, 4, &p).unwrap();
    let measured = measure_mode_frequency(&traj, 0).unwrap();
    assert!((measured - w).abs() / w < 1e-3, "{measured} vs {w}");
}
