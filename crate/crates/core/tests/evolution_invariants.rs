//! Invariants of the 1-D field evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use dirac8::dispersion::{branch_frequency, group_velocity};
use dirac8::evolution::{
    conserved_quadratic, evolve, init_packet, init_plane_wave, kgf_from_dirac,
    measure_group_velocity, packet_centroid, packet_width, EvolutionConfig, EvolutionError,
    FieldState, Method, PacketSpec, SpectralPropagator,
};
use dirac8::plane_waves::build_solution;
use dirac8::spectral::peak_frequency_complex;
use dirac8::{Branch, QuantumParams, Spin};

fn packet(branch: Branch, k0: f64) -> PacketSpec {
    PacketSpec {
        k0,
        sigma: 10.0,
        branch,
        spin: Spin::Up,
        center: 100.0,
    }
}

fn shifted(state: &FieldState, cells: usize) -> FieldState {
    FieldState {
        components: state.components.clone().map(|c| {
            let n = c.len();
            (0..n).map(|i| c[(i + n - cells) % n]).collect()
        }),
        ..state.clone()
    }
}

#[test]
fn acoustic_packet_translates_rigidly() {
    let params = QuantumParams::natural(0.5);
    let (n, length) = (512, 200.0);
    let s0 = init_packet(&packet(Branch::ACOUSTIC_PLUS, 1.0), n, length, &params).unwrap();
    // one full lap, then a quarter lap (an integer number of cells)
    let lap = evolve(&s0, length, 1, &params, Method::SpectralExact).unwrap();
    assert!(lap.relative_difference(&s0) < 1e-8);
    let quarter = evolve(&s0, length / 4.0, 1, &params, Method::SpectralExact).unwrap();
    assert!(quarter.relative_difference(&shifted(&s0, n / 4)) < 1e-8);
}

#[test]
fn optical_packet_spreads() {
    let params = QuantumParams::natural(0.5);
    let s0 = init_packet(&packet(Branch::OPTICAL_PLUS, 1.0), 1024, 200.0, &params).unwrap();
    let w0 = packet_width(&s0).unwrap();
    let mut last = w0;
    for t in [10.0, 20.0, 40.0] {
        let w = packet_width(&evolve(&s0, t, 1, &params, Method::SpectralExact).unwrap()).unwrap();
        assert!(w > last, "width {w} at t={t} not above {last}");
        last = w;
    }
    assert!(w0 > 10.0 / 2f64.sqrt());
    let acoustic = init_packet(&packet(Branch::ACOUSTIC_PLUS, 1.0), 1024, 200.0, &params).unwrap();
    assert!((packet_width(&acoustic).unwrap() - 10.0 / 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn group_velocity_over_momenta_and_couplings() {
    let config = EvolutionConfig::default();
    for eps in [0.0, 0.5, 1.0] {
        let params = QuantumParams::natural(eps);
        for k0 in [0.5, 1.0, 2.0] {
            for (branch, tol) in [
                (Branch::ACOUSTIC_PLUS, 1e-3),
                (Branch::ACOUSTIC_MINUS, 1e-3),
                (Branch::OPTICAL_PLUS, 1e-2),
                (Branch::OPTICAL_MINUS, 1e-2),
            ] {
                let v = measure_group_velocity(&packet(branch, k0), &config, &params)
                    .unwrap()
                    .velocity;
                let expect = group_velocity(branch, k0, &params);
                assert!((v / expect - 1.0).abs() < tol, "{branch} eps={eps} k0={k0}: {v} vs {expect}");
            }
        }
    }
}

#[test]
fn stationary_optical_packet() {
    let params = QuantumParams::natural(0.5);
    let m = measure_group_velocity(&packet(Branch::OPTICAL_PLUS, 0.0), &EvolutionConfig::default(), &params)
        .unwrap();
    assert!(m.velocity.abs() < 0.01);
}

#[test]
fn spin_down_packets_move_like_spin_up() {
    let params = QuantumParams::natural(0.5);
    let config = EvolutionConfig::default();
    let up = measure_group_velocity(&packet(Branch::OPTICAL_MINUS, 1.0), &config, &params).unwrap();
    let spec = PacketSpec {
        spin: Spin::Down,
        ..packet(Branch::OPTICAL_MINUS, 1.0)
    };
    let down = measure_group_velocity(&spec, &config, &params).unwrap();
    assert!((up.velocity - down.velocity).abs() < 1e-12);
}

#[test]
fn rk4_and_spectral_agree_on_velocity() {
    let params = QuantumParams::natural(0.5);
    let base = EvolutionConfig {
        n_grid: 512,
        ..EvolutionConfig::default()
    };
    let spectral = measure_group_velocity(&packet(Branch::OPTICAL_PLUS, 1.0), &base, &params).unwrap();
    let rk4 = measure_group_velocity(
        &packet(Branch::OPTICAL_PLUS, 1.0),
        &EvolutionConfig {
            method: Method::Rk4,
            ..base
        },
        &params,
    )
    .unwrap();
    assert!((spectral.velocity - rk4.velocity).abs() < 1e-6);
}

#[test]
fn quadratic_invariant_under_both_methods() {
    let params = QuantumParams::natural(0.7);
    let s0 = init_packet(&packet(Branch::OPTICAL_MINUS, 0.8), 256, 200.0, &params).unwrap();
    let q0 = conserved_quadratic(&s0, &params).unwrap();
    let exact = evolve(&s0, 25.0, 1, &params, Method::SpectralExact).unwrap();
    assert!((conserved_quadratic(&exact, &params).unwrap() / q0 - 1.0).abs() < 1e-12);
    // RK4 damps the invariant at fifth order in the step
    let drift = |dt: f64, steps: usize| {
        let rk = evolve(&s0, dt, steps, &params, Method::Rk4).unwrap();
        1.0 - conserved_quadratic(&rk, &params).unwrap() / q0
    };
    let (coarse, fine) = (drift(0.05, 500), drift(0.025, 1000));
    assert!(coarse > 0.0 && coarse < 2e-6, "{coarse}");
    assert!((coarse / fine).log2() > 4.5, "{coarse} {fine}");
}

#[test]
fn kgf_frequency_matches_optical_branch() {
    let params = QuantumParams::natural(0.5);
    let (n, length) = (64, 200.0);
    for mode in [3, 10] {
        let k = 2.0 * PI * mode as f64 / length;
        let sol = build_solution(Branch::OPTICAL_PLUS, Spin::Up, k, &params, Complex64::new(1.0, 0.0)).unwrap();
        let kgf = kgf_from_dirac(&init_plane_wave(&sol, n, length).unwrap(), &params).unwrap();
        let prop = SpectralPropagator::new(kgf.system, n, length, &params).unwrap();
        let (samples, dt) = (1024, 0.2);
        let signal: Vec<Complex64> = (0..samples)
            .map(|i| prop.advance(&kgf, i as f64 * dt).unwrap().components[1][mode])
            .collect();
        let bin = 2.0 * PI / (samples as f64 * dt);
        let w = peak_frequency_complex(&signal, dt);
        assert!((w - branch_frequency(Branch::OPTICAL_PLUS, k, &params)).abs() < bin);
    }
}

#[test]
fn kgf_evolution_keeps_dirac_plane_waves_on_shell() {
    let params = QuantumParams::natural(0.5);
    let k = 2.0 * PI * 5.0 / 200.0;
    let sol = build_solution(Branch::OPTICAL_MINUS, Spin::Up, k, &params, Complex64::new(1.0, 0.0)).unwrap();
    let d0 = init_plane_wave(&sol, 64, 200.0).unwrap();
    let d1 = evolve(&d0, 7.3, 1, &params, Method::SpectralExact).unwrap();
    let k0 = kgf_from_dirac(&d0, &params).unwrap();
    let k1 = evolve(&k0, 7.3, 1, &params, Method::SpectralExact).unwrap();
    assert!(k1.relative_difference(&kgf_from_dirac(&d1, &params).unwrap()) < 1e-10);
}

#[test]
fn centroid_is_periodic() {
    let params = QuantumParams::natural(0.5);
    let spec = PacketSpec {
        center: 190.0,
        ..packet(Branch::ACOUSTIC_PLUS, 1.0)
    };
    let s0 = init_packet(&spec, 512, 200.0, &params).unwrap();
    assert!((packet_centroid(&s0).unwrap() - 190.0).abs() < 1e-6);
    let s1 = evolve(&s0, 20.0, 1, &params, Method::SpectralExact).unwrap();
    assert!((packet_centroid(&s1).unwrap() - 10.0).abs() < 1e-6);
}

#[test]
fn invalid_setups_are_rejected() {
    let params = QuantumParams::natural(0.5);
    let spec = packet(Branch::OPTICAL_PLUS, 1.0);
    assert!(matches!(init_packet(&spec, 1000, 200.0, &params), Err(EvolutionError::NotPowerOfTwo(1000))));
    let narrow = PacketSpec { sigma: 0.5, ..spec };
    assert!(matches!(init_packet(&narrow, 256, 200.0, &params), Err(EvolutionError::UnderResolved { .. })));
    let s0 = init_packet(&spec, 256, 200.0, &params).unwrap();
    assert!(matches!(evolve(&s0, 1.0, 1, &params, Method::Rk4), Err(EvolutionError::Cfl { .. })));
    let sol = build_solution(Branch::OPTICAL_PLUS, Spin::Up, 0.1, &params, Complex64::new(1.0, 0.0)).unwrap();
    assert!(matches!(init_plane_wave(&sol, 64, 200.0), Err(EvolutionError::NotOnGrid { .. })));
    let config = EvolutionConfig {
        t_end: 400.0,
        ..EvolutionConfig::default()
    };
    assert!(matches!(
        measure_group_velocity(&packet(Branch::ACOUSTIC_PLUS, 1.0), &config, &params),
        Err(EvolutionError::DisplacementTooLarge { .. })
    ));
}
