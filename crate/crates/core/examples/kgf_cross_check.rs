//! Dirac plane-wave data evolved under the coupled second-order system:
//! the dominant frequency of the result is the optical branch frequency.

use std::f64::consts::PI;

use dirac8::dispersion::branch_frequency;
use dirac8::evolution::{init_plane_wave, kgf_from_dirac, SpectralPropagator};
use dirac8::plane_waves::build_solution;
use dirac8::spectral::peak_frequency_complex;
use dirac8::{Branch, QuantumParams, Spin};
use num_complex::Complex64;

fn main() {
    let params = QuantumParams::natural(0.5);
    let (n_grid, length) = (128, 200.0);
    for mode in [4, 16, 40] {
        let k = 2.0 * PI * mode as f64 / length;
        for branch in [Branch::OPTICAL_PLUS, Branch::OPTICAL_MINUS] {
            let sol = build_solution(branch, Spin::Up, k, &params, Complex64::new(1.0, 0.0)).unwrap();
            let dirac = init_plane_wave(&sol, n_grid, length).unwrap();
            let kgf = kgf_from_dirac(&dirac, &params).unwrap();
            let prop = SpectralPropagator::new(kgf.system, n_grid, length, &params).unwrap();
            let dt = 0.25;
            let signal: Vec<Complex64> = (0..512)
                .map(|i| prop.advance(&kgf, i as f64 * dt).unwrap().components[0][mode])
                .collect();
            let measured = peak_frequency_complex(&signal, dt);
            let expected = branch_frequency(branch, k, &params);
            println!(
                "k = {k:.5}  {:<9} measured {measured:+.10}  expected {expected:+.10}",
                branch.to_string()
            );
        }
    }
}
