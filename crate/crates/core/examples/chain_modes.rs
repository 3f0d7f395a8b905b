//! Normal modes of the mass-in-mass ring: measured frequencies against the
//! discrete dispersion, and convergence toward the continuum limit.

use dirac8::chain::{continuum_convergence, discrete_dispersion, run_mode};
use dirac8::{ChainBranch, ChainParams};

fn main() {
    let params = ChainParams::default();
    println!("{:<9} {:>4} {:>10} {:>18} {:>18} {:>10}", "branch", "mode", "k", "omega_disc", "omega_meas", "rel_err");
    for branch in [ChainBranch::Acoustic, ChainBranch::Optical] {
        for mode in [1, 2, 8, 32] {
            let m = run_mode(&params, 128, mode, branch, 1e-3, 10.0).expect("stable step");
            println!(
                "{:<9} {:>4} {:>10.6} {:>18.12} {:>18.12} {:>10.2e}",
                format!("{branch:?}"),
                mode,
                m.k,
                m.omega_discrete,
                m.omega_measured,
                m.relative_error
            );
        }
    }

    let k = 0.5;
    let fit = continuum_convergence(&params, k, &[0.2, 0.1, 0.05, 0.025]);
    println!("\ncontinuum discrepancy at k = {k}:");
    for (ka, e) in fit.ka.iter().zip(&fit.errors) {
        println!("  ka = {ka:<6} error = {e:.6e}");
    }
    println!("fitted exponent {:.4}", fit.exponent);

    let modes = discrete_dispersion(std::f64::consts::PI / params.period, &params);
    println!(
        "\nzone edge: acoustic {:.6}, optical {:.6}",
        modes.omega(ChainBranch::Acoustic),
        modes.omega(ChainBranch::Optical)
    );
}
