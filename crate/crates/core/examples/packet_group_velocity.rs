//! Gaussian packets on each branch, evolved exactly; the centroid velocity
//! is compared with the analytic group velocity.

use dirac8::dispersion::group_velocity;
use dirac8::evolution::{measure_group_velocity, EvolutionConfig, PacketSpec};
use dirac8::{Branch, QuantumParams, Spin};

fn main() {
    let config = EvolutionConfig::default();
    println!("{:<11} {:>5} {:>5} {:>12} {:>12} {:>10}", "branch", "eps", "k0", "measured", "analytic", "rel_err");
    for epsilon in [0.0, 0.5, 1.0] {
        let params = QuantumParams::natural(epsilon);
        for branch in [Branch::ACOUSTIC_PLUS, Branch::OPTICAL_PLUS, Branch::OPTICAL_MINUS] {
            for k0 in [0.5, 1.0, 2.0] {
                let spec = PacketSpec {
                    k0,
                    sigma: 10.0,
                    branch,
                    spin: Spin::Up,
                    center: 100.0,
                };
                let m = measure_group_velocity(&spec, &config, &params).expect("resolved packet");
                let v = group_velocity(branch, k0, &params);
                println!(
                    "{:<11} {:>5} {:>5} {:>12.6} {:>12.6} {:>10.2e}",
                    branch.to_string(),
                    epsilon,
                    k0,
                    m.velocity,
                    v,
                    (m.velocity / v - 1.0).abs()
                );
            }
        }
    }
}
