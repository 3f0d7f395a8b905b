//! The eight independent plane-wave solutions at one momentum, their
//! residuals and the independence determinant.

use dirac8::plane_waves::catalog;
use dirac8::QuantumParams;

fn main() {
    let params = QuantumParams::natural(0.5);
    let c = catalog(1.0, &params);
    println!("{:<11} {:<5} {:>20} {:>10}  amplitudes (re)", "branch", "spin", "E", "residual");
    for s in &c.solutions {
        let re: Vec<String> = s.amplitudes.iter().map(|a| format!("{:+.4}", a[0])).collect();
        println!(
            "{:<11} {:<5} {:>20.15} {:>10.1e}  [{}]",
            s.branch,
            s.spin,
            s.energy,
            s.residual,
            re.join(" ")
        );
    }
    println!("|det| = {:.6}, condition number = {:.3}", c.determinant_abs, c.condition_number);
}
