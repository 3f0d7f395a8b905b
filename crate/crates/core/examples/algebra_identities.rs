//! Anticommutation identities of the 4×4 and 8×8 matrix sets, the squares
//! of both Hamiltonians and the spectrum of the eight-component operator.

use dirac8::algebra::{check_algebra, eigenvalues, hamiltonian_d8};
use dirac8::dispersion::branch_energy;
use dirac8::verify::{check_spectrum, check_squaring, VerifyOptions};
use dirac8::{Branch, QuantumParams};

fn main() {
    let params = QuantumParams::natural(0.5);
    let mut report = check_algebra(&params);
    let opts = VerifyOptions::default();
    report.extend(check_squaring(&opts, 100));
    report.extend(check_spectrum(&opts, &[0.25, 0.5, 2.0]));
    println!("{report}\n");

    let p_z = 1.0;
    let mut ev = eigenvalues(&hamiltonian_d8([0.0, 0.0, p_z], &params));
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    println!("eigenvalues of H_D8 at p_z = {p_z}:");
    for l in &ev {
        println!("  {:+.15} {:+.1e}i", l.re, l.im);
    }
    println!("branch energies:");
    for b in Branch::ALL {
        println!("  {b:<10} {:+.15}", branch_energy(b, p_z, &params));
    }
}
